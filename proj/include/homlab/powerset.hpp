#pragma once

#include <optional>
#include <vector>

#include "homlab/core.hpp"
#include "homlab/limits.hpp"
#include "homlab/operation.hpp"

namespace homlab {

// P(B): element m-1 is the nonempty subset with bitmask m.
Structure powerset_structure(const Structure& b, const Limits& lim = {});
std::uint64_t subset_mask(Element e);
Element powerset_element(std::uint64_t mask);

struct AcSolvability {
    bool solvable = false;
    CoreResult core;
    std::optional<Mapping> hom;  // P(core) -> core, when solvable
    // pins adopted by the pin loop, in order; `stuck` is the element of P(core) for
    // which every value was rejected
    std::vector<std::pair<Element, Element>> pins;
    std::optional<Element> stuck;
    bool rejected_initially = false;
};

// true iff P(core(b)) -> core(b), i.e. arc consistency solves CSP(b)
AcSolvability ac_solvability(const Structure& b, const Limits& lim = {});

// f(x_1..x_k) = hom({x_1..x_k}) for a homomorphism hom: P(b) -> b
Operation extract_totally_symmetric(const Structure& b, const Mapping& hom, std::size_t k, const Limits& lim = {});

}  // namespace homlab
