#pragma once

#include <optional>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

// Bijections a -> b mapping every relation onto itself. Capped by lim.domain.
std::optional<Mapping> find_isomorphism(const Structure& a, const Structure& b, const Limits& lim = {});
bool isomorphic(const Structure& a, const Structure& b, const Limits& lim = {});

// All automorphisms in lexicographic order of their tables; at most `max_count`.
std::vector<Mapping> automorphisms(const Structure& a, const Limits& lim = {}, std::size_t max_count = 1'000'000);

// Orbits of A^k under the automorphism group. Tuples are base-n codes; each class is sorted
// and classes are ordered by their smallest member.
std::vector<std::vector<std::size_t>> orbits(const Structure& a, std::size_t k, const Limits& lim = {});

struct CoreResult {
    Structure core;                 // induced substructure on `elements`, renumbered
    std::vector<Element> elements;  // lexicographically least image set of minimal size
    Mapping retraction;             // endomorphism of a, identity on `elements`
};

CoreResult core(const Structure& a, const Limits& lim = {});
bool is_core(const Structure& a, const Limits& lim = {});

}  // namespace homlab
