#pragma once

#include <functional>
#include <optional>

#include "homlab/consistency.hpp"
#include "homlab/structure.hpp"

namespace homlab {

// Exhaustive oracle: plain backtracking without propagation.
std::optional<Mapping> brute_force_hom(const Structure& instance, const Structure& tmpl, const UnaryLists& init,
                                       const Limits& lim = {});
std::optional<Mapping> brute_force_hom(const Structure& instance, const Structure& tmpl, const Limits& lim = {});

// Backtracking with arc consistency maintained after every pin.
std::optional<Mapping> search_hom(const Structure& instance, const Structure& tmpl, const UnaryLists& init);
std::optional<Mapping> search_hom(const Structure& instance, const Structure& tmpl);

struct AllHoms {
    std::vector<Mapping> maps;
    bool complete = true;  // false when the cap cut the enumeration short
};
// Up to `cap` homomorphisms in search order.
AllHoms all_homs(const Structure& instance, const Structure& tmpl, const UnaryLists& init, std::size_t cap);

// Decision procedure for the precoloured problem: true = accept.
using Oracle = std::function<bool(const Structure&, const Structure&, const UnaryLists&)>;

struct Construction {
    std::optional<Mapping> map;
    std::size_t oracle_calls = 0;
};

// Pins variables one by one, keeping the first value the oracle accepts. Throws
// OracleInconsistency if the oracle accepted a state from which no pin survives or whose
// final assignment is not a homomorphism.
Construction construct_solution(const Structure& instance, const Structure& tmpl, const Oracle& oracle);

Oracle ac_oracle();
Oracle pc_oracle();
Oracle sac_oracle();
Oracle brute_force_oracle();
Oracle search_oracle();

}  // namespace homlab
