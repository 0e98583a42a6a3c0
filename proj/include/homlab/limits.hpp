#pragma once

#include <cstddef>
#include <cstdint>

namespace homlab {

// Caps for the exponential parts of the library. Exceeding one throws GuardExceeded.
struct Limits {
    std::size_t domain = 12;             // exhaustive isomorphism / automorphism / core searches
    std::size_t powerset_domain = 10;    // P(B) has 2^n - 1 elements; may be raised to 16
    std::size_t arity = 8;               // operation arity for indicator searches
    std::uint64_t states = 4'000'000;    // materialised tuples / elements
    std::uint64_t brute_force = 2'000'000'000;  // assignments for the exhaustive oracle
};

}  // namespace homlab
