#pragma once

#include <optional>
#include <vector>

#include "homlab/limits.hpp"
#include "homlab/operation.hpp"

namespace homlab {

// (i,a,b): two tuples agree on positions 1..i-1 and carry a and b at position i.
// Positions are 1-based here; index sequences elsewhere in this header are 0-based.
struct Fork {
    std::size_t position;
    Element a, b;
    auto operator<=>(const Fork&) const = default;
};

struct CompactRep {
    std::size_t arity = 0;
    std::vector<Tuple> tuples;
    bool empty() const { return tuples.empty(); }
};

std::vector<Fork> forks(const std::vector<Tuple>& r, std::size_t arity);
CompactRep compact_representation(const std::vector<Tuple>& r, std::size_t arity);

// e_{i,a}: zero everywhere except a at position i; represents A^n
CompactRep full_representation(std::size_t arity, std::size_t domain);

// Throws unless m is a ternary Maltsev operation.
void require_maltsev(const Operation& m);

// <rep>_m, sorted
std::vector<Tuple> closure_under_maltsev(const CompactRep& rep, const Operation& m, const Limits& lim = {});

// a tuple t of <rep>_m with (t_{i_1},...,t_{i_k}) in s
std::optional<Tuple> nonempty(const CompactRep& rep, const std::vector<std::size_t>& idx, const std::vector<Tuple>& s,
                              const Operation& m);

// representation of <rep>_m ∩ ({c_1} x ... x {c_k} x A^{n-k})
CompactRep fix_values(const CompactRep& rep, const std::vector<Element>& c, const Operation& m);

// representation of {t in <rep>_m : (t_{i_1},...,t_{i_k}) in s}
CompactRep next(const CompactRep& rep, const std::vector<std::size_t>& idx, const std::vector<Tuple>& s,
                const Operation& m);

struct MaltsevSolution {
    std::optional<Mapping> map;
    std::vector<CompactRep> stages;  // representation after each constraint
};

// Bulatov-Dalmau: constraints are added one at a time in input order.
MaltsevSolution solve_maltsev(const Structure& instance, const Structure& tmpl, const Operation& m);

}  // namespace homlab
