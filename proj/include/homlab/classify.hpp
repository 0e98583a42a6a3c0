#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homlab/core.hpp"
#include "homlab/operation.hpp"
#include "homlab/polymorphism.hpp"

namespace homlab {

enum class Complexity { P, NPComplete, Inconclusive };
std::string complexity_name(Complexity c);  // "P", "NP-complete", "INCONCLUSIVE"

// A classifier's answer with whatever certificates back it. Exhausted polymorphism
// searches count as proofs: the search is complete.
struct Verdict {
    Complexity complexity = Complexity::Inconclusive;
    std::string classifier;
    std::string reason;

    OperationMap ops;                     // polymorphisms of `ops_on`
    std::optional<Special> ops_satisfy;   // identities the ops satisfy
    std::size_t ops_arity = 0;
    std::optional<Structure> ops_on;

    std::optional<std::vector<Element>> colouring;
    std::optional<Element> loop;
    std::optional<std::vector<Element>> odd_cycle;
    std::optional<CoreResult> core;

    std::vector<std::string> classes;   // Schaefer classes that apply
    std::vector<std::string> failures;  // why each Schaefer operation fails
};

// Re-validates every certificate in v against b. Inconclusive verdicts pass trivially.
bool check_certificate(const Verdict& v, const Structure& b);

// First line "<verdict>: <reason>", then one certificate item per line; operations use the
// operation text format and structures the structure format.
std::string report(const Verdict& v);

Verdict schaefer(const Structure& b);
Verdict hell_nesetril(const Structure& h);
Verdict smooth_digraph(const Structure& h, const Limits& lim = {});
Verdict dichotomy(const Structure& b, const Limits& lim = {});

struct WidthVerdict {
    std::optional<bool> bounded;  // nullopt when a guard stopped the search
    std::string reason;
    OperationMap ops;             // f and g on the core
    std::optional<CoreResult> core;
};
WidthVerdict bounded_width(const Structure& b, const Limits& lim = {});
std::string report(const WidthVerdict& v);

struct CyclicProfile {
    std::map<std::size_t, SpecialResult> by_arity;  // 2..max_arity
    std::vector<std::size_t> arities() const;       // those with a cyclic polymorphism
};
CyclicProfile cyclic_arity_profile(const Structure& b, std::size_t max_arity, const Limits& lim = {});

}  // namespace homlab
