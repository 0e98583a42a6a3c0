#pragma once

#include <optional>
#include <string>
#include <vector>

#include "homlab/consistency.hpp"
#include "homlab/identities.hpp"
#include "homlab/limits.hpp"
#include "homlab/operation.hpp"

namespace homlab {

// A power of the template per symbol, glued by the identities. Element c of `instance`
// is a class of raw elements; raw element offsets[s] + code(a_1..a_k) stands for
// symbol s evaluated at (a_1..a_k).
struct Indicator {
    Structure instance;
    UnaryLists lists;                  // precolouring; an empty list means the system is unsatisfiable
    std::vector<std::size_t> offsets;  // per symbol, into class_of
    std::vector<std::uint32_t> class_of;
};

Indicator indicator_instance(const Structure& b, const IdentitySystem& sys, bool idempotent, const Limits& lim = {});

// Operations read off a solution of the indicator instance.
OperationMap operations_from_solution(const Structure& b, const IdentitySystem& sys, const Indicator& ind,
                                      const std::vector<Element>& solution);

std::optional<OperationMap> find_polymorphism(const Structure& b, const IdentitySystem& sys, bool idempotent,
                                              const Limits& lim = {});

// All solutions up to `cap`; complete=false when the cap was reached.
struct PolymorphismList {
    std::vector<OperationMap> found;
    bool complete = true;
};
PolymorphismList all_polymorphisms(const Structure& b, const IdentitySystem& sys, bool idempotent, std::size_t cap,
                                   const Limits& lim = {});

enum class Special {
    Majority,
    QuasiMajority,
    Maltsev,
    Minority,
    Semilattice,
    TotallySymmetric,
    Cyclic,
    Wnu,
    Wnu34,
    Siggers4,
    Siggers6,
    PQ,
    NearUnanimity,
    QuasiNearUnanimity,
};

std::optional<Special> special_from_name(const std::string& name);
std::string special_name(Special kind);
// arity is used by the parametrised kinds (totally symmetric, cyclic, wnu, nu)
IdentitySystem special_system(Special kind, std::size_t arity = 0);

enum class SearchVerdict { Found, None, Inconclusive };

struct SpecialResult {
    SearchVerdict verdict = SearchVerdict::None;
    OperationMap ops;
    std::string note;
};

struct SpecialOptions {
    std::size_t arity = 0;
    bool idempotent = false;
    std::size_t semilattice_cap = 10000;  // commutative idempotent candidates inspected for associativity
};

SpecialResult find_special(const Structure& b, Special kind, const SpecialOptions& opt = {}, const Limits& lim = {});

// Majority test by path consistency on H^3 with pinning.
struct MajorityTest {
    bool yes = false;
    std::optional<Operation> witness;
};
MajorityTest majority_test_pc(const Structure& h);

}  // namespace homlab
