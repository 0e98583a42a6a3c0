#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homlab/limits.hpp"
#include "homlab/operation.hpp"
#include "homlab/structure.hpp"

namespace homlab {

struct PPAtom {
    enum class Kind { Relation, Equal, True, False };
    Kind kind = Kind::True;
    std::string symbol;              // Relation only
    std::vector<std::string> vars;   // Relation: arguments; Equal: the two sides
    bool operator==(const PPAtom&) const = default;
};

// ∃ bound_vars (atom_1 ∧ ... ∧ atom_m), free variables in order
struct PPFormula {
    std::vector<std::string> free_vars;
    std::vector<std::string> bound_vars;
    std::vector<PPAtom> atoms;

    bool has_false() const;
    bool operator==(const PPFormula&) const = default;
};

PPAtom rel_atom(std::string symbol, std::vector<std::string> vars);
PPAtom eq_atom(std::string x, std::string y);

// Throws FormatError for scoping problems and SignatureMismatch for unknown symbols or
// wrong arities. The signature check is skipped when sig is null.
void check_formula(const PPFormula& phi, const Signature* sig = nullptr);

// pp free x1 x2 ; exists y1 ; E(x1,y1) & y1 = x2
PPFormula parse_pp(const std::string& text);
std::string to_text(const PPFormula& phi);

// sorted, duplicate free
struct Relation {
    std::size_t arity = 0;
    std::size_t domain = 0;
    std::vector<Tuple> tuples;

    Relation() = default;
    Relation(std::size_t arity, std::size_t domain, std::vector<Tuple> tuples);
    bool contains(const Tuple& t) const;
    std::size_t size() const { return tuples.size(); }
    bool operator==(const Relation&) const = default;
};

Relation relation_of(const Structure& b, const std::string& symbol);
Relation diagonal_relation(std::size_t domain);

// Bound variables are named v0, v1, ... after the elements.
PPFormula canonical_query(const Structure& a);

struct CanonicalDatabase {
    Structure structure;
    std::vector<Element> element_of;  // per variable, free variables first, then bound
};

// Equalities are eliminated by substituting the later variable with the earlier one.
// Relation symbols not in sig are appended to it. Throws Error if phi contains FALSE.
CanonicalDatabase canonical_database_full(const PPFormula& phi, const Signature& sig = {});
Structure canonical_database(const PPFormula& phi, const Signature& sig = {});

// Assignment in free-variable order, or by name.
bool evaluate(const PPFormula& phi, const Structure& b, const std::vector<Element>& assignment);
bool evaluate(const PPFormula& phi, const Structure& b, const std::map<std::string, Element>& assignment);

Relation defined_relation(const PPFormula& phi, const Structure& b, const Limits& lim = {});

// least superset of r closed under every operation, applied componentwise
Relation closure(const Relation& r, const std::vector<Operation>& ops, const Limits& lim = {});

struct PPDefinability {
    bool definable = false;
    std::optional<PPFormula> witness;     // when definable; defines r exactly in b
    std::optional<Operation> violation;   // when not; a polymorphism of b not preserving r
};

struct PPOptions {
    std::size_t refute_arity = 3;
    std::size_t refute_choices = 64;      // tuple choices tried per arity in the refuter
    std::uint64_t power_cap = 1'000'000;  // largest B^w built for the witness
};

PPDefinability is_pp_definable(const Relation& r, const Structure& b, const PPOptions& opt = {});

struct PPReduction {
    Structure instance;
    bool contradictory = false;  // the definition contains FALSE and is used at least once
};

// Replaces every `symbol` constraint of the instance by a fresh copy of the definition.
// The result is over target's signature; other instance symbols must occur there.
PPReduction pp_reduce_instance(const Structure& instance, const std::string& symbol, const PPFormula& definition,
                               const Signature& target);

// C^[d]: domain C^d, a unary R' per relation R (tuples whose prefix lies in R), and binary
// E_i_j = {(a,b) : a_i = b_j} for 1 <= i,j <= d.
struct BinaryEncoding {
    Structure structure;
    std::size_t d = 0;
    std::size_t base = 0;                // |C|
    Signature source;

    // Elements: instance elements first, then one per constraint tuple.
    Structure translate(const Structure& instance) const;
    // first coordinates of the images of the instance elements
    Mapping decode(const Structure& instance, const Mapping& solution) const;
    // a solution of translate(instance) built from a solution of instance
    Mapping encode(const Structure& instance, const Mapping& solution) const;
};

BinaryEncoding binary_encoding(const Structure& c, std::size_t d, const Limits& lim = {});

}  // namespace homlab
