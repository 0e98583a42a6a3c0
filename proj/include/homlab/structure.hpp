#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "homlab/limits.hpp"
#include "homlab/valueset.hpp"

namespace homlab {

using Tuple = std::vector<Element>;

struct Symbol {
    std::string name;
    std::size_t arity = 0;
    bool operator==(const Symbol&) const = default;
};

class Signature {
public:
    Signature() = default;
    Signature(std::initializer_list<Symbol> syms) : symbols_(syms) {}
    explicit Signature(std::vector<Symbol> syms) : symbols_(std::move(syms)) {}

    std::size_t add(std::string name, std::size_t arity);
    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // throws if absent

    std::size_t size() const { return symbols_.size(); }
    const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<Symbol>& symbols() const { return symbols_; }
    std::size_t max_arity() const;

    bool operator==(const Signature&) const = default;

private:
    std::vector<Symbol> symbols_;
};

// Finite relational structure on 0..size-1. Relations are kept as tuple lists;
// normalize() sorts and removes duplicates. Everything built by the library is normalized.
class Structure {
public:
    Structure() = default;
    Structure(std::size_t size, Signature sig, std::string name = {});

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    std::size_t size() const { return size_; }
    const Signature& signature() const { return sig_; }

    std::size_t add_symbol(std::string name, std::size_t arity);
    void add_tuple(std::size_t rel, Tuple t);
    void add_tuple(const std::string& rel, Tuple t);

    const std::vector<Tuple>& tuples(std::size_t rel) const { return rels_[rel]; }
    const std::vector<Tuple>& tuples(const std::string& rel) const;
    std::vector<Tuple>& mutable_tuples(std::size_t rel) { sorted_ = false; return rels_[rel]; }

    bool contains(std::size_t rel, const Tuple& t) const;
    std::size_t tuple_count() const;

    void normalize();
    bool operator==(const Structure& o) const;

private:
    std::string name_;
    std::size_t size_ = 0;
    Signature sig_;
    std::vector<std::vector<Tuple>> rels_;
    bool sorted_ = true;
};

struct Mapping {
    std::vector<Element> table;
    std::size_t target_size = 0;

    std::size_t source_size() const { return table.size(); }
    Element operator()(Element x) const { return table[x]; }
    bool operator==(const Mapping&) const = default;
};

struct Violation {
    enum class Kind { EntryOutOfRange, ArityMismatch, DuplicateSymbol, DuplicateTuple, ZeroArity, EmptyDomain };
    Kind kind;
    std::string message;
};

std::vector<Violation> validate(const Structure& s);

// Relation i of instance -> relation of tmpl with the same name. Missing relations in
// the instance are allowed (they are empty); unknown names or arity clashes throw.
std::vector<std::size_t> signature_map(const Structure& instance, const Structure& tmpl);

bool is_homomorphism(const Structure& a, const Structure& b, const Mapping& h);
Structure image_structure(const Structure& a, const Mapping& h);  // relations pushed forward

// Constructions. Pairs (i,j) are flattened as i*b.size()+j; powers are base-n positional
// with the first coordinate most significant.
Structure direct_product(const Structure& a, const Structure& b);
Structure power(const Structure& a, std::size_t k, const Limits& lim = {});
Structure disjoint_union(const Structure& a, const Structure& b);
Structure induced_substructure(const Structure& a, const std::vector<Element>& elems);
Structure contract(const Structure& g, Element u, Element v);
Structure with_singletons(const Structure& a);  // adds unary C<i> = {i} for every element
Structure reduct(const Structure& a, const Signature& keep);

std::size_t encode_tuple(const Element* t, std::size_t k, std::size_t n);
Tuple decode_tuple(std::size_t code, std::size_t k, std::size_t n);
std::size_t ipow(std::size_t base, std::size_t exp);
// base^exp, or nullopt if it exceeds cap
std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap);

// digraph helpers; all use the single binary symbol E
Signature digraph_signature();
Structure digraph(std::size_t n, const std::vector<std::pair<Element, Element>>& edges, std::string name = {});
bool is_digraph(const Structure& s);
Structure complete_graph(std::size_t n);      // K_n, symmetric, loopless
Structure cycle_graph(std::size_t n);         // C_n, symmetric
Structure directed_cycle(std::size_t n);
Structure directed_path(std::size_t edges);   // P_k with k edges
Structure transitive_tournament(std::size_t n);  // T_n, u -> v iff u < v
Structure loop_graph();

struct DigraphPredicates {
    bool has_loop = false;
    bool is_symmetric = false;
    bool is_bipartite = false;
    bool is_smooth = false;
    bool is_disjoint_union_of_directed_cycles = false;
};
DigraphPredicates structure_predicates(const Structure& g);

// colouring of the undirected shadow with colours 0/1, if one exists
std::optional<std::vector<Element>> two_colouring(const Structure& g);
std::optional<std::vector<Element>> odd_cycle(const Structure& g);
std::size_t weak_component_count(const Structure& g);

}  // namespace homlab
