#pragma once
// Internal propagation and search machinery shared by consistency, homsearch and polymorphism.

#include <cstdint>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab::detail {

using Var = std::uint32_t;

// A template relation prepared for propagation.
struct Table {
    std::size_t arity = 0;
    std::size_t n = 0;
    std::vector<Element> flat;
    std::vector<ValueSet> succ, pred;  // arity 2
    ValueSet unary;                    // arity 1
    std::vector<std::uint64_t> codes;  // sorted, for membership tests
    std::vector<bool> bits;            // dense membership when n^arity is small
    // by_pos[p * n + v]: indices of tuples with value v at position p
    std::vector<std::vector<std::uint32_t>> by_pos;

    std::size_t size() const { return arity ? flat.size() / arity : 0; }
    const Element* tuple(std::size_t i) const { return flat.data() + i * arity; }
    bool contains(const Element* t) const;
    void build_position_index();
};

Table make_table(const std::vector<Tuple>& tuples, std::size_t arity, std::size_t n);

class Propagator {
public:
    virtual ~Propagator() = default;
    virtual std::size_t vars() const = 0;
    // Tighten dom after the variables in `touched` changed; initial=true schedules everything.
    // Returns false on a wipe-out (dom is then unspecified).
    virtual bool propagate(std::vector<ValueSet>& dom, const std::vector<Var>& touched, bool initial) = 0;
};

// Generalised arc consistency over an explicit constraint list, AC-3 style with a FIFO
// worklist of constraints.
class GacNetwork : public Propagator {
public:
    GacNetwork(const Structure& instance, const Structure& tmpl);
    GacNetwork(std::size_t vars, std::vector<Table> tables);

    void add_constraint(std::size_t table, const Var* scope);
    void finish();  // builds incidence lists; called automatically by the Structure constructor

    std::size_t vars() const override { return vars_; }
    std::size_t constraints() const { return rel_.size(); }
    bool propagate(std::vector<ValueSet>& dom, const std::vector<Var>& touched, bool initial) override;

    std::uint64_t revisions = 0;

private:
    bool revise(std::uint32_t c, std::vector<ValueSet>& dom, std::vector<Var>& changed);
    void enqueue(std::uint32_t c);

    std::size_t vars_ = 0;
    std::vector<Table> tables_;
    std::vector<std::uint32_t> rel_, offset_;
    std::vector<std::uint8_t> repeated_;
    std::vector<Var> scopes_;
    std::vector<std::uint32_t> inc_start_, inc_;
    std::vector<std::uint32_t> queue_;
    std::size_t head_ = 0;
    std::vector<std::uint8_t> queued_;
    std::vector<ValueSet> sup_;
};

struct SearchLimits {
    std::size_t max_solutions = 1;
    std::uint64_t node_cap = 0;  // 0: unlimited
};

struct SearchOutcome {
    std::vector<std::vector<Element>> solutions;
    bool complete = true;  // false if node_cap stopped the search early
    std::uint64_t nodes = 0;
};

// Backtracking: smallest list first (ties by index), values ascending, propagate after each pin.
SearchOutcome backtrack(Propagator& p, std::vector<ValueSet> dom, const SearchLimits& lim);

}  // namespace homlab::detail
