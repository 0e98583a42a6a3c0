#pragma once

#include <optional>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

// L(a) for every instance variable a. Template domains are limited to 64 values.
class UnaryLists {
public:
    UnaryLists() = default;
    UnaryLists(std::size_t vars, std::size_t domain);
    static UnaryLists full(std::size_t vars, std::size_t domain) { return UnaryLists(vars, domain); }

    std::size_t vars() const { return lists_.size(); }
    std::size_t domain() const { return domain_; }
    ValueSet& operator[](std::size_t a) { return lists_[a]; }
    const ValueSet& operator[](std::size_t a) const { return lists_[a]; }
    std::vector<ValueSet>& sets() { return lists_; }
    const std::vector<ValueSet>& sets() const { return lists_; }

    void fix(Element a, Element value) { lists_[a] &= ValueSet::single(value); }
    bool rejected() const;
    bool subset_of(const UnaryLists& o) const;
    bool operator==(const UnaryLists&) const = default;

private:
    std::size_t domain_ = 0;
    std::vector<ValueSet> lists_;
};

// L(x,y) ⊆ B² for every ordered pair of instance variables; bit u*n+v encodes (u,v).
// Template domains are limited to 8 values.
class PairLists {
public:
    PairLists() = default;
    PairLists(std::size_t vars, std::size_t domain);

    std::size_t vars() const { return vars_; }
    std::size_t domain() const { return domain_; }
    ValueSet& at(std::size_t x, std::size_t y) { return lists_[x * vars_ + y]; }
    const ValueSet& at(std::size_t x, std::size_t y) const { return lists_[x * vars_ + y]; }
    bool has(std::size_t x, std::size_t y, Element u, Element v) const { return at(x, y).contains(u * domain_ + v); }
    bool rejected() const;
    bool operator==(const PairLists&) const = default;

private:
    std::size_t vars_ = 0, domain_ = 0;
    std::vector<ValueSet> lists_;
};

// Generalised arc consistency. nullopt means REJECT.
std::optional<UnaryLists> ac(const Structure& instance, const Structure& tmpl, const UnaryLists& init);
std::optional<UnaryLists> ac(const Structure& instance, const Structure& tmpl);

// Strong path consistency on digraphs. nullopt means REJECT.
std::optional<PairLists> pc(const Structure& instance, const Structure& tmpl);
std::optional<PairLists> pc(const Structure& instance, const Structure& tmpl, const UnaryLists& init);

// Runs the composition rule from the given lists; used by the majority test's pin loop.
// Only pairs touching `dirty` variables are scheduled first.
bool pc_propagate(PairLists& lists, const std::vector<std::size_t>& dirty);

bool k_consistency(const Structure& instance, const Structure& tmpl, std::size_t k, const Limits& lim = {});

std::optional<UnaryLists> sac(const Structure& instance, const Structure& tmpl, const UnaryLists& init);
std::optional<UnaryLists> sac(const Structure& instance, const Structure& tmpl);

}  // namespace homlab
