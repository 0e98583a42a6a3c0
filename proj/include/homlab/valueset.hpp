#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>

namespace homlab {

using Element = std::uint32_t;

// Subset of 0..63 packed in a machine word. Template domains are capped at 64.
class ValueSet {
public:
    static constexpr std::size_t capacity = 64;

    constexpr ValueSet() = default;
    constexpr explicit ValueSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr ValueSet full(std::size_t n) {
        return ValueSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }
    static constexpr ValueSet single(Element v) { return ValueSet(std::uint64_t{1} << v); }

    constexpr bool contains(Element v) const { return v < 64 && ((bits_ >> v) & 1U); }
    constexpr void insert(Element v) { bits_ |= std::uint64_t{1} << v; }
    constexpr void erase(Element v) { bits_ &= ~(std::uint64_t{1} << v); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool is_singleton() const { return bits_ != 0 && (bits_ & (bits_ - 1)) == 0; }
    constexpr Element min() const { return static_cast<Element>(std::countr_zero(bits_)); }
    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool subset_of(ValueSet o) const { return (bits_ & ~o.bits_) == 0; }

    constexpr ValueSet operator&(ValueSet o) const { return ValueSet(bits_ & o.bits_); }
    constexpr ValueSet operator|(ValueSet o) const { return ValueSet(bits_ | o.bits_); }
    constexpr ValueSet& operator&=(ValueSet o) { bits_ &= o.bits_; return *this; }
    constexpr ValueSet& operator|=(ValueSet o) { bits_ |= o.bits_; return *this; }
    constexpr bool operator==(const ValueSet&) const = default;

    class iterator {
    public:
        constexpr explicit iterator(std::uint64_t b) : b_(b) {}
        constexpr Element operator*() const { return static_cast<Element>(std::countr_zero(b_)); }
        constexpr iterator& operator++() { b_ &= b_ - 1; return *this; }
        constexpr bool operator!=(const iterator& o) const { return b_ != o.b_; }
        constexpr bool operator==(const iterator& o) const { return b_ == o.b_; }

    private:
        std::uint64_t b_;
    };
    constexpr iterator begin() const { return iterator(bits_); }
    constexpr iterator end() const { return iterator(0); }

    std::string to_string() const;

private:
    std::uint64_t bits_ = 0;
};

}  // namespace homlab
