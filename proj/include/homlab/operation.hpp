#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab {

// k-ary operation on 0..n-1; the table is indexed by the base-n code of the argument
// tuple, first argument most significant.
class Operation {
public:
    Operation() = default;
    Operation(std::size_t arity, std::size_t domain, std::string name = {});
    Operation(std::size_t arity, std::size_t domain, std::vector<Element> table, std::string name = {});

    template <class F>
    static Operation from_function(std::size_t arity, std::size_t domain, F f, std::string name = {}) {
        Operation op(arity, domain, std::move(name));
        for (std::size_t c = 0; c < op.table_.size(); ++c) op.table_[c] = f(decode_tuple(c, arity, domain));
        return op;
    }

    std::size_t arity() const { return arity_; }
    std::size_t domain() const { return domain_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    const std::vector<Element>& table() const { return table_; }
    std::vector<Element>& table() { return table_; }

    Element operator()(const Tuple& args) const { return table_[encode_tuple(args.data(), arity_, domain_)]; }
    Element operator()(std::initializer_list<Element> args) const;
    Element at(std::size_t code) const { return table_[code]; }

    bool operator==(const Operation& o) const {
        return arity_ == o.arity_ && domain_ == o.domain_ && table_ == o.table_;
    }

private:
    std::size_t arity_ = 0, domain_ = 0;
    std::vector<Element> table_;
    std::string name_;
};

using OperationMap = std::map<std::string, Operation>;

Operation parse_operation(std::istream& in);
Operation parse_operation(const std::string& text);
// several `op ... end` blocks, keyed by name
OperationMap parse_operations(const std::string& text);
void write_operation(std::ostream& out, const Operation& op);
std::string to_text(const Operation& op);

// common operations
Operation projection(std::size_t arity, std::size_t index, std::size_t domain);
Operation min_operation(std::size_t domain);                 // binary
Operation max_operation(std::size_t domain);                 // binary
Operation median_operation(std::size_t domain);              // ternary
Operation affine_maltsev(std::size_t domain);                // x - y + z mod n
Operation boolean_majority();
Operation boolean_minority();
Operation constant_operation(std::size_t arity, std::size_t domain, Element value);

// (x_1..x_l) -> s(t(x), t(rot x), ..., t(rot^{k-1} x)) for s k-ary, t l-ary
Operation cyclic_composition(const Operation& s, const Operation& t);

bool is_polymorphism(const Operation& f, const Structure& b);
bool preserves(const Operation& f, std::size_t n, const std::vector<Tuple>& relation, std::size_t arity);
bool is_essentially_unary(const Operation& f);
bool is_idempotent(const Operation& f);

}  // namespace homlab
