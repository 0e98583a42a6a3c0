#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "homlab/operation.hpp"

namespace homlab {

// symbol(v_1,...,v_k), or a bare variable when symbol < 0 (then vars has one entry)
struct Term {
    int symbol = -1;
    std::vector<std::size_t> vars;
    bool bare() const { return symbol < 0; }
};

struct Identity {
    Term lhs, rhs;
    std::vector<std::string> var_names;  // variables are local to the identity
    std::size_t var_count() const { return var_names.size(); }
};

struct OpSymbol {
    std::string name;
    std::size_t arity;
};

// Linear identities over a fixed set of operation symbols.
class IdentitySystem {
public:
    IdentitySystem() = default;

    std::size_t add_symbol(const std::string& name, std::size_t arity);
    // sides in the text syntax, e.g. add("t(x,x,y)", "x")
    void add(const std::string& lhs, const std::string& rhs);

    const std::vector<OpSymbol>& symbols() const { return symbols_; }
    const std::vector<Identity>& identities() const { return ids_; }
    int symbol_index(const std::string& name) const;
    bool has_bare_side() const;

    // `sym t 3 ; id t(x,x,y) = t(x,y,x) ; id t(y,x,x) = x`
    static IdentitySystem parse(const std::string& text);
    std::string to_string() const;

private:
    Term parse_term(const std::string& s, std::vector<std::string>& vars) const;
    std::string term_string(const Term& t, const Identity& id) const;

    std::vector<OpSymbol> symbols_;
    std::vector<Identity> ids_;
};

// true iff every identity holds for all values of its variables
bool check_identities(const OperationMap& ops, const IdentitySystem& sys);

namespace identities {

IdentitySystem majority();
IdentitySystem quasi_majority();
IdentitySystem maltsev();
IdentitySystem minority();
IdentitySystem commutative_idempotent();   // f(x,y)=f(y,x), f(x,x)=x
IdentitySystem totally_symmetric(std::size_t k);
IdentitySystem cyclic(std::size_t k);
IdentitySystem wnu(std::size_t k);
IdentitySystem wnu_3_4();                  // symbols f (3) and g (4)
IdentitySystem siggers4();
IdentitySystem siggers6();
IdentitySystem pq();                       // symbols p, q
IdentitySystem near_unanimity(std::size_t k);
IdentitySystem quasi_near_unanimity(std::size_t k);

}  // namespace identities

}  // namespace homlab
