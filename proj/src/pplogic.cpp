#include "homlab/pplogic.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "homlab/consistency.hpp"
#include "homlab/error.hpp"
#include "homlab/homsearch.hpp"

namespace homlab {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-' || c == '<' || c == '>';
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    // the smaller index survives
    void merge(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

// Every tuple (h(e_1),...,h(e_k)) over homomorphisms h: inst -> b extending init.
// Pins one listed element at a time and prunes with arc consistency.
std::vector<Tuple> hom_projections(const Structure& inst, const Structure& b, const std::vector<Element>& elems,
                                   const UnaryLists& init, std::uint64_t cap) {
    std::vector<Tuple> out;
    auto start = ac(inst, b, init);
    if (!start) return out;
    Tuple cur(elems.size());
    std::uint64_t leaves = 0;
    std::function<void(std::size_t, const UnaryLists&)> rec = [&](std::size_t i, const UnaryLists& lists) {
        if (i == elems.size()) {
            if (++leaves > cap) throw GuardExceeded("defined relation: more than " + std::to_string(cap) + " candidate tuples");
            if (search_hom(inst, b, lists)) out.push_back(cur);
            return;
        }
        for (Element v : lists[elems[i]]) {
            UnaryLists next = lists;
            next.fix(elems[i], v);
            auto pruned = ac(inst, b, next);
            if (!pruned) continue;
            cur[i] = v;
            rec(i + 1, *pruned);
        }
    };
    rec(0, *start);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Tuple> all_tuples(std::size_t k, std::size_t n) {
    std::vector<Tuple> out;
    const std::size_t total = ipow(n, k);
    out.reserve(total);
    for (std::size_t c = 0; c < total; ++c) out.push_back(decode_tuple(c, k, n));
    return out;
}

Structure with_extra_relation(const Structure& s, const std::string& name, std::size_t arity,
                              const std::vector<Tuple>& tuples) {
    Structure out = s;
    auto r = out.add_symbol(name, arity);
    for (const auto& t : tuples) out.add_tuple(r, t);
    out.normalize();
    return out;
}

std::string fresh_symbol(const Signature& sig) {
    std::string name = "_outside";
    while (sig.find(name)) name = "_" + name;
    return name;
}

// A polymorphism of arity w = |ts| sending the chosen tuples outside r, if one exists.
std::optional<Operation> violating_polymorphism(const Relation& r, const Structure& b, const std::vector<Tuple>& ts,
                                                const std::vector<Tuple>& complement, const Limits& lim) {
    const std::size_t w = ts.size(), n = b.size(), k = r.arity;
    Structure p = power(b, w, lim);
    Tuple cols(k);
    for (std::size_t j = 0; j < k; ++j) {
        Tuple col(w);
        for (std::size_t i = 0; i < w; ++i) col[i] = ts[i][j];
        cols[j] = static_cast<Element>(encode_tuple(col.data(), w, n));
    }
    const std::string bad = fresh_symbol(b.signature());
    auto inst = with_extra_relation(p, bad, k, {cols});
    auto tmpl = with_extra_relation(b, bad, k, complement);
    auto h = search_hom(inst, tmpl);
    if (!h) return std::nullopt;
    return Operation(w, n, h->table, "violation");
}

PPFormula power_witness(const Structure& b, const std::vector<Tuple>& ts, std::size_t k) {
    const std::size_t w = ts.size(), n = b.size();
    Structure p = power(b, w);
    PPFormula phi = canonical_query(p);
    for (auto& v : phi.bound_vars) v = "y" + v.substr(1);
    for (auto& a : phi.atoms)
        for (auto& v : a.vars) v = "y" + v.substr(1);
    for (std::size_t j = 0; j < k; ++j) {
        Tuple col(w);
        for (std::size_t i = 0; i < w; ++i) col[i] = ts[i][j];
        phi.free_vars.push_back("x" + std::to_string(j + 1));
        phi.atoms.push_back(eq_atom(phi.free_vars.back(), "y" + std::to_string(encode_tuple(col.data(), w, n))));
    }
    return phi;
}

// formulas built from equalities and at most one atom
std::optional<PPFormula> small_witness(const Relation& r, const Structure& b) {
    const std::size_t k = r.arity;
    PPFormula base;
    for (std::size_t j = 0; j < k; ++j) base.free_vars.push_back("x" + std::to_string(j + 1));
    // positions equal in every tuple of r
    for (std::size_t j = 1; j < k; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            bool same = std::all_of(r.tuples.begin(), r.tuples.end(), [&](const Tuple& t) { return t[i] == t[j]; });
            if (same) {
                base.atoms.push_back(eq_atom(base.free_vars[i], base.free_vars[j]));
                break;
            }
        }
    if (ipow(b.size(), k) > 100'000) return std::nullopt;
    if (defined_relation(base, b) == r) return base;
    for (std::size_t s = 0; s < b.signature().size(); ++s) {
        const std::size_t m = b.signature()[s].arity;
        if (k == 0 || ipow(k, m) > 256) continue;
        for (std::size_t code = 0; code < ipow(k, m); ++code) {
            Tuple pos = decode_tuple(code, m, k);
            PPFormula phi = base;
            std::vector<std::string> args;
            for (Element p : pos) args.push_back(phi.free_vars[p]);
            phi.atoms.push_back(rel_atom(b.signature()[s].name, args));
            if (defined_relation(phi, b) == r) return phi;
        }
    }
    return std::nullopt;
}

}  // namespace

bool PPFormula::has_false() const {
    return std::any_of(atoms.begin(), atoms.end(), [](const PPAtom& a) { return a.kind == PPAtom::Kind::False; });
}

PPAtom rel_atom(std::string symbol, std::vector<std::string> vars) {
    return {PPAtom::Kind::Relation, std::move(symbol), std::move(vars)};
}

PPAtom eq_atom(std::string x, std::string y) { return {PPAtom::Kind::Equal, {}, {std::move(x), std::move(y)}}; }

void check_formula(const PPFormula& phi, const Signature* sig) {
    std::set<std::string> free(phi.free_vars.begin(), phi.free_vars.end());
    std::set<std::string> bound(phi.bound_vars.begin(), phi.bound_vars.end());
    if (free.size() != phi.free_vars.size()) throw FormatError("repeated free variable");
    if (bound.size() != phi.bound_vars.size()) throw FormatError("repeated bound variable");
    for (const auto& v : free)
        if (bound.count(v)) throw FormatError("variable '" + v + "' is both free and bound");
    for (const auto& a : phi.atoms) {
        for (const auto& v : a.vars)
            if (!free.count(v) && !bound.count(v)) throw FormatError("undeclared variable '" + v + "'");
        if (a.kind == PPAtom::Kind::Equal && a.vars.size() != 2) throw FormatError("equality needs two sides");
        if (a.kind != PPAtom::Kind::Relation || !sig) continue;
        auto idx = sig->find(a.symbol);
        if (!idx) throw SignatureMismatch("unknown relation '" + a.symbol + "'");
        if ((*sig)[*idx].arity != a.vars.size())
            throw SignatureMismatch("relation '" + a.symbol + "' has arity " + std::to_string((*sig)[*idx].arity));
    }
}

PPFormula parse_pp(const std::string& text) {
    // tokens: identifiers and single punctuation characters
    std::vector<std::string> tok;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (is_ident_char(c)) {
            std::size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            tok.push_back(text.substr(i, j - i));
            i = j;
        } else if (c == '(' || c == ')' || c == ',' || c == '&' || c == '=' || c == ';') {
            tok.emplace_back(1, c);
            ++i;
        } else {
            throw FormatError(std::string("unexpected character '") + c + "' in formula");
        }
    }
    std::size_t pos = 0;
    auto peek = [&]() -> std::string { return pos < tok.size() ? tok[pos] : std::string(); };
    auto take = [&]() {
        if (pos >= tok.size()) throw FormatError("formula ends early");
        return tok[pos++];
    };
    auto ident = [&]() {
        auto t = take();
        if (!is_ident_char(t[0])) throw FormatError("expected a name, got '" + t + "'");
        return t;
    };
    if (take() != "pp") throw FormatError("formula must start with 'pp'");
    PPFormula phi;
    bool seen_atoms = false;
    while (pos < tok.size()) {
        if (peek() == ";") {
            ++pos;
            continue;
        }
        if (peek() == "free" || peek() == "exists") {
            auto& into = take() == "free" ? phi.free_vars : phi.bound_vars;
            while (pos < tok.size() && peek() != ";") into.push_back(ident());
            continue;
        }
        if (seen_atoms) throw FormatError("atoms must form a single section");
        seen_atoms = true;
        for (;;) {
            auto t = ident();
            if (t == "TRUE") {
                phi.atoms.push_back({PPAtom::Kind::True, {}, {}});
            } else if (t == "FALSE") {
                phi.atoms.push_back({PPAtom::Kind::False, {}, {}});
            } else if (peek() == "=") {
                ++pos;
                phi.atoms.push_back(eq_atom(t, ident()));
            } else if (peek() == "(") {
                ++pos;
                std::vector<std::string> args;
                if (peek() != ")")
                    for (;;) {
                        args.push_back(ident());
                        if (peek() != ",") break;
                        ++pos;
                    }
                if (take() != ")") throw FormatError("expected ')' after arguments of " + t);
                phi.atoms.push_back(rel_atom(t, std::move(args)));
            } else {
                throw FormatError("expected an atom at '" + t + "'");
            }
            if (peek() != "&") break;
            ++pos;
        }
        if (pos < tok.size() && peek() != ";") throw FormatError("unexpected '" + peek() + "' after atoms");
    }
    // TRUE is the empty conjunction
    phi.atoms.erase(std::remove_if(phi.atoms.begin(), phi.atoms.end(),
                                   [](const PPAtom& a) { return a.kind == PPAtom::Kind::True; }),
                    phi.atoms.end());
    check_formula(phi);
    return phi;
}

std::string to_text(const PPFormula& phi) {
    std::ostringstream out;
    out << "pp free";
    for (const auto& v : phi.free_vars) out << ' ' << v;
    out << " ; exists";
    for (const auto& v : phi.bound_vars) out << ' ' << v;
    out << " ; ";
    if (phi.atoms.empty()) out << "TRUE";
    for (std::size_t i = 0; i < phi.atoms.size(); ++i) {
        if (i) out << " & ";
        const auto& a = phi.atoms[i];
        switch (a.kind) {
            case PPAtom::Kind::True: out << "TRUE"; break;
            case PPAtom::Kind::False: out << "FALSE"; break;
            case PPAtom::Kind::Equal: out << a.vars[0] << " = " << a.vars[1]; break;
            case PPAtom::Kind::Relation:
                out << a.symbol << '(';
                for (std::size_t j = 0; j < a.vars.size(); ++j) out << (j ? "," : "") << a.vars[j];
                out << ')';
                break;
        }
    }
    return out.str();
}

Relation::Relation(std::size_t arity_, std::size_t domain_, std::vector<Tuple> tuples_)
    : arity(arity_), domain(domain_), tuples(std::move(tuples_)) {
    for (const auto& t : tuples) {
        if (t.size() != arity) throw Error("relation tuple of wrong length");
        for (Element e : t)
            if (e >= domain) throw Error("relation entry " + std::to_string(e) + " out of range");
    }
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

bool Relation::contains(const Tuple& t) const { return std::binary_search(tuples.begin(), tuples.end(), t); }

Relation relation_of(const Structure& b, const std::string& symbol) {
    auto r = b.signature().index_of(symbol);
    return Relation(b.signature()[r].arity, b.size(), b.tuples(r));
}

Relation diagonal_relation(std::size_t domain) {
    std::vector<Tuple> t;
    for (Element x = 0; x < domain; ++x) t.push_back({x, x});
    return Relation(2, domain, std::move(t));
}

PPFormula canonical_query(const Structure& a) {
    PPFormula phi;
    for (Element x = 0; x < a.size(); ++x) phi.bound_vars.push_back("v" + std::to_string(x));
    for (std::size_t r = 0; r < a.signature().size(); ++r)
        for (const auto& t : a.tuples(r)) {
            std::vector<std::string> args;
            for (Element e : t) args.push_back(phi.bound_vars[e]);
            phi.atoms.push_back(rel_atom(a.signature()[r].name, std::move(args)));
        }
    return phi;
}

CanonicalDatabase canonical_database_full(const PPFormula& phi, const Signature& sig0) {
    check_formula(phi);
    if (phi.has_false()) throw Error("canonical database of a formula containing FALSE");
    std::vector<std::string> vars = phi.free_vars;
    vars.insert(vars.end(), phi.bound_vars.begin(), phi.bound_vars.end());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i]] = i;

    UnionFind uf(vars.size());
    for (const auto& a : phi.atoms)
        if (a.kind == PPAtom::Kind::Equal) uf.merge(index.at(a.vars[0]), index.at(a.vars[1]));
    CanonicalDatabase cd;
    cd.element_of.assign(vars.size(), 0);
    std::vector<Element> id(vars.size(), 0);
    Element next = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (uf.find(i) == i) id[i] = next++;
        cd.element_of[i] = id[uf.find(i)];
    }

    Signature sig = sig0;
    for (const auto& a : phi.atoms)
        if (a.kind == PPAtom::Kind::Relation && !sig.find(a.symbol)) sig.add(a.symbol, a.vars.size());
    check_formula(phi, &sig);
    cd.structure = Structure(next, sig);
    for (const auto& a : phi.atoms) {
        if (a.kind != PPAtom::Kind::Relation) continue;
        Tuple t;
        for (const auto& v : a.vars) t.push_back(cd.element_of[index.at(v)]);
        cd.structure.add_tuple(a.symbol, std::move(t));
    }
    cd.structure.normalize();
    return cd;
}

Structure canonical_database(const PPFormula& phi, const Signature& sig) {
    return canonical_database_full(phi, sig).structure;
}

bool evaluate(const PPFormula& phi, const Structure& b, const std::vector<Element>& assignment) {
    check_formula(phi, &b.signature());
    if (assignment.size() != phi.free_vars.size())
        throw Error("assignment gives " + std::to_string(assignment.size()) + " values for " +
                    std::to_string(phi.free_vars.size()) + " free variables");
    for (Element v : assignment)
        if (v >= b.size()) throw Error("assigned value " + std::to_string(v) + " is outside the structure");
    if (phi.has_false()) return false;
    auto cd = canonical_database_full(phi, b.signature());
    if (cd.structure.size() == 0) return true;
    UnaryLists init(cd.structure.size(), b.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) init.fix(cd.element_of[i], assignment[i]);
    if (init.rejected()) return false;
    return search_hom(cd.structure, b, init).has_value();
}

bool evaluate(const PPFormula& phi, const Structure& b, const std::map<std::string, Element>& assignment) {
    std::vector<Element> values;
    for (const auto& v : phi.free_vars) {
        auto it = assignment.find(v);
        if (it == assignment.end()) throw Error("free variable '" + v + "' has no value");
        values.push_back(it->second);
    }
    for (const auto& [name, value] : assignment)
        if (std::find(phi.free_vars.begin(), phi.free_vars.end(), name) == phi.free_vars.end())
            throw Error("'" + name + "' is not a free variable");
    return evaluate(phi, b, values);
}

Relation defined_relation(const PPFormula& phi, const Structure& b, const Limits& lim) {
    check_formula(phi, &b.signature());
    const std::size_t k = phi.free_vars.size();
    if (phi.has_false()) return Relation(k, b.size(), {});
    auto cd = canonical_database_full(phi, b.signature());
    if (cd.structure.size() == 0) return Relation(0, b.size(), {Tuple{}});
    // distinct elements behind the free variables
    std::vector<Element> elems;
    for (std::size_t i = 0; i < k; ++i)
        if (std::find(elems.begin(), elems.end(), cd.element_of[i]) == elems.end()) elems.push_back(cd.element_of[i]);
    auto proj = hom_projections(cd.structure, b, elems, UnaryLists(cd.structure.size(), b.size()), lim.states);
    std::vector<Tuple> out;
    for (const auto& p : proj) {
        Tuple t(k);
        for (std::size_t i = 0; i < k; ++i)
            t[i] = p[static_cast<std::size_t>(std::find(elems.begin(), elems.end(), cd.element_of[i]) - elems.begin())];
        out.push_back(std::move(t));
    }
    return Relation(k, b.size(), std::move(out));
}

Relation closure(const Relation& r, const std::vector<Operation>& ops, const Limits& lim) {
    for (const auto& f : ops)
        if (f.domain() != r.domain) throw Error("operation '" + f.name() + "' is on a different domain");
    std::set<Tuple> seen(r.tuples.begin(), r.tuples.end());
    std::vector<Tuple> rows(r.tuples.begin(), r.tuples.end());
    std::size_t frontier = 0;
    while (frontier < rows.size()) {
        const std::size_t end = rows.size();
        for (const auto& f : ops) {
            const std::size_t a = f.arity();
            if (a == 0) continue;
            std::vector<std::size_t> pick(a, 0);
            for (;;) {
                // skip argument rows that were all combined in an earlier round
                if (std::any_of(pick.begin(), pick.end(), [&](std::size_t p) { return p >= frontier; })) {
                    Tuple t(r.arity), args(a);
                    for (std::size_t j = 0; j < r.arity; ++j) {
                        for (std::size_t i = 0; i < a; ++i) args[i] = rows[pick[i]][j];
                        t[j] = f(args);
                    }
                    if (seen.insert(t).second) {
                        rows.push_back(std::move(t));
                        if (rows.size() > lim.states) throw GuardExceeded("closure exceeds the state cap");
                    }
                }
                std::size_t i = a;
                while (i > 0 && ++pick[i - 1] == end) pick[--i] = 0;
                if (i == 0) break;
            }
        }
        frontier = end;
    }
    return Relation(r.arity, r.domain, std::move(rows));
}

PPDefinability is_pp_definable(const Relation& r, const Structure& b, const PPOptions& opt) {
    if (r.domain != b.size()) throw Error("relation and structure have different domains");
    const std::size_t n = b.size(), k = r.arity;
    PPDefinability res;
    auto finish_witness = [&](PPFormula phi) {
        if (defined_relation(phi, b) != r) throw Error("internal: pp witness does not define the relation");
        res.definable = true;
        res.witness = std::move(phi);
        return res;
    };
    auto finish_violation = [&](Operation f) {
        if (!is_polymorphism(f, b) || preserves(f, n, r.tuples, k))
            throw Error("internal: violating operation failed its check");
        res.violation = std::move(f);
        return res;
    };

    if (r.tuples.empty()) {
        PPFormula phi;
        for (std::size_t j = 0; j < k; ++j) phi.free_vars.push_back("x" + std::to_string(j + 1));
        phi.atoms.push_back({PPAtom::Kind::False, {}, {}});
        return finish_witness(std::move(phi));
    }
    if (auto phi = small_witness(r, b)) return finish_witness(std::move(*phi));

    Limits lim;
    lim.states = opt.power_cap;
    auto comp_size = checked_pow(n, k, lim.states);
    std::vector<Tuple> complement;
    if (comp_size) {
        for (auto& t : all_tuples(k, n))
            if (!r.contains(t)) complement.push_back(std::move(t));
    }

    // cheap refuter: polymorphisms of small arity applied to a few tuple choices
    if (comp_size) {
        for (std::size_t a = 1; a <= opt.refute_arity && a <= r.size(); ++a) {
            if (!checked_pow(n, a, opt.power_cap)) break;
            std::vector<std::size_t> idx(a);
            std::iota(idx.begin(), idx.end(), 0);
            for (std::size_t tried = 0; tried < opt.refute_choices; ++tried) {
                std::vector<Tuple> ts;
                for (auto i : idx) ts.push_back(r.tuples[i]);
                if (auto f = violating_polymorphism(r, b, ts, complement, lim)) return finish_violation(std::move(*f));
                // next strictly increasing index tuple
                std::size_t i = a;
                while (i > 0 && idx[i - 1] == r.size() - a + i - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < a; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }

    // Grow a generating set T ⊆ r. The relation defined by the canonical query of B^|T|
    // (columns free) is the closure of T under all polymorphisms.
    std::vector<Tuple> ts{r.tuples.front()};
    for (;;) {
        const std::size_t w = ts.size();
        if (!checked_pow(n, w, opt.power_cap))
            throw GuardExceeded("pp-definability needs B^" + std::to_string(w) + ", above the cap of " +
                                std::to_string(opt.power_cap));
        Structure p = power(b, w, lim);
        std::vector<Element> cols;
        for (std::size_t j = 0; j < k; ++j) {
            Tuple col(w);
            for (std::size_t i = 0; i < w; ++i) col[i] = ts[i][j];
            cols.push_back(static_cast<Element>(encode_tuple(col.data(), w, n)));
        }
        std::vector<Element> elems = cols;
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        auto proj = hom_projections(p, b, elems, UnaryLists(p.size(), n), lim.states);
        std::vector<Tuple> got;
        for (const auto& q : proj) {
            Tuple t(k);
            for (std::size_t j = 0; j < k; ++j)
                t[j] = q[static_cast<std::size_t>(std::lower_bound(elems.begin(), elems.end(), cols[j]) - elems.begin())];
            got.push_back(std::move(t));
        }
        std::sort(got.begin(), got.end());
        for (const auto& t : got)
            if (!r.contains(t)) {
                UnaryLists pins(p.size(), n);
                for (std::size_t j = 0; j < k; ++j) pins.fix(cols[j], t[j]);
                auto h = search_hom(p, b, pins);
                if (!h) throw Error("internal: lost a projection");
                return finish_violation(Operation(w, n, h->table, "violation"));
            }
        if (got.size() == r.size()) return finish_witness(power_witness(b, ts, k));
        for (const auto& t : r.tuples)
            if (!std::binary_search(got.begin(), got.end(), t)) {
                ts.push_back(t);
                break;
            }
    }
}

PPReduction pp_reduce_instance(const Structure& instance, const std::string& symbol, const PPFormula& definition,
                               const Signature& target) {
    check_formula(definition, &target);
    auto rel = instance.signature().find(symbol);
    if (!rel) throw SignatureMismatch("instance has no relation '" + symbol + "'");
    if (instance.signature()[*rel].arity != definition.free_vars.size())
        throw SignatureMismatch("definition of '" + symbol + "' has the wrong number of free variables");
    std::vector<std::size_t> target_of(instance.signature().size(), 0);
    for (std::size_t s = 0; s < instance.signature().size(); ++s) {
        if (s == *rel) continue;
        const auto& sym = instance.signature()[s];
        auto t = target.find(sym.name);
        if (!t || target[*t].arity != sym.arity) throw SignatureMismatch("relation '" + sym.name + "' is not in the target");
        target_of[s] = *t;
    }

    PPReduction out;
    std::vector<std::pair<std::size_t, Tuple>> constraints;
    std::vector<std::pair<std::size_t, std::size_t>> equalities;
    std::size_t elements = instance.size();
    for (std::size_t s = 0; s < instance.signature().size(); ++s) {
        if (s != *rel) {
            for (const auto& t : instance.tuples(s)) constraints.emplace_back(target_of[s], t);
            continue;
        }
        for (const auto& t : instance.tuples(s)) {
            if (definition.has_false()) out.contradictory = true;
            // free variables go to the constrained elements, bound ones to fresh elements
            std::unordered_map<std::string, std::size_t> at;
            for (std::size_t i = 0; i < t.size(); ++i) at[definition.free_vars[i]] = t[i];
            for (const auto& v : definition.bound_vars) at[v] = elements++;
            for (const auto& a : definition.atoms) {
                if (a.kind == PPAtom::Kind::Equal) {
                    equalities.emplace_back(at.at(a.vars[0]), at.at(a.vars[1]));
                } else if (a.kind == PPAtom::Kind::Relation) {
                    Tuple u;
                    for (const auto& v : a.vars) u.push_back(static_cast<Element>(at.at(v)));
                    constraints.emplace_back(*target.find(a.symbol), std::move(u));
                }
            }
        }
    }
    UnionFind uf(elements);
    for (auto [x, y] : equalities) uf.merge(x, y);
    std::vector<Element> id(elements, 0);
    Element next = 0;
    for (std::size_t i = 0; i < elements; ++i)
        if (uf.find(i) == i) id[i] = next++;
    out.instance = Structure(next, target, instance.name());
    for (auto& [s, t] : constraints) {
        for (auto& e : t) e = id[uf.find(e)];
        out.instance.add_tuple(s, std::move(t));
    }
    out.instance.normalize();
    return out;
}

BinaryEncoding binary_encoding(const Structure& c, std::size_t d, const Limits& lim) {
    const std::size_t n = c.size();
    if (d == 0 || d < c.signature().max_arity())
        throw Error("binary encoding needs d >= " + std::to_string(std::max<std::size_t>(1, c.signature().max_arity())));
    auto size = checked_pow(n, d, lim.states);
    auto pairs = checked_pow(n, 2 * d - 1, lim.states);
    if (!size || !pairs || *pairs * d * d > lim.states) throw GuardExceeded("binary encoding C^[d] exceeds the state cap");
    const std::size_t total = *size;

    BinaryEncoding enc;
    enc.d = d;
    enc.base = n;
    enc.source = c.signature();
    Signature sig;
    for (const auto& s : c.signature().symbols()) sig.add(s.name + "'", 1);
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 1; j <= d; ++j) {
            std::string name = "E_" + std::to_string(i) + "_" + std::to_string(j);
            if (sig.find(name)) throw Error("symbol name clash on " + name);
            sig.add(name, 2);
        }
    enc.structure = Structure(total, sig, c.name().empty() ? std::string() : c.name() + "^[" + std::to_string(d) + "]");
    for (std::size_t r = 0; r < c.signature().size(); ++r) {
        const std::size_t k = c.signature()[r].arity;
        for (std::size_t code = 0; code < total; ++code) {
            Tuple t = decode_tuple(code, d, n);
            if (c.contains(r, Tuple(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k))))
                enc.structure.add_tuple(r, {static_cast<Element>(code)});
        }
    }
    const std::size_t rest = total / n;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t rel = c.signature().size() + i * d + j;
            for (std::size_t a = 0; a < total; ++a) {
                Tuple ta = decode_tuple(a, d, n);
                for (std::size_t o = 0; o < rest; ++o) {
                    Tuple others = decode_tuple(o, d - 1, n);
                    Tuple tb(d);
                    for (std::size_t q = 0, p = 0; q < d; ++q) tb[q] = q == j ? ta[i] : others[p++];
                    enc.structure.add_tuple(rel, {static_cast<Element>(a), static_cast<Element>(encode_tuple(tb.data(), d, n))});
                }
            }
        }
    enc.structure.normalize();
    return enc;
}

Structure BinaryEncoding::translate(const Structure& instance) const {
    Structure probe(base, source);
    auto map = signature_map(instance, probe);
    std::size_t elements = instance.size();
    for (std::size_t s = 0; s < instance.signature().size(); ++s) elements += instance.tuples(s).size();
    Structure out(elements, structure.signature(), instance.name());
    Element e = static_cast<Element>(instance.size());
    for (std::size_t s = 0; s < instance.signature().size(); ++s)
        for (const auto& t : instance.tuples(s)) {
            out.add_tuple(map[s], {e});
            for (std::size_t i = 0; i < t.size(); ++i) out.add_tuple(source.size() + i * d, {e, t[i]});
            ++e;
        }
    out.normalize();
    return out;
}

Mapping BinaryEncoding::decode(const Structure& instance, const Mapping& solution) const {
    Mapping m{std::vector<Element>(instance.size(), 0), base};
    const std::size_t rest = ipow(base, d - 1);
    for (Element x = 0; x < instance.size(); ++x) m.table[x] = static_cast<Element>(solution(x) / rest);
    return m;
}

Mapping BinaryEncoding::encode(const Structure& instance, const Mapping& solution) const {
    const std::size_t rest = ipow(base, d - 1);
    Mapping m{{}, structure.size()};
    for (Element x = 0; x < instance.size(); ++x) m.table.push_back(static_cast<Element>(solution(x) * rest));
    for (std::size_t s = 0; s < instance.signature().size(); ++s)
        for (const auto& t : instance.tuples(s)) {
            Tuple full(d, 0);
            for (std::size_t i = 0; i < t.size(); ++i) full[i] = solution(t[i]);
            m.table.push_back(static_cast<Element>(encode_tuple(full.data(), d, base)));
        }
    return m;
}

}  // namespace homlab
