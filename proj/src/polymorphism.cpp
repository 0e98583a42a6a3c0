#include "homlab/polymorphism.hpp"

#include <algorithm>
#include <numeric>

#include "engine.hpp"
#include "homlab/error.hpp"

namespace homlab {

namespace {

using detail::Var;

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0U); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// raw elements of every symbol block, merged into classes, with precolouring lists
struct Glue {
    std::size_t n = 0;
    std::vector<std::size_t> offsets, arity;
    std::vector<std::uint32_t> class_of;
    std::size_t classes = 0;
    std::vector<ValueSet> lists;
};

Glue glue(const Structure& b, const IdentitySystem& sys, bool idempotent, const Limits& lim) {
    const std::size_t n = b.size();
    if (n == 0) throw Error("template has an empty domain");
    if (n > ValueSet::capacity) throw GuardExceeded("template domain larger than 64 elements");
    if (sys.symbols().empty()) throw Error("identity system declares no symbols");
    Glue g;
    g.n = n;
    std::uint64_t total = 0;
    for (const auto& s : sys.symbols()) {
        if (s.arity > lim.arity)
            throw GuardExceeded("operation arity " + std::to_string(s.arity) + " above the cap " +
                                std::to_string(lim.arity));
        auto size = checked_pow(n, s.arity, lim.states);
        if (!size || total + *size > lim.states) throw GuardExceeded("indicator instance has too many elements");
        g.offsets.push_back(total);
        g.arity.push_back(s.arity);
        total += *size;
    }

    UnionFind uf(total);
    std::vector<ValueSet> pin(total, ValueSet::full(n));
    bool contradictory = false;
    if (idempotent)
        for (std::size_t s = 0; s < g.arity.size(); ++s)
            for (Element a = 0; a < n; ++a) {
                Tuple diag(g.arity[s], a);
                pin[g.offsets[s] + encode_tuple(diag.data(), diag.size(), n)] &= ValueSet::single(a);
            }

    for (const auto& id : sys.identities()) {
        const std::size_t v = id.var_count();
        if (!checked_pow(n, v, lim.states)) throw GuardExceeded("identity has too many variables");
        Tuple val(v, 0), args;
        // raw element, or a plain value when the side is a bare variable
        auto side = [&](const Term& t, bool& bare) -> std::uint64_t {
            bare = t.bare();
            if (bare) return val[t.vars[0]];
            args.resize(t.vars.size());
            for (std::size_t i = 0; i < t.vars.size(); ++i) args[i] = val[t.vars[i]];
            const auto s = static_cast<std::size_t>(t.symbol);
            return g.offsets[s] + encode_tuple(args.data(), args.size(), n);
        };
        for (;;) {
            bool lb = false, rb = false;
            auto l = side(id.lhs, lb), r = side(id.rhs, rb);
            if (!lb && !rb) uf.unite(static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(r));
            else if (!lb) pin[l] &= ValueSet::single(static_cast<Element>(r));
            else if (!rb) pin[r] &= ValueSet::single(static_cast<Element>(l));
            else if (l != r) contradictory = true;
            std::size_t i = v;
            while (i > 0 && ++val[i - 1] == n) val[--i] = 0;
            if (i == 0) break;
        }
    }

    // classes numbered by their smallest raw member
    g.class_of.assign(total, 0);
    std::vector<std::uint32_t> index(total, UINT32_MAX);
    for (std::uint32_t e = 0; e < total; ++e) {
        auto root = uf.find(e);
        if (index[root] == UINT32_MAX) {
            index[root] = static_cast<std::uint32_t>(g.classes++);
            g.lists.push_back(ValueSet::full(n));
        }
        g.class_of[e] = index[root];
        g.lists[index[root]] &= pin[e];
    }
    if (contradictory) g.lists[0] = ValueSet();
    return g;
}

bool unsatisfiable(const Glue& g) {
    return std::any_of(g.lists.begin(), g.lists.end(), [](const ValueSet& s) { return s.empty(); });
}

// Calls f(codes) for every tuple of R^{B^k}; codes[q] is the base-n code of position q.
template <class F>
void for_each_power_tuple(const detail::Table& t, std::size_t k, std::size_t n, F&& f) {
    const std::size_t m = t.size(), r = t.arity;
    if (m == 0) return;
    std::vector<std::uint64_t> w(k), code(r, 0);
    for (std::size_t i = 0; i < k; ++i) w[i] = ipow(n, k - 1 - i);
    for (std::size_t q = 0; q < r; ++q)
        for (std::size_t i = 0; i < k; ++i) code[q] += t.tuple(0)[q] * w[i];
    std::vector<std::size_t> idx(k, 0);
    for (;;) {
        f(code.data());
        std::size_t i = k;
        for (;;) {
            if (i == 0) return;
            --i;
            const Element* old = t.tuple(idx[i]);
            idx[i] = (idx[i] + 1 == m) ? 0 : idx[i] + 1;
            const Element* cur = t.tuple(idx[i]);
            for (std::size_t q = 0; q < r; ++q) code[q] += (std::uint64_t{cur[q]} - old[q]) * w[i];
            if (idx[i] != 0) break;
        }
    }
}

std::vector<detail::Table> template_tables(const Structure& b) {
    std::vector<detail::Table> tables;
    for (std::size_t r = 0; r < b.signature().size(); ++r)
        tables.push_back(detail::make_table(b.tuples(r), b.signature()[r].arity, b.size()));
    return tables;
}

std::optional<std::uint64_t> materialised_size(const Structure& b, const Glue& g, const Limits& lim) {
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < g.arity.size(); ++s)
        for (std::size_t r = 0; r < b.signature().size(); ++r) {
            auto c = checked_pow(b.tuples(r).size(), g.arity[s], lim.states);
            if (!c || total + *c > lim.states) return std::nullopt;
            total += *c;
        }
    return total;
}

// per relation: deduplicated class scopes, flattened
std::vector<std::vector<std::uint32_t>> materialise(const Structure& b, const Glue& g,
                                                    const std::vector<detail::Table>& tables) {
    std::vector<std::vector<std::uint32_t>> out(tables.size());
    for (std::size_t r = 0; r < tables.size(); ++r) {
        const std::size_t ar = tables[r].arity;
        auto& flat = out[r];
        for (std::size_t s = 0; s < g.arity.size(); ++s) {
            const std::size_t off = g.offsets[s];
            for_each_power_tuple(tables[r], g.arity[s], b.size(), [&](const std::uint64_t* code) {
                for (std::size_t q = 0; q < ar; ++q) flat.push_back(g.class_of[off + code[q]]);
            });
        }
        const std::size_t count = ar ? flat.size() / ar : 0;
        std::vector<std::uint32_t> order(count);
        std::iota(order.begin(), order.end(), 0U);
        auto at = [&](std::uint32_t i) { return flat.begin() + static_cast<std::ptrdiff_t>(i * ar); };
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t c) {
            return std::lexicographical_compare(at(a), at(a) + ar, at(c), at(c) + ar);
        });
        order.erase(std::unique(order.begin(), order.end(),
                                [&](std::uint32_t a, std::uint32_t c) { return std::equal(at(a), at(a) + ar, at(c)); }),
                    order.end());
        std::vector<std::uint32_t> dedup;
        dedup.reserve(order.size() * ar);
        for (auto i : order) dedup.insert(dedup.end(), at(i), at(i) + ar);
        flat = std::move(dedup);
    }
    return out;
}

// Forward checking over the power without listing its tuples: when a class gets a
// value, every constraint through one of its raw elements is generated from the
// position index of the template relation and checked, or used to filter its one
// remaining open class.
class ImplicitIndicator : public detail::Propagator {
public:
    ImplicitIndicator(const Structure& b, const Glue& g) : g_(g), n_(b.size()), tables_(template_tables(b)) {
        for (auto& t : tables_)
            if (t.arity >= 2) t.build_position_index();
        members_.resize(g.classes);
        symbol_of_.resize(g.class_of.size());
        for (std::size_t s = 0; s < g.arity.size(); ++s) {
            const std::size_t end = s + 1 < g.offsets.size() ? g.offsets[s + 1] : g.class_of.size();
            for (std::size_t e = g.offsets[s]; e < end; ++e) symbol_of_[e] = static_cast<std::uint32_t>(s);
        }
        for (std::uint32_t e = 0; e < g.class_of.size(); ++e) members_[g.class_of[e]].push_back(e);
    }

    std::size_t vars() const override { return g_.classes; }

    bool propagate(std::vector<ValueSet>& dom, const std::vector<Var>& touched, bool initial) override {
        std::vector<Var> work;
        if (initial) {
            for (const auto& t : tables_) {
                if (t.arity != 1) continue;
                for (std::uint32_t e = 0; e < g_.class_of.size(); ++e) {
                    const auto s = symbol_of_[e];
                    auto digits = decode_tuple(e - g_.offsets[s], g_.arity[s], n_);
                    if (std::all_of(digits.begin(), digits.end(), [&](Element d) { return t.unary.contains(d); }))
                        dom[g_.class_of[e]] &= t.unary;
                }
            }
            for (Var c = 0; c < dom.size(); ++c) {
                if (dom[c].empty()) return false;
                if (dom[c].is_singleton()) work.push_back(c);
            }
        } else {
            for (Var c : touched)
                if (dom[c].is_singleton()) work.push_back(c);
        }
        while (!work.empty()) {
            Var c = work.back();
            work.pop_back();
            for (std::uint32_t e : members_[c])
                if (!visit(e, dom, work)) return false;
        }
        return true;
    }

private:
    bool visit(std::uint32_t e, std::vector<ValueSet>& dom, std::vector<Var>& work) {
        const auto s = symbol_of_[e];
        const std::size_t k = g_.arity[s], off = g_.offsets[s];
        const Tuple digits = decode_tuple(e - off, k, n_);
        std::vector<std::uint64_t> w(k);
        for (std::size_t i = 0; i < k; ++i) w[i] = ipow(n_, k - 1 - i);
        std::vector<const std::vector<std::uint32_t>*> lists(k);
        std::vector<std::size_t> idx(k);
        for (const auto& t : tables_) {
            const std::size_t r = t.arity;
            if (r < 2) continue;
            std::vector<std::uint64_t> code(r);
            std::vector<Var> cls(r);
            Tuple val(r);
            for (std::size_t p = 0; p < r; ++p) {
                bool empty = false;
                for (std::size_t i = 0; i < k; ++i) {
                    lists[i] = &t.by_pos[p * n_ + digits[i]];
                    empty = empty || lists[i]->empty();
                }
                if (empty) continue;
                std::fill(idx.begin(), idx.end(), 0);
                std::fill(code.begin(), code.end(), 0);
                for (std::size_t i = 0; i < k; ++i) {
                    const Element* tu = t.tuple((*lists[i])[0]);
                    for (std::size_t q = 0; q < r; ++q) code[q] += tu[q] * w[i];
                }
                for (;;) {
                    if (!check(t, code.data(), cls.data(), val.data(), off, dom, work)) return false;
                    std::size_t i = k;
                    bool done = false;
                    for (;;) {
                        if (i == 0) {
                            done = true;
                            break;
                        }
                        --i;
                        const auto& li = *lists[i];
                        const Element* old = t.tuple(li[idx[i]]);
                        idx[i] = (idx[i] + 1 == li.size()) ? 0 : idx[i] + 1;
                        const Element* cur = t.tuple(li[idx[i]]);
                        for (std::size_t q = 0; q < r; ++q) code[q] += (std::uint64_t{cur[q]} - old[q]) * w[i];
                        if (idx[i] != 0) break;
                    }
                    if (done) break;
                }
            }
        }
        return true;
    }

    bool check(const detail::Table& t, const std::uint64_t* code, Var* cls, Element* val, std::size_t off,
               std::vector<ValueSet>& dom, std::vector<Var>& work) {
        const std::size_t r = t.arity;
        Var open = UINT32_MAX;
        for (std::size_t q = 0; q < r; ++q) {
            cls[q] = g_.class_of[off + code[q]];
            const ValueSet& d = dom[cls[q]];
            if (d.is_singleton()) {
                val[q] = d.min();
            } else if (open == UINT32_MAX) {
                open = cls[q];
            } else if (cls[q] != open) {
                return true;  // two open classes: nothing to do yet
            }
        }
        if (open == UINT32_MAX) return t.contains(val);
        ValueSet keep;
        for (Element v : dom[open]) {
            for (std::size_t q = 0; q < r; ++q)
                if (cls[q] == open) val[q] = v;
            if (t.contains(val)) keep.insert(v);
        }
        if (keep == dom[open]) return true;
        dom[open] = keep;
        if (keep.empty()) return false;
        if (keep.is_singleton()) work.push_back(open);
        return true;
    }

    const Glue& g_;
    std::size_t n_;
    std::vector<detail::Table> tables_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::vector<std::uint32_t> symbol_of_;
};

struct Solved {
    Glue g;
    detail::SearchOutcome out;
};

Solved solve(const Structure& b, const IdentitySystem& sys, bool idempotent, const Limits& lim,
             std::size_t max_solutions) {
    Solved res{glue(b, sys, idempotent, lim), {}};
    if (unsatisfiable(res.g)) return res;
    detail::SearchLimits sl;
    sl.max_solutions = max_solutions;
    if (materialised_size(b, res.g, lim)) {
        auto tables = template_tables(b);
        auto scopes = materialise(b, res.g, tables);
        detail::GacNetwork net(res.g.classes, tables);
        for (std::size_t r = 0; r < scopes.size(); ++r) {
            const std::size_t ar = b.signature()[r].arity;
            for (std::size_t i = 0; i < scopes[r].size(); i += ar) net.add_constraint(r, scopes[r].data() + i);
        }
        net.finish();
        res.out = detail::backtrack(net, res.g.lists, sl);
    } else {
        ImplicitIndicator prop(b, res.g);
        res.out = detail::backtrack(prop, res.g.lists, sl);
    }
    return res;
}

OperationMap read_off(const Structure& b, const IdentitySystem& sys, const Glue& g, const std::vector<Element>& sol) {
    OperationMap ops;
    for (std::size_t s = 0; s < sys.symbols().size(); ++s) {
        Operation op(g.arity[s], b.size(), sys.symbols()[s].name);
        for (std::size_t c = 0; c < op.table().size(); ++c) op.table()[c] = sol[g.class_of[g.offsets[s] + c]];
        ops.emplace(sys.symbols()[s].name, std::move(op));
    }
    return ops;
}

void verify(const Structure& b, const IdentitySystem& sys, bool idempotent, const OperationMap& ops) {
    for (const auto& [name, op] : ops) {
        if (!is_polymorphism(op, b)) throw Error("internal: operation '" + name + "' is not a polymorphism");
        if (idempotent && !is_idempotent(op)) throw Error("internal: operation '" + name + "' is not idempotent");
    }
    if (!check_identities(ops, sys)) throw Error("internal: found operations violate the identities");
}

}  // namespace

Indicator indicator_instance(const Structure& b, const IdentitySystem& sys, bool idempotent, const Limits& lim) {
    Glue g = glue(b, sys, idempotent, lim);
    if (!materialised_size(b, g, lim)) throw GuardExceeded("indicator instance has too many tuples");
    auto tables = template_tables(b);
    auto scopes = materialise(b, g, tables);
    Indicator ind{Structure(g.classes, b.signature(), "indicator"), UnaryLists(g.classes, b.size()), g.offsets,
                  g.class_of};
    for (std::size_t r = 0; r < scopes.size(); ++r) {
        const std::size_t ar = b.signature()[r].arity;
        for (std::size_t i = 0; i < scopes[r].size(); i += ar)
            ind.instance.add_tuple(r, Tuple(scopes[r].begin() + static_cast<std::ptrdiff_t>(i),
                                            scopes[r].begin() + static_cast<std::ptrdiff_t>(i + ar)));
    }
    ind.instance.normalize();
    ind.lists.sets() = g.lists;
    return ind;
}

OperationMap operations_from_solution(const Structure& b, const IdentitySystem& sys, const Indicator& ind,
                                      const std::vector<Element>& solution) {
    Glue g;
    g.offsets = ind.offsets;
    for (const auto& s : sys.symbols()) g.arity.push_back(s.arity);
    g.class_of = ind.class_of;
    return read_off(b, sys, g, solution);
}

std::optional<OperationMap> find_polymorphism(const Structure& b, const IdentitySystem& sys, bool idempotent,
                                              const Limits& lim) {
    auto res = solve(b, sys, idempotent, lim, 1);
    if (res.out.solutions.empty()) return std::nullopt;
    auto ops = read_off(b, sys, res.g, res.out.solutions.front());
    verify(b, sys, idempotent, ops);
    return ops;
}

PolymorphismList all_polymorphisms(const Structure& b, const IdentitySystem& sys, bool idempotent, std::size_t cap,
                                   const Limits& lim) {
    PolymorphismList list;
    if (cap == 0) throw Error("all_polymorphisms needs a positive cap");
    auto res = solve(b, sys, idempotent, lim, cap + 1);
    list.complete = res.out.solutions.size() <= cap;
    for (std::size_t i = 0; i < res.out.solutions.size() && i < cap; ++i) {
        auto ops = read_off(b, sys, res.g, res.out.solutions[i]);
        verify(b, sys, idempotent, ops);
        list.found.push_back(std::move(ops));
    }
    return list;
}

namespace {

const std::vector<std::pair<Special, std::string>>& special_names() {
    static const std::vector<std::pair<Special, std::string>> names{
        {Special::Majority, "majority"},
        {Special::QuasiMajority, "quasi-majority"},
        {Special::Maltsev, "maltsev"},
        {Special::Minority, "minority"},
        {Special::Semilattice, "semilattice"},
        {Special::TotallySymmetric, "totally-symmetric"},
        {Special::Cyclic, "cyclic"},
        {Special::Wnu, "wnu"},
        {Special::Wnu34, "wnu34"},
        {Special::Siggers4, "siggers4"},
        {Special::Siggers6, "siggers6"},
        {Special::PQ, "pq"},
        {Special::NearUnanimity, "nu"},
        {Special::QuasiNearUnanimity, "quasi-nu"},
    };
    return names;
}

bool associative(const Operation& f) {
    const auto n = static_cast<Element>(f.domain());
    for (Element x = 0; x < n; ++x)
        for (Element y = 0; y < n; ++y)
            for (Element z = 0; z < n; ++z)
                if (f({f({x, y}), z}) != f({x, f({y, z})})) return false;
    return true;
}

}  // namespace

std::optional<Special> special_from_name(const std::string& name) {
    for (const auto& [k, s] : special_names())
        if (s == name) return k;
    return std::nullopt;
}

std::string special_name(Special kind) {
    for (const auto& [k, s] : special_names())
        if (k == kind) return s;
    return "?";
}

IdentitySystem special_system(Special kind, std::size_t arity) {
    auto need = [&](std::size_t min) {
        if (arity < min)
            throw Error(special_name(kind) + " needs an arity of at least " + std::to_string(min));
    };
    switch (kind) {
    case Special::Majority: return identities::majority();
    case Special::QuasiMajority: return identities::quasi_majority();
    case Special::Maltsev: return identities::maltsev();
    case Special::Minority: return identities::minority();
    case Special::Semilattice: return identities::commutative_idempotent();
    case Special::TotallySymmetric: need(1); return identities::totally_symmetric(arity);
    case Special::Cyclic: need(2); return identities::cyclic(arity);
    case Special::Wnu: need(2); return identities::wnu(arity);
    case Special::Wnu34: return identities::wnu_3_4();
    case Special::Siggers4: return identities::siggers4();
    case Special::Siggers6: return identities::siggers6();
    case Special::PQ: return identities::pq();
    case Special::NearUnanimity: need(3); return identities::near_unanimity(arity);
    case Special::QuasiNearUnanimity: need(3); return identities::quasi_near_unanimity(arity);
    }
    throw Error("unknown polymorphism kind");
}

SpecialResult find_special(const Structure& b, Special kind, const SpecialOptions& opt, const Limits& lim) {
    SpecialResult res;
    auto sys = special_system(kind, opt.arity);
    if (kind == Special::Semilattice) {
        // associativity is not height one: enumerate commutative idempotent candidates
        auto all = all_polymorphisms(b, sys, true, opt.semilattice_cap, lim);
        for (auto& ops : all.found)
            if (associative(ops.begin()->second)) {
                res.verdict = SearchVerdict::Found;
                res.ops = std::move(ops);
                return res;
            }
        if (all.complete) return res;
        res.verdict = SearchVerdict::Inconclusive;
        res.note = "candidate cap reached without an associative one; ac_solvability decides the "
                   "homomorphically equivalent question";
        return res;
    }
    if (auto ops = find_polymorphism(b, sys, opt.idempotent, lim)) {
        res.verdict = SearchVerdict::Found;
        res.ops = std::move(*ops);
    }
    return res;
}

MajorityTest majority_test_pc(const Structure& h) {
    if (!is_digraph(h)) throw SignatureMismatch("majority test needs a digraph");
    const std::size_t n = h.size();
    Limits lim;
    auto g = power(h, 3, lim);
    const std::size_t vars = g.size();
    UnaryLists init = UnaryLists::full(vars, n);
    for (Element u = 0; u < n; ++u)
        for (Element v = 0; v < n; ++v)
            for (const Tuple& t : {Tuple{u, u, v}, Tuple{u, v, u}, Tuple{v, u, u}})
                init.fix(static_cast<Element>(encode_tuple(t.data(), 3, n)), u);
    auto lists = pc(g, h, init);
    if (!lists) return {};
    for (std::size_t x = 0; x < vars; ++x) {
        const ValueSet diag = lists->at(x, x);
        if (diag.is_singleton()) continue;
        bool adopted = false;
        for (Element bit : diag) {
            PairLists trial = *lists;
            trial.at(x, x) = ValueSet::single(bit);
            if (pc_propagate(trial, {x})) {
                *lists = std::move(trial);
                adopted = true;
                break;
            }
        }
        if (!adopted) return {};
    }
    Operation f(3, n, "f");
    for (std::size_t x = 0; x < vars; ++x) f.table()[x] = static_cast<Element>(lists->at(x, x).min() / n);
    if (!is_polymorphism(f, h) || !check_identities({{"f", f}}, identities::majority()))
        throw Error("internal: majority test produced an invalid witness");
    return {true, f};
}

}  // namespace homlab
