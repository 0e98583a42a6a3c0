#include "homlab/maltsev.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "homlab/error.hpp"
#include "homlab/identities.hpp"

namespace homlab {

namespace {

// codes of short tuples; dense when the code space is small
class CodeSet {
public:
    explicit CodeSet(std::uint64_t space) {
        if (space <= (std::uint64_t{1} << 20)) dense_.assign(space, false);
    }
    bool insert(std::uint64_t c) {
        if (!dense_.empty()) {
            if (dense_[c]) return false;
            dense_[c] = true;
            return true;
        }
        return sparse_.insert(c).second;
    }
    bool contains(std::uint64_t c) const { return dense_.empty() ? sparse_.count(c) > 0 : static_cast<bool>(dense_[c]); }

private:
    std::vector<bool> dense_;
    std::unordered_set<std::uint64_t> sparse_;
};

struct Ctx {
    std::size_t n;
    const Operation& m;
    Element apply(Element x, Element y, Element z) const { return m.at((x * n + y) * n + z); }
    Tuple apply(const Tuple& r, const Tuple& s, const Tuple& t) const {
        Tuple out(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) out[i] = apply(r[i], s[i], t[i]);
        return out;
    }
    std::uint64_t space(std::size_t k) const {
        auto s = checked_pow(n, k, std::uint64_t{1} << 62);
        if (!s) throw GuardExceeded("projection too wide");
        return *s;
    }
};

std::uint64_t project(const Tuple& t, const std::vector<std::size_t>& idx, std::size_t n) {
    std::uint64_t c = 0;
    for (auto i : idx) c = c * n + t[i];
    return c;
}

// The Nonempty loop, run on projections: pr(m(r,s,t)) depends only on pr(r), pr(s), pr(t),
// so one representative tuple per projection suffices.
std::optional<Tuple> nonempty_impl(const Ctx& cx, const std::vector<Tuple>& u, const std::vector<std::size_t>& idx,
                                   const CodeSet& s) {
    const std::size_t k = idx.size(), n = cx.n;
    CodeSet seen(cx.space(k));
    std::vector<Tuple> reps;
    std::vector<Element> proj;  // flat, k per representative
    auto add = [&](Tuple t) {
        reps.push_back(std::move(t));
        for (auto i : idx) proj.push_back(reps.back()[i]);
    };
    for (const auto& t : u) {
        auto c = project(t, idx, n);
        if (s.contains(c)) return t;
        if (seen.insert(c)) add(t);
    }
    auto try_triple = [&](std::size_t r, std::size_t a, std::size_t b) -> bool {
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < k; ++j) c = c * n + cx.apply(proj[r * k + j], proj[a * k + j], proj[b * k + j]);
        if (!seen.insert(c)) return false;
        add(cx.apply(reps[r], reps[a], reps[b]));
        return s.contains(c);
    };
    for (std::size_t hi = 0; hi < reps.size(); ++hi) {
        // triples whose largest index is hi
        for (std::size_t x = 0; x <= hi; ++x)
            for (std::size_t y = 0; y <= hi; ++y) {
                if (try_triple(hi, x, y)) return reps.back();
                if (x < hi && try_triple(x, hi, y)) return reps.back();
                if (x < hi && y < hi && try_triple(x, y, hi)) return reps.back();
            }
    }
    return std::nullopt;
}

CodeSet code_set(const Ctx& cx, const std::vector<Tuple>& s, std::size_t k, int extra = -1) {
    CodeSet out(cx.space(k + (extra >= 0)));
    for (const auto& t : s) {
        if (t.size() != k) throw Error("relation arity does not match the index sequence");
        std::uint64_t c = 0;
        for (Element e : t) c = c * cx.n + e;
        if (extra >= 0) c = c * cx.n + static_cast<std::uint64_t>(extra);
        out.insert(c);
    }
    return out;
}

class TupleBag {
public:
    void add(const Tuple& t) {
        if (seen_.insert(t).second) items_.push_back(t);
    }
    std::vector<Tuple> take() { return std::move(items_); }

private:
    std::set<Tuple> seen_;
    std::vector<Tuple> items_;
};

// witnesses for every fork of u: (s, t) indices, s == t when a == b
std::map<Fork, std::pair<std::size_t, std::size_t>> fork_witnesses(const std::vector<Tuple>& u, std::size_t arity,
                                                                   std::size_t n) {
    std::map<Fork, std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < arity; ++i) {
        std::map<Tuple, std::vector<long>> groups;
        for (std::size_t j = 0; j < u.size(); ++j) {
            auto& g = groups.try_emplace(Tuple(u[j].begin(), u[j].begin() + static_cast<std::ptrdiff_t>(i)),
                                         std::vector<long>(n, -1))
                          .first->second;
            if (g[u[j][i]] < 0) g[u[j][i]] = static_cast<long>(j);
        }
        for (const auto& [prefix, first] : groups)
            for (Element a = 0; a < n; ++a)
                for (Element b = 0; b < n; ++b)
                    if (first[a] >= 0 && first[b] >= 0)
                        out.try_emplace(Fork{i + 1, a, b}, static_cast<std::size_t>(first[a]),
                                        static_cast<std::size_t>(first[b]));
    }
    return out;
}

// one round of Fix-values: from a representation of R_p to one of R_{p+1}, c = (c_1..c_{p+1})
std::vector<Tuple> fix_stage(const Ctx& cx, const std::vector<Tuple>& u, std::size_t arity,
                             const std::vector<Element>& c) {
    const std::size_t p = c.size() - 1;
    TupleBag out;
    for (const auto& [f, st] : fork_witnesses(u, arity, cx.n)) {
        const std::size_t i = f.position - 1;
        CodeSet pin(cx.space(2));
        pin.insert(std::uint64_t{c[p]} * cx.n + f.a);
        auto r = nonempty_impl(cx, u, {p, i}, pin);
        if (!r) continue;
        if (i > p || (f.a == f.b && f.b == c[i])) {
            out.add(*r);
            out.add(cx.apply(*r, u[st.first], u[st.second]));
        }
    }
    return out.take();
}

std::vector<Tuple> fix_impl(const Ctx& cx, std::vector<Tuple> u, std::size_t arity, const std::vector<Element>& c) {
    std::vector<Element> prefix;
    for (Element v : c) {
        prefix.push_back(v);
        u = fix_stage(cx, u, arity, prefix);
        if (u.empty()) break;
    }
    return u;
}

void check_rep(const CompactRep& rep, std::size_t n) {
    for (const auto& t : rep.tuples) {
        if (t.size() != rep.arity) throw Error("representation tuple of the wrong arity");
        for (Element e : t)
            if (e >= n) throw Error("representation value outside the operation's domain");
    }
}

void check_idx(const CompactRep& rep, const std::vector<std::size_t>& idx) {
    for (auto i : idx)
        if (i >= rep.arity) throw Error("index " + std::to_string(i) + " out of range");
}

}  // namespace

std::vector<Fork> forks(const std::vector<Tuple>& r, std::size_t arity) {
    Element n = 0;
    for (const auto& t : r)
        for (Element e : t) n = std::max(n, e + 1);
    std::vector<Fork> out;
    for (const auto& [f, w] : fork_witnesses(r, arity, n)) out.push_back(f);
    return out;
}

CompactRep compact_representation(const std::vector<Tuple>& r, std::size_t arity) {
    Element n = 0;
    for (const auto& t : r) {
        if (t.size() != arity) throw Error("tuple of the wrong arity");
        for (Element e : t) n = std::max(n, e + 1);
    }
    TupleBag bag;
    for (const auto& [f, w] : fork_witnesses(r, arity, n)) {
        bag.add(r[w.first]);
        bag.add(r[w.second]);
    }
    return {arity, bag.take()};
}

CompactRep full_representation(std::size_t arity, std::size_t domain) {
    CompactRep rep{arity, {}};
    TupleBag bag;
    for (std::size_t i = 0; i < arity; ++i)
        for (Element a = 0; a < domain; ++a) {
            Tuple t(arity, 0);
            t[i] = a;
            bag.add(t);
        }
    if (arity == 0) bag.add({});
    rep.tuples = bag.take();
    return rep;
}

void require_maltsev(const Operation& m) {
    if (m.arity() != 3) throw Error("a Maltsev operation is ternary");
    if (!check_identities({{"m", m}}, identities::maltsev())) throw Error("operation is not Maltsev");
}

std::vector<Tuple> closure_under_maltsev(const CompactRep& rep, const Operation& m, const Limits& lim) {
    require_maltsev(m);
    check_rep(rep, m.domain());
    Ctx cx{m.domain(), m};
    std::set<Tuple> seen(rep.tuples.begin(), rep.tuples.end());
    std::vector<Tuple> all(seen.begin(), seen.end());
    auto push = [&](const Tuple& t) {
        if (!seen.insert(t).second) return;
        if (seen.size() > lim.states) throw GuardExceeded("closure has too many tuples");
        all.push_back(t);
    };
    for (std::size_t hi = 0; hi < all.size(); ++hi)
        for (std::size_t x = 0; x <= hi; ++x)
            for (std::size_t y = 0; y <= hi; ++y) {
                push(cx.apply(all[hi], all[x], all[y]));
                if (x < hi) push(cx.apply(all[x], all[hi], all[y]));
                if (x < hi && y < hi) push(cx.apply(all[x], all[y], all[hi]));
            }
    return {seen.begin(), seen.end()};
}

std::optional<Tuple> nonempty(const CompactRep& rep, const std::vector<std::size_t>& idx, const std::vector<Tuple>& s,
                              const Operation& m) {
    require_maltsev(m);
    check_rep(rep, m.domain());
    check_idx(rep, idx);
    if (!preserves(m, m.domain(), s, idx.size())) throw Error("nonempty: the target relation is not preserved by m");
    Ctx cx{m.domain(), m};
    return nonempty_impl(cx, rep.tuples, idx, code_set(cx, s, idx.size()));
}

CompactRep fix_values(const CompactRep& rep, const std::vector<Element>& c, const Operation& m) {
    require_maltsev(m);
    check_rep(rep, m.domain());
    if (c.size() > rep.arity) throw Error("fix_values: more constants than positions");
    for (Element v : c)
        if (v >= m.domain()) throw Error("fix_values: constant outside the domain");
    Ctx cx{m.domain(), m};
    return {rep.arity, fix_impl(cx, rep.tuples, rep.arity, c)};
}

namespace {

std::vector<Tuple> next_impl(const Ctx& cx, const CompactRep& rep, const std::vector<std::size_t>& idx,
                             const std::vector<Tuple>& s) {
    TupleBag u;
    auto ext = idx;
    ext.push_back(0);
    for (std::size_t i = 0; i < rep.arity; ++i) {
        ext.back() = i;
        for (Element a = 0; a < cx.n; ++a) {
            auto t = nonempty_impl(cx, rep.tuples, ext, code_set(cx, s, idx.size(), static_cast<int>(a)));
            if (!t) continue;
            auto fixed = fix_impl(cx, rep.tuples, rep.arity,
                                  std::vector<Element>(t->begin(), t->begin() + static_cast<std::ptrdiff_t>(i)));
            for (Element b = 0; b < cx.n; ++b) {
                auto t2 = nonempty_impl(cx, fixed, ext, code_set(cx, s, idx.size(), static_cast<int>(b)));
                if (!t2) continue;
                u.add(*t);
                u.add(*t2);
            }
        }
    }
    return u.take();
}

}  // namespace

CompactRep next(const CompactRep& rep, const std::vector<std::size_t>& idx, const std::vector<Tuple>& s,
                const Operation& m) {
    require_maltsev(m);
    check_rep(rep, m.domain());
    check_idx(rep, idx);
    if (!preserves(m, m.domain(), s, idx.size())) throw Error("next: the constraint relation is not preserved by m");
    Ctx cx{m.domain(), m};
    return {rep.arity, next_impl(cx, rep, idx, s)};
}

MaltsevSolution solve_maltsev(const Structure& instance, const Structure& tmpl, const Operation& m) {
    require_maltsev(m);
    if (m.domain() != tmpl.size()) throw Error("Maltsev operation and template have different domains");
    if (!is_polymorphism(m, tmpl)) throw Error("operation is not a polymorphism of the template");
    auto map = signature_map(instance, tmpl);
    const std::size_t vars = instance.size(), n = tmpl.size();
    Ctx cx{n, m};
    MaltsevSolution sol;
    CompactRep rep = full_representation(vars, n);
    for (std::size_t r = 0; r < map.size(); ++r)
        for (const auto& t : instance.tuples(r)) {
            std::vector<std::size_t> idx(t.begin(), t.end());
            rep.tuples = next_impl(cx, rep, idx, tmpl.tuples(map[r]));
            sol.stages.push_back(rep);
            if (rep.empty()) return sol;
        }
    // pin the variables one at a time, smallest value first
    std::vector<Element> prefix;
    std::vector<Tuple> u = rep.tuples;
    for (std::size_t x = 0; x < vars; ++x) {
        bool pinned = false;
        for (Element c = 0; c < n && !pinned; ++c) {
            prefix.push_back(c);
            auto v = fix_stage(cx, u, vars, prefix);
            if (!v.empty()) {
                u = std::move(v);
                pinned = true;
            } else {
                prefix.pop_back();
            }
        }
        if (!pinned) throw Error("internal: pinning failed on a nonempty representation");
    }
    Mapping h{prefix, n};
    if (!is_homomorphism(instance, tmpl, h)) throw Error("internal: Maltsev solver produced an invalid witness");
    sol.map = std::move(h);
    return sol;
}

}  // namespace homlab
