#include "homlab/consistency.hpp"

#include <algorithm>
#include <unordered_map>

#include "engine.hpp"
#include "homlab/error.hpp"

namespace homlab {

UnaryLists::UnaryLists(std::size_t vars, std::size_t domain) : domain_(domain), lists_(vars, ValueSet::full(domain)) {
    if (domain > ValueSet::capacity) throw GuardExceeded("template domain larger than 64 elements");
}

bool UnaryLists::rejected() const {
    return std::any_of(lists_.begin(), lists_.end(), [](ValueSet s) { return s.empty(); });
}

bool UnaryLists::subset_of(const UnaryLists& o) const {
    if (o.vars() != vars()) return false;
    for (std::size_t i = 0; i < vars(); ++i)
        if (!lists_[i].subset_of(o.lists_[i])) return false;
    return true;
}

PairLists::PairLists(std::size_t vars, std::size_t domain)
    : vars_(vars), domain_(domain), lists_(vars * vars, ValueSet::full(domain * domain)) {
    if (domain > 8) throw GuardExceeded("path consistency supports templates with at most 8 elements");
}

bool PairLists::rejected() const {
    return std::any_of(lists_.begin(), lists_.end(), [](ValueSet s) { return s.empty(); });
}

static void check_lists(const Structure& instance, const Structure& tmpl, const UnaryLists& init) {
    if (init.vars() != instance.size() || init.domain() != tmpl.size())
        throw Error("initial lists do not match the instance/template sizes");
}

std::optional<UnaryLists> ac(const Structure& instance, const Structure& tmpl, const UnaryLists& init) {
    check_lists(instance, tmpl, init);
    detail::GacNetwork net(instance, tmpl);
    UnaryLists out = init;
    if (out.rejected()) return std::nullopt;
    if (!net.propagate(out.sets(), {}, true)) return std::nullopt;
    return out;
}

std::optional<UnaryLists> ac(const Structure& instance, const Structure& tmpl) {
    return ac(instance, tmpl, UnaryLists::full(instance.size(), tmpl.size()));
}

// ---- path consistency ----

namespace {

// {(u,w) : exists v, (u,v) in a and (v,w) in b}
ValueSet compose(ValueSet a, ValueSet b, std::size_t d) {
    const std::uint64_t row = (std::uint64_t{1} << d) - 1;
    std::uint64_t res = 0;
    for (std::size_t u = 0; u < d; ++u) {
        std::uint64_t ra = (a.bits() >> (u * d)) & row;
        std::uint64_t acc = 0;
        while (ra) {
            std::size_t v = static_cast<std::size_t>(std::countr_zero(ra));
            ra &= ra - 1;
            acc |= (b.bits() >> (v * d)) & row;
        }
        res |= acc << (u * d);
    }
    return ValueSet(res);
}

ValueSet transpose(ValueSet a, std::size_t d) {
    ValueSet t;
    for (Element p : a) t.insert(static_cast<Element>((p % d) * d + p / d));
    return t;
}

ValueSet diagonal(std::size_t d) {
    ValueSet t;
    for (std::size_t u = 0; u < d; ++u) t.insert(static_cast<Element>(u * d + u));
    return t;
}

}  // namespace

// Pairs are kept transposition-consistent: L(y,x) is always the transpose of L(x,y).
bool pc_propagate(PairLists& L, const std::vector<std::size_t>& dirty) {
    const std::size_t n = L.vars(), d = L.domain();
    std::vector<std::uint8_t> queued(n * n, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> queue;
    std::size_t head = 0;
    auto push = [&](std::size_t x, std::size_t y) {
        if (x > y) std::swap(x, y);
        if (queued[x * n + y]) return;
        queued[x * n + y] = 1;
        queue.emplace_back(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
    };
    for (std::size_t x : dirty)
        for (std::size_t y = 0; y < n; ++y) push(x, y);

    // L(x,z) &= L(x,y) o L(y,z), keeping the transpose in sync
    auto revise = [&](std::size_t x, std::size_t y, std::size_t z) -> int {
        ValueSet nl = L.at(x, z) & compose(L.at(x, y), L.at(y, z), d);
        if (nl == L.at(x, z)) return 0;
        if (nl.empty()) return -1;
        L.at(x, z) = nl;
        L.at(z, x) = transpose(nl, d);
        push(x, z);
        return 1;
    };

    while (head < queue.size()) {
        auto [x, y] = queue[head++];
        queued[x * n + y] = 0;
        for (std::size_t z = 0; z < n; ++z) {
            if (revise(x, y, z) < 0 || revise(z, x, y) < 0) return false;
            if (x != y && (revise(y, x, z) < 0 || revise(z, y, x) < 0)) return false;
        }
        if (head > 65536 && head * 2 > queue.size()) {
            queue.erase(queue.begin(), queue.begin() + static_cast<long>(head));
            head = 0;
        }
    }
    return true;
}

std::optional<PairLists> pc(const Structure& instance, const Structure& tmpl, const UnaryLists& init) {
    if (!is_digraph(instance) || !is_digraph(tmpl))
        throw SignatureMismatch("pc expects digraphs; use k_consistency for other signatures");
    check_lists(instance, tmpl, init);
    const std::size_t n = instance.size(), d = tmpl.size();
    PairLists L(n, d);
    ValueSet E;
    for (const auto& t : tmpl.tuples(0)) E.insert(t[0] * static_cast<Element>(d) + t[1]);
    const ValueSet diag = diagonal(d);
    for (std::size_t x = 0; x < n; ++x) {
        ValueSet dx;
        for (Element u : init[x]) dx.insert(u * static_cast<Element>(d) + u);
        L.at(x, x) = dx;
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            ValueSet p;
            for (Element u : init[x])
                for (Element v : init[y]) p.insert(u * static_cast<Element>(d) + v);
            L.at(x, y) = p;
        }
    }
    for (const auto& t : instance.tuples(0)) {
        const std::size_t x = t[0], y = t[1];
        if (x == y) {
            L.at(x, x) &= E & diag;
        } else {
            L.at(x, y) &= E;
            L.at(y, x) = transpose(L.at(x, y), d);
        }
    }
    if (L.rejected()) return std::nullopt;
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    if (!pc_propagate(L, all)) return std::nullopt;
    return L;
}

std::optional<PairLists> pc(const Structure& instance, const Structure& tmpl) {
    return pc(instance, tmpl, UnaryLists::full(instance.size(), tmpl.size()));
}

// ---- k-consistency ----

namespace {

struct KCons {
    const Structure& inst;
    const Structure& tmpl;
    std::vector<std::size_t> map;
    std::size_t n, d, m;
    std::vector<std::uint64_t> subsets;  // bitmask of variables, sorted order of enumeration
    std::unordered_map<std::uint64_t, std::size_t> index;
    std::vector<std::vector<std::uint8_t>> alive;  // per subset, per assignment code
    struct C {
        std::size_t rel;
        Tuple scope;
        std::uint64_t mask;
    };
    std::vector<C> cons;

    KCons(const Structure& i, const Structure& t, std::size_t k)
        : inst(i), tmpl(t), map(signature_map(i, t)), n(i.size()), d(t.size()), m(std::min(k - 1, i.size())) {
        for (std::size_t r = 0; r < map.size(); ++r)
            for (const auto& tup : inst.tuples(r)) {
                std::uint64_t mask = 0;
                for (Element e : tup) mask |= std::uint64_t{1} << e;
                cons.push_back({map[r], tup, mask});
            }
    }

    static std::vector<Element> members(std::uint64_t mask) {
        std::vector<Element> v;
        while (mask) {
            v.push_back(static_cast<Element>(std::countr_zero(mask)));
            mask &= mask - 1;
        }
        return v;
    }

    // assignment given as full-length vector `val` (only entries in mask matter)
    bool satisfies_inside(std::uint64_t mask, const std::vector<Element>& val, std::uint64_t must) const {
        Tuple img;
        for (const auto& c : cons) {
            if ((c.mask & ~mask) != 0 || (c.mask & must) == 0) continue;
            img.resize(c.scope.size());
            for (std::size_t i = 0; i < img.size(); ++i) img[i] = val[c.scope[i]];
            if (!tmpl.contains(c.rel, img)) return false;
        }
        return true;
    }

    // projection of every partially covered constraint must extend
    bool projections_ok(std::uint64_t mask, const std::vector<Element>& val) const {
        for (const auto& c : cons) {
            if ((c.mask & mask) == 0 || (c.mask & ~mask) == 0) continue;
            bool found = false;
            for (const auto& t : tmpl.tuples(c.rel)) {
                bool ok = true;
                for (std::size_t i = 0; i < t.size() && ok; ++i) {
                    if ((mask >> c.scope[i]) & 1U) ok = t[i] == val[c.scope[i]];
                    for (std::size_t j = 0; j < i && ok; ++j)
                        if (c.scope[j] == c.scope[i]) ok = t[j] == t[i];
                }
                if (ok) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    }

    std::size_t code_of(const std::vector<Element>& vars, const std::vector<Element>& val) const {
        std::size_t c = 0;
        for (Element v : vars) c = c * d + val[v];
        return c;
    }
};

void enumerate_subsets(std::size_t n, std::size_t m, std::vector<std::uint64_t>& out) {
    std::vector<Element> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = static_cast<Element>(i);
    for (;;) {
        std::uint64_t mask = 0;
        for (Element e : idx) mask |= std::uint64_t{1} << e;
        out.push_back(mask);
        std::size_t i = m;
        while (i > 0 && idx[i - 1] == n - m + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

bool k_consistency(const Structure& instance, const Structure& tmpl, std::size_t k, const Limits& lim) {
    if (k < 2) throw Error("k_consistency: k must be at least 2");
    if (instance.size() > 64) throw GuardExceeded("k_consistency supports at most 64 variables");
    KCons kc(instance, tmpl, k);
    const std::size_t n = kc.n, d = kc.d, m = kc.m;
    if (n == 0) return true;
    enumerate_subsets(n, m, kc.subsets);
    const std::size_t per = ipow(d, m);
    if (!checked_pow(d, m, lim.states) || kc.subsets.size() * per > lim.states)
        throw GuardExceeded("k_consistency state space exceeds the states cap");
    for (std::size_t i = 0; i < kc.subsets.size(); ++i) kc.index[kc.subsets[i]] = i;

    std::vector<Element> val(n, 0);
    kc.alive.assign(kc.subsets.size(), std::vector<std::uint8_t>(per, 0));
    for (std::size_t s = 0; s < kc.subsets.size(); ++s) {
        auto vars = KCons::members(kc.subsets[s]);
        bool any = false;
        for (std::size_t code = 0; code < per; ++code) {
            auto t = decode_tuple(code, m, d);
            for (std::size_t i = 0; i < m; ++i) val[vars[i]] = t[i];
            if (kc.satisfies_inside(kc.subsets[s], val, kc.subsets[s]) && kc.projections_ok(kc.subsets[s], val)) {
                kc.alive[s][code] = 1;
                any = true;
            }
        }
        if (!any) return false;
    }
    if (m == n) return true;

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t s = 0; s < kc.subsets.size(); ++s) {
            const std::uint64_t S = kc.subsets[s];
            auto vars = KCons::members(S);
            bool any = false;
            for (std::size_t code = 0; code < per; ++code) {
                if (!kc.alive[s][code]) continue;
                auto t = decode_tuple(code, m, d);
                for (std::size_t i = 0; i < m; ++i) val[vars[i]] = t[i];
                bool ok = true;
                for (Element z = 0; z < n && ok; ++z) {
                    if ((S >> z) & 1U) continue;
                    const std::uint64_t U = S | (std::uint64_t{1} << z);
                    bool ext = false;
                    for (Element b = 0; b < d && !ext; ++b) {
                        val[z] = b;
                        bool good = kc.satisfies_inside(U, val, std::uint64_t{1} << z);
                        // every m-subset of U containing z
                        for (std::size_t drop = 0; drop < m && good; ++drop) {
                            std::uint64_t T = U & ~(std::uint64_t{1} << vars[drop]);
                            auto tv = KCons::members(T);
                            good = kc.alive[kc.index.at(T)][kc.code_of(tv, val)] != 0;
                        }
                        ext = good;
                    }
                    ok = ext;
                }
                if (!ok) {
                    kc.alive[s][code] = 0;
                    changed = true;
                } else {
                    any = true;
                }
            }
            if (!any) return false;
        }
    }
    return true;
}

// ---- singleton arc consistency ----

std::optional<UnaryLists> sac(const Structure& instance, const Structure& tmpl, const UnaryLists& init) {
    check_lists(instance, tmpl, init);
    detail::GacNetwork net(instance, tmpl);
    UnaryLists L = init;
    if (L.rejected() || !net.propagate(L.sets(), {}, true)) return std::nullopt;
    bool clean = false;
    while (!clean) {
        clean = true;
        for (std::size_t a = 0; a < L.vars() && clean; ++a) {
            for (Element b : L[a]) {
                auto copy = L.sets();
                copy[a] = ValueSet::single(b);
                if (net.propagate(copy, {static_cast<detail::Var>(a)}, false)) continue;
                L[a].erase(b);
                if (L[a].empty() || !net.propagate(L.sets(), {static_cast<detail::Var>(a)}, false)) return std::nullopt;
                clean = false;
                break;
            }
        }
    }
    return L;
}

std::optional<UnaryLists> sac(const Structure& instance, const Structure& tmpl) {
    return sac(instance, tmpl, UnaryLists::full(instance.size(), tmpl.size()));
}

}  // namespace homlab
