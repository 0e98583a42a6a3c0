#pragma once
// Shared generators and small oracles for the test suites.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "homlab/structure.hpp"

namespace hl = homlab;

namespace testsupport {

using Rng = std::mt19937;

inline hl::Structure random_digraph(Rng& rng, std::size_t n, double p, bool loops = true) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<hl::Element, hl::Element>> e;
    for (hl::Element u = 0; u < n; ++u)
        for (hl::Element v = 0; v < n; ++v)
            if ((loops || u != v) && coin(rng)) e.emplace_back(u, v);
    return hl::digraph(n, e);
}

// no loops and no pair of opposite edges
inline hl::Structure random_oriented(Rng& rng, std::size_t n, double p) {
    std::bernoulli_distribution coin(p), dir(0.5);
    std::vector<std::pair<hl::Element, hl::Element>> e;
    for (hl::Element u = 0; u < n; ++u)
        for (hl::Element v = u + 1; v < n; ++v)
            if (coin(rng)) {
                if (dir(rng)) e.emplace_back(u, v);
                else e.emplace_back(v, u);
            }
    return hl::digraph(n, e);
}

inline hl::Structure random_graph(Rng& rng, std::size_t n, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<hl::Element, hl::Element>> e;
    for (hl::Element u = 0; u < n; ++u)
        for (hl::Element v = u + 1; v < n; ++v)
            if (coin(rng)) {
                e.emplace_back(u, v);
                e.emplace_back(v, u);
            }
    return hl::digraph(n, e);
}

// random instance over the signature of `tmpl`, with `m` constraints per relation
inline hl::Structure random_instance(Rng& rng, const hl::Structure& tmpl, std::size_t n, std::size_t m) {
    hl::Structure s(n, tmpl.signature());
    std::uniform_int_distribution<hl::Element> var(0, static_cast<hl::Element>(n - 1));
    for (std::size_t r = 0; r < tmpl.signature().size(); ++r)
        for (std::size_t i = 0; i < m; ++i) {
            hl::Tuple t(tmpl.signature()[r].arity);
            for (auto& e : t) e = var(rng);
            s.add_tuple(r, t);
        }
    s.normalize();
    return s;
}

// every function instance -> template, checked by definition; the most naive oracle
inline bool exists_hom_naive(const hl::Structure& a, const hl::Structure& b) {
    const std::size_t n = a.size(), d = b.size();
    std::vector<hl::Element> f(n, 0);
    for (;;) {
        if (hl::is_homomorphism(a, b, hl::Mapping{f, d})) return true;
        std::size_t i = 0;
        while (i < n && ++f[i] == d) f[i++] = 0;
        if (i == n) return false;
    }
}

// one digraph per isomorphism class on n vertices (n <= 4), by minimal adjacency mask
inline std::vector<hl::Structure> digraphs_up_to_iso(std::size_t n, bool loops = true) {
    std::vector<std::size_t> perm(n);
    std::vector<std::vector<std::size_t>> perms;
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    auto relabel = [&](std::uint32_t mask, const std::vector<std::size_t>& p) {
        std::uint32_t out = 0;
        for (std::size_t b = 0; b < n * n; ++b)
            if ((mask >> b) & 1U) out |= 1U << (p[b / n] * n + p[b % n]);
        return out;
    };
    std::vector<hl::Structure> out;
    for (std::uint32_t mask = 0; mask < (1U << (n * n)); ++mask) {
        bool has_loop = false;
        for (std::size_t u = 0; u < n; ++u) has_loop = has_loop || ((mask >> (u * n + u)) & 1U);
        if (has_loop && !loops) continue;
        bool minimal = true;
        for (const auto& p : perms)
            if (relabel(mask, p) < mask) {
                minimal = false;
                break;
            }
        if (!minimal) continue;
        std::vector<std::pair<hl::Element, hl::Element>> e;
        for (std::size_t b = 0; b < n * n; ++b)
            if ((mask >> b) & 1U) e.emplace_back(static_cast<hl::Element>(b / n), static_cast<hl::Element>(b % n));
        out.push_back(hl::digraph(n, e));
    }
    return out;
}

inline std::vector<std::pair<hl::Element, hl::Element>> edges_of(const hl::Structure& g) {
    std::vector<std::pair<hl::Element, hl::Element>> e;
    for (const auto& t : g.tuples(0)) e.emplace_back(t[0], t[1]);
    return e;
}

}  // namespace testsupport
