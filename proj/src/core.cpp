#include "homlab/core.hpp"

#include <algorithm>
#include <numeric>

#include "homlab/error.hpp"
#include "homlab/homsearch.hpp"

namespace homlab {

namespace {

struct IsoSearch {
    Structure a, b;
    std::vector<std::size_t> map;  // relation of a -> relation of b
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::size_t, const Tuple*>>> due;
    std::vector<std::vector<std::size_t>> profile_a, profile_b;
    std::vector<Element> img;
    std::vector<std::uint8_t> used;
    std::vector<Mapping> found;
    std::size_t max_count = 1;

    IsoSearch(const Structure& a0, const Structure& b0) : a(a0), b(b0) {
        a.normalize();
        b.normalize();
        n = a.size();
    }

    bool compatible() {
        if (a.size() != b.size() || a.signature().size() != b.signature().size()) return false;
        try {
            map = signature_map(a, b);
        } catch (const SignatureMismatch&) {
            return false;
        }
        for (std::size_t r = 0; r < map.size(); ++r)
            if (a.tuples(r).size() != b.tuples(map[r]).size()) return false;
        auto profile = [&](const Structure& s, bool use_map) {
            std::vector<std::vector<std::size_t>> p(n);
            for (std::size_t r = 0; r < map.size(); ++r) {
                const std::size_t rr = use_map ? map[r] : r;
                const std::size_t k = s.signature()[rr].arity;
                for (auto& row : p) row.resize(row.size() + k + 1, 0);
                const std::size_t base = p.empty() ? 0 : p[0].size() - (k + 1);
                for (const auto& t : s.tuples(rr)) {
                    for (std::size_t i = 0; i < k; ++i) ++p[t[i]][base + i];
                    bool all_same = std::all_of(t.begin(), t.end(), [&](Element e) { return e == t[0]; });
                    if (all_same) ++p[t[0]][base + k];
                }
            }
            return p;
        };
        profile_a = profile(a, false);
        profile_b = profile(b, true);
        auto sa = profile_a, sb = profile_b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
        due.assign(n, {});
        for (std::size_t r = 0; r < map.size(); ++r)
            for (const auto& t : a.tuples(r)) due[*std::max_element(t.begin(), t.end())].push_back({map[r], &t});
        return true;
    }

    bool ok_at(std::size_t x) const {
        Tuple t;
        for (auto [rel, tup] : due[x]) {
            t.resize(tup->size());
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = img[(*tup)[i]];
            if (!b.contains(rel, t)) return false;
        }
        return true;
    }

    // returns true to stop
    bool run(std::size_t x) {
        if (x == n) {
            found.push_back(Mapping{img, n});
            return found.size() >= max_count;
        }
        for (Element y = 0; y < n; ++y) {
            if (used[y] || profile_a[x] != profile_b[y]) continue;
            img[x] = y;
            used[y] = 1;
            bool stop = ok_at(x) && run(x + 1);
            used[y] = 0;
            if (stop) return true;
        }
        return false;
    }

    void search(std::size_t cap) {
        max_count = cap;
        img.assign(n, 0);
        used.assign(n, 0);
        run(0);
    }
};

void check_cap(const Structure& a, const Limits& lim, const char* what) {
    if (a.size() > lim.domain)
        throw GuardExceeded(std::string(what) + ": structure has " + std::to_string(a.size()) +
                            " elements, cap is " + std::to_string(lim.domain));
}

}  // namespace

std::optional<Mapping> find_isomorphism(const Structure& a, const Structure& b, const Limits& lim) {
    check_cap(a, lim, "isomorphism");
    IsoSearch s(a, b);
    if (!s.compatible()) return std::nullopt;
    s.search(1);
    if (s.found.empty()) return std::nullopt;
    return s.found[0];
}

bool isomorphic(const Structure& a, const Structure& b, const Limits& lim) {
    return find_isomorphism(a, b, lim).has_value();
}

std::vector<Mapping> automorphisms(const Structure& a, const Limits& lim, std::size_t max_count) {
    check_cap(a, lim, "automorphisms");
    IsoSearch s(a, a);
    s.compatible();
    s.search(max_count + 1);
    if (s.found.size() > max_count) throw GuardExceeded("automorphism count exceeds its cap");
    return s.found;
}

std::vector<std::vector<std::size_t>> orbits(const Structure& a, std::size_t k, const Limits& lim) {
    if (k == 0) throw Error("orbits: k must be positive");
    auto total = checked_pow(a.size(), k, lim.states);
    if (!total) throw GuardExceeded("orbits: n^k exceeds the states cap");
    auto autos = automorphisms(a, lim);
    const std::size_t n = a.size(), N = *total;
    std::vector<std::size_t> parent(N);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& g : autos) {
        for (std::size_t c = 0; c < N; ++c) {
            auto t = decode_tuple(c, k, n);
            for (auto& e : t) e = g.table[e];
            std::size_t d = encode_tuple(t.data(), k, n);
            std::size_t ra = find(c), rb = find(d);
            if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }
    }
    std::vector<std::vector<std::size_t>> classes;
    std::vector<long> cls(N, -1);
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t r = find(c);
        if (cls[r] < 0) {
            cls[r] = static_cast<long>(classes.size());
            classes.emplace_back();
        }
        classes[static_cast<std::size_t>(cls[r])].push_back(c);
    }
    return classes;
}

namespace {

std::optional<Mapping> hom_into_subset(const Structure& a, const std::vector<Element>& subset) {
    // lists restrict every variable to the subset: a -> a[subset] without renumbering
    UnaryLists L(a.size(), a.size());
    ValueSet allowed;
    for (Element e : subset) allowed.insert(e);
    for (std::size_t x = 0; x < a.size(); ++x) L[x] = allowed;
    return search_hom(a, a, L);
}

}  // namespace

CoreResult core(const Structure& a0, const Limits& lim) {
    check_cap(a0, lim, "core");
    if (a0.size() == 0) throw Error("core: empty domain is not supported");
    Structure a = a0;
    a.normalize();
    // shrink to a minimal image; its size is the core size
    std::vector<Element> current(a.size());
    std::iota(current.begin(), current.end(), 0);
    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        for (std::size_t i = 0; i < current.size(); ++i) {
            std::vector<Element> smaller = current;
            smaller.erase(smaller.begin() + static_cast<long>(i));
            if (smaller.empty()) break;
            if (auto h = hom_into_subset(a, smaller)) {
                std::vector<Element> image = h->table;
                std::sort(image.begin(), image.end());
                image.erase(std::unique(image.begin(), image.end()), image.end());
                current = image;
                shrunk = true;
                break;
            }
        }
    }
    const std::size_t c = current.size();
    // lexicographically least image set of that size
    std::vector<Element> idx(c);
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t n = a.size();
    for (;;) {
        if (auto h = hom_into_subset(a, idx)) {
            // h restricted to idx permutes idx; undo that permutation
            std::vector<Element> inverse(n, 0);
            for (Element e : idx) inverse[h->table[e]] = e;
            Mapping r{std::vector<Element>(n), n};
            for (std::size_t x = 0; x < n; ++x) r.table[x] = inverse[h->table[x]];
            CoreResult res{induced_substructure(a, idx), idx, r};
            res.core.set_name(a0.name().empty() ? "core" : "core_" + a0.name());
            return res;
        }
        std::size_t i = c;
        while (i > 0 && idx[i - 1] == n - c + i - 1) --i;
        if (i == 0) throw Error("internal error: core image set vanished");
        ++idx[i - 1];
        for (std::size_t j = i; j < c; ++j) idx[j] = idx[j - 1] + 1;
    }
}

bool is_core(const Structure& a0, const Limits& lim) {
    check_cap(a0, lim, "is_core");
    Structure a = a0;
    a.normalize();
    std::vector<Element> all(a.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t v = 0; v < a.size(); ++v) {
        std::vector<Element> rest = all;
        rest.erase(rest.begin() + static_cast<long>(v));
        if (rest.empty()) return true;
        if (hom_into_subset(a, rest)) return false;
    }
    return true;
}

}  // namespace homlab
