#include "homlab/homsearch.hpp"

#include <algorithm>

#include "engine.hpp"
#include "homlab/error.hpp"

namespace homlab {

namespace {

void check_lists(const Structure& instance, const Structure& tmpl, const UnaryLists& init) {
    if (init.vars() != instance.size() || init.domain() != tmpl.size())
        throw Error("initial lists do not match the instance/template sizes");
}

Mapping to_mapping(const std::vector<Element>& v, std::size_t target) { return Mapping{v, target}; }

}  // namespace

std::optional<Mapping> brute_force_hom(const Structure& instance, const Structure& tmpl, const UnaryLists& init,
                                       const Limits& lim) {
    check_lists(instance, tmpl, init);
    const std::size_t n = instance.size();
    auto map = signature_map(instance, tmpl);
    std::uint64_t space = 1;
    for (std::size_t x = 0; x < n; ++x) {
        std::uint64_t s = init[x].size();
        if (s == 0) return std::nullopt;
        if (space > lim.brute_force / s) throw GuardExceeded("brute force search space exceeds its cap");
        space *= s;
    }
    // constraints checked as soon as their last variable is assigned
    std::vector<std::vector<std::pair<std::size_t, const Tuple*>>> due(n);
    for (std::size_t r = 0; r < map.size(); ++r)
        for (const auto& t : instance.tuples(r)) due[*std::max_element(t.begin(), t.end())].push_back({map[r], &t});

    std::vector<Element> val(n, 0);
    std::vector<std::vector<Element>> choices(n);
    for (std::size_t x = 0; x < n; ++x)
        for (Element v : init[x]) choices[x].push_back(v);
    std::vector<std::size_t> pos(n, 0);
    Tuple img;
    auto ok_at = [&](std::size_t x) {
        for (auto [rel, t] : due[x]) {
            img.resize(t->size());
            for (std::size_t i = 0; i < img.size(); ++i) img[i] = val[(*t)[i]];
            if (!tmpl.contains(rel, img)) return false;
        }
        return true;
    };
    if (n == 0) return Mapping{{}, tmpl.size()};
    std::size_t x = 0;
    for (;;) {
        if (pos[x] < choices[x].size()) {
            val[x] = choices[x][pos[x]++];
            if (!ok_at(x)) continue;
            if (x + 1 == n) return to_mapping(val, tmpl.size());
            ++x;
            pos[x] = 0;
        } else {
            if (x == 0) return std::nullopt;
            --x;
        }
    }
}

std::optional<Mapping> brute_force_hom(const Structure& instance, const Structure& tmpl, const Limits& lim) {
    return brute_force_hom(instance, tmpl, UnaryLists::full(instance.size(), tmpl.size()), lim);
}

AllHoms all_homs(const Structure& instance, const Structure& tmpl, const UnaryLists& init, std::size_t cap) {
    check_lists(instance, tmpl, init);
    detail::GacNetwork net(instance, tmpl);
    auto out = detail::backtrack(net, init.sets(), {cap, 0});
    AllHoms res;
    for (auto& s : out.solutions) {
        Mapping m = to_mapping(s, tmpl.size());
        if (!is_homomorphism(instance, tmpl, m)) throw Error("internal error: search produced a non-homomorphism");
        res.maps.push_back(std::move(m));
    }
    res.complete = res.maps.size() < cap;
    return res;
}

std::optional<Mapping> search_hom(const Structure& instance, const Structure& tmpl, const UnaryLists& init) {
    auto r = all_homs(instance, tmpl, init, 1);
    if (r.maps.empty()) return std::nullopt;
    for (std::size_t x = 0; x < instance.size(); ++x)
        if (!init[x].contains(r.maps[0].table[x])) throw Error("internal error: search ignored a list");
    return r.maps[0];
}

std::optional<Mapping> search_hom(const Structure& instance, const Structure& tmpl) {
    return search_hom(instance, tmpl, UnaryLists::full(instance.size(), tmpl.size()));
}

Construction construct_solution(const Structure& instance, const Structure& tmpl, const Oracle& oracle) {
    Construction res;
    UnaryLists L = UnaryLists::full(instance.size(), tmpl.size());
    ++res.oracle_calls;
    if (!oracle(instance, tmpl, L)) return res;
    for (std::size_t x = 0; x < instance.size(); ++x) {
        bool pinned = false;
        for (Element u = 0; u < tmpl.size() && !pinned; ++u) {
            UnaryLists trial = L;
            trial[x] = ValueSet::single(u);
            ++res.oracle_calls;
            if (oracle(instance, tmpl, trial)) {
                L = trial;
                pinned = true;
            }
        }
        if (!pinned)
            throw OracleInconsistency("oracle accepted, but every value for variable " + std::to_string(x) +
                                      " was rejected");
    }
    Mapping m{std::vector<Element>(instance.size()), tmpl.size()};
    for (std::size_t x = 0; x < instance.size(); ++x) m.table[x] = L[x].min();
    if (!is_homomorphism(instance, tmpl, m))
        throw OracleInconsistency("oracle accepted a full assignment that is not a homomorphism");
    res.map = std::move(m);
    return res;
}

Oracle ac_oracle() {
    return [](const Structure& i, const Structure& t, const UnaryLists& l) { return ac(i, t, l).has_value(); };
}
Oracle pc_oracle() {
    return [](const Structure& i, const Structure& t, const UnaryLists& l) { return pc(i, t, l).has_value(); };
}
Oracle sac_oracle() {
    return [](const Structure& i, const Structure& t, const UnaryLists& l) { return sac(i, t, l).has_value(); };
}
Oracle brute_force_oracle() {
    return [](const Structure& i, const Structure& t, const UnaryLists& l) {
        return brute_force_hom(i, t, l).has_value();
    };
}
Oracle search_oracle() {
    return [](const Structure& i, const Structure& t, const UnaryLists& l) { return search_hom(i, t, l).has_value(); };
}

}  // namespace homlab
