#include "homlab/powerset.hpp"

#include <set>

#include "engine.hpp"
#include "homlab/error.hpp"

namespace homlab {

std::uint64_t subset_mask(Element e) { return std::uint64_t{e} + 1; }
Element powerset_element(std::uint64_t mask) { return static_cast<Element>(mask - 1); }

Structure powerset_structure(const Structure& b, const Limits& lim) {
    const std::size_t n = b.size();
    if (n == 0) throw Error("powerset of an empty domain");
    if (n > lim.powerset_domain || n > 16)
        throw GuardExceeded("powerset of a " + std::to_string(n) + "-element domain exceeds the cap " +
                            std::to_string(lim.powerset_domain));
    Structure p((std::size_t{1} << n) - 1, b.signature(), "P(" + b.name() + ")");
    // R^P is the closure of the singleton images of R under componentwise union
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < b.signature().size(); ++r) {
        const auto& rel = b.tuples(r);
        std::vector<Tuple> atoms;
        for (const auto& t : rel) {
            Tuple a(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) a[i] = Element{1} << t[i];
            atoms.push_back(std::move(a));
        }
        std::set<Tuple> seen(atoms.begin(), atoms.end());
        std::vector<Tuple> frontier(seen.begin(), seen.end());
        while (!frontier.empty()) {
            std::vector<Tuple> next;
            for (const auto& u : frontier)
                for (const auto& a : atoms) {
                    Tuple v(u.size());
                    for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] | a[i];
                    if (seen.insert(v).second) {
                        if (total + seen.size() > lim.states) throw GuardExceeded("powerset structure has too many tuples");
                        next.push_back(std::move(v));
                    }
                }
            frontier = std::move(next);
        }
        total += seen.size();
        for (Tuple t : seen) {
            for (auto& m : t) m = powerset_element(m);
            p.add_tuple(r, std::move(t));
        }
    }
    p.normalize();
    return p;
}

AcSolvability ac_solvability(const Structure& b, const Limits& lim) {
    AcSolvability res;
    res.core = core(b, lim);
    const Structure& h = res.core.core;
    const std::size_t n = h.size();
    auto p = powerset_structure(h, lim);
    detail::GacNetwork net(p, h);
    std::vector<ValueSet> dom(p.size(), ValueSet::full(n));
    // a core may send every singleton to itself
    for (Element u = 0; u < n; ++u) dom[powerset_element(std::uint64_t{1} << u)] = ValueSet::single(u);
    if (!net.propagate(dom, {}, true)) {
        res.rejected_initially = true;
        return res;
    }
    for (Element x = 0; x < p.size(); ++x) {
        if (dom[x].is_singleton()) continue;
        bool adopted = false;
        for (Element u : dom[x]) {
            auto trial = dom;
            trial[x] = ValueSet::single(u);
            if (net.propagate(trial, {x}, false)) {
                dom = std::move(trial);
                res.pins.emplace_back(x, u);
                adopted = true;
                break;
            }
        }
        if (!adopted) {
            res.stuck = x;
            return res;
        }
    }
    Mapping hom{std::vector<Element>(p.size()), n};
    for (Element x = 0; x < p.size(); ++x) hom.table[x] = dom[x].min();
    if (!is_homomorphism(p, h, hom)) return res;
    res.solvable = true;
    res.hom = std::move(hom);
    return res;
}

Operation extract_totally_symmetric(const Structure& b, const Mapping& hom, std::size_t k, const Limits& lim) {
    auto p = powerset_structure(b, lim);
    if (!is_homomorphism(p, b, hom)) throw Error("extract_totally_symmetric: not a homomorphism from P(B) to B");
    if (k == 0) throw Error("extract_totally_symmetric: arity must be positive");
    if (!checked_pow(b.size(), k, lim.states)) throw GuardExceeded("operation table too large");
    auto f = Operation::from_function(k, b.size(), [&](const Tuple& x) {
        std::uint64_t m = 0;
        for (Element e : x) m |= std::uint64_t{1} << e;
        return hom.table[powerset_element(m)];
    }, "ts" + std::to_string(k));
    if (!is_polymorphism(f, b)) throw Error("internal: extracted operation is not a polymorphism");
    return f;
}

}  // namespace homlab
