#include "homlab/classify.hpp"

#include <sstream>

#include "homlab/error.hpp"
#include "homlab/identities.hpp"
#include "homlab/structure_io.hpp"

namespace homlab {

namespace {

std::string tuple_text(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
}

// "R (0,1) (1,0) -> (0,0)" for the first argument rows whose image leaves R
std::optional<std::string> violation(const Operation& f, const Structure& b) {
    for (std::size_t r = 0; r < b.signature().size(); ++r) {
        const auto& rows = b.tuples(r);
        const std::size_t k = b.signature()[r].arity, a = f.arity();
        if (rows.empty()) continue;
        const std::size_t total = ipow(rows.size(), a);
        for (std::size_t c = 0; c < total; ++c) {
            Tuple pick = decode_tuple(c, a, rows.size());
            Tuple img(k), args(a);
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t i = 0; i < a; ++i) args[i] = rows[pick[i]][j];
                img[j] = f(args);
            }
            if (b.contains(r, img)) continue;
            std::string s = b.signature()[r].name;
            for (auto p : pick) s += " " + tuple_text(rows[p]);
            return s + " -> " + tuple_text(img);
        }
    }
    return std::nullopt;
}

bool valid_core(const CoreResult& c, const Structure& b) {
    if (!is_homomorphism(b, b, c.retraction)) return false;
    for (std::size_t i = 0; i < c.elements.size(); ++i)
        if (c.retraction(c.elements[i]) != c.elements[i]) return false;
    for (Element x = 0; x < b.size(); ++x)
        if (std::find(c.elements.begin(), c.elements.end(), c.retraction(x)) == c.elements.end()) return false;
    return c.core == induced_substructure(b, c.elements);
}

Verdict inconclusive(std::string classifier, std::string reason) {
    Verdict v;
    v.classifier = std::move(classifier);
    v.reason = std::move(reason);
    return v;
}

// core, then the Siggers search on its singleton expansion
Verdict siggers_pipeline(const std::string& classifier, const Structure& b, const Limits& lim, Verdict v) {
    try {
        auto res = find_special(with_singletons(v.core ? v.core->core : b), Special::Siggers4, {}, lim);
        if (res.verdict == SearchVerdict::Inconclusive) return inconclusive(classifier, "Siggers search: " + res.note);
        if (res.verdict == SearchVerdict::Found) {
            v.complexity = Complexity::P;
            v.reason = "the core has a 4-ary Siggers polymorphism";
            v.ops = std::move(res.ops);
            v.ops_satisfy = Special::Siggers4;
            v.ops_on = v.core->core;
        } else {
            v.complexity = Complexity::NPComplete;
            if (v.reason.empty()) v.reason = "exhaustive search: the core has no 4-ary Siggers polymorphism";
        }
        return v;
    } catch (const GuardExceeded& e) {
        return inconclusive(classifier, std::string("Siggers search: ") + e.what());
    }
}

}  // namespace

std::string complexity_name(Complexity c) {
    switch (c) {
        case Complexity::P: return "P";
        case Complexity::NPComplete: return "NP-complete";
        default: return "INCONCLUSIVE";
    }
}

bool check_certificate(const Verdict& v, const Structure& b) {
    if (v.complexity == Complexity::Inconclusive) return true;
    if (v.core && !valid_core(*v.core, b)) return false;
    if (!v.ops.empty()) {
        if (!v.ops_on) return false;
        if (!(*v.ops_on == b) && !(v.core && *v.ops_on == v.core->core)) return false;
        for (const auto& [name, f] : v.ops)
            if (!is_polymorphism(f, *v.ops_on)) return false;
        if (v.ops_satisfy && !check_identities(v.ops, special_system(*v.ops_satisfy, v.ops_arity))) return false;
    }
    if (v.colouring) {
        if (v.colouring->size() != b.size()) return false;
        for (const auto& t : b.tuples(0))
            if ((*v.colouring)[t[0]] == (*v.colouring)[t[1]] || (*v.colouring)[t[0]] > 1) return false;
    }
    if (v.loop && !b.contains(0, {*v.loop, *v.loop})) return false;
    if (v.odd_cycle) {
        const auto& c = *v.odd_cycle;
        if (c.size() % 2 == 0) return false;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (!b.contains(0, {c[i], c[(i + 1) % c.size()]})) return false;
        for (Element x = 0; x < b.size(); ++x)
            if (b.contains(0, {x, x})) return false;
    }
    if (v.classifier == "smooth" && v.complexity == Complexity::P && v.ops.empty())
        return v.core && structure_predicates(v.core->core).is_disjoint_union_of_directed_cycles;
    if (v.classifier == "schaefer" && v.complexity == Complexity::P) return !v.classes.empty() && !v.ops.empty();
    return true;
}

std::string report(const Verdict& v) {
    std::ostringstream out;
    out << complexity_name(v.complexity) << ": " << v.reason << '\n';
    out << "classifier " << v.classifier << '\n';
    if (!v.classes.empty()) {
        out << "classes";
        for (const auto& c : v.classes) out << ' ' << c;
        out << '\n';
    }
    for (const auto& f : v.failures) out << "fails " << f << '\n';
    if (v.loop) out << "loop " << *v.loop << '\n';
    auto list = [&](const char* key, const std::vector<Element>& xs) {
        out << key;
        for (Element x : xs) out << ' ' << x;
        out << '\n';
    };
    if (v.colouring) list("colouring", *v.colouring);
    if (v.odd_cycle) list("odd-cycle", *v.odd_cycle);
    if (v.core) {
        list("core-elements", v.core->elements);
        out << to_text(v.core->core);
    }
    for (const auto& [name, f] : v.ops) {
        Operation g = f;
        g.set_name(name);
        out << to_text(g);
    }
    return out.str();
}

Verdict schaefer(const Structure& b) {
    if (b.size() != 2) throw Error("Schaefer classification needs a two-element structure");
    const std::vector<std::pair<std::string, Operation>> tests{
        {"const0", constant_operation(1, 2, 0)}, {"const1", constant_operation(1, 2, 1)},
        {"horn", min_operation(2)},              {"dual-horn", max_operation(2)},
        {"bijunctive", boolean_majority()},      {"affine", boolean_minority()},
    };
    Verdict v;
    v.classifier = "schaefer";
    for (const auto& [cls, f] : tests) {
        if (auto bad = violation(f, b)) {
            v.failures.push_back(cls + ": " + *bad);
        } else {
            v.classes.push_back(cls);
            v.ops[cls] = f;
        }
    }
    if (v.classes.empty()) {
        v.complexity = Complexity::NPComplete;
        v.reason = "not preserved by a constant, min, max, majority or minority";
    } else {
        v.complexity = Complexity::P;
        v.ops_on = b;
        for (const auto& c : v.classes) v.reason += (v.reason.empty() ? "" : ", ") + c;
    }
    return v;
}

Verdict hell_nesetril(const Structure& h) {
    if (!is_digraph(h) || !structure_predicates(h).is_symmetric) throw Error("graph classification needs a symmetric digraph");
    Verdict v;
    v.classifier = "graph";
    for (const auto& t : h.tuples(0))
        if (t[0] == t[1]) {
            v.complexity = Complexity::P;
            v.reason = "loop at " + std::to_string(t[0]);
            v.loop = t[0];
            return v;
        }
    if (auto c = two_colouring(h)) {
        v.complexity = Complexity::P;
        v.reason = "bipartite";
        v.colouring = std::move(c);
        return v;
    }
    v.complexity = Complexity::NPComplete;
    v.reason = "non-bipartite, loopless";
    v.odd_cycle = odd_cycle(h);
    return v;
}

Verdict smooth_digraph(const Structure& h, const Limits& lim) {
    if (!is_digraph(h) || !structure_predicates(h).is_smooth) throw Error("digraph has a source or a sink");
    Verdict v;
    v.classifier = "smooth";
    try {
        v.core = core(h, lim);
    } catch (const GuardExceeded& e) {
        return inconclusive("smooth", std::string("core: ") + e.what());
    }
    if (structure_predicates(v.core->core).is_disjoint_union_of_directed_cycles) {
        v.complexity = Complexity::P;
        v.reason = "core is a disjoint union of directed cycles";
        return v;
    }
    v.reason = "smooth core is not a disjoint union of directed cycles; no 4-ary Siggers polymorphism";
    return siggers_pipeline("smooth", h, lim, std::move(v));
}

Verdict dichotomy(const Structure& b, const Limits& lim) {
    Verdict v;
    v.classifier = "dichotomy";
    try {
        v.core = core(b, lim);
    } catch (const GuardExceeded& e) {
        return inconclusive("dichotomy", std::string("core: ") + e.what());
    }
    return siggers_pipeline("dichotomy", b, lim, std::move(v));
}

WidthVerdict bounded_width(const Structure& b, const Limits& lim) {
    WidthVerdict w;
    try {
        w.core = core(b, lim);
        auto res = find_special(with_singletons(w.core->core), Special::Wnu34, {}, lim);
        if (res.verdict == SearchVerdict::Inconclusive) {
            w.reason = "3-4 WNU search: " + res.note;
            return w;
        }
        w.bounded = res.verdict == SearchVerdict::Found;
        w.ops = std::move(res.ops);
        w.reason = *w.bounded ? "the core has 3-4 weak near-unanimity polymorphisms"
                              : "exhaustive search: the core has no 3-4 weak near-unanimity pair";
    } catch (const GuardExceeded& e) {
        w.bounded.reset();
        w.ops.clear();
        w.reason = e.what();
    }
    return w;
}

std::string report(const WidthVerdict& v) {
    std::ostringstream out;
    out << (v.bounded ? (*v.bounded ? "bounded-width" : "unbounded-width") : "INCONCLUSIVE") << ": " << v.reason << '\n';
    if (v.core) {
        out << "core-elements";
        for (Element x : v.core->elements) out << ' ' << x;
        out << '\n' << to_text(v.core->core);
    }
    for (const auto& [name, f] : v.ops) {
        Operation g = f;
        g.set_name(name);
        out << to_text(g);
    }
    return out.str();
}

std::vector<std::size_t> CyclicProfile::arities() const {
    std::vector<std::size_t> out;
    for (const auto& [k, r] : by_arity)
        if (r.verdict == SearchVerdict::Found) out.push_back(k);
    return out;
}

CyclicProfile cyclic_arity_profile(const Structure& b, std::size_t max_arity, const Limits& lim) {
    CyclicProfile p;
    for (std::size_t k = 2; k <= max_arity; ++k) {
        SpecialOptions opt;
        opt.arity = k;
        try {
            p.by_arity[k] = find_special(b, Special::Cyclic, opt, lim);
        } catch (const GuardExceeded& e) {
            p.by_arity[k] = SpecialResult{SearchVerdict::Inconclusive, {}, e.what()};
        }
    }
    return p;
}

}  // namespace homlab
