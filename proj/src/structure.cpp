#include "homlab/structure.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "homlab/error.hpp"

namespace homlab {

std::string ValueSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (Element v : *this) {
        if (!first) out += ",";
        out += std::to_string(v);
        first = false;
    }
    return out + "}";
}

std::size_t Signature::add(std::string name, std::size_t arity) {
    symbols_.push_back({std::move(name), arity});
    return symbols_.size() - 1;
}

std::optional<std::size_t> Signature::find(const std::string& name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Signature::index_of(const std::string& name) const {
    auto i = find(name);
    if (!i) throw SignatureMismatch("unknown relation symbol '" + name + "'");
    return *i;
}

std::size_t Signature::max_arity() const {
    std::size_t m = 0;
    for (const auto& s : symbols_) m = std::max(m, s.arity);
    return m;
}

Structure::Structure(std::size_t size, Signature sig, std::string name)
    : name_(std::move(name)), size_(size), sig_(std::move(sig)), rels_(sig_.size()) {}

std::size_t Structure::add_symbol(std::string name, std::size_t arity) {
    rels_.emplace_back();
    return sig_.add(std::move(name), arity);
}

void Structure::add_tuple(std::size_t rel, Tuple t) {
    rels_.at(rel).push_back(std::move(t));
    sorted_ = false;
}

void Structure::add_tuple(const std::string& rel, Tuple t) { add_tuple(sig_.index_of(rel), std::move(t)); }

const std::vector<Tuple>& Structure::tuples(const std::string& rel) const { return rels_[sig_.index_of(rel)]; }

bool Structure::contains(std::size_t rel, const Tuple& t) const {
    const auto& ts = rels_[rel];
    if (sorted_) return std::binary_search(ts.begin(), ts.end(), t);
    return std::find(ts.begin(), ts.end(), t) != ts.end();
}

std::size_t Structure::tuple_count() const {
    std::size_t c = 0;
    for (const auto& r : rels_) c += r.size();
    return c;
}

void Structure::normalize() {
    for (auto& r : rels_) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    sorted_ = true;
}

bool Structure::operator==(const Structure& o) const {
    if (size_ != o.size_ || sig_ != o.sig_) return false;
    for (std::size_t i = 0; i < rels_.size(); ++i) {
        auto x = rels_[i], y = o.rels_[i];
        std::sort(x.begin(), x.end());
        x.erase(std::unique(x.begin(), x.end()), x.end());
        std::sort(y.begin(), y.end());
        y.erase(std::unique(y.begin(), y.end()), y.end());
        if (x != y) return false;
    }
    return true;
}

std::vector<Violation> validate(const Structure& s) {
    std::vector<Violation> out;
    using K = Violation::Kind;
    if (s.size() == 0) out.push_back({K::EmptyDomain, "empty domain"});
    const auto& sig = s.signature();
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (!seen.insert(sig[i].name).second)
            out.push_back({K::DuplicateSymbol, "duplicate symbol " + sig[i].name});
        if (sig[i].arity == 0) out.push_back({K::ZeroArity, "zero arity symbol " + sig[i].name});
        std::set<Tuple> tuples;
        for (const auto& t : s.tuples(i)) {
            if (t.size() != sig[i].arity) {
                out.push_back({K::ArityMismatch, "arity mismatch in " + sig[i].name + ": tuple of length " +
                                                     std::to_string(t.size())});
                continue;
            }
            for (Element e : t)
                if (e >= s.size()) {
                    out.push_back({K::EntryOutOfRange, "entry out of range in " + sig[i].name + ": " + std::to_string(e)});
                    break;
                }
            if (!tuples.insert(t).second) out.push_back({K::DuplicateTuple, "duplicate tuple in " + sig[i].name});
        }
    }
    return out;
}

std::vector<std::size_t> signature_map(const Structure& instance, const Structure& tmpl) {
    std::vector<std::size_t> map;
    for (const auto& sym : instance.signature().symbols()) {
        auto j = tmpl.signature().find(sym.name);
        if (!j) throw SignatureMismatch("template has no relation '" + sym.name + "'");
        if (tmpl.signature()[*j].arity != sym.arity)
            throw SignatureMismatch("arity of '" + sym.name + "' differs between instance and template");
        map.push_back(*j);
    }
    return map;
}

bool is_homomorphism(const Structure& a, const Structure& b, const Mapping& h) {
    if (h.source_size() != a.size() || h.target_size != b.size()) return false;
    for (Element x : h.table)
        if (x >= b.size()) return false;
    auto map = signature_map(a, b);
    Tuple img;
    for (std::size_t r = 0; r < map.size(); ++r) {
        for (const auto& t : a.tuples(r)) {
            img.resize(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) img[i] = h.table[t[i]];
            if (!b.contains(map[r], img)) return false;
        }
    }
    return true;
}

Structure image_structure(const Structure& a, const Mapping& h) {
    Structure out(h.target_size, a.signature());
    for (std::size_t r = 0; r < a.signature().size(); ++r)
        for (const auto& t : a.tuples(r)) {
            Tuple img(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) img[i] = h.table[t[i]];
            out.add_tuple(r, std::move(img));
        }
    out.normalize();
    return out;
}

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && r > cap / base) return std::nullopt;
        r *= base;
    }
    if (r > cap) return std::nullopt;
    return r;
}

std::size_t encode_tuple(const Element* t, std::size_t k, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < k; ++i) c = c * n + t[i];
    return c;
}

Tuple decode_tuple(std::size_t code, std::size_t k, std::size_t n) {
    Tuple t(k);
    for (std::size_t i = k; i-- > 0;) {
        t[i] = static_cast<Element>(code % n);
        code /= n;
    }
    return t;
}

static void require_same_signature(const Structure& a, const Structure& b) {
    if (a.signature() != b.signature()) throw SignatureMismatch("structures have different signatures");
}

Structure direct_product(const Structure& a, const Structure& b) {
    require_same_signature(a, b);
    const std::size_t m = b.size();
    Structure out(a.size() * m, a.signature());
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        auto& dst = out.mutable_tuples(r);
        for (const auto& s : a.tuples(r))
            for (const auto& t : b.tuples(r)) {
                Tuple p(s.size());
                for (std::size_t i = 0; i < s.size(); ++i) p[i] = static_cast<Element>(s[i] * m + t[i]);
                dst.push_back(std::move(p));
            }
    }
    out.normalize();
    return out;
}

Structure power(const Structure& a, std::size_t k, const Limits& lim) {
    if (k == 0) throw Error("power: exponent must be positive");
    if (!checked_pow(a.size(), k, lim.states)) throw GuardExceeded("power: domain size exceeds the states cap");
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        auto c = checked_pow(a.tuples(r).size(), k, lim.states);
        if (!c) throw GuardExceeded("power: relation size exceeds the states cap");
        total += *c;
    }
    if (total > lim.states) throw GuardExceeded("power: relation size exceeds the states cap");
    Structure out = a;
    for (std::size_t i = 1; i < k; ++i) out = direct_product(out, a);
    return out;
}

Structure disjoint_union(const Structure& a, const Structure& b) {
    require_same_signature(a, b);
    if (a.size() == 0 || b.size() == 0) throw Error("disjoint_union: empty domain is not supported");
    Structure out(a.size() + b.size(), a.signature());
    for (std::size_t r = 0; r < a.signature().size(); ++r) {
        for (const auto& t : a.tuples(r)) out.add_tuple(r, t);
        for (auto t : b.tuples(r)) {
            for (auto& e : t) e += static_cast<Element>(a.size());
            out.add_tuple(r, std::move(t));
        }
    }
    out.normalize();
    return out;
}

Structure induced_substructure(const Structure& a, const std::vector<Element>& elems) {
    std::vector<Element> keep = elems;
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) throw Error("induced_substructure: empty element set");
    if (keep.back() >= a.size()) throw Error("induced_substructure: element out of range");
    std::vector<long> idx(a.size(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) idx[keep[i]] = static_cast<long>(i);
    Structure out(keep.size(), a.signature());
    for (std::size_t r = 0; r < a.signature().size(); ++r)
        for (const auto& t : a.tuples(r)) {
            Tuple u(t.size());
            bool inside = true;
            for (std::size_t i = 0; i < t.size() && inside; ++i) {
                if (idx[t[i]] < 0) inside = false;
                else u[i] = static_cast<Element>(idx[t[i]]);
            }
            if (inside) out.add_tuple(r, std::move(u));
        }
    out.normalize();
    return out;
}

// The merged vertex takes the smaller index; later vertices shift down by one.
Structure contract(const Structure& g, Element u, Element v) {
    if (!is_digraph(g)) throw SignatureMismatch("contract: expected a digraph");
    if (u == v) throw Error("contract: vertices must be distinct");
    if (u >= g.size() || v >= g.size()) throw Error("contract: vertex out of range");
    Element lo = std::min(u, v), hi = std::max(u, v);
    auto f = [&](Element x) -> Element {
        if (x == hi) return lo;
        return x > hi ? x - 1 : x;
    };
    Structure out(g.size() - 1, g.signature());
    for (const auto& t : g.tuples(0)) out.add_tuple(0, {f(t[0]), f(t[1])});
    out.normalize();
    return out;
}

Structure with_singletons(const Structure& a) {
    Structure out = a;
    for (Element i = 0; i < a.size(); ++i) {
        std::string name = "C" + std::to_string(i);
        while (out.signature().find(name)) name = "_" + name;
        auto r = out.add_symbol(name, 1);
        out.add_tuple(r, {i});
    }
    out.normalize();
    return out;
}

Structure reduct(const Structure& a, const Signature& keep) {
    Structure out(a.size(), keep, a.name());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        auto j = a.signature().index_of(keep[i].name);
        if (a.signature()[j].arity != keep[i].arity) throw SignatureMismatch("reduct: arity differs");
        out.mutable_tuples(i) = a.tuples(j);
    }
    out.normalize();
    return out;
}

Signature digraph_signature() { return Signature{{"E", 2}}; }

Structure digraph(std::size_t n, const std::vector<std::pair<Element, Element>>& edges, std::string name) {
    Structure g(n, digraph_signature(), std::move(name));
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw Error("digraph: vertex out of range");
        g.add_tuple(0, {u, v});
    }
    g.normalize();
    return g;
}

bool is_digraph(const Structure& s) {
    return s.signature().size() == 1 && s.signature()[0].name == "E" && s.signature()[0].arity == 2;
}

Structure complete_graph(std::size_t n) {
    std::vector<std::pair<Element, Element>> e;
    for (Element u = 0; u < n; ++u)
        for (Element v = 0; v < n; ++v)
            if (u != v) e.emplace_back(u, v);
    return digraph(n, e, "K" + std::to_string(n));
}

Structure cycle_graph(std::size_t n) {
    std::vector<std::pair<Element, Element>> e;
    for (Element u = 0; u < n; ++u) {
        Element v = static_cast<Element>((u + 1) % n);
        e.emplace_back(u, v);
        e.emplace_back(v, u);
    }
    return digraph(n, e, "C" + std::to_string(n));
}

Structure directed_cycle(std::size_t n) {
    std::vector<std::pair<Element, Element>> e;
    for (Element u = 0; u < n; ++u) e.emplace_back(u, static_cast<Element>((u + 1) % n));
    return digraph(n, e, "DC" + std::to_string(n));
}

Structure directed_path(std::size_t edges) {
    std::vector<std::pair<Element, Element>> e;
    for (Element u = 0; u < edges; ++u) e.emplace_back(u, u + 1);
    return digraph(edges + 1, e, "P" + std::to_string(edges));
}

Structure transitive_tournament(std::size_t n) {
    std::vector<std::pair<Element, Element>> e;
    for (Element u = 0; u < n; ++u)
        for (Element v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return digraph(n, e, "T" + std::to_string(n));
}

Structure loop_graph() { return digraph(1, {{0, 0}}, "loop"); }

static void require_digraph(const Structure& g) {
    if (!is_digraph(g)) throw SignatureMismatch("expected a digraph with the single binary symbol E");
}

std::optional<std::vector<Element>> two_colouring(const Structure& g) {
    require_digraph(g);
    const std::size_t n = g.size();
    std::vector<std::vector<Element>> adj(n);
    for (const auto& t : g.tuples(0)) {
        if (t[0] == t[1]) return std::nullopt;
        adj[t[0]].push_back(t[1]);
        adj[t[1]].push_back(t[0]);
    }
    std::vector<int> col(n, -1);
    for (Element s = 0; s < n; ++s) {
        if (col[s] >= 0) continue;
        col[s] = 0;
        std::deque<Element> q{s};
        while (!q.empty()) {
            Element x = q.front();
            q.pop_front();
            for (Element y : adj[x]) {
                if (col[y] < 0) {
                    col[y] = 1 - col[x];
                    q.push_back(y);
                } else if (col[y] == col[x]) {
                    return std::nullopt;
                }
            }
        }
    }
    return std::vector<Element>(col.begin(), col.end());
}

// Shortest odd closed walk through BFS layers; returned as a vertex cycle v0..v_{m-1}.
std::optional<std::vector<Element>> odd_cycle(const Structure& g) {
    require_digraph(g);
    const std::size_t n = g.size();
    std::vector<std::vector<Element>> adj(n);
    for (const auto& t : g.tuples(0)) {
        if (t[0] == t[1]) return std::vector<Element>{t[0]};
        adj[t[0]].push_back(t[1]);
        adj[t[1]].push_back(t[0]);
    }
    for (Element s = 0; s < n; ++s) {
        std::vector<long> dist(n, -1), parent(n, -1);
        dist[s] = 0;
        std::deque<Element> q{s};
        while (!q.empty()) {
            Element x = q.front();
            q.pop_front();
            for (Element y : adj[x]) {
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    q.push_back(y);
                } else if (dist[y] == dist[x]) {
                    // paths s..x and s..y of equal length plus edge x-y
                    std::vector<Element> px, py;
                    for (long a = x; a >= 0; a = parent[a]) px.push_back(static_cast<Element>(a));
                    for (long b = y; b >= 0; b = parent[b]) py.push_back(static_cast<Element>(b));
                    // strip the common tail (towards s)
                    while (px.size() > 1 && py.size() > 1 && px[px.size() - 2] == py[py.size() - 2]) {
                        px.pop_back();
                        py.pop_back();
                    }
                    std::vector<Element> cyc(px.begin(), px.end());
                    for (std::size_t i = py.size() - 1; i-- > 0;) cyc.push_back(py[i]);
                    return cyc;
                }
            }
        }
    }
    return std::nullopt;
}

std::size_t weak_component_count(const Structure& g) {
    require_digraph(g);
    std::vector<Element> parent(g.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Element x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : g.tuples(0)) parent[find(t[0])] = find(t[1]);
    std::size_t c = 0;
    for (Element x = 0; x < g.size(); ++x)
        if (find(x) == x) ++c;
    return c;
}

DigraphPredicates structure_predicates(const Structure& g0) {
    require_digraph(g0);
    Structure g = g0;
    g.normalize();
    DigraphPredicates p;
    const std::size_t n = g.size();
    std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
    p.is_symmetric = true;
    for (const auto& t : g.tuples(0)) {
        if (t[0] == t[1]) p.has_loop = true;
        ++outdeg[t[0]];
        ++indeg[t[1]];
        if (!g.contains(0, {t[1], t[0]})) p.is_symmetric = false;
    }
    p.is_bipartite = two_colouring(g).has_value();
    p.is_smooth = true;
    p.is_disjoint_union_of_directed_cycles = true;
    for (std::size_t v = 0; v < n; ++v) {
        if (indeg[v] == 0 || outdeg[v] == 0) p.is_smooth = false;
        if (indeg[v] != 1 || outdeg[v] != 1) p.is_disjoint_union_of_directed_cycles = false;
    }
    return p;
}

}  // namespace homlab
