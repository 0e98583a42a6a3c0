#include "engine.hpp"

#include <algorithm>

#include "homlab/error.hpp"

namespace homlab::detail {

bool Table::contains(const Element* t) const {
    if (arity == 2) return succ[t[0]].contains(t[1]);
    if (arity == 1) return unary.contains(t[0]);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < arity; ++i) c = c * n + t[i];
    if (!bits.empty()) return bits[c];
    return std::binary_search(codes.begin(), codes.end(), c);
}

void Table::build_position_index() {
    if (!by_pos.empty()) return;
    by_pos.assign(arity * n, {});
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t p = 0; p < arity; ++p) by_pos[p * n + tuple(i)[p]].push_back(static_cast<std::uint32_t>(i));
}

Table make_table(const std::vector<Tuple>& tuples, std::size_t arity, std::size_t n) {
    if (n > ValueSet::capacity) throw GuardExceeded("template domain larger than 64 elements");
    Table t;
    t.arity = arity;
    t.n = n;
    t.flat.reserve(tuples.size() * arity);
    for (const auto& tup : tuples) t.flat.insert(t.flat.end(), tup.begin(), tup.end());
    if (arity == 2) {
        t.succ.assign(n, {});
        t.pred.assign(n, {});
        for (const auto& tup : tuples) {
            t.succ[tup[0]].insert(tup[1]);
            t.pred[tup[1]].insert(tup[0]);
        }
    } else if (arity == 1) {
        for (const auto& tup : tuples) t.unary.insert(tup[0]);
    } else {
        t.codes.reserve(tuples.size());
        for (const auto& tup : tuples) {
            std::uint64_t c = 0;
            for (Element e : tup) c = c * n + e;
            t.codes.push_back(c);
        }
        std::sort(t.codes.begin(), t.codes.end());
        t.codes.erase(std::unique(t.codes.begin(), t.codes.end()), t.codes.end());
        if (checked_pow(n, arity, std::uint64_t{1} << 22)) {
            t.bits.assign(ipow(n, arity), false);
            for (auto c : t.codes) t.bits[c] = true;
        }
    }
    return t;
}

GacNetwork::GacNetwork(std::size_t vars, std::vector<Table> tables) : vars_(vars), tables_(std::move(tables)) {}

GacNetwork::GacNetwork(const Structure& instance, const Structure& tmpl) : vars_(instance.size()) {
    auto map = signature_map(instance, tmpl);
    std::vector<long> table_of(tmpl.signature().size(), -1);
    for (std::size_t r = 0; r < map.size(); ++r) {
        if (instance.tuples(r).empty()) continue;
        if (table_of[map[r]] < 0) {
            table_of[map[r]] = static_cast<long>(tables_.size());
            tables_.push_back(make_table(tmpl.tuples(map[r]), tmpl.signature()[map[r]].arity, tmpl.size()));
        }
    }
    if (tmpl.size() > ValueSet::capacity) throw GuardExceeded("template domain larger than 64 elements");
    std::vector<Var> scope;
    for (std::size_t r = 0; r < map.size(); ++r)
        for (const auto& t : instance.tuples(r)) {
            scope.assign(t.begin(), t.end());
            add_constraint(static_cast<std::size_t>(table_of[map[r]]), scope.data());
        }
    finish();
}

void GacNetwork::add_constraint(std::size_t table, const Var* scope) {
    const std::size_t k = tables_[table].arity;
    rel_.push_back(static_cast<std::uint32_t>(table));
    offset_.push_back(static_cast<std::uint32_t>(scopes_.size()));
    bool rep = false;
    for (std::size_t i = 0; i < k; ++i) {
        scopes_.push_back(scope[i]);
        for (std::size_t j = 0; j < i; ++j)
            if (scope[j] == scope[i]) rep = true;
    }
    repeated_.push_back(rep);
}

void GacNetwork::finish() {
    std::vector<std::uint32_t> deg(vars_ + 1, 0);
    for (std::size_t c = 0; c < rel_.size(); ++c) {
        const std::size_t k = tables_[rel_[c]].arity;
        for (std::size_t i = 0; i < k; ++i) {
            Var v = scopes_[offset_[c] + i];
            bool dup = false;
            for (std::size_t j = 0; j < i; ++j) dup |= scopes_[offset_[c] + j] == v;
            if (!dup) ++deg[v];
        }
    }
    inc_start_.assign(vars_ + 1, 0);
    for (std::size_t v = 0; v < vars_; ++v) inc_start_[v + 1] = inc_start_[v] + deg[v];
    inc_.assign(inc_start_[vars_], 0);
    std::vector<std::uint32_t> fill(inc_start_.begin(), inc_start_.end() - 1);
    for (std::size_t c = 0; c < rel_.size(); ++c) {
        const std::size_t k = tables_[rel_[c]].arity;
        for (std::size_t i = 0; i < k; ++i) {
            Var v = scopes_[offset_[c] + i];
            bool dup = false;
            for (std::size_t j = 0; j < i; ++j) dup |= scopes_[offset_[c] + j] == v;
            if (!dup) inc_[fill[v]++] = static_cast<std::uint32_t>(c);
        }
    }
    queued_.assign(rel_.size(), 0);
    std::size_t maxk = 0;
    for (const auto& t : tables_) maxk = std::max(maxk, t.arity);
    sup_.assign(maxk, {});
}

void GacNetwork::enqueue(std::uint32_t c) {
    if (queued_[c]) return;
    queued_[c] = 1;
    queue_.push_back(c);
}

bool GacNetwork::revise(std::uint32_t c, std::vector<ValueSet>& dom, std::vector<Var>& changed) {
    ++revisions;
    const Table& t = tables_[rel_[c]];
    const Var* sc = scopes_.data() + offset_[c];
    if (t.arity == 1) {
        ValueSet d = dom[sc[0]] & t.unary;
        if (d != dom[sc[0]]) {
            dom[sc[0]] = d;
            changed.push_back(sc[0]);
        }
        return !d.empty();
    }
    if (t.arity == 2) {
        const Var x = sc[0], y = sc[1];
        if (x == y) {
            ValueSet d = dom[x];
            for (;;) {
                ValueSet nd;
                for (Element a : d)
                    if (!(t.succ[a] & d).empty() && !(t.pred[a] & d).empty()) nd.insert(a);
                if (nd == d) break;
                d = nd;
            }
            if (d != dom[x]) {
                dom[x] = d;
                changed.push_back(x);
            }
            return !d.empty();
        }
        ValueSet dx = dom[x], dy = dom[y], nx, ny;
        for (Element a : dx)
            if (!(t.succ[a] & dy).empty()) nx.insert(a);
        for (Element b : dy)
            if (!(t.pred[b] & nx).empty()) ny.insert(b);
        if (nx != dx) {
            dom[x] = nx;
            changed.push_back(x);
        }
        if (ny != dy) {
            dom[y] = ny;
            changed.push_back(y);
        }
        return !nx.empty() && !ny.empty();
    }
    const std::size_t k = t.arity;
    bool again = true;
    while (again) {
        again = false;
        for (std::size_t j = 0; j < k; ++j) sup_[j] = ValueSet();
        const std::size_t m = t.size();
        const Element* tp = t.flat.data();
        for (std::size_t i = 0; i < m; ++i, tp += k) {
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j) ok = dom[sc[j]].contains(tp[j]);
            if (!ok) continue;
            for (std::size_t j = 0; j < k; ++j) sup_[j].insert(tp[j]);
        }
        for (std::size_t j = 0; j < k; ++j) {
            ValueSet d = dom[sc[j]] & sup_[j];
            if (d != dom[sc[j]]) {
                dom[sc[j]] = d;
                if (std::find(changed.begin(), changed.end(), sc[j]) == changed.end()) changed.push_back(sc[j]);
                if (repeated_[c]) again = true;
            }
            if (d.empty()) return false;
        }
    }
    return true;
}

bool GacNetwork::propagate(std::vector<ValueSet>& dom, const std::vector<Var>& touched, bool initial) {
    queue_.clear();
    head_ = 0;
    if (initial) {
        for (std::uint32_t c = 0; c < rel_.size(); ++c) enqueue(c);
    } else {
        for (Var v : touched)
            for (std::uint32_t i = inc_start_[v]; i < inc_start_[v + 1]; ++i) enqueue(inc_[i]);
    }
    std::vector<Var> changed;
    bool ok = true;
    while (head_ < queue_.size()) {
        std::uint32_t c = queue_[head_++];
        queued_[c] = 0;
        changed.clear();
        if (!revise(c, dom, changed)) {
            ok = false;
            break;
        }
        for (Var v : changed)
            for (std::uint32_t i = inc_start_[v]; i < inc_start_[v + 1]; ++i)
                if (inc_[i] != c) enqueue(inc_[i]);
        // compact the queue now and then
        if (head_ > 4096 && head_ * 2 > queue_.size()) {
            queue_.erase(queue_.begin(), queue_.begin() + static_cast<long>(head_));
            head_ = 0;
        }
    }
    for (std::size_t i = head_; i < queue_.size(); ++i) queued_[queue_[i]] = 0;
    queue_.clear();
    head_ = 0;
    return ok;
}

namespace {

struct Backtracker {
    Propagator& p;
    const SearchLimits& lim;
    SearchOutcome out;

    // returns true to stop
    bool run(std::vector<ValueSet>& dom) {
        ++out.nodes;
        if (lim.node_cap && out.nodes > lim.node_cap) {
            out.complete = false;
            return true;
        }
        std::size_t best = dom.size(), best_size = 0;
        for (std::size_t v = 0; v < dom.size(); ++v) {
            std::size_t s = dom[v].size();
            if (s > 1 && (best == dom.size() || s < best_size)) {
                best = v;
                best_size = s;
                if (s == 2) break;
            }
        }
        if (best == dom.size()) {
            std::vector<Element> sol(dom.size());
            for (std::size_t v = 0; v < dom.size(); ++v) sol[v] = dom[v].min();
            out.solutions.push_back(std::move(sol));
            return out.solutions.size() >= lim.max_solutions;
        }
        const std::vector<Var> touched{static_cast<Var>(best)};
        for (Element value : dom[best]) {
            std::vector<ValueSet> next = dom;
            next[best] = ValueSet::single(value);
            if (p.propagate(next, touched, false) && run(next)) return true;
        }
        return false;
    }
};

}  // namespace

SearchOutcome backtrack(Propagator& p, std::vector<ValueSet> dom, const SearchLimits& lim) {
    Backtracker bt{p, lim, {}};
    for (const auto& d : dom)
        if (d.empty()) return bt.out;
    if (!p.propagate(dom, {}, true)) return bt.out;
    bt.run(dom);
    return bt.out;
}

}  // namespace homlab::detail
