#include <doctest.h>

#include <deque>
#include <numeric>

#include "homlab/core.hpp"
#include "homlab/error.hpp"
#include "homlab/homsearch.hpp"
#include "homlab/structure.hpp"
#include "homlab/structure_io.hpp"
#include "support.hpp"

using namespace homlab;
using testsupport::edges_of;
using Edges = std::vector<std::pair<Element, Element>>;

namespace {

// independent component count: BFS over an adjacency matrix
std::size_t components_bfs(const Structure& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (const auto& t : g.tuples(0)) adj[t[0]][t[1]] = adj[t[1]][t[0]] = true;
    std::vector<bool> seen(n, false);
    std::size_t c = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++c;
        std::deque<std::size_t> q{s};
        seen[s] = true;
        while (!q.empty()) {
            auto x = q.front();
            q.pop_front();
            for (std::size_t y = 0; y < n; ++y)
                if (adj[x][y] && !seen[y]) seen[y] = true, q.push_back(y);
        }
    }
    return c;
}

bool has_kind(const std::vector<Violation>& v, Violation::Kind k) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == k; });
}

bool hom_equivalent(const Structure& a, const Structure& b) {
    return search_hom(a, b).has_value() && search_hom(b, a).has_value();
}

}  // namespace

TEST_CASE("validate") {
    CHECK(validate(complete_graph(3)).empty());

    Structure bad(3, digraph_signature());
    bad.add_tuple(0, {0, 5});
    CHECK(has_kind(validate(bad), Violation::Kind::EntryOutOfRange));

    Structure wrong(3, digraph_signature());
    wrong.add_tuple(0, {0, 1, 2});
    CHECK(has_kind(validate(wrong), Violation::Kind::ArityMismatch));

    Structure dup(2, Signature{{"E", 2}, {"E", 2}});
    CHECK(has_kind(validate(dup), Violation::Kind::DuplicateSymbol));
}

TEST_CASE("direct product") {
    auto k2 = complete_graph(2);
    auto p = direct_product(k2, k2);
    CHECK(p.size() == 4);
    CHECK(edges_of(p) == Edges{{0, 3}, {1, 2}, {2, 1}, {3, 0}});
    // componentwise membership, pair by pair
    for (Element x = 0; x < 4; ++x)
        for (Element y = 0; y < 4; ++y) {
            bool expect = k2.contains(0, {x / 2, y / 2}) && k2.contains(0, {x % 2, y % 2});
            CHECK(p.contains(0, {x, y}) == expect);
        }

    CHECK(isomorphic(direct_product(directed_cycle(2), directed_cycle(3)), directed_cycle(6)));

    auto one = loop_graph();
    auto c5 = cycle_graph(5);
    CHECK(isomorphic(direct_product(c5, one), c5));

    CHECK_THROWS_AS(direct_product(c5, Structure(2, Signature{{"R", 3}})), SignatureMismatch);
}

TEST_CASE("power") {
    CHECK(isomorphic(power(complete_graph(3), 1), complete_graph(3)));

    auto k3sq = power(complete_graph(3), 2);
    CHECK(k3sq.size() == 9);
    for (const auto& t : k3sq.tuples(0)) {
        int common = 0;
        for (Element w = 0; w < 9; ++w)
            if (k3sq.contains(0, {t[0], w}) && k3sq.contains(0, {t[1], w})) ++common;
        CHECK(common == 1);
    }

    auto c3sq = power(directed_cycle(3), 2);
    CHECK(components_bfs(c3sq) == 3);
    CHECK(weak_component_count(c3sq) == 3);
}

TEST_CASE("disjoint union") {
    auto u = disjoint_union(complete_graph(2), complete_graph(3));
    CHECK(u.size() == 5);
    CHECK(u.tuples(0).size() == 8);
    CHECK_THROWS(disjoint_union(complete_graph(2), Structure(0, digraph_signature())));
}

TEST_CASE("induced substructure") {
    CHECK(induced_substructure(complete_graph(3), {0, 1}) == complete_graph(2));
    auto p = induced_substructure(cycle_graph(5), {0, 1, 2});
    CHECK(edges_of(p) == Edges{{0, 1}, {1, 0}, {1, 2}, {2, 1}});
    auto c5 = cycle_graph(5);
    CHECK(induced_substructure(c5, {0, 1, 2, 3, 4}) == c5);
    CHECK_THROWS(induced_substructure(c5, {}));
}

TEST_CASE("contract") {
    CHECK(contract(complete_graph(2), 0, 1) == loop_graph());
    // C_4 with 0 and 2 merged: vertex 3 becomes 2
    auto c = contract(cycle_graph(4), 0, 2);
    CHECK(c.size() == 3);
    CHECK(edges_of(c) == Edges{{0, 1}, {0, 2}, {1, 0}, {2, 0}});
    auto e = contract(digraph(4, {}), 1, 3);
    CHECK(e.size() == 3);
    CHECK(e.tuples(0).empty());
    CHECK_THROWS(contract(cycle_graph(4), 2, 2));
}

TEST_CASE("automorphisms") {
    CHECK(automorphisms(complete_graph(3)).size() == 6);
    auto t3 = automorphisms(transitive_tournament(3));
    REQUIRE(t3.size() == 1);
    CHECK(t3[0].table == std::vector<Element>{0, 1, 2});
    auto c3 = automorphisms(directed_cycle(3));
    REQUIRE(c3.size() == 3);
    CHECK(c3[1].table == std::vector<Element>{1, 2, 0});
    CHECK(c3[2].table == std::vector<Element>{2, 0, 1});

    // oracle: test every permutation directly
    auto g = cycle_graph(5);
    std::vector<Element> perm{0, 1, 2, 3, 4};
    std::size_t count = 0;
    do {
        Mapping m{perm, 5};
        if (is_homomorphism(g, g, m)) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(automorphisms(g).size() == count);
    CHECK(count == 10);

    Limits small;
    small.domain = 3;
    CHECK_THROWS_AS(automorphisms(cycle_graph(5), small), GuardExceeded);
}

TEST_CASE("orbits") {
    auto o = orbits(complete_graph(3), 2);
    REQUIRE(o.size() == 2);
    CHECK(o[0] == std::vector<std::size_t>{0, 4, 8});  // diagonal
    CHECK(o[1].size() == 6);
    CHECK(orbits(transitive_tournament(3), 1).size() == 3);
    CHECK(orbits(cycle_graph(7), 1).size() == 1);
}

TEST_CASE("core") {
    auto c6 = core(cycle_graph(6));
    CHECK(isomorphic(c6.core, complete_graph(2)));
    CHECK(c6.elements == std::vector<Element>{0, 1});
    CHECK(is_homomorphism(cycle_graph(6), cycle_graph(6), c6.retraction));
    for (Element e : c6.elements) CHECK(c6.retraction(e) == e);

    CHECK(core(transitive_tournament(3)).core == transitive_tournament(3));

    // K_2 maps into K_3, so the union collapses onto K_3
    CHECK(isomorphic(core(disjoint_union(complete_graph(3), complete_graph(2))).core, complete_graph(3)));
    // directed 3- and 4-cycles are incomparable cores
    auto anti = disjoint_union(directed_cycle(3), directed_cycle(4));
    CHECK(core(anti).core.size() == 7);
    CHECK(is_core(anti));

    CHECK(is_core(complete_graph(3)));
    CHECK_FALSE(is_core(cycle_graph(6)));
    for (std::size_t n = 1; n <= 7; ++n) CHECK(is_core(directed_cycle(n)));
}

TEST_CASE("predicates") {
    auto p = structure_predicates(complete_graph(3));
    CHECK_FALSE(p.has_loop);
    CHECK(p.is_symmetric);
    CHECK_FALSE(p.is_bipartite);
    CHECK(p.is_smooth);
    CHECK_FALSE(p.is_disjoint_union_of_directed_cycles);

    CHECK(structure_predicates(disjoint_union(directed_cycle(3), directed_cycle(5)))
              .is_disjoint_union_of_directed_cycles);
    auto l = structure_predicates(loop_graph());
    CHECK(l.has_loop);
    CHECK(l.is_disjoint_union_of_directed_cycles);
    CHECK_FALSE(l.is_bipartite);
    CHECK(structure_predicates(cycle_graph(6)).is_bipartite);
    CHECK_FALSE(structure_predicates(transitive_tournament(3)).is_smooth);

    auto cyc = odd_cycle(cycle_graph(5));
    REQUIRE(cyc);
    CHECK(cyc->size() == 5);
}

TEST_CASE("structure text round trip") {
    const char* text =
        "# a small template\n"
        "structure t\n"
        "domain 3\n"
        "rel E 2\n"
        "0 1\n"
        "1 2   # comment\n"
        "end\n"
        "rel U 1\n"
        "end\n"
        "endstructure\n";
    auto s = parse_structure(text);
    CHECK(s.size() == 3);
    CHECK(s.tuples("E").size() == 2);
    CHECK(s.tuples("U").empty());
    CHECK(parse_structure(to_text(s)) == s);

    CHECK_THROWS_AS(parse_structure("structure t\ndomain 2\nrel E 2\n0 2\nend\nendstructure\n"), FormatError);
    CHECK_THROWS_AS(parse_structure("structure t\ndomain 2\nrel E 2\n0 1 1\nend\nendstructure\n"), FormatError);
    CHECK_THROWS_AS(parse_structure("structure t\ndomain 2\nrel E 2\nend\nrel E 2\nend\nendstructure\n"),
                    FormatError);
    CHECK_THROWS_AS(parse_structure("structure t\ndomain 2\nrel E 2\n0 1\n0 1\nend\nendstructure\n"), FormatError);
    CHECK_THROWS_AS(parse_structure("structure t\ndomain 0\nendstructure\n"), FormatError);
    CHECK_THROWS_AS(parse_structure("structure t\ndomain 2\nrel E 2\n0 1\n"), FormatError);

    auto inst = parse_instance("structure g\ndomain 3\nrel E 2\n0 1\nend\nendstructure\nfix 0 1\nallow 2 0,2\n");
    auto L = inst.lists(3);
    CHECK(L[0] == ValueSet::single(1));
    CHECK(L[1] == ValueSet::full(3));
    CHECK(L[2] == ValueSet(0b101));
}

TEST_CASE("property: cores") {
    testsupport::Rng rng(11);
    for (int i = 0; i < 60; ++i) {
        auto g = testsupport::random_digraph(rng, 2 + rng() % 5, 0.35);
        auto c = core(g);
        CHECK(is_core(c.core));
        CHECK(isomorphic(core(c.core).core, c.core));
        CHECK(hom_equivalent(g, c.core));
        CHECK(is_homomorphism(g, g, c.retraction));
        auto oa = orbits(g, 2).size(), oc = orbits(c.core, 2).size();
        if (oa == oc) CHECK(isomorphic(g, c.core));
    }
}

TEST_CASE("property: product meet and union join") {
    testsupport::Rng rng(12);
    for (int i = 0; i < 80; ++i) {
        auto g = testsupport::random_digraph(rng, 1 + rng() % 4, 0.4);
        auto a = testsupport::random_digraph(rng, 1 + rng() % 3, 0.5);
        auto b = testsupport::random_digraph(rng, 1 + rng() % 3, 0.5);
        bool ga = testsupport::exists_hom_naive(g, a), gb = testsupport::exists_hom_naive(g, b);
        CHECK(testsupport::exists_hom_naive(g, direct_product(a, b)) == (ga && gb));
        bool gu = testsupport::exists_hom_naive(g, disjoint_union(a, b));
        if (ga || gb) CHECK(gu);
        if (weak_component_count(g) == 1) CHECK(gu == (ga || gb));
    }
}

TEST_CASE("property: power projections") {
    testsupport::Rng rng(13);
    for (int i = 0; i < 20; ++i) {
        auto a = testsupport::random_digraph(rng, 1 + rng() % 3, 0.5);
        for (std::size_t k = 1; k <= 3; ++k) {
            auto p = power(a, k);
            CHECK(p.size() == ipow(a.size(), k));
            for (std::size_t j = 0; j < k; ++j) {
                Mapping pr{std::vector<Element>(p.size()), a.size()};
                for (std::size_t c = 0; c < p.size(); ++c) pr.table[c] = decode_tuple(c, k, a.size())[j];
                CHECK(is_homomorphism(p, a, pr));
            }
        }
    }
}
