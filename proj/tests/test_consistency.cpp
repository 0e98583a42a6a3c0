#include <doctest.h>

#include "homlab/consistency.hpp"
#include "homlab/error.hpp"
#include "homlab/homsearch.hpp"
#include "support.hpp"

using namespace homlab;

namespace {

Structure z3_linear() {
    Structure t(3, Signature{{"R0", 3}, {"R1", 3}, {"R2", 3}}, "Z3");
    for (Element x = 0; x < 3; ++x)
        for (Element y = 0; y < 3; ++y)
            for (Element z = 0; z < 3; ++z) t.add_tuple((x + y + z) % 3, {x, y, z});
    t.normalize();
    return t;
}

// ({0,1,2}; C_3, R) with R = {(x,y,z) : x in {0,1}, x = 0 implies y = z}
Structure pss() {
    Structure t(3, Signature{{"C", 2}, {"R", 3}}, "pss");
    for (Element a = 0; a < 3; ++a) t.add_tuple(0, {a, (a + 1) % 3});
    for (Element x = 0; x < 2; ++x)
        for (Element y = 0; y < 3; ++y)
            for (Element z = 0; z < 3; ++z)
                if (x == 1 || y == z) t.add_tuple(1, {x, y, z});
    t.normalize();
    return t;
}

bool lists_sound(const Structure& inst, const Structure& tmpl, const UnaryLists& init, const UnaryLists& out) {
    auto all = all_homs(inst, tmpl, init, 100000);
    for (const auto& h : all.maps)
        for (std::size_t x = 0; x < inst.size(); ++x)
            if (!out[x].contains(h.table[x])) return false;
    return true;
}

}  // namespace

TEST_CASE("ac examples") {
    auto r = ac(complete_graph(3), complete_graph(2));
    REQUIRE(r);
    for (std::size_t x = 0; x < 3; ++x) CHECK((*r)[x] == ValueSet::full(2));

    CHECK_FALSE(ac(directed_path(2), transitive_tournament(2)));

    auto e = ac(digraph(4, {}), cycle_graph(5));
    REQUIRE(e);
    for (std::size_t x = 0; x < 4; ++x) CHECK((*e)[x] == ValueSet::full(5));

    CHECK_THROWS_AS(ac(complete_graph(3), Structure(2, Signature{{"R", 3}})), SignatureMismatch);
}

TEST_CASE("ac handles higher arity and repeated variables") {
    // x+y+z = 1 over Z_3 with x pinned to 0 and y, z free: nothing to prune
    auto t = z3_linear();
    Structure inst(3, t.signature());
    inst.add_tuple("R1", {0, 1, 2});
    inst.normalize();
    UnaryLists L = UnaryLists::full(3, 3);
    L.fix(0, 0);
    L.fix(1, 0);
    auto r = ac(inst, t, L);
    REQUIRE(r);
    CHECK((*r)[2] == ValueSet::single(1));

    // R1(x,x,x) asks for 3x = 1; positions are supported independently, so ac accepts
    Structure rep(1, t.signature());
    rep.add_tuple("R1", {0, 0, 0});
    rep.normalize();
    CHECK(ac(rep, t).has_value());
    CHECK_FALSE(brute_force_hom(rep, t).has_value());
}

TEST_CASE("pc examples") {
    CHECK_FALSE(pc(complete_graph(3), complete_graph(2)));
    CHECK(pc(complete_graph(2), complete_graph(2)));
    CHECK(pc(digraph(2, {{0, 1}}), complete_graph(2)));
    CHECK_THROWS_AS(pc(z3_linear(), z3_linear()), SignatureMismatch);
}

TEST_CASE("pc decides T_3") {
    auto t3 = transitive_tournament(3);
    // all digraphs on up to 3 vertices
    for (std::size_t n = 1; n <= 3; ++n) {
        const std::size_t pairs = n * n;
        for (std::size_t mask = 0; mask < (std::size_t{1} << pairs); ++mask) {
            std::vector<std::pair<Element, Element>> e;
            for (std::size_t b = 0; b < pairs; ++b)
                if ((mask >> b) & 1U) e.emplace_back(static_cast<Element>(b / n), static_cast<Element>(b % n));
            auto g = digraph(n, e);
            CHECK(pc(g, t3).has_value() == brute_force_hom(g, t3).has_value());
        }
    }
    testsupport::Rng rng(21);
    for (int i = 0; i < 150; ++i) {
        auto g = testsupport::random_digraph(rng, 4 + rng() % 3, 0.25, false);
        CHECK(pc(g, t3).has_value() == brute_force_hom(g, t3).has_value());
    }
}

TEST_CASE("k-consistency calibration") {
    testsupport::Rng rng(22);
    for (int i = 0; i < 50; ++i) {
        auto g = testsupport::random_oriented(rng, 3 + rng() % 4, 0.5);
        auto h = testsupport::random_oriented(rng, 2 + rng() % 3, 0.6);
        CHECK(k_consistency(g, h, 2) == ac(g, h).has_value());
    }
    for (int i = 0; i < 50; ++i) {
        auto g = testsupport::random_digraph(rng, 2 + rng() % 5, 0.35);
        auto h = testsupport::random_digraph(rng, 2 + rng() % 3, 0.5);
        CHECK(k_consistency(g, h, 3) == pc(g, h).has_value());
    }
}

TEST_CASE("3-consistency misses a Z_3 contradiction") {
    // x0+x2+x1 = 0, x1+x3+x0 = 0, 2*x3+x2 = 2: the first two force x2 = x3, then 3*x3 = 2
    auto t = z3_linear();
    Structure inst(4, t.signature());
    inst.add_tuple("R0", {0, 2, 1});
    inst.add_tuple("R0", {1, 3, 0});
    inst.add_tuple("R2", {3, 3, 2});
    inst.normalize();
    CHECK_FALSE(brute_force_hom(inst, t).has_value());
    CHECK(k_consistency(inst, t, 3));
    CHECK_FALSE(k_consistency(inst, t, 5));
}

TEST_CASE("sac examples") {
    CHECK_FALSE(sac(complete_graph(3), complete_graph(2)));
    CHECK(ac(complete_graph(3), complete_graph(2)));

    auto t = pss();
    testsupport::Rng rng(23);
    for (int i = 0; i < 60; ++i) {
        auto inst = testsupport::random_instance(rng, t, 3 + rng() % 5, 1 + rng() % 4);
        CHECK(sac(inst, t).has_value() == brute_force_hom(inst, t).has_value());
    }
}

TEST_CASE("property: monotone, fixpoint, sound") {
    testsupport::Rng rng(24);
    for (int i = 0; i < 80; ++i) {
        auto g = testsupport::random_digraph(rng, 2 + rng() % 5, 0.3);
        auto h = testsupport::random_digraph(rng, 2 + rng() % 3, 0.5);
        UnaryLists init = UnaryLists::full(g.size(), h.size());
        std::uniform_int_distribution<std::uint64_t> mask(1, (1U << h.size()) - 1);
        for (std::size_t x = 0; x < g.size(); ++x)
            if (rng() % 3 == 0) init[x] = ValueSet(mask(rng));

        auto a = ac(g, h, init);
        auto s = sac(g, h, init);
        bool exists = brute_force_hom(g, h, init).has_value();
        if (exists) {
            CHECK(a);
            CHECK(s);
        }
        if (a) {
            CHECK(a->subset_of(init));
            CHECK(ac(g, h, *a) == a);
            CHECK(lists_sound(g, h, init, *a));
        }
        if (s) {
            CHECK(s->subset_of(init));
            CHECK(sac(g, h, *s) == s);
            CHECK(lists_sound(g, h, init, *s));
            REQUIRE(a);
            CHECK(s->subset_of(*a));
            // every surviving value passes the singleton test
            for (std::size_t x = 0; x < g.size(); ++x)
                for (Element b : (*s)[x]) {
                    UnaryLists pin = *s;
                    pin[x] = ValueSet::single(b);
                    CHECK(ac(g, h, pin));
                }
        }
        if (!s && init == UnaryLists::full(g.size(), h.size())) CHECK_FALSE(k_consistency(g, h, 3));
        auto p = pc(g, h);
        if (p) {
            PairLists again = *p;
            std::vector<std::size_t> all(g.size());
            for (std::size_t x = 0; x < g.size(); ++x) all[x] = x;
            CHECK(pc_propagate(again, all));
            CHECK(again == *p);
        }
        if (exists) CHECK(p);
    }
}

TEST_CASE("property: sac is simulated by k-consistency on ternary templates") {
    auto t = pss();
    testsupport::Rng rng(25);
    for (int i = 0; i < 40; ++i) {
        auto inst = testsupport::random_instance(rng, t, 3 + rng() % 3, 1 + rng() % 3);
        if (!sac(inst, t)) CHECK_FALSE(k_consistency(inst, t, 4));
    }
}
