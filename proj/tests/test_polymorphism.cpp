#include <doctest.h>

#include <numeric>

#include "homlab/consistency.hpp"
#include "homlab/error.hpp"
#include "homlab/polymorphism.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace homlab;
using namespace oracles;

namespace {

// on three distinct arguments return the first, otherwise the repeated value
Operation first_on_distinct(std::size_t n) {
    return Operation::from_function(3, n, [](const Tuple& t) {
        if (t[1] == t[2]) return t[1];
        return t[0];
    });
}

// every table over a 2-element domain: polymorphisms per symbol, then all combinations
bool exists_by_enumeration(const Structure& b, const IdentitySystem& sys, bool idempotent) {
    const auto& syms = sys.symbols();
    std::vector<std::vector<Operation>> valid(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i) {
        const std::size_t size = ipow(2, syms[i].arity);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << size); ++bits) {
            std::vector<Element> table(size);
            for (std::size_t c = 0; c < size; ++c) table[c] = (bits >> c) & 1U;
            Operation op(syms[i].arity, 2, table, syms[i].name);
            if (is_polymorphism(op, b) && (!idempotent || is_idempotent(op))) valid[i].push_back(std::move(op));
        }
        if (valid[i].empty()) return false;
    }
    std::vector<std::size_t> pick(syms.size(), 0);
    for (;;) {
        OperationMap ops;
        for (std::size_t i = 0; i < syms.size(); ++i) ops.emplace(syms[i].name, valid[i][pick[i]]);
        if (check_identities(ops, sys)) return true;
        std::size_t i = syms.size();
        while (i > 0 && ++pick[i - 1] == valid[i - 1].size()) pick[--i] = 0;
        if (i == 0) return false;
    }
}

Structure random_boolean(testsupport::Rng& rng) {
    Structure b(2, Signature{{"R", 2}, {"T", 3}});
    std::bernoulli_distribution coin(0.5);
    for (Element x = 0; x < 2; ++x)
        for (Element y = 0; y < 2; ++y) {
            if (coin(rng)) b.add_tuple(0, {x, y});
            for (Element z = 0; z < 2; ++z)
                if (rng() % 4 == 0) b.add_tuple(1, {x, y, z});
        }
    b.normalize();
    return b;
}

}  // namespace

TEST_CASE("polymorphism examples") {
    auto t3 = transitive_tournament(3);
    CHECK(is_polymorphism(min_operation(3), t3));
    CHECK(is_polymorphism(median_operation(3), t3));
    CHECK(is_polymorphism(max_operation(3), t3));
    for (std::size_t n = 3; n <= 6; ++n) {
        auto f = first_on_distinct(n);
        CHECK(is_polymorphism(f, directed_cycle(n)));
        CHECK(check_identities({{"f", f}}, identities::majority()));
    }
    CHECK_FALSE(is_polymorphism(median_operation(3), complete_graph(3)));
    CHECK(is_polymorphism(projection(4, 2, 3), complete_graph(3)));
    CHECK_THROWS_AS(is_polymorphism(min_operation(2), t3), Error);

    // higher arity relations go through sorted codes when n^r is large
    Structure wide(3, Signature{{"W", 14}});
    wide.add_tuple(0, Tuple(14, 1));
    wide.add_tuple(0, Tuple(14, 2));
    wide.normalize();
    CHECK(is_polymorphism(max_operation(3), wide));
    CHECK_FALSE(is_polymorphism(affine_maltsev(3), wide));
}

TEST_CASE("identity checks") {
    CHECK(check_identities({{"m", boolean_minority()}}, identities::maltsev()));
    CHECK(check_identities({{"f", boolean_minority()}}, identities::minority()));
    CHECK(check_identities({{"f", boolean_majority()}}, identities::majority()));
    CHECK_FALSE(check_identities({{"f", boolean_majority()}}, identities::minority()));
    auto comm = IdentitySystem::parse("sym f 2 ; id f(x,y) = f(y,x)");
    CHECK_FALSE(check_identities({{"f", projection(2, 0, 2)}}, comm));
    CHECK(check_identities({{"f", min_operation(2)}}, comm));
    CHECK_THROWS_AS(check_identities({{"f", boolean_majority()}}, comm), Error);
    CHECK_THROWS_AS(check_identities({{"g", min_operation(2)}}, comm), Error);

    // affine x-y+z is Maltsev on every Z_n; 2x+2y+2z+w is Siggers on Z_3
    for (std::size_t n = 2; n <= 6; ++n) CHECK(check_identities({{"m", affine_maltsev(n)}}, identities::maltsev()));
    auto s = Operation::from_function(4, 3, [](const Tuple& t) { return (2 * (t[0] + t[1] + t[2]) + t[3]) % 3; });
    CHECK(check_identities({{"s", s}}, identities::siggers4()));
}

TEST_CASE("essentially unary") {
    for (std::size_t i = 0; i < 3; ++i) CHECK(is_essentially_unary(projection(3, i, 4)));
    CHECK_FALSE(is_essentially_unary(min_operation(2)));
    auto neg = Operation::from_function(3, 2, [](const Tuple& t) { return 1 - t[0]; });
    CHECK(is_essentially_unary(neg));
    CHECK(is_essentially_unary(constant_operation(2, 3, 1)));
    CHECK_FALSE(is_essentially_unary(boolean_minority()));
}

TEST_CASE("operation text") {
    auto m = median_operation(3);
    auto back = parse_operation(to_text(m));
    CHECK(back == m);
    CHECK(back.name() == "median");
    CHECK(parse_operation("op f 1 2\n0 1\n1 0\nend\n")({1}) == 0);
    CHECK_THROWS_AS(parse_operation("op f 1 2\n0 1\nend\n"), FormatError);
    CHECK_THROWS_AS(parse_operation("op f 1 2\n0 1\n0 0\n1 0\nend\n"), FormatError);
    CHECK_THROWS_AS(parse_operation("op f 1 2\n0 2\n1 0\nend\n"), FormatError);
    CHECK_THROWS_AS(parse_operation("op f 1 2\n0 1\n1 0\n"), FormatError);
    CHECK_THROWS_AS(parse_operation("f 1 2\nend\n"), FormatError);
}

TEST_CASE("identity system text") {
    auto sys = IdentitySystem::parse("sym t 3 ; id t(x,x,y) = t(x,y,x) ; id t(x,y,x) = t(y,x,x) ; id t(y,x,x) = x");
    CHECK(sys.symbols().size() == 1);
    CHECK(sys.identities().size() == 3);
    CHECK(sys.has_bare_side());
    CHECK(IdentitySystem::parse(sys.to_string()).to_string() == sys.to_string());
    CHECK(sys.to_string() == "sym t 3 ; id t(x,x,y) = t(x,y,x) ; id t(x,y,x) = t(y,x,x) ; id t(y,x,x) = x");
    CHECK_THROWS_AS(IdentitySystem::parse("sym t 2 ; id t(t(x,y),z) = t(x,t(y,z))"), FormatError);
    CHECK_THROWS_AS(IdentitySystem::parse("sym t 2 ; id t(x) = x"), FormatError);
    CHECK_THROWS_AS(IdentitySystem::parse("sym t 2 ; id g(x,y) = x"), FormatError);
    CHECK_THROWS_AS(IdentitySystem::parse("id x = x"), FormatError);
    CHECK_THROWS_AS(IdentitySystem::parse("sym t 0"), FormatError);
    CHECK_THROWS_AS(IdentitySystem::parse("sym t 2 ; sym t 3"), FormatError);

    // named systems describe what they claim
    CHECK(check_identities({{"f", median_operation(4)}}, identities::near_unanimity(3)));
    CHECK(check_identities({{"f", max_operation(4)}}, identities::totally_symmetric(2)));
    auto max3 = Operation::from_function(3, 3, [](const Tuple& t) { return std::max({t[0], t[1], t[2]}); });
    CHECK(check_identities({{"f", max3}}, identities::totally_symmetric(3)));
    auto sum3 = Operation::from_function(3, 3, [](const Tuple& t) { return (t[0] + t[1] + t[2]) % 3; });
    CHECK(check_identities({{"f", sum3}}, identities::cyclic(3)));
    CHECK_FALSE(check_identities({{"f", sum3}}, identities::totally_symmetric(3)));
    CHECK(check_identities({{"f", boolean_majority()}, {"g", Operation::from_function(4, 2, [](const Tuple& t) {
                                                             return static_cast<Element>(t[0] + t[1] + t[2] + t[3] >= 3);
                                                         })}},
                           identities::wnu_3_4()));
}

TEST_CASE("indicator instances") {
    // majority on T_3: the plain cube with the near-unanimous tuples pinned
    auto t3 = transitive_tournament(3);
    auto ind = indicator_instance(t3, identities::majority(), false);
    auto cube = power(t3, 3);
    CHECK(ind.instance.size() == 27);
    CHECK(ind.instance.tuples(0) == cube.tuples(0));
    for (Element u = 0; u < 3; ++u)
        for (Element v = 0; v < 3; ++v)
            for (const Tuple& t : {Tuple{u, u, v}, Tuple{u, v, u}, Tuple{v, u, u}})
                CHECK(ind.lists[encode_tuple(t.data(), 3, 3)] == ValueSet::single(u));
    CHECK(ind.lists[encode_tuple(Tuple{0, 1, 2}.data(), 3, 3)] == ValueSet::full(3));

    // Siggers on the directed 3-cycle: 81 raw elements merged down to 57 classes
    auto sig = indicator_instance(directed_cycle(3), identities::siggers4(), false);
    std::vector<std::size_t> parent(81);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a];
        return a;
    };
    for (Element x = 0; x < 3; ++x)
        for (Element y = 0; y < 3; ++y)
            for (Element z = 0; z < 3; ++z) {
                Tuple l{x, x, y, z}, r{y, z, z, x};
                auto a = root(encode_tuple(l.data(), 4, 3)), b = root(encode_tuple(r.data(), 4, 3));
                parent[std::max(a, b)] = std::min(a, b);
            }
    std::size_t classes = 0;
    for (std::size_t i = 0; i < 81; ++i) classes += root(i) == i;
    CHECK(classes == 57);
    CHECK(sig.instance.size() == 57);

    // commutativity on K_2: (0,1) and (1,0) become one loop vertex
    auto comm = indicator_instance(complete_graph(2), IdentitySystem::parse("sym f 2 ; id f(x,y) = f(y,x)"), false);
    CHECK(comm.instance.size() == 3);
    CHECK(comm.instance.tuples(0) == std::vector<Tuple>{{0, 2}, {1, 1}, {2, 0}});

    // contradictory bare sides empty a list
    auto bad = indicator_instance(complete_graph(2), IdentitySystem::parse("sym f 2 ; id f(x,y) = x ; id f(x,y) = y"), false);
    CHECK(bad.lists.rejected());

    Limits tiny;
    tiny.states = 100;
    CHECK_THROWS_AS(indicator_instance(complete_graph(3), identities::siggers4(), false, tiny), GuardExceeded);
    tiny = Limits{};
    tiny.arity = 3;
    CHECK_THROWS_AS(find_polymorphism(complete_graph(3), identities::siggers4(), false, tiny), GuardExceeded);
}

TEST_CASE("find polymorphism examples") {
    auto dc3 = with_singletons(directed_cycle(3));
    auto sig = find_polymorphism(dc3, identities::siggers4(), false);
    REQUIRE(sig);
    CHECK(is_polymorphism(sig->at("s"), dc3));
    CHECK(check_identities(*sig, identities::siggers4()));
    auto witness = Operation::from_function(4, 3, [](const Tuple& t) { return (2 * (t[0] + t[1] + t[2]) + t[3]) % 3; });
    CHECK(is_polymorphism(witness, dc3));
    CHECK(check_identities({{"s", witness}}, identities::siggers4()));

    CHECK_FALSE(find_polymorphism(directed_cycle(3), identities::cyclic(3), false));
    auto c2 = find_polymorphism(directed_cycle(3), identities::cyclic(2), false);
    REQUIRE(c2);
    auto two_sum = Operation::from_function(2, 3, [](const Tuple& t) { return (2 * (t[0] + t[1])) % 3; });
    CHECK(is_polymorphism(two_sum, directed_cycle(3)));
    CHECK(check_identities({{"f", two_sum}}, identities::cyclic(2)));

    // Z_6: a WNU of arity 5 but none of arity 3 or 4
    auto z6 = z6_sum();
    CHECK_FALSE(find_polymorphism(z6, identities::wnu(3), false));
    CHECK_FALSE(find_polymorphism(z6, identities::wnu(4), false));
    auto w5 = find_polymorphism(z6, identities::wnu(5), false);
    REQUIRE(w5);
    CHECK(check_identities(*w5, identities::wnu(5)));
    auto five_sum = Operation::from_function(5, 6, [](const Tuple& t) {
        return (5 * (t[0] + t[1] + t[2] + t[3] + t[4])) % 6;
    });
    CHECK(is_polymorphism(five_sum, z6));
    CHECK(check_identities({{"f", five_sum}}, identities::wnu(5)));

    CHECK_THROWS_AS(find_polymorphism(Structure(65, Signature{{"E", 2}}), identities::majority(), false), GuardExceeded);
}

TEST_CASE("find special examples") {
    auto t3 = transitive_tournament(3);
    auto maj = find_special(t3, Special::Majority);
    CHECK(maj.verdict == SearchVerdict::Found);
    CHECK(find_special(cycle_graph(6), Special::Majority).verdict == SearchVerdict::None);
    CHECK(find_special(cycle_graph(4), Special::Majority).verdict == SearchVerdict::Found);
    CHECK(find_special(with_singletons(z3_linear()), Special::Wnu34).verdict == SearchVerdict::None);
    CHECK(find_special(with_singletons(z3_linear()), Special::Maltsev).verdict == SearchVerdict::Found);
    CHECK(find_special(with_singletons(z3_linear()), Special::Majority).verdict == SearchVerdict::None);

    auto semi = find_special(t3, Special::Semilattice);
    REQUIRE(semi.verdict == SearchVerdict::Found);
    const auto& f = semi.ops.at("f");
    for (Element x = 0; x < 3; ++x)
        for (Element y = 0; y < 3; ++y)
            for (Element z = 0; z < 3; ++z) CHECK(f({f({x, y}), z}) == f({x, f({y, z})}));
    CHECK(find_special(complete_graph(3), Special::Semilattice).verdict == SearchVerdict::None);
    SpecialOptions capped;
    capped.semilattice_cap = 1;
    // Z_3 with x-y+z: commutative idempotent candidates exist but none is associative
    Structure graph(3, Signature{{"M", 4}});
    for (Element x = 0; x < 3; ++x)
        for (Element y = 0; y < 3; ++y)
            for (Element z = 0; z < 3; ++z) graph.add_tuple(0, {x, y, z, static_cast<Element>((x + 2 * y + z) % 3)});
    graph.normalize();
    CHECK(find_special(graph, Special::Semilattice).verdict == SearchVerdict::None);
    auto twice = disjoint_union(graph, graph);
    CHECK(find_special(twice, Special::Semilattice).verdict == SearchVerdict::None);
    CHECK(find_special(twice, Special::Semilattice, capped).verdict == SearchVerdict::Inconclusive);

    SpecialOptions ts;
    ts.arity = 3;
    CHECK(find_special(t3, Special::TotallySymmetric, ts).verdict == SearchVerdict::Found);
    CHECK_THROWS_AS(find_special(t3, Special::Cyclic), Error);
    CHECK(special_from_name("siggers4") == Special::Siggers4);
    CHECK_FALSE(special_from_name("nope"));
}

TEST_CASE("majority test by path consistency") {
    auto yes = majority_test_pc(transitive_tournament(3));
    CHECK(yes.yes);
    REQUIRE(yes.witness);
    CHECK(is_polymorphism(*yes.witness, transitive_tournament(3)));
    CHECK_FALSE(majority_test_pc(complete_graph(3)).yes);
    CHECK(majority_test_pc(directed_cycle(5)).yes);
    CHECK_FALSE(majority_test_pc(cycle_graph(6)).yes);
    CHECK(majority_test_pc(cycle_graph(4)).yes);
    CHECK_THROWS_AS(majority_test_pc(z3_linear()), SignatureMismatch);
}

TEST_CASE("property: search agrees with exhaustive enumeration on two elements") {
    std::vector<IdentitySystem> systems{
        identities::majority(),
        identities::quasi_majority(),
        identities::maltsev(),
        identities::minority(),
        identities::commutative_idempotent(),
        identities::totally_symmetric(3),
        identities::cyclic(2),
        identities::cyclic(3),
        identities::wnu(3),
        identities::pq(),
        IdentitySystem::parse("sym f 2 ; id f(x,y) = f(y,x)"),
        IdentitySystem::parse("sym f 1 ; id f(x) = x"),
    };
    std::vector<Structure> corpus;
    for (std::size_t mask = 0; mask < 16; ++mask) {
        std::vector<std::pair<Element, Element>> e;
        for (Element b = 0; b < 4; ++b)
            if ((mask >> b) & 1U) e.emplace_back(b / 2, b % 2);
        corpus.push_back(digraph(2, e));
    }
    testsupport::Rng rng(41);
    for (int i = 0; i < 20; ++i) corpus.push_back(random_boolean(rng));
    for (const auto& b : corpus)
        for (const auto& sys : systems)
            for (bool idem : {false, true}) {
                auto found = find_polymorphism(b, sys, idem);
                CHECK(found.has_value() == exists_by_enumeration(b, sys, idem));
                if (found) {
                    CHECK(check_identities(*found, sys));
                    for (const auto& [name, op] : *found) {
                        CHECK(is_polymorphism(op, b));
                        if (idem) CHECK(is_idempotent(op));
                    }
                }
            }
}

TEST_CASE("property: results verify, majority test agrees, Siggers 4 implies 6") {
    testsupport::Rng rng(42);
    std::vector<Structure> corpus;
    for (std::size_t mask = 0; mask < 512; mask += 7) {
        std::vector<std::pair<Element, Element>> e;
        for (Element b = 0; b < 9; ++b)
            if ((mask >> b) & 1U) e.emplace_back(b / 3, b % 3);
        corpus.push_back(digraph(3, e));
    }
    for (int i = 0; i < 25; ++i) corpus.push_back(testsupport::random_digraph(rng, 4, 0.4));
    for (std::size_t n = 3; n <= 5; ++n) corpus.push_back(directed_cycle(n));
    for (const auto& h : corpus) {
        auto maj = find_special(h, Special::Majority);
        auto pc_test = majority_test_pc(h);
        CHECK(pc_test.yes == (maj.verdict == SearchVerdict::Found));
        if (pc_test.witness) CHECK(is_polymorphism(*pc_test.witness, h));

        SpecialOptions idem;
        idem.idempotent = true;
        auto s4 = find_special(h, Special::Siggers4, idem);
        if (s4.verdict == SearchVerdict::Found) {
            CHECK(check_identities(s4.ops, identities::siggers4()));
            if (h.size() <= 3) CHECK(find_special(h, Special::Siggers6, idem).verdict == SearchVerdict::Found);
        }
    }
}

TEST_CASE("property: cyclic composition stays cyclic") {
    testsupport::Rng rng(43);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        auto h = testsupport::random_digraph(rng, 2 + rng() % 2, 0.5);
        for (std::size_t k : {2, 4}) {
            auto c = find_polymorphism(h, identities::cyclic(k), false);
            if (!c) continue;
            const Operation& s = c->at("f");
            for (std::size_t l : {std::size_t{1}, std::size_t{2}, k}) {
                if (k % l) continue;
                // any polymorphism t of arity l: a projection, or a found one
                std::vector<Operation> ts{projection(l, 0, h.size())};
                if (auto t = find_polymorphism(h, IdentitySystem::parse("sym f " + std::to_string(l)), false))
                    ts.push_back(t->at("f"));
                for (const auto& t : ts) {
                    auto comp = cyclic_composition(s, t);
                    CHECK(comp.arity() == l);
                    CHECK(is_polymorphism(comp, h));
                    if (l >= 2) CHECK(check_identities({{"f", comp}}, identities::cyclic(l)));
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("property: polymorphisms preserve path consistency lists") {
    testsupport::Rng rng(44);
    std::vector<std::pair<Structure, Operation>> pairs{
        {transitive_tournament(3), min_operation(3)},
        {transitive_tournament(3), median_operation(3)},
        {directed_cycle(4), first_on_distinct(4)},
    };
    for (int i = 0; i < 10; ++i) {
        auto h = testsupport::random_digraph(rng, 3, 0.5);
        if (auto m = find_polymorphism(h, identities::majority(), false)) pairs.emplace_back(h, m->at("f"));
        if (auto b = find_polymorphism(h, identities::commutative_idempotent(), false)) pairs.emplace_back(h, b->at("f"));
    }
    for (const auto& [h, f] : pairs) {
        REQUIRE(is_polymorphism(f, h));
        const std::size_t n = h.size(), k = f.arity();
        for (int j = 0; j < 6; ++j) {
            auto g = testsupport::random_digraph(rng, 3 + rng() % 3, 0.35);
            auto L = pc(g, h);
            if (!L) continue;
            for (std::size_t x = 0; x < g.size(); ++x)
                for (std::size_t y = 0; y < g.size(); ++y) {
                    std::vector<Element> pairs_in;
                    for (Element bit : L->at(x, y)) pairs_in.push_back(bit);
                    // apply f to every k-tuple of pairs in L(x,y)
                    std::vector<std::size_t> idx(k, 0);
                    for (bool more = !pairs_in.empty(); more;) {
                        Tuple us(k), vs(k);
                        for (std::size_t i = 0; i < k; ++i) {
                            us[i] = pairs_in[idx[i]] / static_cast<Element>(n);
                            vs[i] = pairs_in[idx[i]] % static_cast<Element>(n);
                        }
                        CHECK(L->has(x, y, f(us), f(vs)));
                        std::size_t i = k;
                        while (i > 0 && ++idx[i - 1] == pairs_in.size()) idx[--i] = 0;
                        more = i > 0;
                    }
                }
        }
    }
}
