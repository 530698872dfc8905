#include <random>
#include <set>

#include "common.hpp"
#include "oracles.hpp"

using namespace finsheaf;
using namespace testing;

namespace {

CatPtr two_minimal() {
    return share(poset_category({{true, false, true}, {false, true, true}, {false, false, true}}, {"a", "b", "top"}));
}

std::vector<Presheaf> randoms(const CatPtr& c, std::uint64_t seed, std::size_t n, std::size_t max_total) {
    std::mt19937_64 rng(seed);
    std::vector<Presheaf> out;
    while (out.size() < n) {
        Presheaf f = random_presheaf(c, rng);
        if (f.total_size() <= max_total) out.push_back(std::move(f));
    }
    return out;
}

// Sheaf condition for the atomic topology straight from the definition:
// every nonempty sieve, matching families counted by brute force.
bool oracle_atomic_sheaf(const Presheaf& f) {
    const CatPtr& c = f.category();
    for (Obj x = 0; x < c->num_objects(); ++x)
        for (const auto& members : oracle::sieves(*c, x)) {
            if (members.empty()) continue;
            const Sieve s = generate_sieve(c, x, members);
            std::set<std::vector<Item>> fams;
            for (Item a = 0; a < f.size(x); ++a) {
                std::vector<Item> fam;
                for (Mor m : members) fam.push_back(f.at(m, a));
                fams.insert(fam);
            }
            if (fams.size() != f.size(x) || oracle::nat_count(sieve_presheaf(s), f) != f.size(x)) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("sieve enumeration matches brute force") {
    for (const CatPtr& c : {orbit_bundle(s3()).c_site.cat, transporter_bundle(z(2)).c_site.cat, two_minimal(),
                            group_category(z(3))}) {
        for (Obj x = 0; x < c->num_objects(); ++x) {
            const auto expected = oracle::sieves(*c, x);
            const auto got = enumerate_sieves(c, x);
            std::set<std::vector<Mor>> as_sets;
            for (const Sieve& s : got) as_sets.insert(s.morphisms());
            CHECK(as_sets == expected);
            CHECK(got.size() == expected.size());
            CHECK(std::is_sorted(got.begin(), got.end()));
        }
    }
    CHECK_THROWS_AS(enumerate_sieves(transporter_bundle(d4()).c_site.cat, 9, 2), BudgetExceeded);
}

TEST_CASE("sieves reject sets that are not closed") {
    const CatPtr c = two_minimal();
    Sieve::Bits bits(c->into(2).size());
    bits.set(c->into_position(c->id(2)));
    CHECK_THROWS_AS(Sieve(c, 2, bits), AxiomError);
    CHECK(Sieve::maximal(c, 2).is_maximal());
    CHECK(Sieve::empty(c, 2).is_empty());
}

TEST_CASE("generated and pulled-back sieves") {
    const auto b = orbit_bundle(s3());
    const CatPtr& c = b.c_site.cat;
    for (Mor f = 0; f < c->num_morphisms(); ++f) {
        const Sieve p = principal_sieve(c, f);
        CHECK(p.contains(f));
        for (Mor g : c->into(c->dom(f))) CHECK(p.contains(c->compose(f, g)));
        // f*(S) is maximal exactly when f is in S
        for (const Sieve& s : enumerate_sieves(c, c->cod(f))) {
            const Sieve q = pullback_sieve(f, s);
            CHECK(q.is_maximal() == s.contains(f));
            for (Mor v : c->into(c->dom(f))) CHECK(q.contains(v) == s.contains(c->compose(f, v)));
        }
    }
    const Mor f = c->hom(0, 1)[0];
    CHECK_THROWS_AS(generate_sieve(c, 0, std::span(&f, 1)), InputError);
}

TEST_CASE("sieve presheaf is a subpresheaf of the representable") {
    const auto b = orbit_bundle(s3());
    const CatPtr& c = b.c_site.cat;
    for (Obj x = 0; x < c->num_objects(); ++x)
        for (const Sieve& s : enumerate_sieves(c, x)) {
            const Presheaf p = sieve_presheaf(s);
            CHECK(p.total_size() == s.size());
            CHECK(count_nat(p, representable(c, x)) >= 1);
        }
}

TEST_CASE("Ore condition") {
    CHECK(ore_condition(*orbit_bundle(s3()).c_site.cat).holds);
    CHECK(ore_condition(*group_category(s3())).holds);
    const auto r = ore_condition(*two_minimal());
    REQUIRE_FALSE(r.holds);
    const CatPtr c = two_minimal();
    const auto [f, g] = *r.cospan;
    CHECK(c->cod(f) == c->cod(g));
    CHECK(c->dom(f) != c->dom(g));
}

TEST_CASE("topology axioms") {
    for (auto g : {z(2), z(4), s3()}) {
        const auto b = orbit_bundle(g);
        for (const Site* s : {&b.g_site, &b.pg_site, &b.c_site}) {
            CHECK(check_topology_axioms(*s).ok);
            CHECK(check_topology_axioms(*s, 1'000'000, Exec::Parallel).ok);
        }
    }
    const Site bad{two_minimal(), Topology::atomic(), std::nullopt};
    const AxiomReport r = check_topology_axioms(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.failed_axiom == "ore");
    CHECK(check_topology_axioms(Site{two_minimal(), Topology::trivial(), std::nullopt}).ok);
    // a tiny budget falls back to principal sieves
    const auto b = orbit_bundle(s3());
    const AxiomReport p = check_topology_axioms(b.c_site, 2);
    CHECK(p.ok);
    CHECK(p.mode == "principal");
}

TEST_CASE("explicit topologies are checked") {
    const CatPtr c = two_minimal();
    std::vector<std::vector<Sieve>> covers;
    for (Obj x = 0; x < 3; ++x) covers.push_back({Sieve::maximal(c, x)});
    CHECK(check_topology_axioms(Site{c, Topology::explicit_family(covers), std::nullopt}).ok);
    // the sieve generated by a -> top covers, but its pullback along b -> top (empty) does not
    const Mor at = c->hom(0, 2)[0];
    covers[2].push_back(generate_sieve(c, 2, std::span(&at, 1)));
    CHECK_FALSE(check_topology_axioms(Site{c, Topology::explicit_family(covers), std::nullopt}).ok);
    covers.pop_back();
    CHECK_FALSE(check_topology_axioms(Site{c, Topology::explicit_family(covers), std::nullopt}).ok);
}

TEST_CASE("minimal sieve closed form") {
    for (auto g : {z(2), s3(), d4()}) {
        const auto b = orbit_bundle(g);
        for (const Site* s : {&b.pg_site, &b.c_site}) {
            const CatPtr& c = s->cat;
            for (Obj x = 0; x < c->num_objects(); ++x) {
                const Sieve m = minimal_sieve(*s, x);
                CHECK(m.size() == c->hom(b.x0, x).size());
                CHECK(m.count_from(b.x0) == m.size());
                if (c->num_morphisms() < 200)
                    for (const Sieve& t : enumerate_sieves(c, x))
                        if (!t.is_empty()) CHECK(m.is_subset_of(t));
            }
        }
    }
    CHECK_THROWS_AS(minimal_sieve(Site{two_minimal(), Topology::atomic(), std::nullopt}, 2), Error);
}

TEST_CASE("trivial topology: every presheaf is a sheaf") {
    const CatPtr c = two_minimal();
    const Site s{c, Topology::trivial(), std::nullopt};
    for (const Presheaf& f : randoms(c, 1, 10, 20)) CHECK(is_sheaf(f, s).ok);
    CHECK_THROWS_AS(is_sheaf(constant_singleton(c), s, {SheafStrategy::Fast}), InputError);
}

TEST_CASE("fast and definitional criteria agree with brute force") {
    for (auto g : {z(2), z(3), s3()}) {
        const auto b = orbit_bundle(g);
        for (const Presheaf& f : randoms(b.c_site.cat, 31 + g->order(), 12, 7)) {
            const bool fast = is_sheaf(f, b.c_site, {SheafStrategy::Fast}).ok;
            const bool def = is_sheaf(f, b.c_site, {SheafStrategy::Definitional}).ok;
            CHECK(fast == def);
            if (b.c_site.cat->num_morphisms() <= 12) CHECK(fast == oracle_atomic_sheaf(f));
        }
        CHECK(is_sheaf(constant_singleton(b.c_site.cat), b.c_site).ok);
        CHECK(is_sheaf(empty_presheaf(b.c_site.cat), b.c_site).ok);
    }
}

TEST_CASE("a presheaf with a split value at G\\G is not a sheaf") {
    const auto b = orbit_bundle(z(2));
    const CatPtr& c = b.c_site.cat;
    // O(x0) = 1, O(G\G) = 2, every map constant 0
    std::vector<std::vector<Item>> maps(c->num_morphisms());
    for (Mor u = 0; u < c->num_morphisms(); ++u) {
        maps[u].assign(c->cod(u) == 1 ? 2 : 1, 0);
        if (c->is_identity(u)) std::iota(maps[u].begin(), maps[u].end(), 0);
    }
    const Presheaf o(c, {1, 2}, maps);
    for (auto strategy : {SheafStrategy::Fast, SheafStrategy::Definitional}) {
        const SheafReport r = is_sheaf(o, b.c_site, {strategy});
        REQUIRE_FALSE(r.ok);
        CHECK(r.witness["object"] == 1);
        CHECK(r.witness["reason"] == "not injective");
    }
}

TEST_CASE("plus construction and sheafification") {
    for (auto g : {z(2), s3()}) {
        const auto b = orbit_bundle(g);
        for (const Presheaf& f : randoms(b.c_site.cat, 41, 8, 10)) {
            const PlusResult p1 = plus_construction(f, b.c_site);
            const PlusResult p2 = plus_construction_general(f, b.c_site);
            CHECK(p1.value.sizes() == p2.value.sizes());
            CHECK(find_presheaf_isomorphism(p1.value, p2.value));
            CHECK(is_natural(f, p1.value, p1.unit));
            const PlusResult sh = sheafify(f, b.c_site);
            CHECK(is_sheaf(sh.value, b.c_site).ok);
            CHECK(is_natural(f, sh.value, sh.unit));
            // sheafifying a sheaf changes nothing
            const PlusResult again = sheafify(sh.value, b.c_site);
            CHECK(is_componentwise_bijective(sh.value, again.value, again.unit));
            // universal property: Nat(F+, S) = Nat(F, S) for sheaves S
            CHECK(count_nat(sh.value, constant_singleton(b.c_site.cat)) == 1);
        }
    }
}

TEST_CASE("quotients merge by the generated congruence") {
    const auto b = orbit_bundle(z(2));
    const CatPtr& c = b.c_site.cat;
    // y(x0) is Z2 acting on itself at x0 and empty at G\G
    const Presheaf y = representable(c, 0);
    REQUIRE(y.sizes() == std::vector<std::size_t>{2, 0});
    const PlusResult q = quotient_presheaf(y, {{0, 0, 1}});
    CHECK(is_natural(y, q.value, q.unit));
    CHECK(q.value.sizes() == std::vector<std::size_t>{1, 0});
    CHECK_THROWS_AS(quotient_presheaf(y, {{1, 0, 1}}), InputError);
    const PlusResult none = quotient_presheaf(y, {});
    CHECK(none.value == y);
}

TEST_CASE("random presheaves are seeded") {
    const auto b = orbit_bundle(s3());
    std::mt19937_64 r1(5), r2(5);
    for (int i = 0; i < 10; ++i) CHECK(random_presheaf(b.c_site.cat, r1) == random_presheaf(b.c_site.cat, r2));
}

TEST_CASE("parallel sheaf checks agree with serial") {
    const auto b = orbit_bundle(d4());
    SheafOptions par;
    par.exec = Exec::Parallel;
    for (const Presheaf& f : randoms(b.c_site.cat, 51, 10, 30)) {
        CHECK(is_sheaf(f, b.c_site).ok == is_sheaf(f, b.c_site, par).ok);
        CHECK(plus_construction(f, b.c_site).value == plus_construction(f, b.c_site, par).value);
    }
}
