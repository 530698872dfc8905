#include <set>

#include "common.hpp"
#include "oracles.hpp"

using namespace finsheaf;
using namespace testing;

TEST_CASE("builtin groups have the expected orders and identity 0") {
    CHECK(FiniteGroup::trivial().order() == 1);
    CHECK(FiniteGroup::cyclic(4).order() == 4);
    CHECK(FiniteGroup::symmetric(3).order() == 6);
    CHECK(FiniteGroup::symmetric(4).order() == 24);
    CHECK(FiniteGroup::dihedral(4).order() == 8);
    for (auto g : {z(2), z(4), s3(), d4()}) {
        CHECK(g->identity() == 0);
        CHECK(g->label(0) == "()");
        for (Elem a = 0; a < g->order(); ++a) CHECK(g->mul(a, g->inv(a)) == 0);
    }
}

TEST_CASE("permutation product composes right to left") {
    // (1 2) then (1 2 3): a(b(i))
    const auto g = FiniteGroup::symmetric(3);
    const Elem t = *g.find("(1 2)"), c = *g.find("(1 2 3)");
    CHECK(g.label(g.mul(c, t)) == "(1 3)");
    CHECK(g.label(g.mul(t, c)) == "(2 3)");
}

TEST_CASE("from_table rejects broken tables with a witness") {
    CHECK_THROWS_AS(FiniteGroup::from_table({}), InputError);
    CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1}, {1}}), InputError);
    CHECK_THROWS_AS(FiniteGroup::from_table({{0, 2}, {1, 0}}), AxiomError);
    // identity but no inverse for 1
    CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1}, {1, 1}}), AxiomError);
    try {
        FiniteGroup::from_table({{0, 1, 2}, {1, 0, 0}, {2, 0, 0}});
        FAIL("non-associative table accepted");
    } catch (const AxiomError& e) {
        const auto& w = e.witness();
        REQUIRE(w.contains("a"));
        const auto g = [](Elem a, Elem b) { const Elem t[3][3] = {{0, 1, 2}, {1, 0, 0}, {2, 0, 0}}; return t[a][b]; };
        const Elem a = w["a"], b = w["b"], c = w["c"];
        CHECK(g(g(a, b), c) != g(a, g(b, c)));
    }
}

TEST_CASE("table roundtrip preserves the group") {
    const auto g = FiniteGroup::dihedral(4);
    CHECK(FiniteGroup::from_table(g.table(), g.labels()) == g);
}

TEST_CASE("subgroup enumeration matches brute force") {
    for (auto g : {z(2), z(3), z(4), z(6), s3(), d4(), share(FiniteGroup::trivial())}) {
        const auto expected = oracle::subgroups(*g);
        std::set<std::vector<Elem>> got;
        const auto subs = enumerate_subgroups(g);
        for (const Subgroup& h : subs) got.insert(h.elements());
        CHECK(got == expected);
        CHECK(subs.size() == expected.size());
        CHECK(std::is_sorted(subs.begin(), subs.end()));
    }
    CHECK(enumerate_subgroups(s3()).size() == 6);
    CHECK(enumerate_subgroups(d4()).size() == 10);
    CHECK(enumerate_subgroups(z(4)).size() == 3);
}

TEST_CASE("p-subgroups include the trivial subgroup") {
    const auto g = s3();
    CHECK(p_subgroups(g, 2).size() == 4);
    CHECK(p_subgroups(g, 3).size() == 2);
    CHECK(p_subgroups(g, 5).size() == 1);
    CHECK(p_subgroups(d4(), 2).size() == 10);
    CHECK_THROWS_AS(p_subgroups(g, 4), InputError);
    for (const Subgroup& h : p_subgroups(g, 2)) CHECK((h.size() == 1 || h.size() == 2));
}

TEST_CASE("subgroup constructors validate") {
    const auto g = s3();
    CHECK_THROWS_AS(Subgroup::from_elements(g, {1}), AxiomError);
    CHECK_THROWS_AS(Subgroup::from_elements(g, {0, 1, 2}), AxiomError);
    const Elem c = *g->find("(1 2 3)");
    const Subgroup a3 = Subgroup::generated_by(g, std::span(&c, 1));
    CHECK(a3.size() == 3);
    CHECK(normalizer(a3).size() == 6);
    const Elem t = *g->find("(1 2)");
    const Subgroup c2 = Subgroup::generated_by(g, std::span(&t, 1));
    CHECK(normalizer(c2) == c2);
    for (Elem x = 0; x < g->order(); ++x) CHECK(conjugacy_representative(conjugate_subgroup(c2, x)) == conjugacy_representative(c2));
}

TEST_CASE("coset spaces and fixed points") {
    const auto g = s3();
    const Elem t = *g->find("(1 2)");
    const Subgroup c2 = Subgroup::generated_by(g, std::span(&t, 1));
    const CosetSpace cs = coset_space(c2);
    CHECK(cs.gset.size() == 3);
    CHECK(cs.representatives.front() == 0);
    for (Elem x = 0; x < g->order(); ++x) CHECK(cs.gset.act(cs.coset_of[0], x) == cs.coset_of[x]);
    // Hg is fixed by K iff g K g^-1 is inside H
    for (const Subgroup& k : enumerate_subgroups(g)) {
        std::size_t expected = 0;
        for (std::size_t i = 0; i < cs.representatives.size(); ++i) {
            const Elem r = cs.representatives[i];
            expected += conjugate_subgroup(k, r).is_subset_of(c2);
        }
        CHECK(fixed_points(cs.gset, k).size() == expected);
    }
}

TEST_CASE("G-set validation, orbits and isomorphism") {
    const auto g = z(2);
    CHECK_THROWS_AS(GSet(g, {{1, 1}, {0, 0}}), AxiomError);
    const GSet two = GSet::disjoint_union(GSet::point(g), GSet::point(g));
    const GSet reg = GSet::regular(g);
    CHECK(orbits(two).size() == 2);
    CHECK(orbits(reg).size() == 1);
    CHECK_FALSE(gsets_isomorphic(two, reg));
    CHECK(stabilizer(reg, 0).size() == 1);

    const auto s = s3();
    const auto subs = enumerate_subgroups(s);
    for (std::size_t i = 0; i < subs.size(); ++i)
        for (std::size_t j = 0; j < subs.size(); ++j) {
            const GSet a = coset_gset(subs[i]), b = coset_gset(subs[j]);
            CHECK(gsets_isomorphic(a, b) == oracle::gsets_isomorphic(a, b));
        }
}

TEST_CASE("equivariant maps are checked") {
    const auto g = z(2);
    const GSet reg = GSet::regular(g);
    CHECK(GMap(reg, GSet::point(g), {0, 0}).table().size() == 2);
    CHECK(GMap(reg, reg, {1, 0}).is_bijective());
    CHECK_THROWS_AS(GMap(GSet::disjoint_union(GSet::point(g), GSet::point(g)), reg, {0, 0}), AxiomError);
}

TEST_CASE("subgroup posets are G-posets with the trivial subgroup least") {
    for (auto g : {z(4), s3(), d4()}) {
        const SubgroupPoset sp = subgroup_poset(g, enumerate_subgroups(g));
        REQUIRE(sp.poset.minimum());
        CHECK(sp.subgroups[*sp.poset.minimum()].size() == 1);
        CHECK_FALSE(sp.poset.opposite().minimum() == sp.poset.minimum());
    }
    const auto g = s3();
    const Elem t = *g->find("(1 2)");
    CHECK_THROWS_AS(subgroup_poset(g, {Subgroup::generated_by(g, std::span(&t, 1))}), InputError);
    CHECK_THROWS_AS(GPoset(GSet::point(z(2)), {{false}}), AxiomError);
}
