#include <random>

#include "common.hpp"
#include "oracles.hpp"

using namespace finsheaf;
using namespace testing;

TEST_CASE("transporter hom-sets match the transporter of subgroups") {
    for (auto g : {z(4), s3(), d4()}) {
        const auto b = transporter_bundle(g);
        const FinCat& c = *b.pg_site.cat;
        REQUIRE(b.subgroups.size() == c.num_objects());
        for (Obj x = 0; x < c.num_objects(); ++x)
            for (Obj y = 0; y < c.num_objects(); ++y) {
                CHECK(c.hom(x, y).size() == hom_transporter(b.subgroups[x], b.subgroups[y]).size());
                for (Mor f : c.hom(x, y)) CHECK(b.transporter().encode(x, y, b.transporter().element[f]) == f);
            }
        // composition multiplies group elements
        for (Mor f = 0; f < c.num_morphisms(); ++f)
            for (Mor h : c.into(c.dom(f)))
                CHECK(b.transporter().element[c.compose(f, h)] ==
                      g->mul(b.transporter().element[f], b.transporter().element[h]));
    }
}

TEST_CASE("orbit quotient hom-sets are kernel cosets") {
    for (auto g : {z(2), s3(), d4()}) {
        const auto b = orbit_bundle(g);
        const FinCat& pg = *b.pg_site.cat;
        const FinCat& c = *b.c_site.cat;
        for (Obj x = 0; x < c.num_objects(); ++x) {
            CHECK(b.extension.kernels[x] == b.subgroups[x]);
            for (Obj y = 0; y < c.num_objects(); ++y)
                CHECK(c.hom(x, y).size() * b.extension.kernels[y].size() == pg.hom(x, y).size());
        }
        for (Mor f = 0; f < pg.num_morphisms(); ++f) CHECK(b.extension.rho(pg.dom(f)) == pg.dom(f));
    }
}

TEST_CASE("bundle sizes") {
    const auto zo = orbit_bundle(z(2));
    CHECK(zo.c_site.cat->num_objects() == 2);
    CHECK(zo.c_site.cat->num_morphisms() == 4);
    CHECK(zo.pg_site.cat->num_morphisms() == 6);
    CHECK(zo.x0 == 0);
    const auto sp = make_bundle(s3(), PosetChoice::PSubgroups, 2, QuotientChoice::Orbit);
    CHECK(sp.c_site.cat->num_objects() == 4);
    CHECK(sp.pg_site.cat->num_objects() == 4);
    CHECK(sp.poset_name == "p-subgroups:2");
    CHECK_THROWS_AS(make_bundle(s3(), PosetChoice::PSubgroups, 6, QuotientChoice::Orbit), InputError);
    const auto t = transporter_bundle(s3());
    CHECK(t.c_site.cat->same_structure(*t.pg_site.cat));
}

TEST_CASE("broken kernels are rejected with a witness") {
    const auto g = s3();
    const auto b = transporter_bundle(g);
    const TransporterCat& t = b.transporter();
    const Elem tr = *g->find("(1 2)"), cyc = *g->find("(1 2 3)");
    std::vector<Subgroup> kernels;
    for (std::size_t i = 0; i < b.subgroups.size(); ++i) kernels.push_back(Subgroup::trivial(g));

    // nontrivial kernel at the trivial subgroup but not above it: not a congruence
    auto broken = kernels;
    broken[b.x0] = Subgroup::generated_by(g, std::span(&tr, 1));
    try {
        orbit_quotient(t, broken);
        FAIL("non-congruence accepted");
    } catch (const AxiomError& e) {
        CHECK(e.witness().contains("f"));
        CHECK(e.witness().contains("g"));
    }

    // a kernel outside Aut(x)
    auto outside = kernels;
    const Subgroup c2 = Subgroup::generated_by(g, std::span(&tr, 1));
    const auto it = std::find(b.subgroups.begin(), b.subgroups.end(), c2);
    REQUIRE(it != b.subgroups.end());
    outside[it - b.subgroups.begin()] = Subgroup::generated_by(g, std::span(&cyc, 1));
    CHECK_THROWS_AS(orbit_quotient(t, outside), InputError);

    const CatExtension id = trivial_extension(t);
    CHECK(id.target->same_structure(*t.cat));
}

TEST_CASE("pi and rho are continuous and cocontinuous") {
    for (auto g : {z(2), z(3), s3()}) {
        const auto b = orbit_bundle(g);
        CHECK(is_continuous(b.pi, b.pg_site, b.g_site).continuous());
        CHECK(is_cocontinuous(b.pi, b.pg_site, b.g_site).ok);
        CHECK(is_cocontinuous(b.extension.rho, b.pg_site, b.c_site).ok);
    }
}

TEST_CASE("one-object site") {
    const Site s = one_object_site(s3());
    CHECK(s.cat->num_morphisms() == 6);
    CHECK(check_topology_axioms(s).ok);
    // every G-set is a sheaf for the atomic topology on G
    for (const GSet& m : gset_classes(s3(), 4)) CHECK(is_sheaf(gset_presheaf(m, s.cat), s).ok);
    const GSet m = GSet::regular(s3());
    CHECK(gsets_isomorphic(presheaf_gset(s3(), gset_presheaf(m, s.cat)), m));
}

TEST_CASE("fixed-point sheaves have the fixed points as values") {
    for (auto g : {z(2), s3()}) {
        const auto b = orbit_bundle(g);
        for (const GSet& m : gset_classes(g, g->order())) {
            const Presheaf f = fixed_point_sheaf(m, b.extension);
            for (Obj x = 0; x < f.sizes().size(); ++x)
                CHECK(f.size(x) == fixed_points(m, b.extension.kernels[x]).size());
            CHECK(is_sheaf(f, b.c_site).ok);
            CHECK(gsets_isomorphic(evaluate_at_x0(f, b.extension, b.x0), m));
            const Presheaf pushed = upsilon_push(m, b);
            CHECK(find_presheaf_isomorphism(pushed, f));
            CHECK(gsets_isomorphic(upsilon_pull(pushed, b), m));
        }
    }
}

TEST_CASE("evaluation at x0 needs a trivial kernel") {
    const auto b = orbit_bundle(z(2));
    const Presheaf f = fixed_point_sheaf(GSet::regular(z(2)), b.extension);
    CHECK_THROWS_AS(evaluate_at_x0(f, b.extension, 1), InputError);
}

TEST_CASE("G-set classes match the orbit-type count") {
    for (auto g : {z(2), z(3), z(4), s3()})
        for (std::size_t bound : {0u, 1u, 3u, 6u}) {
            const auto classes = gset_classes(g, bound);
            CHECK(classes.size() == oracle::gset_class_count(g, bound));
            for (std::size_t i = 0; i < classes.size(); ++i)
                for (std::size_t j = i + 1; j < classes.size() && classes[j].size() == classes[i].size(); ++j)
                    CHECK_FALSE(gsets_isomorphic(classes[i], classes[j]));
        }
    CHECK(gset_classes(z(2), 4).size() == 9);
    CHECK(gset_classes(z(2), 2).size() == 4);
}

TEST_CASE("Artin verification on small groups") {
    for (auto g : {z(2), z(3)})
        for (auto q : {QuotientChoice::Orbit, QuotientChoice::Transporter}) {
            const auto b = make_bundle(g, PosetChoice::AllSubgroups, 0, q);
            ArtinOptions o;
            o.corpus = 10;
            const auto r = verify_artin(b, o);
            CHECK(r["ok"] == true);
            CHECK(r["gsets"]["classes"] == oracle::gset_class_count(g, g->order()));
        }
}

TEST_CASE("families without a least member give no initial object") {
    const auto g = s3();
    std::vector<Subgroup> family;
    for (const Subgroup& h : enumerate_subgroups(g))
        if (h.size() == 2) family.push_back(h);
    const auto b = make_family_bundle(g, family, "involutions", QuotientChoice::Orbit);
    CHECK_FALSE(b.pg_site.initial_object);
    CHECK_THROWS_AS(verify_artin(b), InputError);
    CHECK_THROWS_AS(verify_module_equivalence(b, FiniteRing(2)), InputError);
}

TEST_CASE("corpus presheaves are seeded") {
    const auto b = orbit_bundle(s3());
    std::mt19937_64 r1(3), r2(3);
    for (int i = 0; i < 5; ++i) CHECK(corpus_presheaf(b, r1) == corpus_presheaf(b, r2));
}
