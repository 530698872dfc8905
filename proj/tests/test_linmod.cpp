#include <random>
#include <set>

#include "common.hpp"
#include "oracles.hpp"

using namespace finsheaf;
using namespace testing;

namespace {

Matrix random_matrix(const FiniteRing& r, std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    Matrix m(rows, cols);
    std::uniform_int_distribution<Scalar> d(0, r.modulus() - 1);
    for (auto& x : m.a) x = d(rng);
    return m;
}

bool is_zero(const Row& v) {
    return std::all_of(v.begin(), v.end(), [](Scalar s) { return s == 0; });
}

const std::vector<Scalar> kModuli{2, 3, 4, 6, 8, 9};

// R at x0, R^2 at G\G, on the Z2 orbit site: fails the sheaf condition at G\G.
ModulePresheaf rank_mismatch(const GroupSiteBundle& b, const FiniteRing& r) {
    const CatPtr& c = b.c_site.cat;
    std::vector<Matrix> maps;
    for (Mor u = 0; u < c->num_morphisms(); ++u) {
        if (c->dom(u) == c->cod(u)) maps.push_back(Matrix::identity(c->dom(u) == 0 ? 1 : 2));
        else maps.push_back(Matrix::from_rows({{1}, {0}}, 1));
    }
    return ModulePresheaf(c, r, {Submodule::whole(r, 1), Submodule::whole(r, 2)}, maps);
}

}  // namespace

TEST_CASE("ring arithmetic") {
    const FiniteRing z4(4), f5 = FiniteRing::prime_field(5);
    CHECK_FALSE(z4.is_field());
    CHECK(f5.is_field());
    CHECK(z4.name() == "Z/4");
    CHECK(f5.name() == "F5");
    CHECK(z4.add(3, 3) == 2);
    CHECK(z4.sub(1, 3) == 2);
    CHECK(z4.neg(1) == 3);
    CHECK(z4.mul(2, 2) == 0);
    CHECK_FALSE(z4.inverse(2));
    CHECK(z4.inverse(3) == 3u);
    for (Scalar a = 1; a < 5; ++a) CHECK(f5.mul(a, *f5.inverse(a)) == 1);
    CHECK_THROWS_AS(FiniteRing(1), InputError);
    CHECK_THROWS_AS(FiniteRing::prime_field(4), InputError);
    CHECK(parse_ring("F3") == FiniteRing(3));
    CHECK(parse_ring("z/4") == FiniteRing(4));
    CHECK(parse_ring("Z4") == FiniteRing(4));
    CHECK_THROWS_AS(parse_ring("F4"), InputError);
    CHECK_THROWS_AS(parse_ring("Q"), InputError);
}

TEST_CASE("diagonalization: U A V = D with invertible U and V") {
    std::mt19937_64 rng(1);
    for (Scalar n : kModuli) {
        const FiniteRing r(n);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 5;
            const Matrix a = random_matrix(r, rows, cols, rng);
            const Diagonalization d = diagonalize(r, a);
            CHECK(multiply(r, d.u, d.u_inv) == Matrix::identity(rows));
            CHECK(multiply(r, d.v, d.v_inv) == Matrix::identity(cols));
            const Matrix m = multiply(r, multiply(r, d.u, a), d.v);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) CHECK(m(i, j) == (i == j ? d.diagonal[i] : 0));
        }
    }
}

TEST_CASE("left kernels match brute force") {
    std::mt19937_64 rng(2);
    for (Scalar n : kModuli) {
        const FiniteRing r(n);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t rows = 1 + rng() % 3, cols = 1 + rng() % 3;
            const Matrix a = random_matrix(r, rows, cols, rng);
            const auto gens = left_kernel(r, a);
            for (const Row& v : gens) CHECK(is_zero(apply(r, v, a)));
            CHECK(oracle::span(r, rows, gens).size() == oracle::left_kernel_size(r, a));
            if (r.is_field()) {
                const auto basis = field_left_kernel(r, a);
                CHECK(basis.size() + field_rank(r, a) == rows);
                CHECK(oracle::span(r, rows, basis).size() == oracle::left_kernel_size(r, a));
            }
        }
    }
    CHECK_THROWS_AS(field_left_kernel(FiniteRing(4), Matrix::identity(2)), InputError);
}

TEST_CASE("submodule normal form") {
    std::mt19937_64 rng(3);
    for (Scalar n : kModuli) {
        const FiniteRing r(n);
        for (int trial = 0; trial < 15; ++trial) {
            const std::size_t d = 1 + rng() % 3, k = rng() % 4;
            std::vector<Row> gens;
            for (std::size_t i = 0; i < k; ++i) gens.push_back(random_matrix(r, 1, d, rng).row(0));
            const Submodule s = Submodule::span(r, d, gens);
            const auto expected = oracle::span(r, d, gens);
            REQUIRE(s.size() == expected.size());
            std::set<Row> listed;
            for (std::uint64_t i = 0; i < s.size(); ++i) {
                const Row v = s.element(i);
                CHECK(s.index_of(v) == i);
                listed.insert(v);
            }
            CHECK(listed == expected);
            for (const Row& v : oracle::all_vectors(r, d)) CHECK(s.contains(v) == expected.count(v) > 0);
            for (const Row& g : gens) CHECK(s.contains(g));
            CHECK(s.is_subset_of(Submodule::whole(r, d)));
            CHECK(Submodule::zero(r, d).is_subset_of(s));
        }
    }
    const FiniteRing z4(4);
    const Submodule twos = Submodule::span(z4, 2, {{2, 0}});
    CHECK(twos.size() == 2);
    CHECK_FALSE(twos.is_free());
    CHECK(Submodule::whole(z4, 3).is_free());
    CHECK_THROWS_AS(twos.coordinates({1, 0}), InputError);
}

TEST_CASE("module validation") {
    const auto g = z(2);
    const FiniteRing f3(3);
    CHECK_THROWS_AS(RGModule(g, f3, 1, {Matrix::identity(1)}), InputError);
    CHECK_THROWS_AS(RGModule(g, f3, 1, {Matrix::from_rows({{2}}, 1), Matrix::identity(1)}), AxiomError);
    // -1 is an involution, so it defines a Z2 action but not a Z3 action
    CHECK_NOTHROW(RGModule(g, f3, 1, {Matrix::identity(1), Matrix::from_rows({{2}}, 1)}));
    const auto g3 = z(3);
    CHECK_THROWS_AS(
        RGModule(g3, f3, 1, {Matrix::identity(1), Matrix::from_rows({{2}}, 1), Matrix::from_rows({{2}}, 1)}),
        AxiomError);
    CHECK_THROWS_AS(RGModule::sign(Subgroup::trivial(s3()), f3), InputError);
}

TEST_CASE("fixed submodules match brute force") {
    std::mt19937_64 rng(4);
    for (auto g : {z(2), z(3), s3()})
        for (Scalar n : {2u, 3u, 4u}) {
            const FiniteRing r(n);
            std::vector<RGModule> ms{RGModule::trivial(g, r, 2), RGModule::regular(g, r)};
            if (g->order() <= 3) ms.push_back(RGModule::random_conjugate(RGModule::regular(g, r), rng));
            for (const Subgroup& h : enumerate_subgroups(g))
                if (h.size() == 2 && g->order() == 6) ms.push_back(RGModule::permutation(coset_gset(h), r));
            for (const RGModule& m : ms)
                for (const Subgroup& h : enumerate_subgroups(g)) {
                    if (m.rank() > 6 && n > 2) continue;
                    const Submodule fix = fixed_submodule(m, h);
                    CHECK(fix.size() == oracle::fixed_vector_count(m, h));
                    for (const Row& v : fix.generators())
                        for (Elem x : h.elements()) CHECK(apply(r, v, m.action(x)) == v);
                    if (r.is_field()) CHECK(fixed_submodule_field(m, h) == fix);
                }
        }
    CHECK_THROWS_AS(fixed_submodule_field(RGModule::trivial(z(2), FiniteRing(4)), Subgroup::trivial(z(2))), InputError);
}

TEST_CASE("permutation modules: fixed points are free on the H-orbits") {
    for (auto g : {z(4), s3()})
        for (Scalar n : {2u, 3u, 4u}) {
            const FiniteRing r(n);
            const auto subs = enumerate_subgroups(g);
            for (const Subgroup& k : subs) {
                const GSet points = coset_gset(k);
                const RGModule m = RGModule::permutation(points, r);
                for (const Subgroup& h : subs) {
                    const Submodule fix = fixed_submodule(m, h);
                    CHECK(fix.is_free());
                    CHECK(fix.generators().size() == oracle::orbit_count(points, h));
                }
            }
            // the regular module has M^H of rank [G:H]
            for (const Subgroup& h : subs)
                CHECK(fixed_submodule(RGModule::regular(g, r), h).generators().size() == g->order() / h.size());
        }
}

TEST_CASE("rank of fixed points is not the number of fixed points") {
    // K = 1, H = G: R[G]^G is free of rank 1 while G acts on itself without fixed points
    const auto g = s3();
    const RGModule m = RGModule::regular(g, FiniteRing(2));
    const Subgroup whole = enumerate_subgroups(g).back();
    CHECK(fixed_submodule(m, whole).generators().size() == 1);
    CHECK(fixed_points(GSet::regular(g), whole).empty());
}

TEST_CASE("sign and Z2 modules over F3") {
    const auto g = z(2);
    const FiniteRing f3(3);
    const RGModule sign = RGModule::sign(Subgroup::trivial(g), f3);
    CHECK(sign.action(1) == Matrix::from_rows({{2}}, 1));
    CHECK(fixed_submodule(sign, enumerate_subgroups(g).back()).size() == 1);
    const auto b = orbit_bundle(g);
    const ModulePresheaf f = module_fixed_point_sheaf(sign, b.extension);
    CHECK(f.value(0).size() == 3);
    CHECK(f.value(1).size() == 1);
    CHECK(is_module_sheaf(f, b.c_site).ok);
    const RGModule back = module_at_x0(f, b.extension, b.x0);
    CHECK(back.actions() == sign.actions());
}

TEST_CASE("module presheaf validation") {
    const auto b = orbit_bundle(z(2));
    const FiniteRing f2(2);
    const CatPtr& c = b.c_site.cat;
    std::vector<Matrix> maps(c->num_morphisms(), Matrix::identity(1));
    // F(x0) = 0 but F(G\G) = F2, so the restriction x0 -> G\G leaves F(x0)
    CHECK_THROWS_AS(ModulePresheaf(c, f2, {Submodule::zero(f2, 1), Submodule::whole(f2, 1)}, maps), AxiomError);
    maps[0] = Matrix::identity(2);
    CHECK_THROWS_AS(ModulePresheaf(c, f2, {Submodule::whole(f2, 1), Submodule::whole(f2, 1)}, maps), InputError);
}

TEST_CASE("module sheaf checks") {
    for (Scalar n : {2u, 3u, 4u}) {
        const FiniteRing r(n);
        const auto b = orbit_bundle(z(2));
        const ModuleSheafReport bad = is_module_sheaf(rank_mismatch(b, r), b.c_site);
        CHECK_FALSE(bad.ok);
        CHECK(bad.mode == "set+linear");
        CHECK(bad.witness["object"] == 1);
        // above the cap only the linear criterion runs
        const ModuleSheafReport lin = is_module_sheaf(rank_mismatch(b, r), b.c_site, 1);
        CHECK_FALSE(lin.ok);
        CHECK(lin.mode == "linear");

        for (auto g : {z(2), s3()}) {
            const auto bg = orbit_bundle(g);
            CHECK(is_module_sheaf(zero_module_presheaf(bg.c_site.cat, r), bg.c_site).ok);
            CHECK(is_module_sheaf(structure_sheaf(bg.c_site.cat, r), bg.c_site).ok);
            const ModulePresheaf reg = module_fixed_point_sheaf(RGModule::regular(g, r), bg.extension);
            const ModuleSheafReport rep = is_module_sheaf(reg, bg.c_site, 100);
            CHECK(rep.ok);
            CHECK(rep.mode == (reg.total_size() <= 100 ? "set+linear" : "linear"));
        }
    }
    // no initial object and nothing materializable
    const auto b = orbit_bundle(z(2));
    const Site no_initial{b.c_site.cat, Topology::atomic(), std::nullopt};
    CHECK_THROWS_AS(is_module_sheaf(rank_mismatch(b, FiniteRing(2)), no_initial, 1), BudgetExceeded);
    CHECK_THROWS_AS(rank_mismatch(b, FiniteRing(2)).materialize(3), BudgetExceeded);
}

TEST_CASE("materialized module presheaves are presheaves of sets") {
    const auto b = orbit_bundle(s3());
    const FiniteRing r(3);
    const ModulePresheaf f = module_fixed_point_sheaf(RGModule::permutation(coset_gset(b.subgroups[1]), r), b.extension);
    const Presheaf p = f.materialize();
    for (Obj x = 0; x < p.sizes().size(); ++x) CHECK(p.size(x) == f.value(x).size());
    CHECK(is_sheaf(p, b.c_site).ok);
}

TEST_CASE("module at x0 inverts the fixed-point construction") {
    std::mt19937_64 rng(9);
    for (auto g : {z(3), s3()})
        for (Scalar n : {2u, 4u}) {
            const FiniteRing r(n);
            const auto b = orbit_bundle(g);
            for (const RGModule& m : {RGModule::regular(g, r), RGModule::random_conjugate(RGModule::regular(g, r), rng)}) {
                const RGModule back = module_at_x0(module_fixed_point_sheaf(m, b.extension), b.extension, b.x0);
                CHECK(back.actions() == m.actions());
            }
            const ModulePresheaf f = module_fixed_point_sheaf(RGModule::regular(g, r), b.extension);
            CHECK_THROWS_AS(module_at_x0(f, b.extension, static_cast<Obj>(b.subgroups.size() - 1)), InputError);
        }
}

TEST_CASE("coherent report lists finitely many generators per object") {
    const auto b = orbit_bundle(s3());
    const FiniteRing z4(4);
    const ModulePresheaf f = module_fixed_point_sheaf(RGModule::regular(b.group, z4), b.extension);
    const auto entries = coherent_check(f);
    REQUIRE(entries.size() == b.subgroups.size());
    for (const auto& e : entries) {
        CHECK(e.generators == 6 / b.subgroups[e.object].size());
        CHECK(std::all_of(e.orders.begin(), e.orders.end(), [](Scalar o) { return o == 4; }));
    }
    const auto j = coherent_report(f);
    CHECK(j["ring"] == "Z/4");
    CHECK(j["finitely_generated"] == true);
}

TEST_CASE("module equivalence verification") {
    for (auto g : {z(2), s3()})
        for (Scalar n : {2u, 3u, 4u}) {
            const auto b = orbit_bundle(g);
            ModuleOptions o;
            o.random_modules = 2;
            const auto rep = verify_module_equivalence(b, FiniteRing(n), o);
            CHECK(rep["ok"] == true);
        }
    const auto t = transporter_bundle(z(3));
    CHECK(verify_module_equivalence(t, FiniteRing(3))["ok"] == true);
}
