#include <filesystem>

#include "common.hpp"
#include "finsheaf/io.hpp"

using namespace finsheaf;
using namespace testing;
using nlohmann::json;

namespace {
const std::filesystem::path kData = FINSHEAF_TEST_DATA;
}

TEST_CASE("builtin group names") {
    CHECK(builtin_group("z4")->order() == 4);
    CHECK(builtin_group("cyclic:5")->order() == 5);
    CHECK(builtin_group("S3")->order() == 6);
    CHECK(builtin_group("dihedral:4")->order() == 8);
    CHECK(builtin_group("v4")->order() == 4);
    CHECK(builtin_group("trivial")->order() == 1);
    CHECK_FALSE(builtin_group("z2.json"));
    CHECK_FALSE(builtin_group("q8"));
    CHECK(resolve_group("z2.json", kData)->order() == 2);
    CHECK(resolve_group("s3_perm.json", kData)->order() == 6);
    CHECK_THROWS_AS(resolve_group("missing.json", kData), InputError);
}

TEST_CASE("group, G-set and subgroup roundtrips") {
    for (auto g : {z(3), s3(), d4()}) {
        const json j = group_to_json(*g);
        CHECK(j["schema"] == schema::group);
        CHECK(group_from_json(j) == *g);
        const GSet m = coset_gset(enumerate_subgroups(g)[1]);
        CHECK(gset_from_json(g, gset_to_json(m)).table() == m.table());
        const auto subs = enumerate_subgroups(g);
        CHECK(subgroups_from_json(g, subgroups_to_json(subs)) == subs);
    }
    CHECK_THROWS_AS(group_from_json(load_json(kData / "nonassoc.json")), AxiomError);
}

TEST_CASE("schema mismatch is an input error") {
    json j = group_to_json(*z(2));
    j["schema"] = schema::category;
    CHECK_THROWS_AS(group_from_json(j), InputError);
    j.erase("schema");
    CHECK_NOTHROW(group_from_json(j));
    CHECK_THROWS_AS(check_schema(json{{"schema", "finsheaf/group@2"}}, schema::group), InputError);
}

TEST_CASE("category and presheaf roundtrips") {
    const auto b = orbit_bundle(s3());
    const FinCat& c = *b.c_site.cat;
    const FinCat back = category_from_json(category_to_json(c));
    CHECK(back.same_structure(c));
    CHECK(back.morphism_labels() == c.morphism_labels());
    const Presheaf f = fixed_point_sheaf(GSet::regular(s3()), b.extension);
    CHECK(presheaf_from_json(b.c_site.cat, presheaf_to_json(f)) == f);
    json bad = presheaf_to_json(f);
    bad["sizes"][0] = 1;
    CHECK_THROWS_AS(presheaf_from_json(b.c_site.cat, bad), InputError);
}

TEST_CASE("sites from files") {
    const Site s = site_from_json(load_json(kData / "trivial_site.json"), kData);
    CHECK(s.topology.kind() == TopologyKind::Trivial);
    CHECK(s.cat->num_objects() == 3);
    CHECK_FALSE(s.initial_object);
    const auto b = orbit_bundle(z(2));
    const Site back = site_from_json(site_to_json(b.c_site));
    CHECK(back.cat->same_structure(*b.c_site.cat));
    CHECK(back.initial_object == b.c_site.initial_object);
    CHECK(back.topology.kind() == TopologyKind::Atomic);
}

TEST_CASE("bundle descriptors") {
    const BundleDescriptor d = descriptor_from_json(load_json(kData / "z2_orbit.json"));
    const auto b = build_bundle(d, kData);
    CHECK(b.c_site.cat->num_objects() == 2);
    BundleDescriptor p;
    p.group = "s3";
    p.poset = "p-subgroups:3";
    CHECK(build_bundle(p).c_site.cat->num_objects() == 2);
    p.poset = json{{"p-subgroups", 2}};
    p.quotient = "transporter";
    CHECK(build_bundle(p).c_site.cat->num_objects() == 4);
    p.poset = "s3_nontrivial.json";
    CHECK_FALSE(build_bundle(p, kData).pg_site.initial_object);
    p.quotient = "other";
    CHECK_THROWS_AS(build_bundle(p, kData), InputError);
    CHECK(descriptor_from_json(descriptor_to_json(d)).quotient == d.quotient);
}

TEST_CASE("module roundtrip") {
    const auto g = z(2);
    const RGModule m = module_from_json(g, load_json(kData / "z2_sign_f3.json"));
    CHECK(m.ring() == FiniteRing(3));
    CHECK(m.action(1) == Matrix::from_rows({{2}}, 1));
    const RGModule reg = RGModule::regular(s3(), FiniteRing(4));
    const RGModule back = module_from_json(s3(), module_to_json(reg));
    CHECK(back.actions() == reg.actions());
    CHECK(ring_from_json("F5") == FiniteRing(5));
    CHECK(ring_from_json(ring_to_json(FiniteRing(6))) == FiniteRing(6));
}

TEST_CASE("DOT export omits identities and quotes labels") {
    const auto b = orbit_bundle(z(2));
    const std::string dot = to_dot(*b.c_site.cat, "C");
    CHECK(dot.rfind("digraph \"C\" {", 0) == 0);
    CHECK(dot.find("[label=\"[(1 2)]:0->0\"]") != std::string::npos);
    CHECK(dot.find("1 -> 1") == std::string::npos);
    CHECK(std::count(dot.begin(), dot.end(), '\n') == 1 + 2 + 2 + 1);
}
