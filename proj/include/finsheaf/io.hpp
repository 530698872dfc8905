#pragma once

// JSON schemas and DOT export. Every document carries a "schema" field of the
// form "finsheaf/<kind>@<version>"; readers accept documents without one.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "finsheaf/grpsites.hpp"
#include "finsheaf/linmod.hpp"

namespace finsheaf {

namespace schema {
inline constexpr const char* group = "finsheaf/group@1";
inline constexpr const char* gset = "finsheaf/gset@1";
inline constexpr const char* subgroups = "finsheaf/subgroups@1";
inline constexpr const char* category = "finsheaf/category@1";
inline constexpr const char* presheaf = "finsheaf/presheaf@1";
inline constexpr const char* site = "finsheaf/site@1";
inline constexpr const char* bundle = "finsheaf/bundle@1";
inline constexpr const char* module = "finsheaf/module@1";
inline constexpr const char* report = "finsheaf/report@1";
}  // namespace schema

/// Throws InputError if j declares a schema other than `expected`.
void check_schema(const nlohmann::json& j, const std::string& expected);

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

/// trivial, z<n>, cyclic:<n>, s<n>, symmetric:<n>, d<n>, dihedral:<n>, v4.
std::optional<FiniteGroup> builtin_group(const std::string& name);
/// A builtin name, a path to a group file, or an inline document.
GroupPtr resolve_group(const nlohmann::json& ref, const std::filesystem::path& base_dir = {});

nlohmann::json group_to_json(const FiniteGroup& g);
FiniteGroup group_from_json(const nlohmann::json& j);

nlohmann::json gset_to_json(const GSet& m);
GSet gset_from_json(const GroupPtr& g, const nlohmann::json& j);

nlohmann::json subgroups_to_json(const std::vector<Subgroup>& family);
std::vector<Subgroup> subgroups_from_json(const GroupPtr& g, const nlohmann::json& j);

/// Composition as a sparse list of [f, g, f∘g] over composable non-identity pairs.
nlohmann::json category_to_json(const FinCat& c);
FinCat category_from_json(const nlohmann::json& j, Exec exec = Exec::Serial);

nlohmann::json presheaf_to_json(const Presheaf& f);
Presheaf presheaf_from_json(const CatPtr& cat, const nlohmann::json& j);

nlohmann::json nat_to_json(const NatTrans& eta);

/// {"category": inline or path, "topology": "trivial" | "atomic" | {"explicit": [[sieve...]...]},
///  "initial_object": optional}
nlohmann::json site_to_json(const Site& s);
Site site_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}, Exec exec = Exec::Serial);

/// {"group": ref, "poset": "all-subgroups" | {"p-subgroups": p} | path, "quotient": "transporter" | "orbit"}
struct BundleDescriptor {
    nlohmann::json group;
    nlohmann::json poset = "all-subgroups";
    std::string quotient = "orbit";
};

BundleDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json descriptor_to_json(const BundleDescriptor& d);
GroupSiteBundle build_bundle(const BundleDescriptor& d, const std::filesystem::path& base_dir = {},
                             Exec exec = Exec::Serial);

/// {"ring": {"p": 3} | {"mod": 4}, "rank": d, "action": {label: matrix}}
nlohmann::json module_to_json(const RGModule& m);
RGModule module_from_json(const GroupPtr& g, const nlohmann::json& j);
nlohmann::json ring_to_json(const FiniteRing& r);
FiniteRing ring_from_json(const nlohmann::json& j);

/// The underlying graph of a category, identities omitted.
std::string to_dot(const FinCat& c, const std::string& name = "C");

}  // namespace finsheaf
