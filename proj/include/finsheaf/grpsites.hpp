#pragma once

// Sites built from a finite group: the one-object category, transporter
// categories P⋊G over G-posets, their quotients, and the functors between them.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsheaf/fincat.hpp"
#include "finsheaf/group.hpp"
#include "finsheaf/kan.hpp"
#include "finsheaf/sites.hpp"

namespace finsheaf {

/// P⋊G. Hom(x, y) = {g : g·x <= y} with g·x = x.g^-1; a morphism is decoded as
/// (cod, g), the order witness being determined by the endpoints.
struct TransporterCat {
    CatPtr cat;
    GPoset poset;
    std::vector<Elem> element;  ///< morphism -> g
    std::vector<Mor> codes;     ///< (x, y, g) -> morphism, or kNone
    static constexpr Mor kNone = static_cast<Mor>(-1);

    const GroupPtr& group() const { return poset.group(); }
    /// The morphism (x -> y, g); throws InputError if g·x is not below y.
    Mor encode(Obj x, Obj y, Elem g) const;
};

TransporterCat transporter_category(const GPoset& p, Exec exec = Exec::Serial);

/// {g : g H g^-1 ⊆ K}.
std::vector<Elem> hom_transporter(const Subgroup& h, const Subgroup& k);

/// G as a one-object category; morphism index = element index.
CatPtr group_category(const GroupPtr& g);

/// The one-object site with its atomic (= trivial) topology.
Site one_object_site(const GroupPtr& g);

/// P⋊G with the atomic topology. Throws InputError unless P has an initial object.
Site transporter_site(const TransporterCat& t);

/// 𝒦 -> P⋊G -> 𝒞: 𝒞 has the same objects, Hom_𝒞(x, y) = 𝒦(y)\Hom(x, y).
struct CatExtension {
    TransporterCat source;
    CatPtr target;
    std::vector<Subgroup> kernels;  ///< 𝒦(x), a subgroup of the stabilizer of x
    CFunctor rho;
    std::vector<Elem> representative;  ///< morphism of 𝒞 -> least g in its coset
};

/// Throws InputError if a kernel is not inside Aut(x), AxiomError with a
/// composable-pair witness if the coset relation is not a congruence.
CatExtension orbit_quotient(const TransporterCat& t, std::vector<Subgroup> kernels,
                            std::vector<std::string> object_labels = {});

/// Kernels all trivial: 𝒞 = P⋊G and ρ the identity.
CatExtension trivial_extension(const TransporterCat& t);

CFunctor pi_functor(const TransporterCat& t, const CatPtr& group_cat);

struct ContinuityReport {
    bool cover_preserving = true;
    bool flat = true;
    bool continuous() const { return cover_preserving && flat; }
    std::string mode = "exhaustive";
    nlohmann::json witness;
    nlohmann::json to_json() const;
};

ContinuityReport is_continuous(const CFunctor& alpha, const Site& source, const Site& target,
                               std::uint64_t node_budget = 1'000'000);

struct CocontinuityReport {
    bool ok = true;
    std::string mode = "exhaustive";
    nlohmann::json witness;
    nlohmann::json to_json() const;
};

CocontinuityReport is_cocontinuous(const CFunctor& beta, const Site& source, const Site& target,
                                   std::uint64_t node_budget = 1'000'000);

/// A right G-set as a presheaf on the one-object category and back.
Presheaf gset_presheaf(const GSet& m, const CatPtr& group_cat);
GSet presheaf_gset(const GroupPtr& g, const Presheaf& f);

/// x -> M^{𝒦(x)}, restriction along ρ(g) being m -> m.g. Elements of each value
/// are the fixed points in ascending order.
Presheaf fixed_point_sheaf(const GSet& m, const CatExtension& e);

/// F(x0) with m.g = F(ρ(1_{x0} g))(m). Throws InputError if 𝒦(x0) is nontrivial.
GSet evaluate_at_x0(const Presheaf& f, const CatExtension& e, Obj x0);

enum class PosetChoice { AllSubgroups, PSubgroups };
enum class QuotientChoice { Transporter, Orbit };

/// The sites G, P⋊G and 𝒞 with atomic topologies and the functors π, ρ.
struct GroupSiteBundle {
    GroupPtr group;
    std::string poset_name;
    std::string quotient_name;
    std::vector<Subgroup> subgroups;  ///< objects of P, when P is a family of subgroups
    CatPtr group_cat;
    CatExtension extension;
    CFunctor pi;
    Site g_site;
    Site pg_site;
    Site c_site;
    Obj x0 = 0;  ///< meaningful only when pg_site.initial_object is set

    const TransporterCat& transporter() const { return extension.source; }
};

GroupSiteBundle make_bundle(const GroupPtr& g, PosetChoice poset, std::size_t p, QuotientChoice quotient,
                            Exec exec = Exec::Serial);

/// Bundle over an arbitrary conjugation-closed family of subgroups. When the
/// family has no least member the sites carry no initial object and the
/// verifiers that need x0 refuse the bundle.
GroupSiteBundle make_family_bundle(const GroupPtr& g, std::vector<Subgroup> family, std::string poset_name,
                                   QuotientChoice quotient, Exec exec = Exec::Serial);

/// Υ_* = RK_ρ ∘ Res_π.
Presheaf upsilon_push(const GSet& m, const GroupSiteBundle& b, std::uint64_t node_budget = 1'000'000);
/// Υ^{-1} = LK_π ∘ sheafify ∘ Res_ρ.
GSet upsilon_pull(const Presheaf& f, const GroupSiteBundle& b, const SheafOptions& options = {});

/// One representative of each isomorphism class of G-sets with at most
/// `bound` points, ordered by size and then by orbit types.
std::vector<GSet> gset_classes(const GroupPtr& g, std::size_t bound);

/// Random presheaves on 𝒞 for the verification corpora: quotients of
/// representables, fixed-point sheaves, and sheaves with junk added.
Presheaf corpus_presheaf(const GroupSiteBundle& b, std::mt19937_64& rng);

struct ArtinOptions {
    std::size_t size_bound = 0;  ///< 0 means |G|
    std::size_t corpus = 50;
    std::uint64_t seed = 20240601;
    SheafOptions sheaf;
};

/// Set-level equivalence checks; the report carries "ok" plus per-clause data.
nlohmann::json verify_artin(const GroupSiteBundle& b, const ArtinOptions& options = {});

}  // namespace finsheaf
