#pragma once

// Sieves, Grothendieck topologies, the sheaf condition and the plus construction.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <json.hpp>

#include "finsheaf/error.hpp"
#include "finsheaf/fincat.hpp"

namespace finsheaf {

/// A sieve on x, stored as a bitset over cat.into(x).
class Sieve {
public:
    using Bits = boost::dynamic_bitset<>;

    /// Throws AxiomError unless the set is closed under precomposition.
    Sieve(CatPtr cat, Obj base, Bits bits);

    static Sieve empty(const CatPtr& cat, Obj x);
    static Sieve maximal(const CatPtr& cat, Obj x);

    const CatPtr& category() const noexcept { return cat_; }
    Obj base() const noexcept { return base_; }
    const Bits& bits() const noexcept { return bits_; }
    bool contains(Mor f) const;
    std::size_t size() const { return bits_.count(); }
    bool is_empty() const { return bits_.none(); }
    bool is_maximal() const;
    /// Members in ascending morphism order.
    std::vector<Mor> morphisms() const;
    std::size_t count_from(Obj y) const;
    bool is_subset_of(const Sieve& other) const { return bits_.is_subset_of(other.bits_); }
    Sieve intersect(const Sieve& other) const;
    nlohmann::json to_json() const;

    friend bool operator==(const Sieve& a, const Sieve& b) { return a.base_ == b.base_ && a.bits_ == b.bits_; }
    /// Canonical order: by size, then by member list.
    friend bool operator<(const Sieve& a, const Sieve& b);

private:
    struct Unchecked {};
    Sieve(CatPtr cat, Obj base, Bits bits, Unchecked);
    friend Sieve generate_sieve(const CatPtr&, Obj, std::span<const Mor>);
    friend Sieve pullback_sieve(Mor, const Sieve&);

    CatPtr cat_;
    Obj base_ = 0;
    Bits bits_;
};

bool is_sieve(const FinCat& cat, Obj x, const Sieve::Bits& bits);

/// Smallest sieve on x containing the generators. Throws InputError if a
/// generator does not have codomain x.
Sieve generate_sieve(const CatPtr& cat, Obj x, std::span<const Mor> generators);
inline Sieve principal_sieve(const CatPtr& cat, Mor f) { return generate_sieve(cat, cat->cod(f), std::span(&f, 1)); }

/// u*(S) = {v : u∘v in S}.
Sieve pullback_sieve(Mor u, const Sieve& s);

/// All sieves on x in canonical order, found by branching over the
/// factorization preorder on morphisms into x. Throws BudgetExceeded.
std::vector<Sieve> enumerate_sieves(const CatPtr& cat, Obj x, std::uint64_t node_budget = 1'000'000);

/// S as a subpresheaf of Hom(-, x): element i at y is the i-th member of S
/// with domain y.
Presheaf sieve_presheaf(const Sieve& s);

enum class TopologyKind { Trivial, Atomic, Explicit };

class Topology {
public:
    static Topology trivial() { return Topology(TopologyKind::Trivial, {}); }
    static Topology atomic() { return Topology(TopologyKind::Atomic, {}); }
    /// covering[x] lists the covering sieves on x.
    static Topology explicit_family(std::vector<std::vector<Sieve>> covering) {
        return Topology(TopologyKind::Explicit, std::move(covering));
    }

    TopologyKind kind() const noexcept { return kind_; }
    const std::vector<std::vector<Sieve>>& explicit_covers() const noexcept { return covers_; }
    bool covers(const Sieve& s) const;
    std::string name() const;

private:
    Topology(TopologyKind kind, std::vector<std::vector<Sieve>> covers) : kind_(kind), covers_(std::move(covers)) {}
    TopologyKind kind_;
    std::vector<std::vector<Sieve>> covers_;
};

/// A category with a topology. `initial_object` is set for sites built from a
/// G-poset with initial object x0 (or a quotient of one); it enables the
/// closed-form minimal sieves and the fast sheaf criterion.
struct Site {
    CatPtr cat;
    Topology topology;
    std::optional<Obj> initial_object;
};

/// Covering sieves on x. Atomic topologies enumerate all nonempty sieves.
std::vector<Sieve> covering_sieves(const Site& site, Obj x, std::uint64_t node_budget = 1'000'000);

struct OreResult {
    bool holds = true;
    std::optional<std::pair<Mor, Mor>> cospan;  ///< f: y -> x, g: z -> x with no commuting square
};

OreResult ore_condition(const FinCat& cat, Exec exec = Exec::Serial);

struct AxiomReport {
    bool ok = true;
    /// "exhaustive" when every sieve was materialized, "principal" when the
    /// atomic check fell back to principal sieves (exact by monotonicity).
    std::string mode = "exhaustive";
    std::optional<std::string> failed_axiom;
    nlohmann::json witness;
    nlohmann::json to_json() const;
};

AxiomReport check_topology_axioms(const Site& site, std::uint64_t node_budget = 1'000'000,
                                  Exec exec = Exec::Serial);

/// Hom(x0, x) at x0 and empty elsewhere. Throws Error("minimal sieve not
/// guaranteed") when the site has no initial object, AxiomError if the
/// closed form fails to be a sieve below every principal sieve on x.
Sieve minimal_sieve(const Site& site, Obj x);

enum class SheafStrategy { Auto, Fast, Definitional };

struct SheafReport {
    bool ok = true;
    std::string strategy;
    nlohmann::json witness;  ///< {object, sieve, value_size, nat_count, reason}
    nlohmann::json to_json() const;
};

struct SheafOptions {
    SheafStrategy strategy = SheafStrategy::Auto;
    std::uint64_t sieve_budget = 1'000'000;
    std::uint64_t nat_budget = 1'000'000;
    Exec exec = Exec::Serial;
};

/// Checks that F(x) -> Nat(S, F) is bijective for the relevant covering sieves.
SheafReport is_sheaf(const Presheaf& f, const Site& site, const SheafOptions& options = {});

struct PlusResult {
    Presheaf value;
    NatTrans unit;  ///< F -> F+
};

/// F+(x) = colim over covering S of Nat(S, F). Uses Nat(S_min, F) on sites
/// with an initial object and atomic topology, otherwise the directed colimit.
PlusResult plus_construction(const Presheaf& f, const Site& site, const SheafOptions& options = {});

/// The directed-colimit path regardless of site shape.
PlusResult plus_construction_general(const Presheaf& f, const Site& site, const SheafOptions& options = {});

/// F++ with the composite unit; throws AxiomError if the result fails is_sheaf.
PlusResult sheafify(const Presheaf& f, const Site& site, const SheafOptions& options = {});

/// Quotient of F by the smallest congruence identifying the given pairs
/// (object, a, b). Returns the quotient and the quotient map.
PlusResult quotient_presheaf(const Presheaf& f, const std::vector<std::tuple<Obj, Item, Item>>& merges);

struct RandomPresheafOptions {
    std::size_t max_generators = 3;
    std::size_t max_merges = 3;
    double singleton_probability = 0.15;
};

/// Seeded random presheaf: a quotient of a coproduct of representables and
/// constant singletons.
Presheaf random_presheaf(const CatPtr& cat, std::mt19937_64& rng, const RandomPresheafOptions& options = {});

}  // namespace finsheaf
