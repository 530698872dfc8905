#pragma once

// Modules over Z/n and RG, module-valued presheaves and the linear
// verification layer.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsheaf/grpsites.hpp"

namespace finsheaf {

using Scalar = std::uint32_t;
using Row = std::vector<Scalar>;

/// Z/n; a field exactly when n is prime.
class FiniteRing {
public:
    explicit FiniteRing(Scalar modulus);
    static FiniteRing prime_field(Scalar p);

    Scalar modulus() const noexcept { return n_; }
    bool is_field() const noexcept { return field_; }
    Scalar add(Scalar a, Scalar b) const { return static_cast<Scalar>((std::uint64_t{a} + b) % n_); }
    Scalar sub(Scalar a, Scalar b) const { return static_cast<Scalar>((std::uint64_t{a} + n_ - b) % n_); }
    Scalar mul(Scalar a, Scalar b) const { return static_cast<Scalar>(std::uint64_t{a} * b % n_); }
    Scalar neg(Scalar a) const { return a == 0 ? 0 : n_ - a; }
    std::optional<Scalar> inverse(Scalar a) const;
    /// "F3" for fields, "Z/4" otherwise.
    std::string name() const;

    bool operator==(const FiniteRing&) const = default;

private:
    Scalar n_;
    bool field_;
};

/// Parses "F2", "F3", "Z/4", "Z4".
FiniteRing parse_ring(const std::string& text);

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Scalar> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}
    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Row>& rows, std::size_t cols);

    Scalar& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    Scalar operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    Row row(std::size_t i) const;
    bool operator==(const Matrix&) const = default;
};

Matrix multiply(const FiniteRing& r, const Matrix& x, const Matrix& y);
/// v·A for a row vector v.
Row apply(const FiniteRing& r, const Row& v, const Matrix& m);

/// U A V = D with D diagonal, U and V invertible, computed with extended-gcd
/// row and column operations (a diagonal form, not necessarily the divisor chain).
struct Diagonalization {
    Matrix u, u_inv, v, v_inv;
    std::vector<Scalar> diagonal;  ///< min(rows, cols) entries
};

Diagonalization diagonalize(const FiniteRing& r, Matrix a);

/// Generators of the left kernel {x : x·A = 0}.
std::vector<Row> left_kernel(const FiniteRing& r, const Matrix& a);

/// Rank of the row space over a field, by Gaussian elimination.
std::size_t field_rank(const FiniteRing& r, Matrix a);
/// Left-kernel basis over a field, by Gaussian elimination on the transpose.
std::vector<Row> field_left_kernel(const FiniteRing& r, const Matrix& a);

/// A submodule of R^d in normal form: a direct sum of cyclic submodules
/// generated by `generators`, of additive orders `orders`.
class Submodule {
public:
    static Submodule span(const FiniteRing& r, std::size_t ambient, const std::vector<Row>& generators);
    static Submodule whole(const FiniteRing& r, std::size_t ambient);
    static Submodule zero(const FiniteRing& r, std::size_t ambient);

    const FiniteRing& ring() const noexcept { return ring_; }
    std::size_t ambient() const noexcept { return ambient_; }
    const std::vector<Row>& generators() const noexcept { return gens_; }
    const std::vector<Scalar>& orders() const noexcept { return orders_; }
    /// Number of elements, saturating at UINT64_MAX.
    std::uint64_t size() const;
    bool contains(const Row& x) const;
    bool is_subset_of(const Submodule& other) const;
    bool operator==(const Submodule& other) const { return is_subset_of(other) && other.is_subset_of(*this); }
    /// c with x = Σ c_i generators[i], c_i < orders[i]; throws InputError if x is not a member.
    std::vector<Scalar> coordinates(const Row& x) const;
    /// Mixed-radix index of a member in [0, size()).
    std::uint64_t index_of(const Row& x) const;
    Row element(std::uint64_t index) const;
    /// Free of rank k: k generators each of order n.
    bool is_free() const;

private:
    Submodule(FiniteRing r, std::size_t ambient) : ring_(r), ambient_(ambient) {}

    FiniteRing ring_;
    std::size_t ambient_ = 0;
    std::vector<Row> gens_;
    std::vector<Scalar> orders_;
    std::vector<Scalar> steps_;  ///< gcd(d_i, n) per generator
    Matrix v_;                   ///< coordinates of x are (x·V)_i / steps_i
    std::vector<std::size_t> columns_;       ///< coordinate column of each generator
    std::vector<std::size_t> zero_columns_;  ///< columns of x·V that vanish on members
};

/// A right RG-module on R^d: v.g = v·action[g] with action[gh] = action[g]·action[h].
class RGModule {
public:
    RGModule(GroupPtr group, FiniteRing ring, std::size_t rank, std::vector<Matrix> action);

    static RGModule zero(const GroupPtr& g, const FiniteRing& r);
    static RGModule trivial(const GroupPtr& g, const FiniteRing& r, std::size_t rank = 1);
    /// The character through G/N for a subgroup N of index 2.
    static RGModule sign(const Subgroup& index_two, const FiniteRing& r);
    static RGModule permutation(const GSet& m, const FiniteRing& r);
    static RGModule regular(const GroupPtr& g, const FiniteRing& r);
    static RGModule direct_sum(const RGModule& a, const RGModule& b);
    /// P^-1 ρ(g) P for a random invertible P.
    static RGModule random_conjugate(const RGModule& m, std::mt19937_64& rng);

    const GroupPtr& group() const noexcept { return group_; }
    const FiniteRing& ring() const noexcept { return ring_; }
    std::size_t rank() const noexcept { return rank_; }
    const Matrix& action(Elem g) const { return action_[g]; }
    const std::vector<Matrix>& actions() const noexcept { return action_; }

private:
    GroupPtr group_;
    FiniteRing ring_;
    std::size_t rank_;
    std::vector<Matrix> action_;
};

/// M^H as a submodule of R^d.
Submodule fixed_submodule(const RGModule& m, const Subgroup& h);
/// Same over a field via Gaussian elimination; throws InputError over Z/n.
Submodule fixed_submodule_field(const RGModule& m, const Subgroup& h);

/// Values are submodules F(x) ⊆ R^{d_x}; F(u) for u: x -> y is v -> v·maps[u],
/// a d_y × d_x matrix sending F(y) into F(x).
class ModulePresheaf {
public:
    ModulePresheaf(CatPtr cat, FiniteRing ring, std::vector<Submodule> values, std::vector<Matrix> maps);

    const CatPtr& category() const noexcept { return cat_; }
    const FiniteRing& ring() const noexcept { return ring_; }
    const Submodule& value(Obj x) const { return values_[x]; }
    const std::vector<Submodule>& values() const noexcept { return values_; }
    const Matrix& map(Mor u) const { return maps_[u]; }
    std::uint64_t total_size() const;

    /// The underlying presheaf of sets; elements are indexed as in Submodule::index_of.
    /// Throws BudgetExceeded when the total size exceeds `cap`.
    Presheaf materialize(std::size_t cap = 10'000) const;

private:
    CatPtr cat_;
    FiniteRing ring_;
    std::vector<Submodule> values_;
    std::vector<Matrix> maps_;
};

/// x -> M^{𝒦(x)}, restriction along ρ(g) acting by ρ_M(g).
ModulePresheaf module_fixed_point_sheaf(const RGModule& m, const CatExtension& e);
/// R at every object with identity restrictions.
ModulePresheaf structure_sheaf(const CatPtr& cat, const FiniteRing& r);
ModulePresheaf zero_module_presheaf(const CatPtr& cat, const FiniteRing& r);

struct ModuleSheafReport {
    bool ok = true;
    std::string mode;  ///< "set+linear", "linear" or "set"
    nlohmann::json witness;
    nlohmann::json to_json() const;
};

/// Set-level sheaf check on the materialized presheaf when within `cap`, and the
/// linear criterion F(x) ≅ F(x0)^{Stab(s0)} on sites with an initial object.
ModuleSheafReport is_module_sheaf(const ModulePresheaf& f, const Site& site, std::size_t cap = 10'000,
                                  const SheafOptions& options = {});

/// The RG-module F(x0) with g acting through ρ(1_{x0} g). Throws InputError if
/// F(x0) is not free or 𝒦(x0) is nontrivial.
RGModule module_at_x0(const ModulePresheaf& f, const CatExtension& e, Obj x0);

struct CoherentEntry {
    Obj object;
    std::size_t generators;
    std::vector<Scalar> orders;
};

std::vector<CoherentEntry> coherent_check(const ModulePresheaf& f);
nlohmann::json coherent_report(const ModulePresheaf& f);

struct ModuleOptions {
    std::size_t rank_bound = 0;  ///< 0 means |G|
    std::size_t random_modules = 3;
    std::uint64_t seed = 20240601;
    std::size_t cap = 10'000;
    SheafOptions sheaf;
};

/// Linear equivalence checks over a corpus of modules; the report carries "ok".
nlohmann::json verify_module_equivalence(const GroupSiteBundle& b, const FiniteRing& r,
                                         const ModuleOptions& options = {});

}  // namespace finsheaf
