#pragma once

// Finite groups as Cayley tables, subgroups, right G-sets and G-posets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace finsheaf {

using Elem = std::uint32_t;

class FiniteGroup {
public:
    /// Validates the table exhaustively: closure, two-sided identity,
    /// inverses, associativity. Throws AxiomError with a witness.
    static FiniteGroup from_table(const std::vector<std::vector<Elem>>& mul,
                                  std::vector<std::string> labels = {});

    /// Closure of permutation generators on {0..degree-1}. The product is
    /// function composition, (a*b)(i) = a(b(i)). Elements are numbered in
    /// lexicographic order of their image arrays, so the identity is 0.
    static FiniteGroup from_permutations(std::size_t degree,
                                         const std::vector<std::vector<std::size_t>>& generators);

    static FiniteGroup trivial();
    static FiniteGroup cyclic(std::size_t n);
    static FiniteGroup symmetric(std::size_t n);
    /// Symmetries of the n-gon, order 2n.
    static FiniteGroup dihedral(std::size_t n);

    std::size_t order() const noexcept { return order_; }
    Elem identity() const noexcept { return identity_; }
    Elem mul(Elem a, Elem b) const { return mul_[static_cast<std::size_t>(a) * order_ + b]; }
    Elem inv(Elem a) const { return inv_[a]; }
    Elem conj(Elem g, Elem h) const { return mul(mul(g, h), inv(g)); }  // g h g^-1
    const std::string& label(Elem a) const { return labels_[a]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::vector<std::vector<Elem>> table() const;

    /// Index of the element with the given label, if any.
    std::optional<Elem> find(const std::string& label) const;

    bool operator==(const FiniteGroup&) const = default;

private:
    FiniteGroup() = default;

    std::size_t order_ = 0;
    std::vector<Elem> mul_;
    Elem identity_ = 0;
    std::vector<Elem> inv_;
    std::vector<std::string> labels_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline GroupPtr share(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

class Subgroup {
public:
    /// Throws AxiomError unless `elements` is closed and contains the identity.
    static Subgroup from_elements(GroupPtr group, std::vector<Elem> elements);
    static Subgroup generated_by(GroupPtr group, std::span<const Elem> generators);
    static Subgroup trivial(GroupPtr group);
    static Subgroup whole(GroupPtr group);

    const GroupPtr& group() const noexcept { return group_; }
    const std::vector<Elem>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool contains(Elem g) const { return mask_[g]; }
    bool is_subset_of(const Subgroup& other) const;
    std::string label() const;

    /// Canonical order: by size, then lexicographically by member list.
    friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.elements_ == b.elements_; }
    friend std::strong_ordering operator<=>(const Subgroup& a, const Subgroup& b);

private:
    Subgroup(GroupPtr group, std::vector<Elem> sorted_elements);

    GroupPtr group_;
    std::vector<Elem> elements_;
    std::vector<bool> mask_;
};

/// All subgroups, each once, in canonical order.
std::vector<Subgroup> enumerate_subgroups(const GroupPtr& group);

/// Subgroups of p-power order, the trivial subgroup included. Throws
/// InputError if p is not prime.
std::vector<Subgroup> p_subgroups(const GroupPtr& group, std::size_t p);

/// g H g^-1.
Subgroup conjugate_subgroup(const Subgroup& h, Elem g);

/// Canonical representative (least in canonical order) of the conjugacy
/// class of h.
Subgroup conjugacy_representative(const Subgroup& h);

Subgroup normalizer(const Subgroup& h);

bool is_prime(std::size_t p);

/// A finite right G-set: act(x, g) = x.g with x.e = x and (x.g).h = x.(gh).
class GSet {
public:
    /// act[x][g]; validated exhaustively.
    GSet(GroupPtr group, const std::vector<std::vector<std::size_t>>& act);

    static GSet empty(GroupPtr group);
    static GSet point(GroupPtr group);
    static GSet regular(GroupPtr group);
    static GSet disjoint_union(const GSet& a, const GSet& b);

    const GroupPtr& group() const noexcept { return group_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t act(std::size_t x, Elem g) const { return act_[x * order_ + g]; }
    std::vector<std::vector<std::size_t>> table() const;

    bool operator==(const GSet& other) const { return size_ == other.size_ && act_ == other.act_; }

private:
    GSet(GroupPtr group, std::size_t size, std::vector<std::size_t> flat, bool validate);

    GroupPtr group_;
    std::size_t size_ = 0;
    std::size_t order_ = 0;
    std::vector<std::size_t> act_;
};

/// Right cosets Hg, numbered in order of their least element; Hg.g' = H(gg').
struct CosetSpace {
    GSet gset;
    std::vector<Elem> representatives;   ///< least element of each coset
    std::vector<std::size_t> coset_of;   ///< element -> coset index
};

CosetSpace coset_space(const Subgroup& h);
inline GSet coset_gset(const Subgroup& h) { return coset_space(h).gset; }

/// {x : x.h = x for all h in H}, ascending.
std::vector<std::size_t> fixed_points(const GSet& m, const Subgroup& h);

Subgroup stabilizer(const GSet& m, std::size_t x);

struct Orbit {
    std::vector<std::size_t> points;  ///< ascending
    Subgroup stabilizer;              ///< stabilizer of points.front()
    Subgroup type;                    ///< conjugacy_representative(stabilizer)
};

/// Orbit partition, orbits ordered by least point.
std::vector<Orbit> orbits(const GSet& m);

/// Multiset of orbit types (conjugacy classes of point stabilizers), sorted.
std::vector<Subgroup> orbit_type(const GSet& m);

/// True iff an equivariant bijection exists (compares orbit types).
bool gsets_isomorphic(const GSet& a, const GSet& b);

/// An equivariant map between G-sets.
class GMap {
public:
    /// Throws AxiomError unless f(x.g) = f(x).g everywhere.
    GMap(GSet source, GSet target, std::vector<std::size_t> f);

    const GSet& source() const noexcept { return source_; }
    const GSet& target() const noexcept { return target_; }
    std::size_t operator()(std::size_t x) const { return f_[x]; }
    const std::vector<std::size_t>& table() const noexcept { return f_; }
    bool is_bijective() const;

private:
    GSet source_;
    GSet target_;
    std::vector<std::size_t> f_;
};

/// A G-set carrying a G-invariant partial order.
class GPoset {
public:
    /// le[x][y] means x <= y. Validated: partial order, x <= y => x.g <= y.g.
    GPoset(GSet carrier, std::vector<std::vector<bool>> le, std::vector<std::string> labels = {});

    const GSet& carrier() const noexcept { return carrier_; }
    const GroupPtr& group() const noexcept { return carrier_.group(); }
    std::size_t size() const noexcept { return carrier_.size(); }
    bool le(std::size_t x, std::size_t y) const { return le_[x * carrier_.size() + y]; }
    /// Left action gx := x.g^-1 used by the transporter construction.
    std::size_t left_act(Elem g, std::size_t x) const { return carrier_.act(x, group()->inv(g)); }
    std::optional<std::size_t> minimum() const;
    const std::string& label(std::size_t x) const { return labels_[x]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::vector<std::vector<bool>> order_table() const;

    GPoset opposite() const;

private:
    GSet carrier_;
    std::vector<bool> le_;
    std::vector<std::string> labels_;
};

/// Poset of a conjugation-closed family of subgroups under inclusion, with
/// right action H.g = g^-1 H g.
struct SubgroupPoset {
    GPoset poset;
    std::vector<Subgroup> subgroups;
};

SubgroupPoset subgroup_poset(const GroupPtr& group, std::vector<Subgroup> family);

}  // namespace finsheaf
