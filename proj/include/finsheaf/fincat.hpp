#pragma once

// Finite categories with dense composition tables, functors, presheaves
// and natural transformations.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsheaf/error.hpp"
#include "finsheaf/parallel.hpp"

namespace finsheaf {

using Obj = std::uint32_t;
using Mor = std::uint32_t;
/// An element of a presheaf value F(x) = {0, ..., |F(x)|-1}.
using Item = std::uint32_t;

struct Arrow {
    Obj dom;
    Obj cod;
    bool operator==(const Arrow&) const = default;
};

/// Contiguous block of morphism indices forming one hom-set.
struct HomRange {
    Mor first = 0;
    std::uint32_t count = 0;

    Mor operator[](std::size_t i) const { return first + static_cast<Mor>(i); }
    std::size_t size() const noexcept { return count; }
    bool empty() const noexcept { return count == 0; }
    bool contains(Mor f) const noexcept { return f >= first && f < first + count; }

    struct iterator {
        Mor value;
        Mor operator*() const { return value; }
        iterator& operator++() { ++value; return *this; }
        bool operator==(const iterator&) const = default;
    };
    iterator begin() const { return {first}; }
    iterator end() const { return {first + count}; }
};

enum class Validation { Full, Structural };

/// A finite category. Morphisms are numbered so that each hom-set
/// Hom(x, y) is a contiguous range, ordered by (dom, cod).
class FinCat {
public:
    /// `arrows` must be sorted by (dom, cod). compose(f, g) returns f∘g for
    /// cod(g) == dom(f). Full validation also checks associativity over
    /// every composable triple.
    static FinCat make(std::size_t objects, std::vector<Arrow> arrows, std::vector<Mor> identities,
                       const std::function<Mor(Mor, Mor)>& compose,
                       Validation validation = Validation::Full, Exec exec = Exec::Serial,
                       std::vector<std::string> object_labels = {},
                       std::vector<std::string> morphism_labels = {});

    std::size_t num_objects() const noexcept { return n_; }
    std::size_t num_morphisms() const noexcept { return arrows_.size(); }
    Obj dom(Mor f) const { return arrows_[f].dom; }
    Obj cod(Mor f) const { return arrows_[f].cod; }
    Mor id(Obj x) const { return identity_[x]; }
    bool is_identity(Mor f) const { return identity_[dom(f)] == f; }
    HomRange hom(Obj x, Obj y) const { return homs_[static_cast<std::size_t>(x) * n_ + y]; }
    /// Every morphism with codomain x, ascending.
    const std::vector<Mor>& into(Obj x) const { return into_[x]; }
    /// Position of f within into(cod f).
    std::uint32_t into_position(Mor f) const { return into_pos_[f]; }
    /// f∘g; throws InputError when not composable.
    Mor compose(Mor f, Mor g) const;
    Mor compose_unchecked(Mor f, Mor g) const {
        const Obj x = arrows_[g].dom, y = arrows_[g].cod, z = arrows_[f].cod;
        const HomRange xy = hom(x, y);
        return comp_[comp_offset_[(static_cast<std::size_t>(x) * n_ + y) * n_ + z] +
                     static_cast<std::size_t>(f - hom(y, z).first) * xy.count + (g - xy.first)];
    }

    const std::vector<Arrow>& arrows() const noexcept { return arrows_; }
    const std::vector<Mor>& identities() const noexcept { return identity_; }
    const std::string& object_label(Obj x) const { return object_labels_[x]; }
    const std::string& morphism_label(Mor f) const { return morphism_labels_[f]; }
    const std::vector<std::string>& object_labels() const noexcept { return object_labels_; }
    const std::vector<std::string>& morphism_labels() const noexcept { return morphism_labels_; }

    /// Same objects, arrows and composition (labels ignored).
    bool same_structure(const FinCat& other) const;

private:
    std::size_t n_ = 0;
    std::vector<Arrow> arrows_;
    std::vector<Mor> identity_;
    std::vector<HomRange> homs_;
    std::vector<std::vector<Mor>> into_;
    std::vector<std::uint32_t> into_pos_;
    std::vector<std::size_t> comp_offset_;
    std::vector<Mor> comp_;
    std::vector<std::string> object_labels_;
    std::vector<std::string> morphism_labels_;

    friend void check_associativity(const FinCat&, Exec);
};

using CatPtr = std::shared_ptr<const FinCat>;

inline CatPtr share(FinCat c) { return std::make_shared<const FinCat>(std::move(c)); }

/// Throws AxiomError naming a triple (f, g, h) with (f∘g)∘h != f∘(g∘h).
void check_associativity(const FinCat& cat, Exec exec);

/// Permutation sorting arbitrary arrows by (dom, cod), stable.
std::vector<std::size_t> hom_order(const std::vector<Arrow>& arrows);

/// Discrete category on n objects.
FinCat discrete_category(std::size_t n);

/// Category of a finite poset given by its order relation.
FinCat poset_category(const std::vector<std::vector<bool>>& le, std::vector<std::string> labels = {});

/// The opposite category; op(op(C)) reproduces C exactly.
FinCat opposite(const FinCat& cat);

/// Nonempty, every pair of objects has a cocone, every parallel pair is
/// coequalized by some morphism.
bool is_filtered(const FinCat& cat);

class CFunctor {
public:
    /// Throws AxiomError unless identities, dom/cod and composition are preserved.
    CFunctor(CatPtr source, CatPtr target, std::vector<Obj> object_map, std::vector<Mor> morphism_map);

    static CFunctor identity(const CatPtr& cat);

    const CatPtr& source() const noexcept { return source_; }
    const CatPtr& target() const noexcept { return target_; }
    Obj operator()(Obj x) const { return objects_[x]; }
    Mor map(Mor f) const { return morphisms_[f]; }
    const std::vector<Obj>& object_map() const noexcept { return objects_; }
    const std::vector<Mor>& morphism_map() const noexcept { return morphisms_; }

private:
    CatPtr source_;
    CatPtr target_;
    std::vector<Obj> objects_;
    std::vector<Mor> morphisms_;
};

/// Composite functor b∘a.
CFunctor compose(const CFunctor& b, const CFunctor& a);

/// Backtracking search for an isomorphism of categories.
std::optional<CFunctor> find_category_isomorphism(const CatPtr& a, const CatPtr& b,
                                                  std::uint64_t node_budget = 1'000'000);

/// A presheaf of finite sets. For u: x -> y the map F(u): F(y) -> F(x) is
/// stored as a table indexed by F(y).
class Presheaf {
public:
    /// Validates F(id) = id and F(u∘v) = F(v)∘F(u).
    Presheaf(CatPtr cat, std::vector<std::size_t> sizes, std::vector<std::vector<Item>> maps);

    const CatPtr& category() const noexcept { return cat_; }
    std::size_t size(Obj x) const { return sizes_[x]; }
    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    /// F(u)(a) for a in F(cod u).
    Item at(Mor u, Item a) const { return maps_[u][a]; }
    const std::vector<Item>& map(Mor u) const { return maps_[u]; }
    const std::vector<std::vector<Item>>& maps() const noexcept { return maps_; }
    std::size_t total_size() const;

    bool operator==(const Presheaf& o) const { return sizes_ == o.sizes_ && maps_ == o.maps_; }

private:
    Presheaf(CatPtr cat, std::vector<std::size_t> sizes, std::vector<std::vector<Item>> maps, bool);
    friend Presheaf unchecked_presheaf(CatPtr, std::vector<std::size_t>, std::vector<std::vector<Item>>);

    CatPtr cat_;
    std::vector<std::size_t> sizes_;
    std::vector<std::vector<Item>> maps_;
};

/// For constructions that are functorial by construction.
Presheaf unchecked_presheaf(CatPtr cat, std::vector<std::size_t> sizes, std::vector<std::vector<Item>> maps);

/// Hom(-, x); element i of the value at y is the morphism hom(y, x)[i].
Presheaf representable(const CatPtr& cat, Obj x);
Presheaf constant_singleton(const CatPtr& cat);
Presheaf empty_presheaf(const CatPtr& cat);
Presheaf coproduct(const Presheaf& a, const Presheaf& b);

/// A natural transformation; components[x][a] for a in A(x).
struct NatTrans {
    std::vector<std::vector<Item>> components;
    bool operator==(const NatTrans&) const = default;
};

bool is_natural(const Presheaf& source, const Presheaf& target, const NatTrans& eta);
bool is_componentwise_bijective(const Presheaf& source, const Presheaf& target, const NatTrans& eta);
NatTrans identity_nat(const Presheaf& f);
/// Vertical composite b∘a.
NatTrans compose_nat(const NatTrans& b, const NatTrans& a);
/// Inverse of a componentwise bijective transformation.
NatTrans invert_nat(const NatTrans& eta);

struct NatSearch {
    std::uint64_t node_budget = 1'000'000;
    bool bijective_only = false;  ///< prune to componentwise bijections
};

/// Enumerates Nat(source, target) in canonical order, calling visit on each;
/// visit returns false to stop. Throws BudgetExceeded when the search runs
/// past node_budget.
void for_each_nat(const Presheaf& source, const Presheaf& target, const NatSearch& options,
                  const std::function<bool(const NatTrans&)>& visit);

std::vector<NatTrans> nat_set(const Presheaf& source, const Presheaf& target,
                              const NatSearch& options = {});
std::size_t count_nat(const Presheaf& source, const Presheaf& target, const NatSearch& options = {});
std::optional<NatTrans> find_presheaf_isomorphism(const Presheaf& a, const Presheaf& b,
                                                  std::uint64_t node_budget = 1'000'000);

}  // namespace finsheaf
