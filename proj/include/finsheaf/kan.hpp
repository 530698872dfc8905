#pragma once

// Comma categories, (co)limits of presheaves and pointwise Kan extensions.

#include <cstdint>
#include <vector>

#include "finsheaf/fincat.hpp"

namespace finsheaf {

/// A comma category together with its projection data. For comma_under(d, α)
/// object i is (arrow[i]: d -> α(x[i]), x[i]); for comma_over(α, d) it is
/// (x[i], arrow[i]: α(x[i]) -> d). Morphisms are morphisms u of the source
/// of α, recorded in `underlying`.
struct CommaCategory {
    CatPtr cat;
    std::vector<Obj> x;
    std::vector<Mor> arrow;
    std::vector<Mor> underlying;
    /// Objects with a given x are contiguous: index = offset[x] + (arrow - first arrow of the hom-set).
    std::vector<std::size_t> offset;

    Obj object_index(Obj source_object, Mor t, Mor first_arrow) const {
        return static_cast<Obj>(offset[source_object] + (t - first_arrow));
    }
    CFunctor projection(const CatPtr& source) const;
};

CommaCategory comma_under(Obj d, const CFunctor& alpha);
CommaCategory comma_over(const CFunctor& alpha, Obj d);

/// F∘α.
Presheaf restrict(const CFunctor& alpha, const Presheaf& f);

/// Colimit of a presheaf viewed as a diagram C^op -> Set: the disjoint union
/// of the values modulo a ~ F(u)a. Classes are numbered by their first
/// element in (object, element) order.
struct Colimit {
    std::size_t size = 0;
    std::vector<std::vector<Item>> cocone;  ///< cocone[x][a] = class of a in F(x)
};

Colimit colimit(const Presheaf& f);

/// Limit: compatible families, in the canonical order of nat enumeration.
struct Limit {
    std::vector<std::vector<Item>> families;  ///< families[k][x]
    std::size_t size() const { return families.size(); }
};

Limit limit(const Presheaf& f, std::uint64_t node_budget = 1'000'000);

/// LK_α F with the unit F -> Res_α LK_α F.
struct LeftKan {
    Presheaf value;
    NatTrans unit;
};

/// RK_α F with the counit Res_α RK_α F -> F.
struct RightKan {
    Presheaf value;
    NatTrans counit;
};

LeftKan left_kan(const CFunctor& alpha, const Presheaf& f, Exec exec = Exec::Serial);
RightKan right_kan(const CFunctor& alpha, const Presheaf& f, std::uint64_t node_budget = 1'000'000,
                   Exec exec = Exec::Serial);

}  // namespace finsheaf
