#include "finsheaf/kan.hpp"

#include <map>
#include <numeric>

namespace finsheaf {

namespace {

// Shared construction for both comma categories. `arrows_for(x)` is the hom-set
// of D holding the arrows paired with x; `commutes(u, a, b)` decides whether u
// is a morphism from the object with arrow a to the one with arrow b.
template <class ArrowsFor, class Commutes>
CommaCategory build_comma(const FinCat& c, ArrowsFor arrows_for, Commutes commutes) {
    CommaCategory out;
    out.offset.assign(c.num_objects() + 1, 0);
    for (Obj x = 0; x < c.num_objects(); ++x) {
        out.offset[x] = out.x.size();
        for (Mor t : arrows_for(x)) {
            out.x.push_back(x);
            out.arrow.push_back(t);
        }
    }
    out.offset[c.num_objects()] = out.x.size();
    const std::size_t n = out.x.size();
    std::vector<Arrow> arrows;
    std::vector<Mor> ids(n);
    for (Obj i = 0; i < n; ++i)
        for (Obj j = 0; j < n; ++j)
            for (Mor u : c.hom(out.x[i], out.x[j]))
                if (commutes(u, out.arrow[i], out.arrow[j])) {
                    if (u == c.id(out.x[i]) && i == j) ids[i] = static_cast<Mor>(arrows.size());
                    arrows.push_back({i, j});
                    out.underlying.push_back(u);
                }
    const auto& under = out.underlying;
    std::vector<Mor> first(n * n + 1, 0);
    for (std::size_t h = arrows.size(); h-- > 0;)
        first[static_cast<std::size_t>(arrows[h].dom) * n + arrows[h].cod] = static_cast<Mor>(h);
    FinCat cat = FinCat::make(
        n, arrows, std::move(ids),
        [&](Mor f, Mor g) -> Mor {
            const Mor u = c.compose_unchecked(under[f], under[g]);
            const Obj i = arrows[g].dom, k = arrows[f].cod;
            for (Mor h = first[static_cast<std::size_t>(i) * n + k]; h < arrows.size() && arrows[h].dom == i && arrows[h].cod == k; ++h)
                if (under[h] == u) return h;
            throw AxiomError("comma category is not closed under composition", {{"f", f}, {"g", g}});
        },
        Validation::Structural);
    out.cat = share(std::move(cat));
    return out;
}

}  // namespace

CFunctor CommaCategory::projection(const CatPtr& source) const { return CFunctor(cat, source, x, underlying); }

CommaCategory comma_under(Obj d, const CFunctor& alpha) {
    const FinCat& c = *alpha.source();
    const FinCat& dcat = *alpha.target();
    return build_comma(
        c, [&](Obj x) { return dcat.hom(d, alpha(x)); },
        [&](Mor u, Mor t, Mor t2) { return dcat.compose_unchecked(alpha.map(u), t) == t2; });
}

CommaCategory comma_over(const CFunctor& alpha, Obj d) {
    const FinCat& c = *alpha.source();
    const FinCat& dcat = *alpha.target();
    return build_comma(
        c, [&](Obj x) { return dcat.hom(alpha(x), d); },
        [&](Mor u, Mor s, Mor s2) { return dcat.compose_unchecked(s2, alpha.map(u)) == s; });
}

Presheaf restrict(const CFunctor& alpha, const Presheaf& f) {
    const FinCat& c = *alpha.source();
    std::vector<std::size_t> sizes(c.num_objects());
    for (Obj x = 0; x < c.num_objects(); ++x) sizes[x] = f.size(alpha(x));
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u) maps[u] = f.map(alpha.map(u));
    return unchecked_presheaf(alpha.source(), std::move(sizes), std::move(maps));
}

Colimit colimit(const Presheaf& f) {
    const FinCat& c = *f.category();
    const std::size_t n = c.num_objects();
    std::vector<std::size_t> offset(n + 1, 0);
    for (Obj x = 0; x < n; ++x) offset[x + 1] = offset[x] + f.size(x);
    std::vector<std::size_t> parent(offset[n]);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (Mor u = 0; u < c.num_morphisms(); ++u)
        for (Item a = 0; a < f.size(c.cod(u)); ++a) {
            const std::size_t p = find(offset[c.cod(u)] + a);
            const std::size_t q = find(offset[c.dom(u)] + f.at(u, a));
            if (p != q) parent[std::max(p, q)] = std::min(p, q);
        }
    Colimit out;
    std::vector<Item> class_of(offset[n], 0);
    for (std::size_t i = 0; i < offset[n]; ++i) {
        const std::size_t r = find(i);
        if (r == i) class_of[i] = static_cast<Item>(out.size++);
        else class_of[i] = class_of[r];
    }
    out.cocone.resize(n);
    for (Obj x = 0; x < n; ++x)
        out.cocone[x].assign(class_of.begin() + static_cast<std::ptrdiff_t>(offset[x]),
                             class_of.begin() + static_cast<std::ptrdiff_t>(offset[x + 1]));
    return out;
}

Limit limit(const Presheaf& f, std::uint64_t node_budget) {
    Limit out;
    for_each_nat(constant_singleton(f.category()), f, NatSearch{node_budget, false}, [&](const NatTrans& eta) {
        std::vector<Item> family;
        for (const auto& comp : eta.components) family.push_back(comp[0]);
        out.families.push_back(std::move(family));
        return true;
    });
    return out;
}

LeftKan left_kan(const CFunctor& alpha, const Presheaf& f, Exec exec) {
    const FinCat& c = *alpha.source();
    const FinCat& d = *alpha.target();
    const std::size_t nd = d.num_objects();
    std::vector<CommaCategory> commas(nd);
    std::vector<Colimit> colims(nd);
    for_each_index(exec, nd, [&](std::size_t y) {
        commas[y] = comma_under(static_cast<Obj>(y), alpha);
        colims[y] = colimit(restrict(commas[y].projection(alpha.source()), f));
    });
    // First (comma object, element) of every class, used to push classes along morphisms.
    std::vector<std::vector<std::pair<Obj, Item>>> reps(nd);
    std::vector<std::size_t> sizes(nd);
    for (Obj y = 0; y < nd; ++y) {
        sizes[y] = colims[y].size;
        reps[y].assign(colims[y].size, {0, 0});
        std::vector<bool> seen(colims[y].size, false);
        for (Obj i = 0; i < commas[y].x.size(); ++i)
            for (Item a = 0; a < colims[y].cocone[i].size(); ++a) {
                const Item k = colims[y].cocone[i][a];
                if (!seen[k]) {
                    seen[k] = true;
                    reps[y][k] = {i, a};
                }
            }
    }
    std::vector<std::vector<Item>> maps(d.num_morphisms());
    for (Mor w = 0; w < d.num_morphisms(); ++w) {
        const Obj y2 = d.dom(w), y = d.cod(w);
        for (Item k = 0; k < sizes[y]; ++k) {
            const auto [i, a] = reps[y][k];
            const Obj x = commas[y].x[i];
            const Mor t = d.compose_unchecked(commas[y].arrow[i], w);
            const Obj i2 = commas[y2].object_index(x, t, d.hom(y2, alpha(x)).first);
            maps[w].push_back(colims[y2].cocone[i2][a]);
        }
    }
    LeftKan out{Presheaf(alpha.target(), std::move(sizes), std::move(maps)), {}};
    for (Obj x = 0; x < c.num_objects(); ++x) {
        const Obj y = alpha(x);
        const Obj i = commas[y].object_index(x, d.id(y), d.hom(y, y).first);
        out.unit.components.push_back(colims[y].cocone[i]);
    }
    return out;
}

RightKan right_kan(const CFunctor& alpha, const Presheaf& f, std::uint64_t node_budget, Exec exec) {
    const FinCat& c = *alpha.source();
    const FinCat& d = *alpha.target();
    const std::size_t nd = d.num_objects();
    std::vector<CommaCategory> commas(nd);
    std::vector<Limit> lims(nd);
    for_each_index(exec, nd, [&](std::size_t y) {
        commas[y] = comma_over(alpha, static_cast<Obj>(y));
        lims[y] = limit(restrict(commas[y].projection(alpha.source()), f), node_budget);
    });
    std::vector<std::map<std::vector<Item>, Item>> index(nd);
    std::vector<std::size_t> sizes(nd);
    for (Obj y = 0; y < nd; ++y) {
        sizes[y] = lims[y].size();
        for (Item k = 0; k < lims[y].size(); ++k) index[y].emplace(lims[y].families[k], k);
    }
    std::vector<std::vector<Item>> maps(d.num_morphisms());
    for (Mor w = 0; w < d.num_morphisms(); ++w) {
        const Obj y2 = d.dom(w), y = d.cod(w);
        const CommaCategory& target = commas[y2];
        for (const auto& family : lims[y].families) {
            std::vector<Item> pulled(target.x.size());
            for (Obj i2 = 0; i2 < target.x.size(); ++i2) {
                const Obj x = target.x[i2];
                const Mor s = d.compose_unchecked(w, target.arrow[i2]);
                pulled[i2] = family[commas[y].object_index(x, s, d.hom(alpha(x), y).first)];
            }
            maps[w].push_back(index[y2].at(pulled));
        }
    }
    RightKan out{Presheaf(alpha.target(), std::move(sizes), std::move(maps)), {}};
    for (Obj x = 0; x < c.num_objects(); ++x) {
        const Obj y = alpha(x);
        const Obj i = commas[y].object_index(x, d.id(y), d.hom(y, y).first);
        std::vector<Item> comp;
        for (const auto& family : lims[y].families) comp.push_back(family[i]);
        out.counit.components.push_back(std::move(comp));
    }
    return out;
}

}  // namespace finsheaf
