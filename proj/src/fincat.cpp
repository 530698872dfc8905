#include "finsheaf/fincat.hpp"

#include <algorithm>
#include <numeric>

namespace finsheaf {

FinCat FinCat::make(std::size_t objects, std::vector<Arrow> arrows, std::vector<Mor> identities,
                    const std::function<Mor(Mor, Mor)>& compose, Validation validation, Exec exec,
                    std::vector<std::string> object_labels, std::vector<std::string> morphism_labels) {
    FinCat c;
    c.n_ = objects;
    const std::size_t n = objects;
    const std::size_t m = arrows.size();
    for (std::size_t f = 0; f < m; ++f) {
        if (arrows[f].dom >= n || arrows[f].cod >= n)
            throw InputError("morphism " + std::to_string(f) + " has an endpoint out of range");
        if (f > 0) {
            const Arrow& a = arrows[f - 1];
            const Arrow& b = arrows[f];
            if (a.dom > b.dom || (a.dom == b.dom && a.cod > b.cod))
                throw InputError("morphisms must be sorted by (dom, cod)");
        }
    }
    if (identities.size() != n) throw InputError("need one identity per object");
    for (Obj x = 0; x < n; ++x)
        if (identities[x] >= m || arrows[identities[x]].dom != x || arrows[identities[x]].cod != x)
            throw AxiomError("identity has wrong endpoints", {{"object", x}});
    c.arrows_ = std::move(arrows);
    c.identity_ = std::move(identities);
    c.homs_.assign(n * n, HomRange{});
    for (std::size_t f = 0; f < m; ++f) {
        HomRange& r = c.homs_[static_cast<std::size_t>(c.arrows_[f].dom) * n + c.arrows_[f].cod];
        if (r.count == 0) r.first = static_cast<Mor>(f);
        ++r.count;
    }
    c.into_.assign(n, {});
    c.into_pos_.assign(m, 0);
    for (Mor f = 0; f < m; ++f) {
        c.into_pos_[f] = static_cast<std::uint32_t>(c.into_[c.arrows_[f].cod].size());
        c.into_[c.arrows_[f].cod].push_back(f);
    }
    c.comp_offset_.assign(n * n * n, 0);
    for (Obj x = 0; x < n; ++x)
        for (Obj y = 0; y < n; ++y) {
            const HomRange xy = c.hom(x, y);
            if (xy.empty()) continue;
            for (Obj z = 0; z < n; ++z) {
                const HomRange yz = c.hom(y, z);
                if (yz.empty()) continue;
                const HomRange xz = c.hom(x, z);
                c.comp_offset_[(static_cast<std::size_t>(x) * n + y) * n + z] = c.comp_.size();
                for (Mor f : yz)
                    for (Mor g : xy) {
                        const Mor h = compose(f, g);
                        if (!xz.contains(h))
                            throw AxiomError("composite has wrong endpoints", {{"f", f}, {"g", g}, {"result", h}});
                        c.comp_.push_back(h);
                    }
            }
        }
    for (Mor f = 0; f < m; ++f) {
        if (c.compose_unchecked(c.identity_[c.cod(f)], f) != f || c.compose_unchecked(f, c.identity_[c.dom(f)]) != f)
            throw AxiomError("identity is not neutral", {{"morphism", f}});
    }
    if (validation == Validation::Full) check_associativity(c, exec);
    if (object_labels.empty())
        for (std::size_t x = 0; x < n; ++x) object_labels.push_back("x" + std::to_string(x));
    if (morphism_labels.empty())
        for (std::size_t f = 0; f < m; ++f) morphism_labels.push_back("m" + std::to_string(f));
    if (object_labels.size() != n || morphism_labels.size() != m) throw InputError("label count mismatch");
    c.object_labels_ = std::move(object_labels);
    c.morphism_labels_ = std::move(morphism_labels);
    return c;
}

void check_associativity(const FinCat& c, Exec exec) {
    const std::size_t n = c.num_objects();
    // One task per domain object w; checks every triple h: w->x, g: x->y, f: y->z.
    for_each_index(exec, n, [&](std::size_t w) {
        for (Obj x = 0; x < n; ++x) {
            const HomRange wx = c.hom(static_cast<Obj>(w), x);
            if (wx.empty()) continue;
            for (Obj y = 0; y < n; ++y) {
                const HomRange xy = c.hom(x, y);
                if (xy.empty()) continue;
                for (Obj z = 0; z < n; ++z) {
                    const HomRange yz = c.hom(y, z);
                    for (Mor f : yz)
                        for (Mor g : xy) {
                            const Mor fg = c.compose_unchecked(f, g);
                            for (Mor h : wx)
                                if (c.compose_unchecked(fg, h) != c.compose_unchecked(f, c.compose_unchecked(g, h)))
                                    throw AxiomError("composition is not associative", {{"f", f}, {"g", g}, {"h", h}});
                        }
                }
            }
        }
    });
}

Mor FinCat::compose(Mor f, Mor g) const {
    if (f >= arrows_.size() || g >= arrows_.size()) throw InputError("morphism index out of range");
    if (cod(g) != dom(f))
        throw InputError("morphisms " + std::to_string(f) + " and " + std::to_string(g) + " are not composable");
    return compose_unchecked(f, g);
}

bool FinCat::same_structure(const FinCat& o) const {
    return n_ == o.n_ && arrows_ == o.arrows_ && identity_ == o.identity_ && comp_ == o.comp_;
}

std::vector<std::size_t> hom_order(const std::vector<Arrow>& arrows) {
    std::vector<std::size_t> order(arrows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(arrows[a].dom, arrows[a].cod) < std::pair(arrows[b].dom, arrows[b].cod);
    });
    return order;
}

FinCat discrete_category(std::size_t n) {
    std::vector<Arrow> arrows;
    std::vector<Mor> ids;
    for (Obj x = 0; x < n; ++x) {
        arrows.push_back({x, x});
        ids.push_back(x);
    }
    return FinCat::make(n, std::move(arrows), std::move(ids), [](Mor f, Mor) { return f; });
}

FinCat poset_category(const std::vector<std::vector<bool>>& le, std::vector<std::string> labels) {
    const std::size_t n = le.size();
    std::vector<Arrow> arrows;
    std::vector<std::vector<Mor>> index(n, std::vector<Mor>(n, 0));
    std::vector<Mor> ids(n);
    for (Obj x = 0; x < n; ++x)
        for (Obj y = 0; y < n; ++y)
            if (le[x][y]) {
                index[x][y] = static_cast<Mor>(arrows.size());
                if (x == y) ids[x] = index[x][y];
                arrows.push_back({x, y});
            }
    for (Obj x = 0; x < n; ++x)
        if (!le[x][x]) throw AxiomError("order is not reflexive", {{"x", x}});
    std::vector<Arrow> copy = arrows;
    return FinCat::make(
        n, std::move(arrows), std::move(ids),
        [&](Mor f, Mor g) {
            const Obj x = copy[g].dom, z = copy[f].cod;
            if (!le[x][z]) throw AxiomError("order is not transitive", {{"f", f}, {"g", g}});
            return index[x][z];
        },
        Validation::Full, Exec::Serial, std::move(labels));
}

FinCat opposite(const FinCat& c) {
    std::vector<Arrow> flipped;
    flipped.reserve(c.num_morphisms());
    for (const Arrow& a : c.arrows()) flipped.push_back({a.cod, a.dom});
    const auto order = hom_order(flipped);
    std::vector<Mor> new_of_old(order.size());
    std::vector<Arrow> arrows;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < order.size(); ++i) {
        new_of_old[order[i]] = static_cast<Mor>(i);
        arrows.push_back(flipped[order[i]]);
        labels.push_back(c.morphism_label(static_cast<Mor>(order[i])));
    }
    std::vector<Mor> ids;
    for (Obj x = 0; x < c.num_objects(); ++x) ids.push_back(new_of_old[c.id(x)]);
    return FinCat::make(
        c.num_objects(), std::move(arrows), std::move(ids),
        [&](Mor f, Mor g) {
            return new_of_old[c.compose_unchecked(static_cast<Mor>(order[g]), static_cast<Mor>(order[f]))];
        },
        Validation::Structural, Exec::Serial, c.object_labels(), std::move(labels));
}

bool is_filtered(const FinCat& c) {
    const std::size_t n = c.num_objects();
    if (n == 0) return false;
    for (Obj x = 0; x < n; ++x)
        for (Obj y = x + 1; y < n; ++y) {
            bool cocone = false;
            for (Obj z = 0; z < n && !cocone; ++z) cocone = !c.hom(x, z).empty() && !c.hom(y, z).empty();
            if (!cocone) return false;
        }
    for (Obj x = 0; x < n; ++x)
        for (Obj y = 0; y < n; ++y) {
            const HomRange xy = c.hom(x, y);
            for (Mor f : xy)
                for (Mor g : xy) {
                    if (g <= f) continue;
                    bool coequalized = false;
                    for (Obj z = 0; z < n && !coequalized; ++z)
                        for (Mor h : c.hom(y, z))
                            if (c.compose_unchecked(h, f) == c.compose_unchecked(h, g)) {
                                coequalized = true;
                                break;
                            }
                    if (!coequalized) return false;
                }
        }
    return true;
}

// ---------------------------------------------------------------------------
// Functors

CFunctor::CFunctor(CatPtr source, CatPtr target, std::vector<Obj> object_map, std::vector<Mor> morphism_map)
    : source_(std::move(source)), target_(std::move(target)), objects_(std::move(object_map)),
      morphisms_(std::move(morphism_map)) {
    const FinCat& s = *source_;
    const FinCat& t = *target_;
    if (objects_.size() != s.num_objects() || morphisms_.size() != s.num_morphisms())
        throw InputError("functor tables have wrong size");
    for (Obj x = 0; x < s.num_objects(); ++x) {
        if (objects_[x] >= t.num_objects()) throw InputError("functor object image out of range");
        if (morphisms_[s.id(x)] != t.id(objects_[x])) throw AxiomError("functor does not preserve identity", {{"object", x}});
    }
    for (Mor f = 0; f < s.num_morphisms(); ++f) {
        if (morphisms_[f] >= t.num_morphisms()) throw InputError("functor morphism image out of range");
        if (t.dom(morphisms_[f]) != objects_[s.dom(f)] || t.cod(morphisms_[f]) != objects_[s.cod(f)])
            throw AxiomError("functor does not preserve endpoints", {{"morphism", f}});
    }
    for (Mor f = 0; f < s.num_morphisms(); ++f)
        for (Mor g : s.into(s.dom(f)))
            if (morphisms_[s.compose_unchecked(f, g)] != t.compose_unchecked(morphisms_[f], morphisms_[g]))
                throw AxiomError("functor does not preserve composition", {{"f", f}, {"g", g}});
}

CFunctor CFunctor::identity(const CatPtr& cat) {
    std::vector<Obj> objs(cat->num_objects());
    std::iota(objs.begin(), objs.end(), 0);
    std::vector<Mor> mors(cat->num_morphisms());
    std::iota(mors.begin(), mors.end(), 0);
    return CFunctor(cat, cat, std::move(objs), std::move(mors));
}

CFunctor compose(const CFunctor& b, const CFunctor& a) {
    if (a.target().get() != b.source().get() && !a.target()->same_structure(*b.source()))
        throw InputError("functors are not composable");
    std::vector<Obj> objs;
    for (Obj x : a.object_map()) objs.push_back(b(x));
    std::vector<Mor> mors;
    for (Mor f : a.morphism_map()) mors.push_back(b.map(f));
    return CFunctor(a.source(), b.target(), std::move(objs), std::move(mors));
}

std::optional<CFunctor> find_category_isomorphism(const CatPtr& a, const CatPtr& b, std::uint64_t node_budget) {
    const FinCat& s = *a;
    const FinCat& t = *b;
    const std::size_t n = s.num_objects();
    const std::size_t m = s.num_morphisms();
    if (n != t.num_objects() || m != t.num_morphisms()) return std::nullopt;
    std::uint64_t nodes = 0;
    std::vector<Obj> sigma(n);
    std::vector<bool> used_obj(n, false);
    constexpr Mor unset = static_cast<Mor>(-1);
    std::vector<Mor> phi(m, unset);
    std::vector<bool> used_mor(m, false);
    std::optional<CFunctor> result;

    auto consistent = [&](Mor f) {
        for (Mor g = 0; g < m; ++g) {
            if (phi[g] == unset) continue;
            if (s.cod(g) == s.dom(f)) {
                const Mor fg = s.compose_unchecked(f, g);
                if (phi[fg] != unset && phi[fg] != t.compose_unchecked(phi[f], phi[g])) return false;
            }
            if (s.cod(f) == s.dom(g)) {
                const Mor gf = s.compose_unchecked(g, f);
                if (phi[gf] != unset && phi[gf] != t.compose_unchecked(phi[g], phi[f])) return false;
            }
            // pairs (h, g) with h∘g = f
            if (s.dom(g) == s.dom(f))
                for (Mor h : s.hom(s.cod(g), s.cod(f)))
                    if (phi[h] != unset && s.compose_unchecked(h, g) == f &&
                        t.compose_unchecked(phi[h], phi[g]) != phi[f])
                        return false;
        }
        return true;
    };

    std::function<bool(Mor)> assign_morphisms = [&](Mor f) -> bool {
        while (f < m && phi[f] != unset) ++f;
        if (f == m) {
            try {
                result.emplace(a, b, sigma, phi);
                return true;
            } catch (const AxiomError&) {
                return false;
            }
        }
        for (Mor c : t.hom(sigma[s.dom(f)], sigma[s.cod(f)])) {
            if (used_mor[c] || t.is_identity(c)) continue;
            if (++nodes > node_budget) throw BudgetExceeded("category isomorphism search", node_budget);
            phi[f] = c;
            used_mor[c] = true;
            if (consistent(f) && assign_morphisms(f + 1)) return true;
            phi[f] = unset;
            used_mor[c] = false;
        }
        return false;
    };

    std::function<bool(Obj)> assign_objects = [&](Obj x) -> bool {
        if (x == n) {
            std::fill(phi.begin(), phi.end(), unset);
            std::fill(used_mor.begin(), used_mor.end(), false);
            for (Obj y = 0; y < n; ++y) {
                phi[s.id(y)] = t.id(sigma[y]);
                used_mor[t.id(sigma[y])] = true;
            }
            return assign_morphisms(0);
        }
        for (Obj c = 0; c < n; ++c) {
            if (used_obj[c]) continue;
            if (++nodes > node_budget) throw BudgetExceeded("category isomorphism search", node_budget);
            sigma[x] = c;
            bool ok = true;
            for (Obj y = 0; y <= x && ok; ++y)
                ok = s.hom(x, y).size() == t.hom(c, sigma[y]).size() && s.hom(y, x).size() == t.hom(sigma[y], c).size();
            if (!ok) continue;
            used_obj[c] = true;
            if (assign_objects(x + 1)) return true;
            used_obj[c] = false;
        }
        return false;
    };
    assign_objects(0);
    return result;
}

// ---------------------------------------------------------------------------
// Presheaves

Presheaf::Presheaf(CatPtr cat, std::vector<std::size_t> sizes, std::vector<std::vector<Item>> maps, bool)
    : cat_(std::move(cat)), sizes_(std::move(sizes)), maps_(std::move(maps)) {}

Presheaf unchecked_presheaf(CatPtr cat, std::vector<std::size_t> sizes, std::vector<std::vector<Item>> maps) {
    return Presheaf(std::move(cat), std::move(sizes), std::move(maps), true);
}

Presheaf::Presheaf(CatPtr cat, std::vector<std::size_t> sizes, std::vector<std::vector<Item>> maps)
    : cat_(std::move(cat)), sizes_(std::move(sizes)), maps_(std::move(maps)) {
    const FinCat& c = *cat_;
    if (sizes_.size() != c.num_objects() || maps_.size() != c.num_morphisms())
        throw InputError("presheaf tables have wrong size");
    for (Mor u = 0; u < c.num_morphisms(); ++u) {
        if (maps_[u].size() != sizes_[c.cod(u)])
            throw InputError("presheaf map " + std::to_string(u) + " has wrong length");
        for (Item a : maps_[u])
            if (a >= sizes_[c.dom(u)]) throw InputError("presheaf map " + std::to_string(u) + " value out of range");
    }
    for (Obj x = 0; x < c.num_objects(); ++x)
        for (Item a = 0; a < sizes_[x]; ++a)
            if (maps_[c.id(x)][a] != a) throw AxiomError("F(id) is not the identity", {{"object", x}, {"element", a}});
    for (Mor u = 0; u < c.num_morphisms(); ++u)
        for (Mor v : c.into(c.dom(u))) {
            const auto& uv = maps_[c.compose_unchecked(u, v)];
            const auto& fu = maps_[u];
            const auto& fv = maps_[v];
            for (Item a = 0; a < fu.size(); ++a)
                if (uv[a] != fv[fu[a]])
                    throw AxiomError("F(u∘v) != F(v)∘F(u)", {{"u", u}, {"v", v}, {"element", a}});
        }
}

std::size_t Presheaf::total_size() const { return std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0}); }

Presheaf representable(const CatPtr& cat, Obj x) {
    const FinCat& c = *cat;
    std::vector<std::size_t> sizes(c.num_objects());
    for (Obj y = 0; y < c.num_objects(); ++y) sizes[y] = c.hom(y, x).size();
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u) {
        const HomRange target = c.hom(c.dom(u), x);
        for (Mor s : c.hom(c.cod(u), x)) maps[u].push_back(c.compose_unchecked(s, u) - target.first);
    }
    return unchecked_presheaf(cat, std::move(sizes), std::move(maps));
}

Presheaf constant_singleton(const CatPtr& cat) {
    return unchecked_presheaf(cat, std::vector<std::size_t>(cat->num_objects(), 1),
                              std::vector<std::vector<Item>>(cat->num_morphisms(), std::vector<Item>{0}));
}

Presheaf empty_presheaf(const CatPtr& cat) {
    return unchecked_presheaf(cat, std::vector<std::size_t>(cat->num_objects(), 0),
                              std::vector<std::vector<Item>>(cat->num_morphisms()));
}

Presheaf coproduct(const Presheaf& a, const Presheaf& b) {
    const FinCat& c = *a.category();
    std::vector<std::size_t> sizes(c.num_objects());
    for (Obj x = 0; x < c.num_objects(); ++x) sizes[x] = a.size(x) + b.size(x);
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u) {
        maps[u] = a.map(u);
        const Item shift = static_cast<Item>(a.size(c.dom(u)));
        for (Item v : b.map(u)) maps[u].push_back(v + shift);
    }
    return unchecked_presheaf(a.category(), std::move(sizes), std::move(maps));
}

bool is_natural(const Presheaf& source, const Presheaf& target, const NatTrans& eta) {
    const FinCat& c = *source.category();
    if (eta.components.size() != c.num_objects()) return false;
    for (Obj x = 0; x < c.num_objects(); ++x) {
        if (eta.components[x].size() != source.size(x)) return false;
        for (Item v : eta.components[x])
            if (v >= target.size(x)) return false;
    }
    for (Mor u = 0; u < c.num_morphisms(); ++u) {
        const Obj x = c.dom(u), y = c.cod(u);
        for (Item a = 0; a < source.size(y); ++a)
            if (eta.components[x][source.at(u, a)] != target.at(u, eta.components[y][a])) return false;
    }
    return true;
}

bool is_componentwise_bijective(const Presheaf& source, const Presheaf& target, const NatTrans& eta) {
    for (Obj x = 0; x < eta.components.size(); ++x) {
        if (source.size(x) != target.size(x)) return false;
        std::vector<bool> hit(target.size(x), false);
        for (Item v : eta.components[x]) {
            if (hit[v]) return false;
            hit[v] = true;
        }
    }
    return true;
}

NatTrans identity_nat(const Presheaf& f) {
    NatTrans eta;
    for (Obj x = 0; x < f.sizes().size(); ++x) {
        std::vector<Item> comp(f.size(x));
        std::iota(comp.begin(), comp.end(), 0);
        eta.components.push_back(std::move(comp));
    }
    return eta;
}

NatTrans compose_nat(const NatTrans& b, const NatTrans& a) {
    NatTrans out;
    for (std::size_t x = 0; x < a.components.size(); ++x) {
        std::vector<Item> comp;
        for (Item v : a.components[x]) comp.push_back(b.components[x][v]);
        out.components.push_back(std::move(comp));
    }
    return out;
}

NatTrans invert_nat(const NatTrans& eta) {
    NatTrans out;
    for (const auto& comp : eta.components) {
        std::vector<Item> inv(comp.size());
        for (Item a = 0; a < comp.size(); ++a) inv[comp[a]] = a;
        out.components.push_back(std::move(inv));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Natural transformation search
//
// Variables are the pairs (y, e) with e in A(y). Assigning eta_y(e) = b forces
// eta_{dom v}(A(v)e) = B(v)b for every v into y; propagation follows those
// edges until a fixed point or a conflict.

namespace {

class NatEngine {
public:
    NatEngine(const Presheaf& a, const Presheaf& b, const NatSearch& opts) : a_(a), b_(b), opts_(opts), c_(*a.category()) {
        const std::size_t n = c_.num_objects();
        offset_.assign(n + 1, 0);
        for (Obj y = 0; y < n; ++y) offset_[y + 1] = offset_[y] + a.size(y);
        const std::size_t vars = offset_[n];
        value_.assign(vars, kUnset);
        object_of_.resize(vars);
        for (Obj y = 0; y < n; ++y)
            for (std::size_t i = offset_[y]; i < offset_[y + 1]; ++i) object_of_[i] = y;
        std::vector<Obj> objs(n);
        std::iota(objs.begin(), objs.end(), 0);
        std::stable_sort(objs.begin(), objs.end(),
                         [&](Obj p, Obj q) { return c_.into(p).size() > c_.into(q).size(); });
        for (Obj y : objs)
            for (std::size_t i = offset_[y]; i < offset_[y + 1]; ++i) order_.push_back(i);
        if (opts_.bijective_only) {
            used_.resize(n);
            for (Obj y = 0; y < n; ++y) used_[y].assign(b.size(y), false);
        }
    }

    template <class Visit>
    void run(Visit&& visit) {
        const std::size_t n = c_.num_objects();
        if (opts_.bijective_only)
            for (Obj y = 0; y < n; ++y)
                if (a_.size(y) != b_.size(y)) return;
        std::size_t p = next_unassigned(0);
        if (p == order_.size()) {
            visit(value_);
            return;
        }
        struct Frame {
            std::size_t pos;
            Item next;
            std::size_t mark;
        };
        std::vector<Frame> stack{{p, 0, 0}};
        while (!stack.empty()) {
            const std::size_t idx = stack.size() - 1;
            undo(stack[idx].mark);
            const std::size_t var = order_[stack[idx].pos];
            const std::size_t range = b_.size(object_of_[var]);
            bool descended = false;
            while (stack[idx].next < range) {
                const Item cand = stack[idx].next++;
                if (++nodes_ > opts_.node_budget)
                    throw BudgetExceeded("natural transformation search", opts_.node_budget);
                if (!assign(var, cand)) {
                    undo(stack[idx].mark);
                    continue;
                }
                const std::size_t q = next_unassigned(stack[idx].pos + 1);
                if (q == order_.size()) {
                    if (!visit(value_)) return;
                    undo(stack[idx].mark);
                    continue;
                }
                stack.push_back({q, 0, trail_.size()});
                descended = true;
                break;
            }
            if (!descended) {
                undo(stack[idx].mark);
                stack.pop_back();
            }
        }
    }

    NatTrans to_nat(const std::vector<Item>& flat) const {
        NatTrans eta;
        for (Obj y = 0; y < c_.num_objects(); ++y)
            eta.components.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(offset_[y]),
                                        flat.begin() + static_cast<std::ptrdiff_t>(offset_[y + 1]));
        return eta;
    }

private:
    static constexpr Item kUnset = static_cast<Item>(-1);

    std::size_t next_unassigned(std::size_t from) const {
        while (from < order_.size() && value_[order_[from]] != kUnset) ++from;
        return from;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            const std::size_t var = trail_.back();
            trail_.pop_back();
            if (opts_.bijective_only) used_[object_of_[var]][value_[var]] = false;
            value_[var] = kUnset;
        }
    }

    bool assign(std::size_t var, Item val) {
        queue_.clear();
        queue_.push_back({var, val});
        while (!queue_.empty()) {
            auto [v, b] = queue_.back();
            queue_.pop_back();
            if (value_[v] != kUnset) {
                if (value_[v] != b) return false;
                continue;
            }
            const Obj y = object_of_[v];
            if (opts_.bijective_only) {
                if (used_[y][b]) return false;
                used_[y][b] = true;
            }
            value_[v] = b;
            trail_.push_back(v);
            const Item e = static_cast<Item>(v - offset_[y]);
            for (Mor u : c_.into(y)) {
                if (c_.is_identity(u)) continue;
                const Obj x = c_.dom(u);
                queue_.push_back({offset_[x] + a_.at(u, e), b_.at(u, b)});
            }
        }
        return true;
    }

    const Presheaf& a_;
    const Presheaf& b_;
    NatSearch opts_;
    const FinCat& c_;
    std::vector<std::size_t> offset_;
    std::vector<Item> value_;
    std::vector<Obj> object_of_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> trail_;
    std::vector<std::pair<std::size_t, Item>> queue_;
    std::vector<std::vector<bool>> used_;
    std::uint64_t nodes_ = 0;
};

void require_same_base(const Presheaf& a, const Presheaf& b) {
    if (a.category().get() != b.category().get() && !a.category()->same_structure(*b.category()))
        throw InputError("presheaves live on different categories");
}

}  // namespace

void for_each_nat(const Presheaf& source, const Presheaf& target, const NatSearch& options,
                  const std::function<bool(const NatTrans&)>& visit) {
    require_same_base(source, target);
    NatEngine engine(source, target, options);
    engine.run([&](const std::vector<Item>& flat) { return visit(engine.to_nat(flat)); });
}

std::vector<NatTrans> nat_set(const Presheaf& source, const Presheaf& target, const NatSearch& options) {
    std::vector<NatTrans> out;
    for_each_nat(source, target, options, [&](const NatTrans& eta) {
        out.push_back(eta);
        return true;
    });
    return out;
}

std::size_t count_nat(const Presheaf& source, const Presheaf& target, const NatSearch& options) {
    require_same_base(source, target);
    std::size_t count = 0;
    NatEngine engine(source, target, options);
    engine.run([&](const std::vector<Item>&) {
        ++count;
        return true;
    });
    return count;
}

std::optional<NatTrans> find_presheaf_isomorphism(const Presheaf& a, const Presheaf& b, std::uint64_t node_budget) {
    std::optional<NatTrans> found;
    for_each_nat(a, b, NatSearch{node_budget, true}, [&](const NatTrans& eta) {
        found = eta;
        return false;
    });
    return found;
}

}  // namespace finsheaf
