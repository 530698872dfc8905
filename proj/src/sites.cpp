#include "finsheaf/sites.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace finsheaf {

// ---------------------------------------------------------------------------
// Sieves

Sieve::Sieve(CatPtr cat, Obj base, Bits bits, Unchecked) : cat_(std::move(cat)), base_(base), bits_(std::move(bits)) {}

Sieve::Sieve(CatPtr cat, Obj base, Bits bits) : cat_(std::move(cat)), base_(base), bits_(std::move(bits)) {
    if (base_ >= cat_->num_objects()) throw InputError("sieve base out of range");
    if (bits_.size() != cat_->into(base_).size()) throw InputError("sieve bitset has wrong length");
    if (!is_sieve(*cat_, base_, bits_))
        throw AxiomError("morphism set is not closed under precomposition", {{"object", base_}});
}

Sieve Sieve::empty(const CatPtr& cat, Obj x) { return Sieve(cat, x, Bits(cat->into(x).size()), Unchecked{}); }

Sieve Sieve::maximal(const CatPtr& cat, Obj x) {
    Bits b(cat->into(x).size());
    b.set();
    return Sieve(cat, x, std::move(b), Unchecked{});
}

bool Sieve::contains(Mor f) const { return cat_->cod(f) == base_ && bits_[cat_->into_position(f)]; }

bool Sieve::is_maximal() const { return bits_[cat_->into_position(cat_->id(base_))]; }

std::vector<Mor> Sieve::morphisms() const {
    std::vector<Mor> out;
    const auto& into = cat_->into(base_);
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) out.push_back(into[i]);
    return out;
}

std::size_t Sieve::count_from(Obj y) const {
    std::size_t k = 0;
    for (Mor f : cat_->hom(y, base_)) k += bits_[cat_->into_position(f)];
    return k;
}

Sieve Sieve::intersect(const Sieve& other) const { return Sieve(cat_, base_, bits_ & other.bits_, Unchecked{}); }

nlohmann::json Sieve::to_json() const { return {{"object", base_}, {"morphisms", morphisms()}}; }

bool operator<(const Sieve& a, const Sieve& b) {
    if (a.base_ != b.base_) return a.base_ < b.base_;
    if (a.size() != b.size()) return a.size() < b.size();
    return a.morphisms() < b.morphisms();
}

bool is_sieve(const FinCat& cat, Obj x, const Sieve::Bits& bits) {
    const auto& into = cat.into(x);
    for (auto i = bits.find_first(); i != Sieve::Bits::npos; i = bits.find_next(i))
        for (Mor v : cat.into(cat.dom(into[i])))
            if (!bits[cat.into_position(cat.compose_unchecked(into[i], v))]) return false;
    return true;
}

Sieve generate_sieve(const CatPtr& cat, Obj x, std::span<const Mor> generators) {
    Sieve::Bits bits(cat->into(x).size());
    for (Mor g : generators) {
        if (g >= cat->num_morphisms() || cat->cod(g) != x)
            throw InputError("sieve generator " + std::to_string(g) + " does not have codomain " + std::to_string(x));
        for (Mor v : cat->into(cat->dom(g))) bits.set(cat->into_position(cat->compose_unchecked(g, v)));
    }
    return Sieve(cat, x, std::move(bits), Sieve::Unchecked{});
}

Sieve pullback_sieve(Mor u, const Sieve& s) {
    const FinCat& c = *s.category();
    if (c.cod(u) != s.base()) throw InputError("pullback along a morphism not ending at the sieve's object");
    const Obj y = c.dom(u);
    Sieve::Bits bits(c.into(y).size());
    const auto& into = c.into(y);
    for (std::size_t i = 0; i < into.size(); ++i)
        if (s.bits()[c.into_position(c.compose_unchecked(u, into[i]))]) bits.set(i);
    return Sieve(s.category(), y, std::move(bits), Sieve::Unchecked{});
}

std::vector<Sieve> enumerate_sieves(const CatPtr& cat, Obj x, std::uint64_t node_budget) {
    const auto& into = cat->into(x);
    const std::size_t m = into.size();
    std::vector<Sieve::Bits> below(m), above(m, Sieve::Bits(m));
    for (std::size_t i = 0; i < m; ++i) below[i] = principal_sieve(cat, into[i]).bits();
    for (std::size_t i = 0; i < m; ++i)
        for (auto j = below[i].find_first(); j != Sieve::Bits::npos; j = below[i].find_next(j)) above[j].set(i);

    std::vector<Sieve> out;
    std::uint64_t nodes = 0;
    // Every undecided morphism is either put in (with everything below it) or
    // left out (with everything above it); each leaf is a distinct down-set.
    auto recurse = [&](auto&& self, Sieve::Bits in, Sieve::Bits out_set) -> void {
        if (++nodes > node_budget) throw BudgetExceeded("sieve enumeration", node_budget);
        Sieve::Bits decided = in | out_set;
        if (decided.all()) {
            out.emplace_back(cat, x, std::move(in));
            return;
        }
        std::size_t i = 0;
        while (decided[i]) ++i;
        Sieve::Bits in2 = in | below[i];
        if (!in2.intersects(out_set)) self(self, std::move(in2), out_set);
        Sieve::Bits out2 = out_set | above[i];
        if (!out2.intersects(in)) self(self, std::move(in), std::move(out2));
    };
    recurse(recurse, Sieve::Bits(m), Sieve::Bits(m));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Position of each member of S within its domain block, indexed by into-position.
std::vector<Item> member_ranks(const Sieve& s) {
    const FinCat& c = *s.category();
    const auto& into = c.into(s.base());
    std::vector<Item> rank(into.size(), 0);
    Obj current = 0;
    Item k = 0;
    bool started = false;
    for (std::size_t i = 0; i < into.size(); ++i) {
        if (!started || c.dom(into[i]) != current) {
            current = c.dom(into[i]);
            k = 0;
            started = true;
        }
        if (s.bits()[i]) rank[i] = k++;
    }
    return rank;
}

}  // namespace

Presheaf sieve_presheaf(const Sieve& s) {
    const CatPtr& cat = s.category();
    const FinCat& c = *cat;
    const auto rank = member_ranks(s);
    std::vector<std::vector<Mor>> members(c.num_objects());
    for (Mor f : s.morphisms()) members[c.dom(f)].push_back(f);
    std::vector<std::size_t> sizes(c.num_objects());
    for (Obj y = 0; y < c.num_objects(); ++y) sizes[y] = members[y].size();
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u)
        for (Mor f : members[c.cod(u)]) maps[u].push_back(rank[c.into_position(c.compose_unchecked(f, u))]);
    return unchecked_presheaf(cat, std::move(sizes), std::move(maps));
}

// ---------------------------------------------------------------------------
// Topologies

bool Topology::covers(const Sieve& s) const {
    switch (kind_) {
        case TopologyKind::Trivial: return s.is_maximal();
        case TopologyKind::Atomic: return !s.is_empty();
        case TopologyKind::Explicit:
            if (s.base() >= covers_.size()) return false;
            return std::find(covers_[s.base()].begin(), covers_[s.base()].end(), s) != covers_[s.base()].end();
    }
    return false;
}

std::string Topology::name() const {
    switch (kind_) {
        case TopologyKind::Trivial: return "trivial";
        case TopologyKind::Atomic: return "atomic";
        case TopologyKind::Explicit: return "explicit";
    }
    return "?";
}

std::vector<Sieve> covering_sieves(const Site& site, Obj x, std::uint64_t node_budget) {
    switch (site.topology.kind()) {
        case TopologyKind::Trivial: return {Sieve::maximal(site.cat, x)};
        case TopologyKind::Atomic: {
            auto all = enumerate_sieves(site.cat, x, node_budget);
            std::erase_if(all, [](const Sieve& s) { return s.is_empty(); });
            return all;
        }
        case TopologyKind::Explicit:
            if (x >= site.topology.explicit_covers().size()) return {};
            return site.topology.explicit_covers()[x];
    }
    return {};
}

OreResult ore_condition(const FinCat& c, Exec exec) {
    const std::size_t n = c.num_objects();
    std::vector<std::optional<std::pair<Mor, Mor>>> found(n);
    // Principal sieves of f and g meet iff the cospan (f, g) completes to a square.
    for_each_index(exec, n, [&](std::size_t x) {
        const auto& into = c.into(static_cast<Obj>(x));
        std::vector<Sieve::Bits> below(into.size(), Sieve::Bits(into.size()));
        for (std::size_t i = 0; i < into.size(); ++i)
            for (Mor v : c.into(c.dom(into[i]))) below[i].set(c.into_position(c.compose_unchecked(into[i], v)));
        for (std::size_t i = 0; i < into.size() && !found[x]; ++i)
            for (std::size_t j = i + 1; j < into.size(); ++j)
                if (!below[i].intersects(below[j])) {
                    found[x] = std::pair(into[i], into[j]);
                    break;
                }
    });
    for (auto& f : found)
        if (f) return {false, f};
    return {};
}

nlohmann::json AxiomReport::to_json() const {
    nlohmann::json j{{"ok", ok}, {"mode", mode}};
    if (failed_axiom) j["failed_axiom"] = *failed_axiom;
    if (!witness.is_null()) j["witness"] = witness;
    return j;
}

namespace {

struct ObjectAxioms {
    bool ok = true;
    bool reduced = false;
    std::string axiom;
    nlohmann::json witness;
};

ObjectAxioms check_object_axioms(const Site& site, Obj x, std::uint64_t node_budget) {
    const CatPtr& cat = site.cat;
    const Topology& top = site.topology;
    ObjectAxioms r;
    auto fail = [&](std::string axiom, nlohmann::json witness) {
        r.ok = false;
        r.axiom = std::move(axiom);
        r.witness = std::move(witness);
    };
    if (!top.covers(Sieve::maximal(cat, x))) {
        fail("maximal", {{"object", x}});
        return r;
    }
    std::vector<Sieve> all;
    try {
        all = enumerate_sieves(cat, x, node_budget);
    } catch (const BudgetExceeded&) {
        if (top.kind() == TopologyKind::Explicit) throw;
        // Covering families of trivial and atomic topologies are upward closed
        // and generated by principal sieves, so principal sieves plus the
        // empty sieve decide both axioms.
        r.reduced = true;
        all.push_back(Sieve::empty(cat, x));
        for (Mor f : cat->into(x)) all.push_back(principal_sieve(cat, f));
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
    }
    std::vector<const Sieve*> covering, other;
    for (const Sieve& s : all) (top.covers(s) ? covering : other).push_back(&s);
    if (top.kind() == TopologyKind::Explicit)
        for (const Sieve& s : top.explicit_covers()[x])
            if (std::find(all.begin(), all.end(), s) == all.end()) {
                fail("sieve", s.to_json());
                return r;
            }
    for (const Sieve* s : covering)
        for (Mor u : cat->into(x))
            if (!top.covers(pullback_sieve(u, *s))) {
                fail("stability", {{"object", x}, {"sieve", s->to_json()}, {"morphism", u}});
                return r;
            }
    for (const Sieve* s2 : other) {
        Sieve::Bits good(cat->into(x).size());
        for (std::size_t i = 0; i < good.size(); ++i)
            if (top.covers(pullback_sieve(cat->into(x)[i], *s2))) good.set(i);
        for (const Sieve* s1 : covering)
            if (s1->bits().is_subset_of(good)) {
                fail("transitivity", {{"object", x}, {"covering", s1->to_json()}, {"sieve", s2->to_json()}});
                return r;
            }
    }
    return r;
}

}  // namespace

AxiomReport check_topology_axioms(const Site& site, std::uint64_t node_budget, Exec exec) {
    AxiomReport report;
    const FinCat& c = *site.cat;
    if (site.topology.kind() == TopologyKind::Atomic) {
        const OreResult ore = ore_condition(c, exec);
        if (!ore.holds) {
            report.ok = false;
            report.failed_axiom = "ore";
            report.witness = {{"cospan", {ore.cospan->first, ore.cospan->second}}};
            return report;
        }
    }
    if (site.topology.kind() == TopologyKind::Explicit && site.topology.explicit_covers().size() != c.num_objects()) {
        report.ok = false;
        report.failed_axiom = "maximal";
        report.witness = {{"object", site.topology.explicit_covers().size()}};
        return report;
    }
    std::vector<ObjectAxioms> per(c.num_objects());
    for_each_index(exec, c.num_objects(),
                   [&](std::size_t x) { per[x] = check_object_axioms(site, static_cast<Obj>(x), node_budget); });
    for (const auto& r : per) {
        if (r.reduced) report.mode = "principal";
        if (!r.ok && report.ok) {
            report.ok = false;
            report.failed_axiom = r.axiom;
            report.witness = r.witness;
        }
    }
    return report;
}

Sieve minimal_sieve(const Site& site, Obj x) {
    if (!site.initial_object) throw Error("minimal sieve not guaranteed: the site has no initial object");
    const CatPtr& cat = site.cat;
    const Obj x0 = *site.initial_object;
    Sieve::Bits bits(cat->into(x).size());
    for (Mor f : cat->hom(x0, x)) bits.set(cat->into_position(f));
    Sieve s(cat, x, std::move(bits));
    for (Mor f : cat->into(x))
        if (!s.is_subset_of(principal_sieve(cat, f)))
            throw AxiomError("closed-form minimal sieve is not below a principal sieve", {{"object", x}, {"morphism", f}});
    return s;
}

// ---------------------------------------------------------------------------
// Sheaf condition

nlohmann::json SheafReport::to_json() const {
    nlohmann::json j{{"ok", ok}, {"strategy", strategy}};
    if (!witness.is_null()) j["witness"] = witness;
    return j;
}

namespace {

// Family (F(s)a)_{s in S} for a in F(x), in member order.
std::vector<Item> matching_family(const Presheaf& f, const std::vector<Mor>& members, Item a) {
    std::vector<Item> out;
    out.reserve(members.size());
    for (Mor s : members) out.push_back(f.at(s, a));
    return out;
}

std::optional<nlohmann::json> check_sieve(const Presheaf& f, const Sieve& s, std::uint64_t nat_budget) {
    if (s.is_maximal()) return std::nullopt;
    const Obj x = s.base();
    const auto members = s.morphisms();
    std::set<std::vector<Item>> families;
    for (Item a = 0; a < f.size(x); ++a) families.insert(matching_family(f, members, a));
    const std::size_t count = count_nat(sieve_presheaf(s), f, NatSearch{nat_budget, false});
    if (families.size() == f.size(x) && count == f.size(x)) return std::nullopt;
    return nlohmann::json{{"object", x},
                          {"sieve", s.to_json()},
                          {"value_size", f.size(x)},
                          {"nat_count", count},
                          {"reason", families.size() != f.size(x) ? "not injective" : "not surjective"}};
}

bool use_fast(const Site& site, SheafStrategy strategy) {
    if (strategy == SheafStrategy::Fast) {
        if (site.topology.kind() != TopologyKind::Atomic)
            throw InputError("the minimal-sieve criterion needs an atomic topology");
        return true;
    }
    if (strategy == SheafStrategy::Definitional) return false;
    return site.topology.kind() == TopologyKind::Atomic && site.initial_object.has_value();
}

}  // namespace

SheafReport is_sheaf(const Presheaf& f, const Site& site, const SheafOptions& options) {
    const FinCat& c = *site.cat;
    if (f.category().get() != site.cat.get() && !f.category()->same_structure(c))
        throw InputError("presheaf and site live on different categories");
    const bool fast = use_fast(site, options.strategy);
    SheafReport report;
    report.strategy = fast ? "minimal-sieve" : "definitional";
    std::vector<std::optional<nlohmann::json>> per(c.num_objects());
    for_each_index(options.exec, c.num_objects(), [&](std::size_t xi) {
        const Obj x = static_cast<Obj>(xi);
        if (fast) {
            per[x] = check_sieve(f, minimal_sieve(site, x), options.nat_budget);
            return;
        }
        for (const Sieve& s : covering_sieves(site, x, options.sieve_budget))
            if ((per[x] = check_sieve(f, s, options.nat_budget))) return;
    });
    for (auto& w : per)
        if (w) {
            report.ok = false;
            report.witness = std::move(*w);
            break;
        }
    return report;
}

// ---------------------------------------------------------------------------
// Plus construction

namespace {

using Components = std::vector<std::vector<Item>>;

// ψ(w) = φ(v∘w) for w in `target`, a sieve on dom v contained in v*(source).
NatTrans restrict_along(const NatTrans& phi, const Sieve& source, Mor v, const Sieve& target,
                        const std::vector<Item>& source_rank) {
    const FinCat& c = *source.category();
    NatTrans psi;
    psi.components.resize(c.num_objects());
    for (Mor w : target.morphisms()) {
        const Mor vw = c.compose_unchecked(v, w);
        psi.components[c.dom(w)].push_back(phi.components[c.dom(w)][source_rank[c.into_position(vw)]]);
    }
    return psi;
}

NatTrans yoneda_family(const Presheaf& f, const Sieve& s, Item a) {
    const FinCat& c = *s.category();
    NatTrans phi;
    phi.components.resize(c.num_objects());
    for (Mor m : s.morphisms()) phi.components[c.dom(m)].push_back(f.at(m, a));
    return phi;
}

struct NatTable {
    std::vector<NatTrans> list;
    std::map<Components, Item> index;

    Item find(const NatTrans& eta) const {
        auto it = index.find(eta.components);
        if (it == index.end()) throw AxiomError("restricted family is not natural", nlohmann::json::object());
        return it->second;
    }
};

NatTable tabulate(const Sieve& s, const Presheaf& f, std::uint64_t budget) {
    NatTable t;
    t.list = nat_set(sieve_presheaf(s), f, NatSearch{budget, false});
    for (Item i = 0; i < t.list.size(); ++i) t.index.emplace(t.list[i].components, i);
    return t;
}

}  // namespace

PlusResult plus_construction(const Presheaf& f, const Site& site, const SheafOptions& options) {
    if (site.topology.kind() != TopologyKind::Atomic || !site.initial_object)
        return plus_construction_general(f, site, options);
    const CatPtr& cat = site.cat;
    const FinCat& c = *cat;
    const std::size_t n = c.num_objects();
    std::vector<std::optional<Sieve>> sieves(n);
    std::vector<NatTable> tables(n);
    for_each_index(options.exec, n, [&](std::size_t x) {
        sieves[x] = minimal_sieve(site, static_cast<Obj>(x));
        tables[x] = tabulate(*sieves[x], f, options.nat_budget);
    });
    std::vector<std::vector<Item>> ranks(n);
    std::vector<std::size_t> sizes(n);
    for (Obj x = 0; x < n; ++x) {
        ranks[x] = member_ranks(*sieves[x]);
        sizes[x] = tables[x].list.size();
    }
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor v = 0; v < c.num_morphisms(); ++v) {
        const Obj y = c.dom(v), x = c.cod(v);
        for (const NatTrans& phi : tables[x].list)
            maps[v].push_back(tables[y].find(restrict_along(phi, *sieves[x], v, *sieves[y], ranks[x])));
    }
    PlusResult out{Presheaf(cat, std::move(sizes), std::move(maps)), {}};
    for (Obj x = 0; x < n; ++x) {
        std::vector<Item> comp;
        for (Item a = 0; a < f.size(x); ++a) comp.push_back(tables[x].find(yoneda_family(f, *sieves[x], a)));
        out.unit.components.push_back(std::move(comp));
    }
    return out;
}

PlusResult plus_construction_general(const Presheaf& f, const Site& site, const SheafOptions& options) {
    const CatPtr& cat = site.cat;
    const FinCat& c = *cat;
    const std::size_t n = c.num_objects();

    struct Stage {
        std::vector<Sieve> covers;
        std::map<Sieve::Bits, std::size_t> cover_index;
        std::vector<std::vector<Item>> ranks;
        std::vector<NatTable> tables;
        std::vector<std::size_t> offset;   // flat index of (cover, nat)
        std::vector<Item> class_of;        // flat index -> class
        std::vector<std::pair<std::size_t, Item>> rep;  // class -> (cover, nat)
    };
    std::vector<Stage> st(n);
    for_each_index(options.exec, n, [&](std::size_t xi) {
        const Obj x = static_cast<Obj>(xi);
        Stage& s = st[x];
        s.covers = covering_sieves(site, x, options.sieve_budget);
        for (std::size_t i = 0; i < s.covers.size(); ++i) {
            s.cover_index.emplace(s.covers[i].bits(), i);
            s.ranks.push_back(member_ranks(s.covers[i]));
            s.tables.push_back(tabulate(s.covers[i], f, options.nat_budget));
        }
        for (std::size_t i = 0; i < s.covers.size(); ++i)
            for (std::size_t j = i + 1; j < s.covers.size(); ++j)
                if (!site.topology.covers(s.covers[i].intersect(s.covers[j])))
                    throw AxiomError("covering sieves are not directed",
                                     {{"object", x}, {"first", s.covers[i].to_json()}, {"second", s.covers[j].to_json()}});
        s.offset.assign(s.covers.size() + 1, 0);
        for (std::size_t i = 0; i < s.covers.size(); ++i) s.offset[i + 1] = s.offset[i] + s.tables[i].list.size();
        std::vector<std::size_t> parent(s.offset.back());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        const Mor id = c.id(x);
        for (std::size_t i = 0; i < s.covers.size(); ++i)
            for (std::size_t j = 0; j < s.covers.size(); ++j) {
                if (i == j || !s.covers[j].is_subset_of(s.covers[i])) continue;
                for (Item k = 0; k < s.tables[i].list.size(); ++k) {
                    const Item r = s.tables[j].find(restrict_along(s.tables[i].list[k], s.covers[i], id, s.covers[j], s.ranks[i]));
                    const std::size_t p = find(s.offset[i] + k), q = find(s.offset[j] + r);
                    if (p != q) parent[std::max(p, q)] = std::min(p, q);
                }
            }
        s.class_of.assign(parent.size(), 0);
        for (std::size_t a = 0; a < parent.size(); ++a) {
            const std::size_t root = find(a);
            if (root == a) {
                const std::size_t cover = static_cast<std::size_t>(
                    std::upper_bound(s.offset.begin(), s.offset.end(), a) - s.offset.begin() - 1);
                s.class_of[a] = static_cast<Item>(s.rep.size());
                s.rep.emplace_back(cover, static_cast<Item>(a - s.offset[cover]));
            } else {
                s.class_of[a] = s.class_of[root];
            }
        }
    });
    std::vector<std::size_t> sizes(n);
    for (Obj x = 0; x < n; ++x) sizes[x] = st[x].rep.size();
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor v = 0; v < c.num_morphisms(); ++v) {
        const Obj y = c.dom(v), x = c.cod(v);
        for (const auto& [cover, k] : st[x].rep) {
            const Sieve pulled = pullback_sieve(v, st[x].covers[cover]);
            auto it = st[y].cover_index.find(pulled.bits());
            if (it == st[y].cover_index.end())
                throw AxiomError("pullback of a covering sieve is not covering", {{"morphism", v}, {"sieve", st[x].covers[cover].to_json()}});
            const std::size_t j = it->second;
            const Item r = st[y].tables[j].find(
                restrict_along(st[x].tables[cover].list[k], st[x].covers[cover], v, pulled, st[x].ranks[cover]));
            maps[v].push_back(st[y].class_of[st[y].offset[j] + r]);
        }
    }
    PlusResult out{Presheaf(cat, std::move(sizes), std::move(maps)), {}};
    for (Obj x = 0; x < n; ++x) {
        const Sieve top = Sieve::maximal(cat, x);
        const std::size_t i = st[x].cover_index.at(top.bits());
        std::vector<Item> comp;
        for (Item a = 0; a < f.size(x); ++a)
            comp.push_back(st[x].class_of[st[x].offset[i] + st[x].tables[i].find(yoneda_family(f, top, a))]);
        out.unit.components.push_back(std::move(comp));
    }
    return out;
}

PlusResult sheafify(const Presheaf& f, const Site& site, const SheafOptions& options) {
    PlusResult once = plus_construction(f, site, options);
    PlusResult twice = plus_construction(once.value, site, options);
    PlusResult out{std::move(twice.value), compose_nat(twice.unit, once.unit)};
    SheafOptions check = options;
    check.strategy = SheafStrategy::Auto;
    const SheafReport r = is_sheaf(out.value, site, check);
    if (!r.ok) throw AxiomError("sheafification did not produce a sheaf", r.witness);
    return out;
}

PlusResult quotient_presheaf(const Presheaf& f, const std::vector<std::tuple<Obj, Item, Item>>& merges) {
    const CatPtr& cat = f.category();
    const FinCat& c = *cat;
    const std::size_t n = c.num_objects();
    std::vector<std::size_t> offset(n + 1, 0);
    for (Obj x = 0; x < n; ++x) offset[x + 1] = offset[x] + f.size(x);
    std::vector<std::size_t> parent(offset[n]);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& [y, a, b] : merges)
        if (y >= n || a >= f.size(y) || b >= f.size(y))
            throw InputError("merge pair out of range at object " + std::to_string(y));
    std::vector<std::tuple<Obj, Item, Item>> queue(merges.begin(), merges.end());
    while (!queue.empty()) {
        auto [y, a, b] = queue.back();
        queue.pop_back();
        const std::size_t p = find(offset[y] + a), q = find(offset[y] + b);
        if (p == q) continue;
        parent[std::max(p, q)] = std::min(p, q);
        for (Mor u : c.into(y))
            if (!c.is_identity(u)) queue.emplace_back(c.dom(u), f.at(u, a), f.at(u, b));
    }
    std::vector<std::size_t> sizes(n, 0);
    NatTrans quotient;
    std::vector<std::vector<Item>> reps(n);
    for (Obj x = 0; x < n; ++x) {
        std::vector<Item> comp(f.size(x));
        std::map<std::size_t, Item> class_id;
        for (Item a = 0; a < f.size(x); ++a) {
            auto [it, fresh] = class_id.emplace(find(offset[x] + a), static_cast<Item>(sizes[x]));
            if (fresh) {
                ++sizes[x];
                reps[x].push_back(a);
            }
            comp[a] = it->second;
        }
        quotient.components.push_back(std::move(comp));
    }
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u)
        for (Item a : reps[c.cod(u)]) maps[u].push_back(quotient.components[c.dom(u)][f.at(u, a)]);
    return {Presheaf(cat, std::move(sizes), std::move(maps)), std::move(quotient)};
}

Presheaf random_presheaf(const CatPtr& cat, std::mt19937_64& rng, const RandomPresheafOptions& options) {
    const FinCat& c = *cat;
    std::uniform_int_distribution<std::size_t> gens(0, options.max_generators);
    std::uniform_int_distribution<Obj> object(0, static_cast<Obj>(c.num_objects() - 1));
    std::bernoulli_distribution singleton(options.singleton_probability);
    Presheaf p = empty_presheaf(cat);
    const std::size_t k = gens(rng);
    for (std::size_t i = 0; i < k; ++i)
        p = coproduct(p, singleton(rng) ? constant_singleton(cat) : representable(cat, object(rng)));
    std::vector<std::tuple<Obj, Item, Item>> merges;
    const std::size_t m = std::uniform_int_distribution<std::size_t>(0, options.max_merges)(rng);
    for (std::size_t i = 0; i < m; ++i) {
        const Obj y = object(rng);
        if (p.size(y) < 2) continue;
        std::uniform_int_distribution<Item> elem(0, static_cast<Item>(p.size(y) - 1));
        merges.emplace_back(y, elem(rng), elem(rng));
    }
    return quotient_presheaf(p, merges).value;
}

}  // namespace finsheaf
