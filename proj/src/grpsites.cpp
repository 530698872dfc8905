#include "finsheaf/grpsites.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace finsheaf {

Mor TransporterCat::encode(Obj x, Obj y, Elem g) const {
    const std::size_t n = poset.size(), order = group()->order();
    const Mor f = codes[(static_cast<std::size_t>(x) * n + y) * order + g];
    if (f == kNone) throw InputError("no transporter morphism " + group()->label(g) + " from " + poset.label(x) + " to " + poset.label(y));
    return f;
}

TransporterCat transporter_category(const GPoset& p, Exec exec) {
    const GroupPtr& g = p.group();
    const std::size_t n = p.size(), order = g->order();
    TransporterCat t{nullptr, p, {}, std::vector<Mor>(n * n * order, TransporterCat::kNone)};
    std::vector<Arrow> arrows;
    std::vector<std::string> labels;
    for (Obj x = 0; x < n; ++x)
        for (Obj y = 0; y < n; ++y)
            for (Elem e = 0; e < order; ++e)
                if (p.le(p.left_act(e, x), y)) {
                    t.codes[(static_cast<std::size_t>(x) * n + y) * order + e] = static_cast<Mor>(arrows.size());
                    arrows.push_back({x, y});
                    t.element.push_back(e);
                    labels.push_back(g->label(e) + ":" + std::to_string(x) + "->" + std::to_string(y));
                }
    std::vector<Mor> ids;
    for (Obj x = 0; x < n; ++x) ids.push_back(t.encode(x, x, g->identity()));
    std::vector<Arrow> copy = arrows;
    t.cat = share(FinCat::make(
        n, std::move(arrows), std::move(ids),
        [&](Mor f, Mor h) { return t.encode(copy[h].dom, copy[f].cod, g->mul(t.element[f], t.element[h])); },
        Validation::Full, exec, p.labels(), std::move(labels)));
    return t;
}

std::vector<Elem> hom_transporter(const Subgroup& h, const Subgroup& k) {
    const FiniteGroup& g = *h.group();
    std::vector<Elem> out;
    for (Elem e = 0; e < g.order(); ++e)
        if (std::all_of(h.elements().begin(), h.elements().end(), [&](Elem a) { return k.contains(g.conj(e, a)); }))
            out.push_back(e);
    return out;
}

CatPtr group_category(const GroupPtr& g) {
    GPoset point(GSet::point(g), {{true}}, {"*"});
    return transporter_category(point).cat;
}

Site one_object_site(const GroupPtr& g) { return Site{group_category(g), Topology::atomic(), Obj{0}}; }

Site transporter_site(const TransporterCat& t) {
    const auto x0 = t.poset.minimum();
    if (!x0) throw InputError("the G-poset has no initial object, so the atomic site has no minimal sieves");
    return Site{t.cat, Topology::atomic(), static_cast<Obj>(*x0)};
}

CatExtension orbit_quotient(const TransporterCat& t, std::vector<Subgroup> kernels, std::vector<std::string> object_labels) {
    const FinCat& src = *t.cat;
    const FiniteGroup& g = *t.group();
    const std::size_t n = src.num_objects();
    if (kernels.size() != n) throw InputError("need one kernel subgroup per object");
    for (Obj x = 0; x < n; ++x)
        for (Elem k : kernels[x].elements())
            if (t.poset.left_act(k, x) != x)
                throw InputError("kernel element " + g.label(k) + " does not fix object " + t.poset.label(x));
    // Left 𝒦(z)-cosets compose consistently iff g 𝒦(y) g^-1 ⊆ 𝒦(z) for every g: y -> z.
    for (Mor f = 0; f < src.num_morphisms(); ++f) {
        const Obj y = src.dom(f), z = src.cod(f);
        for (Elem k : kernels[y].elements())
            if (!kernels[z].contains(g.conj(t.element[f], k)))
                throw AxiomError("kernel family is not a congruence",
                                 {{"f", f}, {"g", t.encode(y, y, k)}, {"h", src.id(y)},
                                  {"reason", "f∘g and f∘h lie in different cosets although g and h do not"}});
    }
    std::vector<Arrow> arrows;
    std::vector<Elem> reps;
    std::vector<Mor> rho(src.num_morphisms());
    std::vector<std::string> labels;
    for (Obj x = 0; x < n; ++x)
        for (Obj y = 0; y < n; ++y) {
            std::map<Elem, Mor> coset;
            for (Mor f : src.hom(x, y)) {
                Elem least = t.element[f];
                for (Elem k : kernels[y].elements()) least = std::min(least, g.mul(k, t.element[f]));
                auto [it, fresh] = coset.emplace(least, static_cast<Mor>(arrows.size()));
                if (fresh) {
                    arrows.push_back({x, y});
                    reps.push_back(least);
                    labels.push_back("[" + g.label(least) + "]:" + std::to_string(x) + "->" + std::to_string(y));
                }
                rho[f] = it->second;
            }
        }
    std::vector<Mor> ids;
    for (Obj x = 0; x < n; ++x) ids.push_back(rho[src.id(x)]);
    std::vector<Arrow> copy = arrows;
    if (object_labels.empty()) object_labels = src.object_labels();
    CatPtr target = share(FinCat::make(
        n, std::move(arrows), std::move(ids),
        [&](Mor a, Mor b) {
            return rho[src.compose_unchecked(t.encode(copy[a].dom, copy[a].cod, reps[a]),
                                             t.encode(copy[b].dom, copy[b].cod, reps[b]))];
        },
        Validation::Structural, Exec::Serial, std::move(object_labels), std::move(labels)));
    std::vector<Obj> objs(n);
    for (Obj x = 0; x < n; ++x) objs[x] = x;
    CFunctor functor(t.cat, target, std::move(objs), std::move(rho));
    return CatExtension{t, std::move(target), std::move(kernels), std::move(functor), std::move(reps)};
}

CatExtension trivial_extension(const TransporterCat& t) {
    std::vector<Subgroup> kernels(t.poset.size(), Subgroup::trivial(t.group()));
    return orbit_quotient(t, std::move(kernels));
}

CFunctor pi_functor(const TransporterCat& t, const CatPtr& group_cat) {
    return CFunctor(t.cat, group_cat, std::vector<Obj>(t.cat->num_objects(), 0), t.element);
}

// ---------------------------------------------------------------------------
// Continuity

namespace {

// Covering sieves on x, or only the principal ones (plus the maximal sieve)
// when enumeration runs over budget. Covering families of trivial and atomic
// topologies are upward closed and generated by covering principal sieves,
// so the reduced family decides every monotone property checked here.
std::vector<Sieve> covers_or_principal(const Site& site, Obj x, std::uint64_t budget, bool& reduced) {
    try {
        return covering_sieves(site, x, budget);
    } catch (const BudgetExceeded&) {
        if (site.topology.kind() == TopologyKind::Explicit) throw;
        reduced = true;
        std::vector<Sieve> out{Sieve::maximal(site.cat, x)};
        if (site.topology.kind() == TopologyKind::Atomic)
            for (Mor f : site.cat->into(x)) out.push_back(principal_sieve(site.cat, f));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
}

}  // namespace

nlohmann::json ContinuityReport::to_json() const {
    nlohmann::json j{{"cover_preserving", cover_preserving}, {"flat", flat}, {"continuous", continuous()}, {"mode", mode}};
    if (!witness.is_null()) j["witness"] = witness;
    return j;
}

nlohmann::json CocontinuityReport::to_json() const {
    nlohmann::json j{{"cocontinuous", ok}, {"mode", mode}};
    if (!witness.is_null()) j["witness"] = witness;
    return j;
}

ContinuityReport is_continuous(const CFunctor& alpha, const Site& source, const Site& target, std::uint64_t node_budget) {
    ContinuityReport r;
    const FinCat& c = *alpha.source();
    bool reduced = false;
    for (Obj x = 0; x < c.num_objects() && r.cover_preserving; ++x)
        for (const Sieve& s : covers_or_principal(source, x, node_budget, reduced)) {
            std::vector<Mor> image;
            for (Mor f : s.morphisms()) image.push_back(alpha.map(f));
            if (!target.topology.covers(generate_sieve(target.cat, alpha(x), image))) {
                r.cover_preserving = false;
                r.witness = {{"object", x}, {"sieve", s.to_json()}};
                break;
            }
        }
    for (Obj d = 0; d < alpha.target()->num_objects() && r.flat; ++d)
        if (!is_filtered(opposite(*comma_under(d, alpha).cat))) {
            r.flat = false;
            if (r.witness.is_null()) r.witness = {{"comma_object", d}};
        }
    if (reduced) r.mode = "principal";
    return r;
}

CocontinuityReport is_cocontinuous(const CFunctor& beta, const Site& source, const Site& target, std::uint64_t node_budget) {
    CocontinuityReport r;
    const FinCat& c = *beta.source();
    bool reduced = false;
    for (Obj x = 0; x < c.num_objects() && r.ok; ++x) {
        const auto& into = c.into(x);
        for (const Sieve& s : covers_or_principal(target, beta(x), node_budget, reduced)) {
            Sieve::Bits bits(into.size());
            for (std::size_t i = 0; i < into.size(); ++i)
                if (s.contains(beta.map(into[i]))) bits.set(i);
            if (!source.topology.covers(Sieve(source.cat, x, std::move(bits)))) {
                r.ok = false;
                r.witness = {{"object", x}, {"sieve", s.to_json()}};
                break;
            }
        }
    }
    if (reduced) r.mode = "principal";
    return r;
}

// ---------------------------------------------------------------------------
// Presheaves from G-sets

Presheaf gset_presheaf(const GSet& m, const CatPtr& group_cat) {
    std::vector<std::vector<Item>> maps(group_cat->num_morphisms());
    for (Mor g = 0; g < maps.size(); ++g)
        for (std::size_t a = 0; a < m.size(); ++a) maps[g].push_back(static_cast<Item>(m.act(a, g)));
    return Presheaf(group_cat, {m.size()}, std::move(maps));
}

GSet presheaf_gset(const GroupPtr& g, const Presheaf& f) {
    std::vector<std::vector<std::size_t>> act(f.size(0), std::vector<std::size_t>(g->order()));
    for (std::size_t a = 0; a < f.size(0); ++a)
        for (Elem e = 0; e < g->order(); ++e) act[a][e] = f.at(e, static_cast<Item>(a));
    return GSet(g, act);
}

Presheaf fixed_point_sheaf(const GSet& m, const CatExtension& e) {
    const FinCat& c = *e.target;
    const std::size_t n = c.num_objects();
    std::vector<std::vector<std::size_t>> fixed(n);
    std::vector<std::vector<Item>> position(n, std::vector<Item>(m.size(), 0));
    std::vector<std::size_t> sizes(n);
    for (Obj x = 0; x < n; ++x) {
        fixed[x] = fixed_points(m, e.kernels[x]);
        sizes[x] = fixed[x].size();
        for (Item i = 0; i < fixed[x].size(); ++i) position[x][fixed[x][i]] = i;
    }
    std::vector<std::vector<Item>> maps(c.num_morphisms());
    for (Mor u = 0; u < c.num_morphisms(); ++u)
        for (std::size_t a : fixed[c.cod(u)]) maps[u].push_back(position[c.dom(u)][m.act(a, e.representative[u])]);
    return Presheaf(e.target, std::move(sizes), std::move(maps));
}

GSet evaluate_at_x0(const Presheaf& f, const CatExtension& e, Obj x0) {
    if (e.kernels[x0].size() != 1)
        throw InputError("evaluate_at_x0 needs a trivial kernel at the initial object");
    const FiniteGroup& g = *e.source.group();
    std::vector<std::vector<std::size_t>> act(f.size(x0), std::vector<std::size_t>(g.order()));
    for (Elem h = 0; h < g.order(); ++h) {
        const Mor u = e.rho.map(e.source.encode(x0, x0, h));
        for (std::size_t a = 0; a < f.size(x0); ++a) act[a][h] = f.at(u, static_cast<Item>(a));
    }
    return GSet(e.source.group(), act);
}

// ---------------------------------------------------------------------------
// Bundles

GroupSiteBundle make_bundle(const GroupPtr& g, PosetChoice poset, std::size_t p, QuotientChoice quotient, Exec exec) {
    std::vector<Subgroup> family = poset == PosetChoice::AllSubgroups ? enumerate_subgroups(g) : p_subgroups(g, p);
    return make_family_bundle(g, std::move(family),
                              poset == PosetChoice::AllSubgroups ? "all-subgroups" : "p-subgroups:" + std::to_string(p),
                              quotient, exec);
}

GroupSiteBundle make_family_bundle(const GroupPtr& g, std::vector<Subgroup> family, std::string poset_name,
                                   QuotientChoice quotient, Exec exec) {
    SubgroupPoset sp = subgroup_poset(g, std::move(family));
    TransporterCat t = transporter_category(sp.poset, exec);
    std::vector<std::string> labels;
    CatExtension ext = [&] {
        if (quotient == QuotientChoice::Transporter) return trivial_extension(t);
        for (const Subgroup& h : sp.subgroups) labels.push_back(h.label() + "\\G");
        return orbit_quotient(t, sp.subgroups, labels);
    }();
    CatPtr gcat = group_category(g);
    CFunctor pi = pi_functor(t, gcat);
    const std::optional<Obj> initial = sp.poset.minimum() ? std::optional<Obj>(static_cast<Obj>(*sp.poset.minimum())) : std::nullopt;
    Site pg{t.cat, Topology::atomic(), initial};
    return GroupSiteBundle{g,
                           std::move(poset_name),
                           quotient == QuotientChoice::Orbit ? "orbit" : "transporter",
                           sp.subgroups,
                           gcat,
                           ext,
                           std::move(pi),
                           Site{gcat, Topology::atomic(), Obj{0}},
                           std::move(pg),
                           Site{ext.target, Topology::atomic(), initial},
                           initial.value_or(0)};
}

Presheaf upsilon_push(const GSet& m, const GroupSiteBundle& b, std::uint64_t node_budget) {
    return right_kan(b.extension.rho, restrict(b.pi, gset_presheaf(m, b.group_cat)), node_budget).value;
}

GSet upsilon_pull(const Presheaf& f, const GroupSiteBundle& b, const SheafOptions& options) {
    const Presheaf sheaf = sheafify(restrict(b.extension.rho, f), b.pg_site, options).value;
    return presheaf_gset(b.group, left_kan(b.pi, sheaf).value);
}

std::vector<GSet> gset_classes(const GroupPtr& g, std::size_t bound) {
    std::set<Subgroup> types;
    for (const Subgroup& h : enumerate_subgroups(g)) types.insert(conjugacy_representative(h));
    const std::vector<Subgroup> type_list(types.begin(), types.end());
    std::vector<GSet> orbit_sets;
    std::vector<std::size_t> orbit_size;
    for (const Subgroup& h : type_list) {
        orbit_sets.push_back(coset_gset(h));
        orbit_size.push_back(g->order() / h.size());
    }
    std::vector<std::pair<std::vector<std::size_t>, GSet>> found;
    std::vector<std::size_t> chosen;
    auto extend = [&](auto&& self, std::size_t from, std::size_t total, const GSet& current) -> void {
        found.emplace_back(chosen, current);
        for (std::size_t i = from; i < type_list.size(); ++i) {
            if (total + orbit_size[i] > bound) continue;
            chosen.push_back(i);
            self(self, i, total + orbit_size[i], GSet::disjoint_union(current, orbit_sets[i]));
            chosen.pop_back();
        }
    };
    extend(extend, 0, 0, GSet::empty(g));
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
        return a.first < b.first;
    });
    std::vector<GSet> out;
    for (auto& f : found) out.push_back(std::move(f.second));
    return out;
}

namespace {

GSet random_gset(const GroupPtr& g, std::mt19937_64& rng) {
    const auto subgroups = enumerate_subgroups(g);
    std::uniform_int_distribution<std::size_t> pick(0, subgroups.size() - 1);
    GSet m = GSet::empty(g);
    const std::size_t orbits = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    for (std::size_t i = 0; i < orbits; ++i) m = GSet::disjoint_union(m, coset_gset(subgroups[pick(rng)]));
    return m;
}

}  // namespace

Presheaf corpus_presheaf(const GroupSiteBundle& b, std::mt19937_64& rng) {
    const CatPtr& c = b.extension.target;
    const std::size_t kind = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    if (kind <= 1) return random_presheaf(c, rng);
    const Presheaf sheaf = fixed_point_sheaf(random_gset(b.group, rng), b.extension);
    if (kind == 2) return sheaf;
    return coproduct(sheaf, random_presheaf(c, rng, RandomPresheafOptions{1, 2, 0.3}));
}

nlohmann::json verify_artin(const GroupSiteBundle& b, const ArtinOptions& options) {
    if (!b.pg_site.initial_object) throw InputError("verification needs a subgroup family with a least member");
    const std::size_t bound = options.size_bound ? options.size_bound : b.group->order();
    const std::uint64_t nat_budget = options.sheaf.nat_budget;
    nlohmann::json report{{"group_order", b.group->order()},
                          {"poset", b.poset_name},
                          {"quotient", b.quotient_name},
                          {"size_bound", bound},
                          {"seed", options.seed},
                          {"corpus", options.corpus}};
    bool ok = true;

    // (a) every G-set class goes to a sheaf and comes back.
    const auto classes = gset_classes(b.group, bound);
    std::map<std::size_t, std::size_t> by_size;
    nlohmann::json failures = nlohmann::json::array();
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const GSet& m = classes[i];
        ++by_size[m.size()];
        const Presheaf pushed = upsilon_push(m, b, nat_budget);
        const bool sheaf = is_sheaf(pushed, b.c_site, options.sheaf).ok;
        const bool matches = find_presheaf_isomorphism(pushed, fixed_point_sheaf(m, b.extension), nat_budget).has_value();
        const bool back = gsets_isomorphic(upsilon_pull(pushed, b, options.sheaf), m);
        const bool at_x0 = gsets_isomorphic(evaluate_at_x0(pushed, b.extension, b.x0), m);
        if (!(sheaf && matches && back && at_x0)) {
            nlohmann::json types = nlohmann::json::array();
            for (const Subgroup& h : orbit_type(m)) types.push_back(h.label());
            failures.push_back({{"class", i}, {"orbit_types", types}, {"is_sheaf", sheaf},
                                {"matches_fixed_points", matches}, {"roundtrip", back}, {"value_at_x0", at_x0}});
        }
    }
    nlohmann::json sizes = nlohmann::json::object();
    for (auto [s, k] : by_size) sizes[std::to_string(s)] = k;
    report["gsets"] = {{"classes", classes.size()}, {"by_size", sizes}, {"failures", failures}, {"ok", failures.empty()}};
    ok = ok && failures.empty();

    // (b) sheaves come back naturally isomorphic; (c) sheafification is F_{F(x0)}.
    std::mt19937_64 rng(options.seed);
    nlohmann::json sheaf_failures = nlohmann::json::array(), plus_failures = nlohmann::json::array();
    for (std::size_t i = 0; i < options.corpus; ++i) {
        const Presheaf p = corpus_presheaf(b, rng);
        const Presheaf f = sheafify(p, b.c_site, options.sheaf).value;
        const Presheaf back = upsilon_push(upsilon_pull(f, b, options.sheaf), b, nat_budget);
        const auto iso = find_presheaf_isomorphism(back, f, nat_budget);
        if (!iso || !is_natural(back, f, *iso) || !is_componentwise_bijective(back, f, *iso))
            sheaf_failures.push_back({{"item", i}, {"sizes", f.sizes()}});
        const Presheaf expected = fixed_point_sheaf(evaluate_at_x0(p, b.extension, b.x0), b.extension);
        if (expected.sizes() != f.sizes() || !find_presheaf_isomorphism(f, expected, nat_budget))
            plus_failures.push_back({{"item", i}, {"sizes", f.sizes()}, {"expected", expected.sizes()}});
    }
    report["sheaves"] = {{"tested", options.corpus}, {"failures", sheaf_failures}, {"ok", sheaf_failures.empty()}};
    report["sheafification"] = {{"tested", options.corpus}, {"failures", plus_failures}, {"ok", plus_failures.empty()}};
    ok = ok && sheaf_failures.empty() && plus_failures.empty();

    // On G itself every presheaf is a sheaf.
    std::size_t g_tested = 0;
    nlohmann::json g_failures = nlohmann::json::array();
    for (const GSet& m : gset_classes(b.group, 4)) {
        ++g_tested;
        if (!is_sheaf(gset_presheaf(m, b.group_cat), b.g_site, options.sheaf).ok) g_failures.push_back(g_tested - 1);
    }
    report["one_object"] = {{"tested", g_tested}, {"failures", g_failures}, {"ok", g_failures.empty()}};
    ok = ok && g_failures.empty();
    report["ok"] = ok;
    return report;
}

}  // namespace finsheaf
