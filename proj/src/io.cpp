#include "finsheaf/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace finsheaf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("bad field '") + key + "': " + e.what());
    }
}

fs::path resolve_path(const std::string& p, const fs::path& base_dir) {
    const fs::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
}

// Inline document, or a path string relative to base_dir.
json deref(const json& ref, const fs::path& base_dir) {
    if (ref.is_string()) return load_json(resolve_path(ref.get<std::string>(), base_dir));
    return ref;
}

std::size_t parse_size(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(text, &pos);
        if (pos == text.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw InputError("bad " + what + " '" + text + "'");
}

}  // namespace

void check_schema(const json& j, const std::string& expected) {
    if (!j.is_object()) throw InputError("expected a JSON object for " + expected);
    if (j.contains("schema") && j["schema"] != expected)
        throw InputError("schema mismatch: expected " + expected + ", got " + j["schema"].dump());
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void save_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::optional<FiniteGroup> builtin_group(const std::string& name) {
    auto number = [&](std::size_t prefix) -> std::optional<std::size_t> {
        const std::string digits = name.substr(prefix);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return std::nullopt;
        return parse_size(digits, "group name");
    };
    if (name == "trivial" || name == "1") return FiniteGroup::trivial();
    if (name == "v4" || name == "klein") return FiniteGroup::from_permutations(4, {{1, 0, 3, 2}, {2, 3, 0, 1}});
    const std::pair<const char*, FiniteGroup (*)(std::size_t)> families[] = {
        {"cyclic:", FiniteGroup::cyclic}, {"symmetric:", FiniteGroup::symmetric}, {"dihedral:", FiniteGroup::dihedral},
        {"z", FiniteGroup::cyclic},       {"s", FiniteGroup::symmetric},          {"d", FiniteGroup::dihedral}};
    for (const auto& [prefix, make] : families) {
        const std::string p = prefix;
        if (name.size() <= p.size() || std::tolower(static_cast<unsigned char>(name[0])) != p[0]) continue;
        if (name.compare(1, p.size() - 1, p, 1) != 0) continue;
        if (auto n = number(p.size())) return make(*n);
    }
    return std::nullopt;
}

GroupPtr resolve_group(const json& ref, const fs::path& base_dir) {
    if (ref.is_string()) {
        const std::string name = ref.get<std::string>();
        if (auto g = builtin_group(name)) return share(std::move(*g));
        if (!fs::exists(resolve_path(name, base_dir)))
            throw InputError("unknown group '" + name + "' (not a builtin name or a file)");
    }
    return share(group_from_json(deref(ref, base_dir)));
}

json group_to_json(const FiniteGroup& g) {
    return {{"schema", schema::group}, {"order", g.order()}, {"mul", g.table()}, {"labels", g.labels()}};
}

FiniteGroup group_from_json(const json& j) {
    check_schema(j, schema::group);
    if (j.contains("generators")) {
        const auto degree = get_field<std::size_t>(j, "degree");
        return FiniteGroup::from_permutations(degree, get_field<std::vector<std::vector<std::size_t>>>(j, "generators"));
    }
    auto mul = get_field<std::vector<std::vector<Elem>>>(j, "mul");
    if (j.contains("order") && get_field<std::size_t>(j, "order") != mul.size())
        throw InputError("order does not match the multiplication table");
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = get_field<std::vector<std::string>>(j, "labels");
    return FiniteGroup::from_table(mul, std::move(labels));
}

json gset_to_json(const GSet& m) { return {{"schema", schema::gset}, {"size", m.size()}, {"act", m.table()}}; }

GSet gset_from_json(const GroupPtr& g, const json& j) {
    check_schema(j, schema::gset);
    auto act = get_field<std::vector<std::vector<std::size_t>>>(j, "act");
    if (j.contains("size") && get_field<std::size_t>(j, "size") != act.size())
        throw InputError("size does not match the action table");
    return GSet(g, act);
}

json subgroups_to_json(const std::vector<Subgroup>& family) {
    json list = json::array();
    for (const Subgroup& h : family) list.push_back(h.elements());
    return {{"schema", schema::subgroups}, {"subgroups", list}};
}

std::vector<Subgroup> subgroups_from_json(const GroupPtr& g, const json& j) {
    check_schema(j, schema::subgroups);
    std::vector<Subgroup> out;
    for (auto& elems : get_field<std::vector<std::vector<Elem>>>(j, "subgroups")) {
        for (Elem x : elems)
            if (x >= g->order()) throw InputError("subgroup element out of range");
        out.push_back(Subgroup::from_elements(g, elems));
    }
    return out;
}

json category_to_json(const FinCat& c) {
    json morphisms = json::array();
    for (Mor f = 0; f < c.num_morphisms(); ++f)
        morphisms.push_back({{"dom", c.dom(f)}, {"cod", c.cod(f)}, {"label", c.morphism_label(f)}});
    json comp = json::array();
    for (Mor f = 0; f < c.num_morphisms(); ++f) {
        if (c.is_identity(f)) continue;
        for (Mor g : c.into(c.dom(f)))
            if (!c.is_identity(g)) comp.push_back({f, g, c.compose_unchecked(f, g)});
    }
    return {{"schema", schema::category}, {"objects", c.num_objects()}, {"object_labels", c.object_labels()},
            {"morphisms", morphisms},        {"identity", c.identities()},  {"comp", comp}};
}

FinCat category_from_json(const json& j, Exec exec) {
    check_schema(j, schema::category);
    const auto n = get_field<std::size_t>(j, "objects");
    std::vector<Arrow> arrows;
    std::vector<std::string> mlabels;
    for (const json& m : get_field<json>(j, "morphisms")) {
        arrows.push_back({get_field<Obj>(m, "dom"), get_field<Obj>(m, "cod")});
        if (m.contains("label")) mlabels.push_back(get_field<std::string>(m, "label"));
    }
    if (!mlabels.empty() && mlabels.size() != arrows.size()) throw InputError("either every morphism has a label or none");
    const auto identity = get_field<std::vector<Mor>>(j, "identity");
    std::vector<std::string> olabels;
    if (j.contains("object_labels")) olabels = get_field<std::vector<std::string>>(j, "object_labels");

    const std::size_t m = arrows.size();
    std::vector<bool> is_id(m, false);
    for (Mor f : identity) {
        if (f >= m) throw InputError("identity index out of range");
        is_id[f] = true;
    }
    std::map<std::pair<Mor, Mor>, Mor> table;
    for (const json& t : get_field<json>(j, "comp")) {
        const auto triple = t.get<std::vector<Mor>>();
        if (triple.size() != 3 || triple[0] >= m || triple[1] >= m || triple[2] >= m)
            throw InputError("composition entries must be [f, g, f∘g] with valid indices");
        if (!table.emplace(std::pair{triple[0], triple[1]}, triple[2]).second)
            throw InputError("composition entry given twice");
    }
    auto compose = [&](Mor f, Mor g) -> Mor {
        if (is_id[f]) return g;
        if (is_id[g]) return f;
        const auto it = table.find({f, g});
        if (it == table.end())
            throw InputError("missing composition entry for [" + std::to_string(f) + ", " + std::to_string(g) + "]");
        return it->second;
    };
    return FinCat::make(n, std::move(arrows), identity, compose, Validation::Full, exec, std::move(olabels),
                        std::move(mlabels));
}

json presheaf_to_json(const Presheaf& f) {
    return {{"schema", schema::presheaf}, {"sizes", f.sizes()}, {"maps", f.maps()}};
}

Presheaf presheaf_from_json(const CatPtr& cat, const json& j) {
    check_schema(j, schema::presheaf);
    auto sizes = get_field<std::vector<std::size_t>>(j, "sizes");
    auto maps = get_field<std::vector<std::vector<Item>>>(j, "maps");
    if (sizes.size() != cat->num_objects()) throw InputError("presheaf needs one size per object");
    if (maps.size() != cat->num_morphisms()) throw InputError("presheaf needs one map per morphism");
    for (Mor u = 0; u < maps.size(); ++u) {
        if (maps[u].size() != sizes[cat->cod(u)]) throw InputError("map of morphism " + std::to_string(u) + " has the wrong length");
        for (Item a : maps[u])
            if (a >= sizes[cat->dom(u)]) throw InputError("map of morphism " + std::to_string(u) + " leaves its target");
    }
    return Presheaf(cat, std::move(sizes), std::move(maps));
}

json nat_to_json(const NatTrans& eta) { return {{"components", eta.components}}; }

json site_to_json(const Site& s) {
    json j{{"schema", schema::site}, {"category", category_to_json(*s.cat)}};
    switch (s.topology.kind()) {
        case TopologyKind::Trivial: j["topology"] = "trivial"; break;
        case TopologyKind::Atomic: j["topology"] = "atomic"; break;
        case TopologyKind::Explicit: {
            json per_object = json::array();
            for (const auto& covers : s.topology.explicit_covers()) {
                json list = json::array();
                for (const Sieve& c : covers) list.push_back(c.morphisms());
                per_object.push_back(list);
            }
            j["topology"] = {{"explicit", per_object}};
        }
    }
    if (s.initial_object) j["initial_object"] = *s.initial_object;
    return j;
}

Site site_from_json(const json& j, const fs::path& base_dir, Exec exec) {
    check_schema(j, schema::site);
    const CatPtr cat = share(category_from_json(deref(get_field<json>(j, "category"), base_dir), exec));
    const json topo = j.value("topology", json("atomic"));
    std::optional<Obj> initial;
    if (j.contains("initial_object")) {
        initial = get_field<Obj>(j, "initial_object");
        if (*initial >= cat->num_objects()) throw InputError("initial_object out of range");
        for (Obj x = 0; x < cat->num_objects(); ++x)
            if (cat->hom(*initial, x).empty()) throw InputError("declared initial object has no morphism to every object");
    }
    if (topo == "trivial") return Site{cat, Topology::trivial(), initial};
    if (topo == "atomic") return Site{cat, Topology::atomic(), initial};
    if (topo.is_object() && topo.contains("explicit")) {
        const json& per_object = topo["explicit"];
        if (!per_object.is_array() || per_object.size() != cat->num_objects())
            throw InputError("explicit topology needs one list of sieves per object");
        std::vector<std::vector<Sieve>> covers(cat->num_objects());
        for (Obj x = 0; x < cat->num_objects(); ++x)
            for (const json& s : per_object[x]) {
                const auto gens = s.get<std::vector<Mor>>();
                for (Mor f : gens)
                    if (f >= cat->num_morphisms() || cat->cod(f) != x)
                        throw InputError("covering sieve on object " + std::to_string(x) + " lists a foreign morphism");
                const Sieve sieve = generate_sieve(cat, x, gens);
                if (sieve.size() != gens.size()) throw InputError("covering family on object " + std::to_string(x) + " is not a sieve");
                covers[x].push_back(sieve);
            }
        return Site{cat, Topology::explicit_family(std::move(covers)), initial};
    }
    throw InputError("topology must be \"trivial\", \"atomic\" or {\"explicit\": ...}");
}

BundleDescriptor descriptor_from_json(const json& j) {
    check_schema(j, schema::bundle);
    BundleDescriptor d;
    d.group = get_field<json>(j, "group");
    if (j.contains("poset")) d.poset = j["poset"];
    if (j.contains("quotient")) d.quotient = get_field<std::string>(j, "quotient");
    return d;
}

json descriptor_to_json(const BundleDescriptor& d) {
    return {{"schema", schema::bundle}, {"group", d.group}, {"poset", d.poset}, {"quotient", d.quotient}};
}

GroupSiteBundle build_bundle(const BundleDescriptor& d, const fs::path& base_dir, Exec exec) {
    const GroupPtr g = resolve_group(d.group, base_dir);
    QuotientChoice q;
    if (d.quotient == "orbit") q = QuotientChoice::Orbit;
    else if (d.quotient == "transporter") q = QuotientChoice::Transporter;
    else throw InputError("quotient must be \"transporter\" or \"orbit\"");

    const json& p = d.poset;
    if (p == "all-subgroups") return make_bundle(g, PosetChoice::AllSubgroups, 0, q, exec);
    if (p.is_object() && p.contains("p-subgroups")) return make_bundle(g, PosetChoice::PSubgroups, get_field<std::size_t>(p, "p-subgroups"), q, exec);
    if (p.is_string()) {
        const std::string s = p.get<std::string>();
        if (s.rfind("p-subgroups:", 0) == 0)
            return make_bundle(g, PosetChoice::PSubgroups, parse_size(s.substr(12), "prime"), q, exec);
        return make_family_bundle(g, subgroups_from_json(g, load_json(resolve_path(s, base_dir))), s, q, exec);
    }
    if (p.is_object()) return make_family_bundle(g, subgroups_from_json(g, p), "custom", q, exec);
    throw InputError("poset must be \"all-subgroups\", {\"p-subgroups\": p} or a subgroup-family file");
}

json ring_to_json(const FiniteRing& r) {
    return r.is_field() ? json{{"p", r.modulus()}} : json{{"mod", r.modulus()}};
}

FiniteRing ring_from_json(const json& j) {
    if (j.is_string()) return parse_ring(j.get<std::string>());
    if (j.contains("p")) return FiniteRing::prime_field(get_field<Scalar>(j, "p"));
    if (j.contains("mod")) return FiniteRing(get_field<Scalar>(j, "mod"));
    throw InputError("ring must be {\"p\": p} or {\"mod\": n}");
}

json module_to_json(const RGModule& m) {
    json action = json::object();
    for (Elem g = 0; g < m.group()->order(); ++g) {
        json rows = json::array();
        for (std::size_t i = 0; i < m.rank(); ++i) rows.push_back(m.action(g).row(i));
        action[m.group()->label(g)] = rows;
    }
    return {{"schema", schema::module}, {"ring", ring_to_json(m.ring())}, {"rank", m.rank()}, {"action", action}};
}

RGModule module_from_json(const GroupPtr& g, const json& j) {
    check_schema(j, schema::module);
    const FiniteRing r = ring_from_json(get_field<json>(j, "ring"));
    const auto d = get_field<std::size_t>(j, "rank");
    const json action = get_field<json>(j, "action");
    if (!action.is_object()) throw InputError("action must map element labels to matrices");
    std::vector<std::optional<Matrix>> mats(g->order());
    for (const auto& [key, rows] : action.items()) {
        std::optional<Elem> e = g->find(key);
        if (!e && !key.empty() && std::all_of(key.begin(), key.end(), ::isdigit)) e = static_cast<Elem>(parse_size(key, "element"));
        if (!e || *e >= g->order()) throw InputError("unknown group element '" + key + "'");
        auto rs = rows.get<std::vector<Row>>();
        if (rs.size() != d) throw InputError("matrix for '" + key + "' needs " + std::to_string(d) + " rows");
        mats[*e] = Matrix::from_rows(rs, d);
    }
    std::vector<Matrix> act;
    for (Elem e = 0; e < g->order(); ++e) {
        if (!mats[e]) throw InputError("no matrix for element '" + g->label(e) + "'");
        act.push_back(*mats[e]);
    }
    return RGModule(g, r, d, std::move(act));
}

std::string to_dot(const FinCat& c, const std::string& name) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out + '"';
    };
    std::ostringstream out;
    out << "digraph " << quote(name) << " {\n";
    for (Obj x = 0; x < c.num_objects(); ++x) out << "  " << x << " [label=" << quote(c.object_label(x)) << "];\n";
    for (Mor f = 0; f < c.num_morphisms(); ++f)
        if (!c.is_identity(f))
            out << "  " << c.dom(f) << " -> " << c.cod(f) << " [label=" << quote(c.morphism_label(f)) << "];\n";
    out << "}\n";
    return out.str();
}

}  // namespace finsheaf
