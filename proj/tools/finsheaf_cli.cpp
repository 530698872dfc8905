// finsheaf: build group sites, check sheaf conditions, run the verifiers.
//
// Exit codes: 0 pass, 1 mathematical failure, 2 budget exceeded, 3 input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsheaf/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace finsheaf;

namespace {

enum Exit { kPass = 0, kFail = 1, kBudget = 2, kInput = 3 };

struct Config {
    std::string group, poset = "all-subgroups", quotient = "orbit", bundle_file;
    std::string site_file, category_file, on = "c";
    std::string out, format = "json";
    std::uint64_t seed = 20240601;
    std::uint64_t sieve_budget = 1'000'000, nat_budget = 1'000'000;
    std::size_t cap = 10'000;
    bool parallel = false;
};

std::uint64_t env_or(const char* name, std::uint64_t fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        std::size_t pos = 0;
        const auto parsed = std::stoull(v, &pos);
        if (pos == std::string(v).size() && parsed > 0) return parsed;
    } catch (const std::logic_error&) {
    }
    throw InputError(std::string(name) + " must be a positive integer");
}

Exec exec_of(const Config& c) { return c.parallel ? Exec::Parallel : Exec::Serial; }

SheafOptions sheaf_options(const Config& c, SheafStrategy strategy = SheafStrategy::Auto) {
    return SheafOptions{strategy, c.sieve_budget, c.nat_budget, exec_of(c)};
}

GroupSiteBundle load_bundle(const Config& c) {
    if (!c.bundle_file.empty()) {
        const fs::path p(c.bundle_file);
        return build_bundle(descriptor_from_json(load_json(p)), p.parent_path(), exec_of(c));
    }
    if (c.group.empty()) throw InputError("no bundle given: pass --group or --bundle");
    BundleDescriptor d;
    d.group = c.group;
    d.poset = c.poset;
    d.quotient = c.quotient;
    return build_bundle(d, {}, exec_of(c));
}

BundleDescriptor descriptor_of(const Config& c) {
    if (!c.bundle_file.empty()) return descriptor_from_json(load_json(c.bundle_file));
    return BundleDescriptor{json(c.group), json(c.poset), c.quotient};
}

const Site& pick_site(const GroupSiteBundle& b, const std::string& on) {
    if (on == "c") return b.c_site;
    if (on == "pg") return b.pg_site;
    if (on == "g") return b.g_site;
    throw InputError("--on must be c, pg or g");
}

// The site a command works on: --site file, a bare --category (atomic), or a bundle site.
struct Target {
    std::optional<GroupSiteBundle> bundle;
    Site site;
    std::string name;
};

Target load_target(const Config& c) {
    if (!c.site_file.empty()) {
        const fs::path p(c.site_file);
        return {std::nullopt, site_from_json(load_json(p), p.parent_path(), exec_of(c)), p.filename().string()};
    }
    if (!c.category_file.empty()) {
        const CatPtr cat = share(category_from_json(load_json(c.category_file), exec_of(c)));
        return {std::nullopt, Site{cat, Topology::atomic(), std::nullopt}, fs::path(c.category_file).filename().string()};
    }
    GroupSiteBundle b = load_bundle(c);
    Site s = pick_site(b, c.on);
    return {std::move(b), std::move(s), c.on};
}

json envelope(const Config& c, const std::string& command) {
    return {{"schema", schema::report},
            {"command", command},
            {"seed", c.seed},
            {"budgets", {{"sieve_nodes", c.sieve_budget}, {"nat_nodes", c.nat_budget}, {"materialize_cap", c.cap}}}};
}

json site_summary(const Site& s) {
    json j{{"objects", s.cat->num_objects()}, {"morphisms", s.cat->num_morphisms()},
           {"object_labels", s.cat->object_labels()}, {"topology", s.topology.name()}};
    if (s.initial_object) j["initial_object"] = *s.initial_object;
    return j;
}

void render_text(std::ostream& out, const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_text(out, v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) render_text(out, j[i], prefix + "[" + std::to_string(i) + "]");
    } else {
        out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

void emit(const Config& c, const json& report) {
    std::ostringstream text;
    if (c.format == "text") render_text(text, report, "");
    else text << report.dump(2) << '\n';
    if (c.out.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream f(c.out);
        if (!f) throw InputError("cannot write " + c.out);
        f << text.str();
    }
}

int finish(const Config& c, json report) {
    const bool ok = report.value("ok", true);
    emit(c, report);
    return ok ? kPass : kFail;
}

// Subcommands

int cmd_build(const Config& c, const std::string& dir, bool dot) {
    json report = envelope(c, "build");
    if (!c.category_file.empty() || !c.site_file.empty()) {
        const Target t = load_target(c);
        report["site"] = site_summary(t.site);
        report["ok"] = true;
        return finish(c, report);
    }
    const GroupSiteBundle b = load_bundle(c);
    report["group_order"] = b.group->order();
    report["poset"] = b.poset_name;
    report["quotient"] = b.quotient_name;
    json family = json::array();
    for (const Subgroup& h : b.subgroups) family.push_back(h.label());
    report["subgroups"] = family;
    report["sites"] = {{"g", site_summary(b.g_site)}, {"pg", site_summary(b.pg_site)}, {"c", site_summary(b.c_site)}};
    if (!dir.empty()) {
        fs::create_directories(dir);
        const fs::path d(dir);
        save_json(d / "bundle.json", descriptor_to_json(descriptor_of(c)));
        save_json(d / "group.json", group_to_json(*b.group));
        save_json(d / "g_site.json", site_to_json(b.g_site));
        save_json(d / "pg_site.json", site_to_json(b.pg_site));
        save_json(d / "c_site.json", site_to_json(b.c_site));
        if (dot) {
            std::ofstream(d / "pg.dot") << to_dot(*b.pg_site.cat, "PG");
            std::ofstream(d / "c.dot") << to_dot(*b.c_site.cat, "C");
        }
        report["written"] = dir;
    }
    report["ok"] = true;
    return finish(c, report);
}

struct CheckFlags {
    bool topology = false, ore = false, continuity = false;
    std::string sheaf_file, module_file, strategy = "auto";
};

SheafStrategy parse_strategy(const std::string& s) {
    if (s == "auto") return SheafStrategy::Auto;
    if (s == "fast") return SheafStrategy::Fast;
    if (s == "definitional") return SheafStrategy::Definitional;
    throw InputError("--strategy must be auto, fast or definitional");
}

int cmd_check(const Config& c, CheckFlags f) {
    const Target t = load_target(c);
    if (!f.topology && !f.ore && !f.continuity && f.sheaf_file.empty() && f.module_file.empty()) {
        f.topology = f.ore = true;
        f.continuity = t.bundle.has_value();
    }
    json report = envelope(c, "check");
    report["site"] = t.name;
    bool ok = true;
    if (f.topology) {
        const AxiomReport a = check_topology_axioms(t.site, c.sieve_budget, exec_of(c));
        const AxiomReport trivial = check_topology_axioms(Site{t.site.cat, Topology::trivial(), t.site.initial_object},
                                                          c.sieve_budget, exec_of(c));
        report["topology"] = {{t.site.topology.name(), a.to_json()}, {"trivial", trivial.to_json()}};
        ok = ok && a.ok && trivial.ok;
    }
    if (f.ore) {
        const OreResult o = ore_condition(*t.site.cat, exec_of(c));
        json j{{"ok", o.holds}};
        if (o.cospan) j["witness"] = {{"f", o.cospan->first}, {"g", o.cospan->second},
                                      {"f_label", t.site.cat->morphism_label(o.cospan->first)},
                                      {"g_label", t.site.cat->morphism_label(o.cospan->second)}};
        report["ore"] = j;
        ok = ok && o.holds;
    }
    if (f.continuity) {
        if (!t.bundle) throw InputError("--continuity needs a bundle");
        const GroupSiteBundle& b = *t.bundle;
        const ContinuityReport pc = is_continuous(b.pi, b.pg_site, b.g_site, c.nat_budget);
        const CocontinuityReport pcc = is_cocontinuous(b.pi, b.pg_site, b.g_site, c.sieve_budget);
        const CocontinuityReport rcc = is_cocontinuous(b.extension.rho, b.pg_site, b.c_site, c.sieve_budget);
        report["continuity"] = {{"pi_continuous", pc.to_json()},
                                {"pi_cocontinuous", pcc.to_json()},
                                {"rho_cocontinuous", rcc.to_json()},
                                {"ok", pc.continuous() && pcc.ok && rcc.ok}};
        ok = ok && pc.continuous() && pcc.ok && rcc.ok;
    }
    if (!f.sheaf_file.empty()) {
        const Presheaf p = presheaf_from_json(t.site.cat, load_json(f.sheaf_file));
        const SheafReport s = is_sheaf(p, t.site, sheaf_options(c, parse_strategy(f.strategy)));
        json j = s.to_json();
        if (!s.ok && s.witness.contains("object"))
            j["witness"]["object_label"] = t.site.cat->object_label(s.witness["object"].get<Obj>());
        report["sheaf"] = j;
        ok = ok && s.ok;
    }
    if (!f.module_file.empty()) {
        if (!t.bundle) throw InputError("--module needs a bundle");
        const GroupSiteBundle& b = *t.bundle;
        const RGModule m = module_from_json(b.group, load_json(f.module_file));
        const ModulePresheaf mp = module_fixed_point_sheaf(m, b.extension);
        const ModuleSheafReport s = is_module_sheaf(mp, b.c_site, c.cap, sheaf_options(c));
        report["module_sheaf"] = s.to_json();
        report["coherent"] = coherent_report(mp);
        ok = ok && s.ok;
    }
    report["ok"] = ok;
    return finish(c, report);
}

struct VerifyFlags {
    bool artin = false, module = false;
    std::size_t bound = 0, rank_bound = 0, corpus = 50, random_modules = 3;
    std::vector<std::string> rings{"F2"};
};

int cmd_verify(const Config& c, VerifyFlags v) {
    if (!v.artin && !v.module) v.artin = true;
    const GroupSiteBundle b = load_bundle(c);
    json report = envelope(c, "verify");
    bool ok = true;
    if (v.artin) {
        ArtinOptions o;
        o.size_bound = v.bound;
        o.corpus = v.corpus;
        o.seed = c.seed;
        o.sheaf = sheaf_options(c);
        report["artin"] = verify_artin(b, o);
        ok = ok && report["artin"]["ok"].get<bool>();
    }
    if (v.module) {
        ModuleOptions o;
        o.rank_bound = v.rank_bound;
        o.random_modules = v.random_modules;
        o.seed = c.seed;
        o.cap = c.cap;
        o.sheaf = sheaf_options(c);
        json per_ring = json::object();
        for (const std::string& r : v.rings) {
            const FiniteRing ring = parse_ring(r);
            per_ring[ring.name()] = verify_module_equivalence(b, ring, o);
            ok = ok && per_ring[ring.name()]["ok"].get<bool>();
        }
        report["module"] = per_ring;
    }
    report["ok"] = ok;
    return finish(c, report);
}

int cmd_sheafify(const Config& c, const std::string& presheaf_file, bool general) {
    const Target t = load_target(c);
    const Presheaf p = presheaf_from_json(t.site.cat, load_json(presheaf_file));
    const SheafOptions o = sheaf_options(c);
    const PlusResult r = general ? [&] {
        const PlusResult once = plus_construction_general(p, t.site, o);
        const PlusResult twice = plus_construction_general(once.value, t.site, o);
        return PlusResult{twice.value, compose_nat(twice.unit, once.unit)};
    }()
                                 : sheafify(p, t.site, o);
    json report = envelope(c, "sheafify");
    report["site"] = t.name;
    report["input_sizes"] = p.sizes();
    report["sheaf"] = presheaf_to_json(r.value);
    report["unit"] = nat_to_json(r.unit);
    const SheafReport check = is_sheaf(r.value, t.site, o);
    report["is_sheaf"] = check.to_json();
    report["ok"] = check.ok;
    return finish(c, report);
}

int cmd_kan(const Config& c, const std::string& presheaf_file, const std::string& along, bool right) {
    const GroupSiteBundle b = load_bundle(c);
    const CFunctor& alpha = along == "pi" ? b.pi : along == "rho" ? b.extension.rho
                                                                  : throw InputError("--along must be pi or rho");
    const Presheaf p = presheaf_from_json(b.pg_site.cat, load_json(presheaf_file));
    json report = envelope(c, "kan");
    report["along"] = along;
    report["side"] = right ? "right" : "left";
    if (right) {
        const RightKan k = right_kan(alpha, p, c.nat_budget, exec_of(c));
        report["value"] = presheaf_to_json(k.value);
        report["counit"] = nat_to_json(k.counit);
    } else {
        const LeftKan k = left_kan(alpha, p, exec_of(c));
        report["value"] = presheaf_to_json(k.value);
        report["unit"] = nat_to_json(k.unit);
    }
    report["ok"] = true;
    return finish(c, report);
}

int cmd_export_dot(const Config& c) {
    const Target t = load_target(c);
    const std::string dot = to_dot(*t.site.cat, t.name);
    if (c.out.empty()) std::cout << dot;
    else std::ofstream(c.out) << dot;
    return kPass;
}

void add_bundle_options(CLI::App* app, Config& c) {
    app->add_option("--group", c.group, "builtin group (trivial, z2, z3, z4, s3, d4, cyclic:n, ...) or group JSON file");
    app->add_option("--poset", c.poset, "all-subgroups, p-subgroups:<p> or a subgroup-family file");
    app->add_option("--quotient", c.quotient, "transporter or orbit")->check(CLI::IsMember({"transporter", "orbit"}));
    app->add_option("--bundle", c.bundle_file, "bundle descriptor JSON");
}

void add_site_options(CLI::App* app, Config& c) {
    add_bundle_options(app, c);
    app->add_option("--on", c.on, "bundle site: c, pg or g")->check(CLI::IsMember({"c", "pg", "g"}));
    app->add_option("--site", c.site_file, "site JSON file");
    app->add_option("--category", c.category_file, "category JSON file (atomic topology)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sheaves on finite group sites"};
    app.require_subcommand(1);
    Config c;
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--out,-o", c.out, "write the report here instead of stdout");
    app.add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--sieve-budget", c.sieve_budget, "sieve enumeration nodes (env FINSHEAF_SIEVE_BUDGET)");
    app.add_option("--nat-budget", c.nat_budget, "natural transformation search nodes (env FINSHEAF_NAT_BUDGET)");
    app.add_option("--cap", c.cap, "module materialization cap (env FINSHEAF_MATERIALIZE_CAP)");
    app.add_flag("--parallel", c.parallel, "use the OpenMP kernels");

    auto* build = app.add_subcommand("build", "build and validate a bundle, site or category");
    std::string build_dir;
    bool build_dot = false;
    add_site_options(build, c);
    build->add_option("--dir", build_dir, "write descriptor and site files here");
    build->add_flag("--dot", build_dot, "also write DOT graphs");

    auto* check = app.add_subcommand("check", "topology axioms, Ore, continuity and sheaf checks");
    CheckFlags cf;
    add_site_options(check, c);
    check->add_flag("--topology", cf.topology, "topology axioms (atomic and trivial)");
    check->add_flag("--ore", cf.ore, "Ore condition");
    check->add_flag("--continuity", cf.continuity, "continuity of pi and cocontinuity of pi, rho");
    check->add_option("--sheaf", cf.sheaf_file, "presheaf JSON to test");
    check->add_option("--module", cf.module_file, "module JSON; checks its fixed-point sheaf");
    check->add_option("--strategy", cf.strategy, "auto, fast or definitional");

    auto* verify = app.add_subcommand("verify", "run the equivalence verifiers");
    VerifyFlags vf;
    add_bundle_options(verify, c);
    verify->add_flag("--artin", vf.artin, "set-level verifier");
    verify->add_flag("--module", vf.module, "linear verifier");
    verify->add_option("--bound", vf.bound, "G-set size bound (default |G|)");
    verify->add_option("--rank-bound", vf.rank_bound, "module rank bound (default |G|)");
    verify->add_option("--corpus", vf.corpus, "random presheaves per bundle");
    verify->add_option("--random-modules", vf.random_modules, "random modules per ring");
    verify->add_option("--ring", vf.rings, "F<p> or Z/<n>; repeatable");

    auto* sheafify_cmd = app.add_subcommand("sheafify", "sheafify a presheaf");
    std::string presheaf_file;
    bool general = false;
    add_site_options(sheafify_cmd, c);
    sheafify_cmd->add_option("--presheaf", presheaf_file, "presheaf JSON")->required();
    sheafify_cmd->add_flag("--general", general, "use the directed-colimit plus construction");

    auto* kan = app.add_subcommand("kan", "Kan extensions of a presheaf on PG along pi or rho");
    std::string along = "pi";
    bool right = false;
    add_bundle_options(kan, c);
    kan->add_option("--presheaf", presheaf_file, "presheaf JSON on PG")->required();
    kan->add_option("--along", along, "pi or rho");
    kan->add_flag("--right", right, "right instead of left Kan extension");

    auto* dot = app.add_subcommand("export-dot", "DOT graph of a category");
    add_site_options(dot, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInput;
    }

    try {
        c.sieve_budget = env_or("FINSHEAF_SIEVE_BUDGET", c.sieve_budget);
        c.nat_budget = env_or("FINSHEAF_NAT_BUDGET", c.nat_budget);
        c.cap = env_or("FINSHEAF_MATERIALIZE_CAP", c.cap);
        if (c.sieve_budget == 0 || c.nat_budget == 0 || c.cap == 0) throw InputError("budgets must be positive");
        if (*build) return cmd_build(c, build_dir, build_dot);
        if (*check) return cmd_check(c, cf);
        if (*verify) return cmd_verify(c, vf);
        if (*sheafify_cmd) return cmd_sheafify(c, presheaf_file, general);
        if (*kan) return cmd_kan(c, presheaf_file, along, right);
        if (*dot) return cmd_export_dot(c);
    } catch (const AxiomError& e) {
        std::cout << json{{"schema", schema::report}, {"ok", false}, {"error", e.what()}, {"witness", e.witness()}}.dump(2)
                  << '\n';
        return kFail;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kInput;
}
