// Serial vs OpenMP timings of the parallel kernels. Argument 0 = serial, 1 = parallel.

#include <random>

#include <benchmark/benchmark.h>

#include "finsheaf/grpsites.hpp"

using namespace finsheaf;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

const GroupSiteBundle& s4_bundle() {
    static const GroupSiteBundle b =
        make_bundle(share(FiniteGroup::symmetric(4)), PosetChoice::AllSubgroups, 0, QuotientChoice::Orbit);
    return b;
}

const GroupSiteBundle& d4_bundle() {
    static const GroupSiteBundle b =
        make_bundle(share(FiniteGroup::dihedral(4)), PosetChoice::AllSubgroups, 0, QuotientChoice::Orbit);
    return b;
}

std::vector<Presheaf> corpus(const GroupSiteBundle& b, std::size_t n) {
    std::mt19937_64 rng(1);
    std::vector<Presheaf> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(corpus_presheaf(b, rng));
    return out;
}

void BM_TransporterBuild(benchmark::State& state) {
    const GroupPtr g = share(FiniteGroup::symmetric(4));
    for (auto _ : state)
        benchmark::DoNotOptimize(make_bundle(g, PosetChoice::AllSubgroups, 0, QuotientChoice::Orbit, exec_of(state)));
}

void BM_Associativity(benchmark::State& state) {
    const FinCat& c = *s4_bundle().pg_site.cat;
    for (auto _ : state) check_associativity(c, exec_of(state));
}

void BM_Ore(benchmark::State& state) {
    const FinCat& c = *s4_bundle().pg_site.cat;
    for (auto _ : state) benchmark::DoNotOptimize(ore_condition(c, exec_of(state)));
}

void BM_TopologyAxioms(benchmark::State& state) {
    const Site& s = d4_bundle().c_site;
    for (auto _ : state) benchmark::DoNotOptimize(check_topology_axioms(s, 1'000'000, exec_of(state)));
}

void BM_IsSheaf(benchmark::State& state) {
    const auto& b = d4_bundle();
    const auto fs = corpus(b, 20);
    SheafOptions o;
    o.strategy = SheafStrategy::Definitional;
    o.exec = exec_of(state);
    for (auto _ : state)
        for (const Presheaf& f : fs) benchmark::DoNotOptimize(is_sheaf(f, b.c_site, o));
}

void BM_Plus(benchmark::State& state) {
    const auto& b = d4_bundle();
    const auto fs = corpus(b, 20);
    SheafOptions o;
    o.exec = exec_of(state);
    for (auto _ : state)
        for (const Presheaf& f : fs) benchmark::DoNotOptimize(plus_construction(f, b.c_site, o));
}

void BM_LeftKan(benchmark::State& state) {
    const auto& b = s4_bundle();
    const Presheaf f = fixed_point_sheaf(GSet::regular(b.group), trivial_extension(b.transporter()));
    for (auto _ : state) benchmark::DoNotOptimize(left_kan(b.pi, f, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_TransporterBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Associativity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ore)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopologyAxioms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IsSheaf)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Plus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeftKan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
