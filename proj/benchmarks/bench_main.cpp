#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "srdreg/density_ingest.hpp"
#include "srdreg/gss_regression.hpp"
#include "srdreg/gsva.hpp"
#include "srdreg/random.hpp"
#include "srdreg/simulation.hpp"
#include "srdreg/sphere_geometry.hpp"
#include "srdreg/tangent_pca.hpp"

using namespace srdreg;

namespace {

std::vector<SquareRootDensity> cohort(std::size_t n) {
    std::vector<SquareRootDensity> out;
    for (const auto& f : mixture_density_cohort(n, default_grid_size, 7)) out.push_back(to_srd(f));
    return out;
}

void BM_Kde(benchmark::State& state) {
    auto rng = make_rng(1);
    std::normal_distribution<double> normal(0.5, 0.1);
    std::vector<double> sample(static_cast<std::size_t>(state.range(0)));
    for (auto& x : sample) x = std::clamp(normal(rng), 0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(kde(sample));
}
BENCHMARK(BM_Kde)->Arg(1000)->Arg(20000);

void BM_KarcherMean(benchmark::State& state) {
    const auto srds = cohort(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(karcher_mean(srds));
}
BENCHMARK(BM_KarcherMean)->Arg(61)->Unit(benchmark::kMillisecond);

void BM_FitPca(benchmark::State& state) {
    const auto srds = cohort(61);
    std::vector<std::string> ids;
    for (int i = 0; i < 61; ++i) ids.push_back("S" + std::to_string(i));
    for (auto _ : state) benchmark::DoNotOptimize(fit_pca(srds, ids));
}
BENCHMARK(BM_FitPca)->Unit(benchmark::kMillisecond);

void BM_GibbsSweep(benchmark::State& state) {
    const auto columns = state.range(0);
    auto rng = make_rng(3);
    std::normal_distribution<double> normal;
    GroupedDesignMatrix d;
    d.X.resize(61, columns);
    for (Eigen::Index k = 0; k < d.X.size(); ++k) d.X(k) = normal(rng);
    const int groups = static_cast<int>((columns + 3) / 4);
    for (Eigen::Index j = 0; j < columns; ++j) {
        d.group_of_column.push_back(static_cast<int>(j / 4) + 1);
        d.column_names.push_back("c" + std::to_string(j));
    }
    for (int g = 0; g < groups; ++g) d.group_names.push_back("g" + std::to_string(g));
    Eigen::VectorXd y(61);
    for (auto& v : y) v = normal(rng);
    y.array() -= y.mean();
    const GibbsModel model(d, y, {});
    GibbsSampler sampler(model, model.initial_state(), 5);
    for (auto _ : state) sampler.sweep();
}
BENCHMARK(BM_GibbsSweep)->Arg(24)->Arg(143)->Unit(benchmark::kMicrosecond);

void BM_Gsva(benchmark::State& state) {
    auto rng = make_rng(4);
    std::normal_distribution<double> normal;
    ExpressionMatrix e;
    const auto genes = state.range(0);
    e.values.resize(genes, 61);
    for (Eigen::Index k = 0; k < e.values.size(); ++k) e.values(k) = normal(rng);
    for (Eigen::Index g = 0; g < genes; ++g) e.genes.push_back("G" + std::to_string(g));
    for (int s = 0; s < 61; ++s) e.samples.push_back("S" + std::to_string(s));
    std::vector<GeneSet> sets;
    std::uniform_int_distribution<Eigen::Index> pick(0, genes - 1);
    for (int k = 0; k < 50; ++k) {
        GeneSet set{"P" + std::to_string(k), "", {}};
        for (int i = 0; i < 40; ++i) set.genes.push_back(e.genes[static_cast<std::size_t>(pick(rng))]);
        sets.push_back(std::move(set));
    }
    for (auto _ : state) benchmark::DoNotOptimize(gsva(e, sets));
}
BENCHMARK(BM_Gsva)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
