#include <benchmark/benchmark.h>

#include "mplab/analysis.hpp"
#include "mplab/menu.hpp"
#include "mplab/session.hpp"
#include "mplab/tables.hpp"

using namespace mplab;

namespace {

const Cohort& bundled() {
    static const Cohort cohort = load_cohort_dir(MPLAB_DATA_DIR "/cohort").cohort;
    return cohort;
}

void BM_CrossoverHlRow(benchmark::State& state) {
    const auto menu = hl_menu();
    const auto& row = menu.row(5);
    for (auto _ : state) benchmark::DoNotOptimize(crossover_crra(row.option_a, *row.option_b));
}
BENCHMARK(BM_CrossoverHlRow);

void BM_BoundariesFromMenu(benchmark::State& state) {
    const auto menus = default_task_menus();
    const auto& menu = menus[static_cast<std::size_t>(state.range(0))];
    for (auto _ : state) benchmark::DoNotOptimize(boundaries_from_menu(menu));
}
BENCHMARK(BM_BoundariesFromMenu)->DenseRange(0, 5);

void BM_WilcoxonBundled(benchmark::State& state) {
    const auto sample = paired_sample(bundled(), Comparison::HL, Measure::Response);
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(sample));
}
BENCHMARK(BM_WilcoxonBundled);

void BM_ReproduceTables(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(reproduce_tables(bundled()));
}
BENCHMARK(BM_ReproduceTables)->Unit(benchmark::kMillisecond);

void BM_KdeTask(benchmark::State& state) {
    std::vector<double> v;
    for (const auto& m : bundled().members()) v.push_back(m.choices.response(1));
    for (auto _ : state) benchmark::DoNotOptimize(kde_epanechnikov(v, "Task1"));
}
BENCHMARK(BM_KdeTask);

void BM_SimulateAgent(benchmark::State& state) {
    const auto menus = default_task_menus();
    double r = -1.0;
    for (auto _ : state) {
        for (const auto& m : menus) benchmark::DoNotOptimize(simulate_eut_agent(m, {r}));
        r = r > 1.5 ? -1.0 : r + 0.013;
    }
}
BENCHMARK(BM_SimulateAgent);

void BM_FullSession(benchmark::State& state) {
    auto cfg = std::make_shared<const ExperimentConfig>(default_experiment_config(7));
    int i = 0;
    for (auto _ : state) {
        Session s(cfg, "B" + std::to_string(i++), {}, [] { return std::string(); });
        s.begin();
        for (int k = 0; k < 6; ++k) {
            const int task = *s.state().current_task();
            if (task_design(task) == DesignKind::BINS) {
                s.submit_decision(task, 5);
            } else {
                for (int row = 1; row <= 10; ++row) s.submit_choice(task, row, row <= 5 ? Option::A : Option::B);
            }
        }
        benchmark::DoNotOptimize(s.digest());
    }
}
BENCHMARK(BM_FullSession);

}  // namespace

BENCHMARK_MAIN();
