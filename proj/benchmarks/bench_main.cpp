#include "achronal/chi_localization.hpp"
#include "achronal/current.hpp"
#include "achronal/flux.hpp"

#include <benchmark/benchmark.h>

using namespace achronal;

namespace {

const MassShellState& state() {
  static const MassShellState s = reference_state();
  return s;
}

}  // namespace

static void BM_CurrentLattice(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const CurrentEvaluator eval(state(), make_grid(1.0, 2.0, n), KernelSpec());
  std::vector<FourVector> events;
  for (int i = 0; i < 64; ++i) events.emplace_back(0.05 * i, 0.1 * i - 3.2, 0.02 * i, -0.03 * i);
  for (auto _ : st) benchmark::DoNotOptimize(eval.evaluate(events));
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(events.size()));
}
BENCHMARK(BM_CurrentLattice)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Flux6dBox(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const QuadratureGrid grid = make_box_grid(1.0, state().support_box(), n, n);
  const Projection box = Projection::box(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  for (auto _ : st) benchmark::DoNotOptimize(flux_box_value(state(), FlatPlane::time_slice(0.0), box, grid, KernelSpec()));
}
BENCHMARK(BM_Flux6dBox)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_Flux4dStrip(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const QuadratureGrid grid = make_box_grid(1.0, state().support_box(), n, n);
  for (auto _ : st) {
    benchmark::DoNotOptimize(flux_strip_value(state(), FlatPlane::chi(), 2, -0.5, 0.5, grid, KernelSpec()));
  }
}
BENCHMARK(BM_Flux4dStrip)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_ChiFft(benchmark::State& st) {
  const KernelSpec spec;
  const NystromFactor factor = default_nystrom(state(), spec);
  const MomentumField field = embed_j(state(), factor, make_fourier_grid(state()));
  const std::vector<Projection> regions = {Projection::all(), Projection::strip(2, -0.5, 0.5)};
  for (auto _ : st) benchmark::DoNotOptimize(chi_probabilities(field, regions));
}
BENCHMARK(BM_ChiFft)->Unit(benchmark::kMillisecond);

static void BM_ChiEmbed(benchmark::State& st) {
  const KernelSpec spec;
  const NystromFactor factor = default_nystrom(state(), spec);
  const FourierGrid grid = make_fourier_grid(state());
  for (auto _ : st) benchmark::DoNotOptimize(embed_j(state(), factor, grid));
}
BENCHMARK(BM_ChiEmbed)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
