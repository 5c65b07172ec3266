#include <benchmark/benchmark.h>

#include "bench_support.hpp"

namespace {

using namespace metaradar;

void BM_WpsoIteration(benchmark::State& state) {
  auto fixture = bench::make_fixture(static_cast<int>(state.range(0)),
                                     static_cast<int>(state.range(1)));
  WpsoOptions options;
  options.max_power = fixture.config.max_power;
  options.epsilon = std::numeric_limits<double>::infinity();  // exactly one iteration
  std::mt19937_64 rng(5);
  for (auto _ : state) {
    DesignVariables initial;
    initial.waveform = random_waveform(
        static_cast<Eigen::Index>(fixture.setup.model.antenna_count()) *
            fixture.config.waveform_len,
        fixture.config.max_power, rng);
    initial.transmit_phases =
        random_grid_phases(fixture.config.ris_elements, fixture.config.phase_levels, rng);
    initial.receive_phases =
        random_grid_phases(fixture.config.ris_elements, fixture.config.phase_levels, rng);
    benchmark::DoNotOptimize(run_wpso(fixture.setup.model, fixture.setup.hypotheses,
                                      fixture.state, initial, options, rng));
  }
}
BENCHMARK(BM_WpsoIteration)
    ->Args({4, 2})
    ->Args({8, 2})
    ->Args({16, 2})
    ->Args({32, 2})
    ->Args({16, 1})
    ->Args({16, 4});

}  // namespace
