// Serial reference vs OpenMP kernels for the Monte-Carlo refits, the
// calibration resampling and the design landscape.
#include <benchmark/benchmark.h>

#include "qsagnac/analysis.hpp"
#include "qsagnac/sensedesign.hpp"
#include "qsagnac/units.hpp"

using namespace qsagnac;

namespace {

struct Scan {
  std::vector<expsim::CountRecord> on, off;
};

const Scan& scan() {
  static const Scan s = [] {
    auto geom = sagnac::InterferometerGeometry::with_area(
        sagnac::FrameShape::Square, 2000, 5.55, 715, 1546e-9);
    geom.frame_angle = deg_to_rad(2.5);
    expsim::ExperimentConfig cfg;
    cfg.source.distinguishability = 0.0286;
    Scan out;
    for (const auto& r : expsim::simulate_counts(
             probe::ProbeKind::noon(2), geom,
             expsim::CountingPlan::two_photon_default(), cfg, 7.29e-5, 1))
      (r.state == sagnac::SwitchState::On ? out.on : out.off).push_back(r);
    return out;
  }();
  return s;
}

void mc_earth_phase(benchmark::State& state, analysis::Execution exec) {
  analysis::McOptions o;
  o.samples = static_cast<std::size_t>(state.range(0));
  o.offsets.common_sigma = 2.4e-3;
  o.execution = exec;
  for (auto _ : state) {
    ++o.seed;
    benchmark::DoNotOptimize(analysis::mc_earth_phase(
        scan().on, scan().off, analysis::FringeModel::TwoPhoton, o));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void calibration(benchmark::State& state, analysis::Execution exec) {
  std::vector<analysis::PhasePoint> pts;
  for (double deg : {-90.0, -67.5, -45.0, -22.5, 0.0, 22.5})
    pts.push_back({deg_to_rad(deg), 2.83e-3 * std::cos(deg_to_rad(deg)), 1e-5});
  analysis::CalibrationOptions o;
  o.samples = static_cast<std::size_t>(state.range(0));
  o.execution = exec;
  for (auto _ : state)
    benchmark::DoNotOptimize(analysis::calibrate_scale_factor(pts, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void landscape(benchmark::State& state, sensedesign::Execution exec) {
  std::vector<sensedesign::DesignSpec> specs;
  for (int i = 0; i < state.range(0); ++i) {
    sensedesign::DesignSpec s;
    s.geometry = sagnac::InterferometerGeometry::square(1e3 + 50.0 * i,
                                                        1 + i % 16, 1550e-9);
    s.geometry.latitude = deg_to_rad(48.2);
    s.projection = sagnac::Projection::Latitude;
    specs.push_back(s);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(sensedesign::landscape(specs, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(mc_earth_phase, serial, analysis::Execution::Serial)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(mc_earth_phase, openmp, analysis::Execution::Parallel)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(calibration, serial, analysis::Execution::Serial)
    ->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(calibration, openmp, analysis::Execution::Parallel)
    ->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(landscape, serial, sensedesign::Execution::Serial)
    ->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(landscape, openmp, sensedesign::Execution::Parallel)
    ->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
