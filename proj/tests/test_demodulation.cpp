#include <doctest.h>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"

using namespace qsagnac;
using namespace qsagnac::analysis;
using expsim::PolarimeterTrace;
using expsim::SwitchSchedule;

namespace {

// Hand-built trace: chi toggles between `off_level` and `off_level + step`
// following the drive, plus an optional ramp on both channels.
PolarimeterTrace square_trace(const SwitchSchedule& sched, double step,
                              double seconds, double ramp = 0.0,
                              double off_level = 0.0) {
  PolarimeterTrace tr;
  tr.sample_rate = 20.0;
  const int n = static_cast<int>(seconds * tr.sample_rate);
  for (int i = 0; i < n; ++i) {
    const double t = i / tr.sample_rate;
    const bool on = sched.state_at(t) == sagnac::SwitchState::On;
    tr.samples.push_back(
        {t, 0.3 + ramp * t, off_level + ramp * t + (on ? step : 0.0), on});
  }
  return tr;
}

}  // namespace

TEST_CASE("demodulate_trace examples") {
  const auto sched = SwitchSchedule::for_polarimeter();
  const auto d = demodulate_trace(square_trace(sched, 1.415e-3, 200), sched);
  CHECK(d.phi_s == doctest::Approx(2.83e-3).epsilon(1e-9));
  CHECK(std::abs(d.delta_psi) < 1e-15);
  CHECK(d.phi_s_sigma < 1e-12);
  CHECK(d.segments > 30);

  const auto flat = demodulate_trace(square_trace(sched, 0.0, 200), sched);
  CHECK(std::abs(flat.phi_s) < 1e-15);

  const auto neg = demodulate_trace(square_trace(sched, -1e-3, 200), sched);
  CHECK(neg.phi_s == doctest::Approx(-2e-3).epsilon(1e-9));
}

TEST_CASE("samples near edges are cut") {
  const auto sched = SwitchSchedule::for_polarimeter();
  auto tr = square_trace(sched, 1e-3, 200);
  // Corrupt every sample that sits inside the cut window.
  for (auto& s : tr.samples)
    if (sched.distance_to_edge(s.t) <= sched.transition_halfwidth)
      s.chi += 0.5;
  const auto d = demodulate_trace(tr, sched);
  CHECK(d.phi_s == doctest::Approx(2e-3).epsilon(1e-9));
  // At 20 Hz and 50 ms the two samples nearest each edge go.
  CHECK(d.samples_used < tr.samples.size() - 2 * 35);
}

TEST_CASE("property: linear drift rejection") {
  const auto sched = SwitchSchedule::for_polarimeter();
  const auto base = demodulate_trace(square_trace(sched, 1.415e-3, 300), sched);
  for (double ramp : {1e-5, -3e-5, 1e-4}) {
    const auto d =
        demodulate_trace(square_trace(sched, 1.415e-3, 300, ramp, 0.01), sched);
    CHECK(d.phi_s == doctest::Approx(base.phi_s).epsilon(1e-9));
  }
  // A slow sinusoid (below frequency / 10) is suppressed to second order.
  auto tr = square_trace(sched, 1.415e-3, 600);
  for (auto& s : tr.samples) s.chi += 1e-3 * std::sin(2 * pi * 0.005 * s.t);
  const auto d = demodulate_trace(tr, sched);
  CHECK(d.phi_s == doctest::Approx(2.83e-3).epsilon(5e-3));
}

TEST_CASE("demodulation of simulated noisy traces") {
  const auto sched = SwitchSchedule::for_polarimeter();
  auto geom = sagnac::InterferometerGeometry::with_area(
      sagnac::FrameShape::Square, 2000, 5.55, 715, 1546e-9);
  auto noise = expsim::NoiseConfig::none();
  noise.polarimeter_noise_sigma = 2e-4;
  noise.phase_drift_rate = 2e-6;
  const double phi_s = sagnac::sagnac_phase(geom, 7.29e-5, sagnac::SwitchState::On);
  std::vector<double> z;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto tr = expsim::simulate_polarimeter(geom, sched, {}, noise,
                                                 7.29e-5, 600, seed);
    const auto d = demodulate_trace(tr, sched);
    z.push_back((d.phi_s - phi_s) / d.phi_s_sigma);
  }
  const auto ms = stats::mean_stddev(z);
  CHECK(std::abs(ms.mean) < 0.5);
  CHECK(ms.stddev > 0.6);
  CHECK(ms.stddev < 1.5);
}

TEST_CASE("demodulate_trace errors") {
  const auto sched = SwitchSchedule::for_polarimeter();
  CHECK_THROWS_AS(demodulate_trace(square_trace(sched, 1e-3, 90), sched),
                  ValidationError);
  PolarimeterTrace sparse;
  sparse.sample_rate = 0.25;  // too few samples per half-period
  for (int i = 0; i < 60; ++i) {
    const double t = i * 4.0 + 1.0;
    sparse.samples.push_back(
        {t, 0, 0, sched.state_at(t) == sagnac::SwitchState::On});
  }
  CHECK_THROWS_AS(demodulate_trace(sparse, sched), ValidationError);
  auto wrong = square_trace(sched, 1e-3, 200);
  for (auto& s : wrong.samples) s.drive = !s.drive;
  CHECK_THROWS_AS(demodulate_trace(wrong, sched), ValidationError);
  PolarimeterTrace empty;
  CHECK_THROWS_AS(demodulate_trace(empty, sched), ValidationError);
}
