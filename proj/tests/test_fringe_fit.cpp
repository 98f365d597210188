#include <doctest.h>

#include "oracles.hpp"
#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/units.hpp"

using namespace qsagnac;
using namespace qsagnac::analysis;
using expsim::CountRecord;

namespace {

// Exact (non-integer-rounded) two-photon samples from the oracle.
std::vector<FringeSample> noon_data(double amp, double vis, double phase,
                                    int count = 11) {
  std::vector<FringeSample> out;
  for (double phi0 : expsim::CountingPlan::linspace(-pi / 8, 2 * pi + pi / 8,
                                                    count)) {
    const double y = oracle::noon_fringe(amp, vis, phase, phi0);
    out.push_back({phi0, y, std::max(y, 1.0)});
  }
  return out;
}

std::vector<FringeSample> single_data(double a, double eta, double vis,
                                      double phase) {
  std::vector<FringeSample> out;
  for (double phi0 : expsim::CountingPlan::linspace(-pi / 4, 2 * pi + pi / 4,
                                                    11)) {
    const double u = vis * std::cos(phi0 + phase);
    out.push_back({phi0, a * (1 - u) / (1 + eta * u), 1e-8});
  }
  return out;
}

double phase_error(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace

TEST_CASE("fit_noon_fringe: noiseless round trip at measured two-photon parameters") {
  // phi^(2) = -2 phi_s with phi_s = 5.51/2 mrad.
  const double phase = -5.51e-3;
  const auto f = nlls(FringeModel::TwoPhoton, noon_data(7.2e6, 0.9714, phase));
  CHECK(f.converged);
  CHECK(std::abs(f.params.visibility - 0.9714) < 1e-6);
  CHECK(phase_error(f.params.phase, phase) < 1e-6);
  CHECK(f.params.amplitude == doctest::Approx(7.2e6).epsilon(1e-9));
  CHECK(f.sigmas.phase > 0.0);
}

TEST_CASE("fit_noon_fringe: degenerate designs") {
  std::vector<CountRecord> flat;
  for (double phi0 : expsim::CountingPlan::linspace(0, pi, 8))
    flat.push_back({0.0, phi0, sagnac::SwitchState::On, 10.0, 0, 0, 500});
  CHECK_THROWS_AS(fit_noon_fringe(flat), DegenerateDesignError);

  auto narrow = noon_data(1e4, 0.9, 0.3);
  for (auto& s : narrow) s.phi0 *= 0.05;  // span < pi/2
  CHECK_THROWS_AS(nlls(FringeModel::TwoPhoton, narrow), DegenerateDesignError);

  auto few = noon_data(1e4, 0.9, 0.3, 4);
  CHECK_THROWS_AS(nlls(FringeModel::TwoPhoton, few), DegenerateDesignError);
}

TEST_CASE("fit_single_fringe: symmetric and asymmetric channels") {
  expsim::ExperimentConfig cfg;
  cfg.noise = expsim::NoiseConfig::none();
  cfg.sampling = expsim::SamplingMode::Expected;
  cfg.source.single_photon_visibility = 0.997;
  auto geom = sagnac::InterferometerGeometry::with_area(
      sagnac::FrameShape::Square, 2000, 5.55, 715, 1546e-9);
  const expsim::CountingPlan plan{expsim::CountingPlan::single_photon_default().phi0,
                                  1e9};
  auto on_only = [](const std::vector<CountRecord>& r) {
    std::vector<CountRecord> on;
    for (const auto& x : r)
      if (x.state == sagnac::SwitchState::On) on.push_back(x);
    return on;
  };
  const double phi_s = oracle::sagnac_phase(715, 7.29e-5, 0, 1546e-9);

  const auto sym = fit_single_fringe(on_only(expsim::simulate_counts(
      probe::ProbeKind::single_photon(), geom, plan, cfg, 7.29e-5, 1)));
  CHECK(std::abs(sym.params.eta) < 1e-6);
  CHECK(phase_error(sym.params.phase, -phi_s) < 1e-6);
  CHECK(sym.params.visibility == doctest::Approx(0.997).epsilon(1e-6));

  cfg.source.channel_ratio = 1.2;
  const auto asym = fit_single_fringe(on_only(expsim::simulate_counts(
      probe::ProbeKind::single_photon(), geom, plan, cfg, 7.29e-5, 1)));
  CHECK(std::abs(asym.params.eta - 1.0 / 11.0) < 2e-3);
  CHECK(phase_error(asym.params.phase, -phi_s) < 1e-6);
}

TEST_CASE("nlls: exact recovery on a toy fringe") {
  // Linear-in-amplitude cosine; optimum known exactly.
  const auto f = nlls(FringeModel::TwoPhoton, noon_data(2.0, 0.5, 1.0));
  CHECK(std::abs(f.params.amplitude - 2.0) < 1e-10);
  CHECK(std::abs(f.params.visibility - 0.5) < 1e-10);
  CHECK(phase_error(f.params.phase, 1.0) < 1e-10);
  const auto s = nlls(FringeModel::SinglePhoton, single_data(0.5, 0.1, 0.9, -2.0));
  CHECK(std::abs(s.params.amplitude - 0.5) < 1e-10);
  CHECK(std::abs(s.params.eta - 0.1) < 1e-10);
  CHECK(std::abs(s.params.visibility - 0.9) < 1e-10);
  CHECK(phase_error(s.params.phase, -2.0) < 1e-10);
}

TEST_CASE("nlls: initial phase off by pi/3 converges through multi-start") {
  const auto data = noon_data(1e5, 0.95, 0.8);
  FitOptions opt;
  opt.initial = FringeParameters{1e5, 0.0, 0.95, 0.8 + pi / 3};
  const auto f = nlls(FringeModel::TwoPhoton, data, opt);
  CHECK(f.converged);
  CHECK(phase_error(f.params.phase, 0.8) < 1e-8);
  // Even a terrible start alone (no grid) must fail gracefully or converge.
  opt.initial = FringeParameters{1e5, 0.0, 0.95, 0.8 + pi / 2};
  opt.phase_starts = 0;
  const auto g = nlls(FringeModel::TwoPhoton, data, opt);
  if (g.converged) CHECK(g.params.visibility >= 0.0);
}

TEST_CASE("nlls: max-iteration exhaustion is reported, not thrown") {
  FitOptions opt;
  opt.lm.max_iterations = 1;
  opt.phase_starts = 1;
  const auto f = nlls(FringeModel::TwoPhoton, noon_data(1e5, 0.95, 2.5), opt);
  CHECK_FALSE(f.converged);
  CHECK(f.diagnostics.find("max_iterations") != std::string::npos);
}

TEST_CASE("property: fit round-trip grid within 1e-6") {
  for (double v : {0.9, 0.97, 1.0}) {
    for (int j = 0; j < 12; ++j) {
      const double phase = wrap_phase(-pi + 2 * pi * (j + 0.5) / 12);
      const auto f = nlls(FringeModel::TwoPhoton, noon_data(3e6, v, phase));
      CHECK(std::abs(f.params.visibility - v) < 1e-6);
      CHECK(phase_error(f.params.phase, phase) < 1e-6);
      const auto s = nlls(FringeModel::SinglePhoton,
                          single_data(0.5, 0.0, v, phase));
      CHECK(std::abs(s.params.visibility - v) < 1e-6);
      CHECK(phase_error(s.params.phase, phase) < 1e-6);
    }
  }
}

TEST_CASE("property: reported phase wrapped and visibility non-negative") {
  for (double phase : {-3.1, -1.0, 0.0, 2.0, 3.1}) {
    const auto f = nlls(FringeModel::TwoPhoton, noon_data(1e4, 0.8, phase));
    CHECK(f.params.phase > -pi);
    CHECK(f.params.phase <= pi);
    CHECK(f.params.visibility >= 0.0);
    CHECK(f.params.visibility <= 1.02);
    CHECK(f.sigmas.visibility >= 0.0);
  }
}

TEST_CASE("extract_earth_phase examples") {
  FringeFit on, off;
  on.converged = off.converged = true;
  on.params.phase = -24.60e-3;
  off.params.phase = -19.09e-3;
  on.sigmas.phase = 3e-4;
  off.sigmas.phase = 4e-4;
  const auto e = extract_earth_phase(on, off);
  CHECK(e.phi_e == doctest::Approx(5.51e-3).epsilon(1e-9));
  CHECK(e.phi_e_sigma == doctest::Approx(5e-4));
  CHECK(extract_earth_phase(on, on).phi_e == 0.0);
  off.converged = false;
  CHECK_THROWS_AS(extract_earth_phase(on, off), FitError);
  // Wrapping across +-pi.
  on.params.phase = 3.1;
  off.params.phase = -3.1;
  off.converged = true;
  CHECK(extract_earth_phase(on, off).phi_e ==
        doctest::Approx(2 * pi - 6.2).epsilon(1e-12));
}

TEST_CASE("property: common bias offset leaves phi_e unchanged") {
  auto make = [](double phase, double shift) {
    std::vector<FringeSample> d;
    for (double phi0 : expsim::CountingPlan::linspace(-pi / 8, 2 * pi + pi / 8, 11)) {
      const double y = oracle::noon_fringe(1e6, 0.97, phase, phi0 + shift);
      d.push_back({phi0, y, y});
    }
    return d;
  };
  for (double shift : {0.0, 0.01, -0.3, 1.2}) {
    auto on = nlls(FringeModel::TwoPhoton, make(-0.02, shift));
    auto off = nlls(FringeModel::TwoPhoton, make(-0.0145, shift));
    CHECK(extract_earth_phase(on, off).phi_e ==
          doctest::Approx(0.0055).epsilon(1e-6));
  }
}

TEST_CASE("enhancement_factor examples") {
  const auto r = enhancement_factor(5.5, 0.4, 2.8, 0.1);
  CHECK(r.value == doctest::Approx(1.964).epsilon(1e-3));
  CHECK(r.sigma == doctest::Approx(0.16).epsilon(0.03));
  const auto one = enhancement_factor(3.0, 0.2, 3.0, 0.2);
  CHECK(one.value == 1.0);
  CHECK(one.sigma == doctest::Approx(std::sqrt(2.0) * 0.2 / 3.0));
  CHECK_THROWS_AS(enhancement_factor(1.0, 0.1, 0.2, 0.1),
                  DegenerateDesignError);
  CHECK_THROWS_AS(enhancement_factor(1.0, 0.1, 0.0, 0.0),
                  DegenerateDesignError);
}
