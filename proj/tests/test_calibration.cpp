#include <doctest.h>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"

using namespace qsagnac;
using namespace qsagnac::analysis;

namespace {

std::vector<PhasePoint> cosine(double s, double theta0_deg, double shift_deg,
                               double sigma = 1e-4) {
  std::vector<PhasePoint> pts;
  for (double deg : {-90.0, -67.5, -45.0, -22.5, 0.0, 22.5}) {
    const double th = deg_to_rad(deg + shift_deg);
    pts.push_back({th, s * 7.29e-5 * std::cos(th + deg_to_rad(theta0_deg)),
                   sigma});
  }
  return pts;
}

std::vector<PhasePoint> table(const std::vector<double>& phi_mrad,
                              const std::vector<double>& sigma_mrad) {
  const std::vector<double> deg{-87.5, -65, -42.5, -20, 2.5, 25};
  std::vector<PhasePoint> pts;
  for (std::size_t i = 0; i < deg.size(); ++i)
    pts.push_back({deg_to_rad(deg[i]), phi_mrad[i] * 1e-3, sigma_mrad[i] * 1e-3});
  return pts;
}

sagnac::InterferometerGeometry our_frame() {
  return sagnac::InterferometerGeometry::with_area(
      sagnac::FrameShape::Square, 2000, 5.55, 715, 1546e-9);
}

}  // namespace

TEST_CASE("calibrate_scale_factor: exact noiseless recovery") {
  CalibrationOptions o;
  o.samples = 2000;
  o.seed = 3;
  const auto r = calibrate_scale_factor(cosine(40.0, 0.0, 0.0), o);
  CHECK(std::abs(r.nominal_scale_factor - 40.0) < 1e-8);
  CHECK(std::abs(r.nominal_theta_offset) < 1e-8);
  CHECK(r.scale_factor == doctest::Approx(40.0).epsilon(0.02));
  CHECK(r.samples == 2000);
  const auto f = fit_cosine(cosine(40.0, 0.0, 0.0));
  CHECK(std::abs(f.amplitude - 40.0 * 7.29e-5) < 1e-12);
}

TEST_CASE("calibrate_scale_factor: +10 deg shift gives theta0 = -10 deg") {
  CalibrationOptions o;
  o.samples = 4000;
  o.seed = 11;
  const auto r = calibrate_scale_factor(cosine(38.8, 0.0, 10.0, 5e-5), o);
  CHECK(std::abs(r.nominal_theta_offset - deg_to_rad(0.0)) < 1e-9);
  // Phases evaluated at the unshifted angles but labelled +10 deg.
  std::vector<PhasePoint> relabel = cosine(38.8, 0.0, 0.0, 5e-5);
  for (auto& p : relabel) p.frame_angle += deg_to_rad(10.0);
  const auto s = calibrate_scale_factor(relabel, o);
  CHECK(std::abs(s.nominal_theta_offset - deg_to_rad(-10.0)) < 1e-9);
  CHECK(std::abs(s.theta_offset - deg_to_rad(-10.0)) <
        3 * s.theta_offset_sigma + 1e-12);
  CHECK(s.theta_offset_sigma > 0.0);
}

TEST_CASE("calibration: serial and parallel agree bit for bit") {
  auto pts = cosine(38.8, 0.5, 0.0, 2e-5);
  CalibrationOptions o;
  o.samples = 3000;
  o.seed = 99;
  o.execution = Execution::Serial;
  const auto a = calibrate_scale_factor(pts, o);
  o.execution = Execution::Parallel;
  const auto b = calibrate_scale_factor(pts, o);
  CHECK(a.scale_factor == b.scale_factor);
  CHECK(a.scale_factor_sigma == b.scale_factor_sigma);
  CHECK(a.theta_offset == b.theta_offset);
}

TEST_CASE("calibration: ill-conditioned and invalid inputs") {
  CalibrationOptions o;
  o.samples = 1000;
  std::vector<PhasePoint> two{{0.0, 1e-3, 1e-4}, {0.5, 1e-3, 1e-4}};
  CHECK_THROWS_AS(calibrate_scale_factor(two, o), IllConditionedError);
  std::vector<PhasePoint> close{{0.0, 1e-3, 1e-4},
                                {deg_to_rad(2.0), 1e-3, 1e-4},
                                {deg_to_rad(4.0), 1e-3, 1e-4}};
  CHECK_THROWS_AS(calibrate_scale_factor(close, o), IllConditionedError);
  auto bad = cosine(38.8, 0, 0);
  bad[2].sigma = 0.0;
  CHECK_THROWS_AS(calibrate_scale_factor(bad, o), ValidationError);
  bad = cosine(38.8, 0, 0);
  bad[0].phase = std::nan("");
  CHECK_THROWS_AS(fit_cosine(bad), ValidationError);
}

TEST_CASE("fit_angle_sweep: measured two- and one-photon sweeps") {
  const auto geom = our_frame();
  const auto two = fit_angle_sweep(
      table({0.82, 2.28, 3.86, 4.93, 5.51, 5.44},
            {0.65, 0.65, 0.65, 0.76, 0.54, 0.69}),
      geom, 2, {});
  CHECK(two.max_phase == doctest::Approx(5.5e-3).epsilon(0.02));
  CHECK(two.max_phase_sigma == doctest::Approx(0.4e-3).epsilon(0.125));
  CHECK(two.omega == doctest::Approx(7.1e-5).epsilon(0.01));
  const auto one = fit_angle_sweep(
      table({0.23, 1.00, 2.14, 2.66, 2.77, 2.59},
            {0.21, 0.21, 0.21, 0.25, 0.18, 0.21}),
      geom, 1, {});
  CHECK(one.max_phase == doctest::Approx(2.8e-3).epsilon(0.02));
  CHECK(one.max_phase_sigma == doctest::Approx(0.1e-3).epsilon(0.5));
  CHECK(one.omega == doctest::Approx(7.2e-5).epsilon(0.01));
  const auto e = enhancement_factor(two.max_phase, two.max_phase_sigma,
                                    one.max_phase, one.max_phase_sigma);
  CHECK(e.value == doctest::Approx(1.97).epsilon(0.02));
  CHECK(e.sigma == doctest::Approx(0.16).epsilon(0.15));
}

TEST_CASE("property: noiseless sweep amplitude ratio is exactly 2") {
  const auto geom = our_frame();
  std::vector<PhasePoint> one, two;
  for (double deg : {-87.5, -65.0, -42.5, -20.0, 2.5, 25.0}) {
    auto g = geom;
    g.frame_angle = deg_to_rad(deg);
    const double phi = sagnac::sagnac_phase(g, 7.29e-5, sagnac::SwitchState::On);
    one.push_back({g.frame_angle, phi, 1e-4});
    two.push_back({g.frame_angle, 2 * phi, 2e-4});
  }
  const auto f1 = fit_angle_sweep(one, geom, 1);
  const auto f2 = fit_angle_sweep(two, geom, 2);
  CHECK(f2.max_phase / f1.max_phase == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f1.omega == doctest::Approx(7.29e-5).epsilon(1e-12));
  CHECK(f2.omega == doctest::Approx(7.29e-5).epsilon(1e-12));
}
