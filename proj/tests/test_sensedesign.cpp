#include <doctest.h>

#include "oracles.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/sensedesign.hpp"
#include "qsagnac/units.hpp"

using namespace qsagnac;
using namespace qsagnac::sensedesign;
using sagnac::InterferometerGeometry;

namespace {

DesignSpec lfog() {
  DesignSpec s;
  s.name = "LFOG";
  s.geometry = InterferometerGeometry::circular(8e3, 2.15, 1550e-9);
  s.alpha = 0.5;
  s.pair_rate_in = 1e9;
  return s;
}

DesignSpec gfring(double length = 47.5e3, int turns = 8) {
  DesignSpec s;
  s.name = "GFRING";
  s.geometry = InterferometerGeometry::square(length, turns, 1550e-9);
  s.geometry.latitude = deg_to_rad(48.2);
  s.alpha = 0.16;
  s.pair_rate_in = 10e9;
  s.projection = Projection::Latitude;
  return s;
}

GfringOptions reference_gfring() {
  GfringOptions o;
  o.latitude = deg_to_rad(48.2);
  return o;
}

}  // namespace

TEST_CASE("pair_rate_out examples") {
  auto s = lfog();
  s.alpha = 0.0;
  CHECK(pair_rate_out(s) == s.pair_rate_in);
  DesignSpec g;
  g.geometry = InterferometerGeometry::circular(15e3, 12.57, 1550e-9);
  g.alpha = 0.5;
  g.pair_rate_in = 10e9;
  CHECK(pair_rate_out(g) == doctest::Approx(std::pow(10.0, -1.5) * 1e10));
  // End-to-end eta = 0.1 per photon, as a loss in dB over 1 km.
  DesignSpec ours;
  ours.geometry = InterferometerGeometry::with_area(sagnac::FrameShape::Square,
                                                    1e3, 5.55, 715, 1546e-9);
  ours.alpha = 10.0;
  CHECK(pair_rate_out(ours) / ours.pair_rate_in == doctest::Approx(0.01));
}

TEST_CASE("phase_resolution examples") {
  CHECK(phase_resolution(lfog()) == doctest::Approx(2.38e-8).epsilon(0.03));
  auto s = lfog();
  s.alpha = 0.0;
  s.pair_rate_in = 0.5;
  s.integration_time = 1.0;
  CHECK(phase_resolution(s) == doctest::Approx(1.0));
  auto t = lfog();
  const double base = phase_resolution(t);
  t.integration_time *= 2;
  CHECK(phase_resolution(t) == doctest::Approx(base / std::sqrt(2.0)).epsilon(1e-14));
  t.measured_delta_phi = 1.79e-4;
  CHECK(phase_resolution(t) == 1.79e-4);
}

TEST_CASE("rotation_resolution examples") {
  const auto g = rotation_resolution(gfring());
  CHECK(g.delta_omega == doctest::Approx(2.43e-14).epsilon(0.03));
  CHECK(g.delta_phi_projected == doctest::Approx(2.31e-8).epsilon(0.03));
  CHECK(g.regime == Regime::BelowGrRate);

  DesignSpec ours;
  ours.name = "Desk Sagnac";
  ours.geometry = InterferometerGeometry::with_area(sagnac::FrameShape::Square,
                                                    2000, 5.55, 715, 1546e-9);
  ours.measured_delta_phi = 1.79e-4;
  const auto r = rotation_resolution(ours);
  CHECK(r.scale_factor == doctest::Approx(38.8).epsilon(3e-3));
  CHECK(r.delta_omega == doctest::Approx(4.61e-6).epsilon(0.01));
  CHECK(r.regime == Regime::BelowEarthRate);
  CHECK(to_string(r.regime) == "below_omega_e");
  CHECK(r.delta_omega == doctest::Approx(r.delta_phi / r.scale_factor).epsilon(1e-14));
}

TEST_CASE("property: closed form equals delta_phi / (S sin latitude)") {
  for (double length : {5e3, 20e3, 47.5e3, 120e3}) {
    for (int turns : {1, 3, 8, 40}) {
      for (double alpha : {0.0, 0.16, 0.5}) {
        for (double lat_deg : {10.0, 48.2, 80.0}) {
          auto s = gfring(length, turns);
          s.alpha = alpha;
          s.geometry.latitude = deg_to_rad(lat_deg);
          const double a = rotation_resolution(s).delta_omega;
          const double b = square_ring_rotation_resolution(
              length, turns, alpha, s.pair_rate_in, s.integration_time,
              s.geometry.latitude, 1550e-9);
          CHECK(std::abs(a / b - 1) < 1e-12);
          // Literal formula from the oracle.
          const double c = oracle::square_ring_domega(
              length, turns, alpha, s.pair_rate_in, s.integration_time,
              s.geometry.latitude, 1550e-9);
          CHECK(std::abs(a / c - 1) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: scaling laws and monotonicity in alpha") {
  auto s = gfring();
  const auto base = rotation_resolution(s);
  s.integration_time *= 4;
  CHECK(rotation_resolution(s).delta_omega ==
        doctest::Approx(base.delta_omega / 2).epsilon(1e-13));
  s = gfring(47.5e3, 16);
  CHECK(rotation_resolution(s).delta_omega ==
        doctest::Approx(2 * base.delta_omega).epsilon(1e-13));
  double prev_phi = 0, prev_omega = 0;
  for (double alpha = 0.0; alpha <= 1.0; alpha += 0.05) {
    auto a = gfring();
    a.alpha = alpha;
    const auto r = rotation_resolution(a);
    CHECK(r.delta_phi > prev_phi);
    CHECK(r.delta_omega > prev_omega);
    prev_phi = r.delta_phi;
    prev_omega = r.delta_omega;
  }
}

TEST_CASE("optimize_gfring: reference ring parameters") {
  const auto d = optimize_gfring(reference_gfring());
  CHECK(d.turns == 8);
  CHECK(d.fiber_length == doctest::Approx(47.5e3).epsilon(0.05));
  CHECK(d.report.snr_vs_gr == doctest::Approx(3.0).epsilon(0.01));
  CHECK(d.report.snr_vs_gr >= 3.0 * (1 - 1e-9));
}

TEST_CASE("optimize_gfring: degenerate, monotone and infeasible cases") {
  auto o = reference_gfring();
  o.target_snr = 0.0;
  const auto zero = optimize_gfring(o);
  CHECK(zero.fiber_length == o.min_fiber_length);
  CHECK(zero.turns == o.max_turns);

  // n_t capped where both rates stay feasible.
  auto half = reference_gfring();
  half.max_turns = 4;
  const auto full_rate = optimize_gfring(half);
  half.pair_rate_in /= 2;
  const auto half_rate = optimize_gfring(half);
  CHECK(full_rate.turns == 4);
  CHECK(half_rate.turns == 4);
  CHECK(half_rate.fiber_length > full_rate.fiber_length);

  auto hard = reference_gfring();
  hard.target_snr = 1e6;
  try {
    optimize_gfring(hard);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.binding_constraint()) == "target_snr");
  }
  auto short_fiber = reference_gfring();
  short_fiber.max_fiber_length = 2e3;
  try {
    optimize_gfring(short_fiber);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.binding_constraint()) == "max_fiber_length");
  }
  auto bad = reference_gfring();
  bad.alpha = -1;
  CHECK_THROWS_AS(optimize_gfring(bad), ValidationError);
}

TEST_CASE("landscape: labels, empty list and deterministic ordering") {
  CHECK(landscape({}).empty());
  std::vector<DesignSpec> specs;
  DesignSpec ours;
  ours.name = "Desk Sagnac";
  ours.geometry = InterferometerGeometry::with_area(sagnac::FrameShape::Square,
                                                    2000, 5.55, 715, 1546e-9);
  ours.measured_delta_phi = 1.79e-4;
  specs.push_back(ours);
  specs.push_back(lfog());
  specs.push_back(gfring());
  for (int i = 0; i < 200; ++i) {
    auto s = gfring(10e3 + 500.0 * i, 1 + i % 9);
    s.name = "grid" + std::to_string(i);
    specs.push_back(s);
  }
  const auto serial = landscape(specs, Execution::Serial);
  const auto parallel = landscape(specs, Execution::Parallel);
  REQUIRE(serial.size() == specs.size());
  REQUIRE(parallel.size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(serial[i].index == i);
    CHECK(parallel[i].name == specs[i].name);
    CHECK(serial[i].delta_omega == parallel[i].delta_omega);
  }
  CHECK(serial[0].regime == Regime::BelowEarthRate);
  CHECK(serial[1].regime == Regime::BelowEarthRate);
  CHECK(serial[2].regime == Regime::BelowGrRate);
  CHECK(serial[2].log10_delta_omega == doctest::Approx(std::log10(2.43e-14)).epsilon(0.01));
  CHECK(classify(1e-4) == Regime::AboveEarthRate);
  CHECK(to_string(Regime::BelowGrRate) == "below_omega_gr");
}
