#include <doctest.h>

#include "oracles.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/sagnac.hpp"
#include "qsagnac/units.hpp"

using namespace qsagnac;
using namespace qsagnac::sagnac;

namespace {

InterferometerGeometry our_frame() {
  return InterferometerGeometry::with_area(FrameShape::Square, 2000.0, 5.55,
                                           715.0, 1546e-9);
}

}  // namespace

TEST_CASE("sagnac_phase examples") {
  auto g = our_frame();
  const double phi = sagnac_phase(g, 7.29e-5, SwitchState::On);
  CHECK(phi == doctest::Approx(oracle::sagnac_phase(715, 7.29e-5, 0, 1546e-9))
                   .epsilon(1e-13));
  CHECK(phi == doctest::Approx(2.83e-3).epsilon(2e-3));
  CHECK(sagnac_phase(g, 7.29e-5, SwitchState::Off) == 0.0);
  g.frame_angle = pi / 2;
  CHECK(std::abs(sagnac_phase(g, 7.29e-5, SwitchState::On)) < 1e-18);
}

TEST_CASE("scale_factor examples") {
  CHECK(scale_factor(our_frame()) == doctest::Approx(38.8).epsilon(3e-3));
  const auto cfog = InterferometerGeometry::with_area(FrameShape::Circular,
                                                      3000, 0.63, 150, 1550e-9);
  CHECK(scale_factor(cfog) == doctest::Approx(8.1).epsilon(0.015));
  const auto gfring = InterferometerGeometry::square(47.5e3, 8, 1550e-9);
  CHECK(gfring.area == doctest::Approx(17.6e6).epsilon(3e-3));
  CHECK(scale_factor(gfring) == doctest::Approx(951320).epsilon(0.01));
}

TEST_CASE("transmission and noon_survival examples") {
  CHECK(transmission(0.0, 5000, 1) == 1.0);
  CHECK(transmission(0.5, 2000, 1) == doctest::Approx(0.794).epsilon(1e-3));
  CHECK(transmission(0.16, 47.5e3, 2) ==
        doctest::Approx(std::pow(10.0, -1.52)).epsilon(1e-12));
  CHECK(noon_survival(0.1, 2) == doctest::Approx(0.01));
  CHECK(1.0 - noon_survival(0.1, 2) == doctest::Approx(0.99));
  CHECK(noon_survival(1.0, 7) == 1.0);
  CHECK(noon_survival(0.5 * 0.1, 1) == doctest::Approx(0.05));
  CHECK_THROWS_AS(transmission(-1.0, 10, 1), ValidationError);
  CHECK_THROWS_AS(noon_survival(0.0, 2), ValidationError);
}

TEST_CASE("geometry invariants") {
  const auto sq = InterferometerGeometry::square(8000, 4, 1550e-9);
  CHECK(sq.area == doctest::Approx(2000.0 * 2000.0 / 4));
  CHECK(sq.perimeter == doctest::Approx(2000.0));
  const auto c = InterferometerGeometry::circular(8000, 2.15, 1550e-9);
  CHECK(c.turns == 3721);
  CHECK(c.area == doctest::Approx(3721 * pi * std::pow(2.15 / (2 * pi), 2)));
  auto bad = sq;
  bad.turns = 10;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = sq;
  bad.area = -1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(InterferometerGeometry::square(-1, 1, 1550e-9),
                  ValidationError);
  PhysicalConstants k;
  k.gr_ratio = 0;
  CHECK_THROWS_AS(k.validate(), ValidationError);
}

TEST_CASE("property: linearity, parity and scale-factor identity") {
  auto g = our_frame();
  for (double th : {-1.2, -0.4, 0.0, 0.3, 1.0}) {
    g.frame_angle = th;
    const double p1 = sagnac_phase(g, 1e-5, SwitchState::On);
    CHECK(sagnac_phase(g, 3e-5, SwitchState::On) ==
          doctest::Approx(3 * p1).epsilon(1e-14));
    auto g2 = g;
    g2.area *= 2;
    CHECK(sagnac_phase(g2, 1e-5, SwitchState::On) ==
          doctest::Approx(2 * p1).epsilon(1e-14));
    auto gm = g;
    gm.frame_angle = -th;
    CHECK(sagnac_phase(gm, 1e-5, SwitchState::On) ==
          doctest::Approx(p1).epsilon(1e-14));
    CHECK(p1 / scale_factor(g) ==
          doctest::Approx(1e-5 * std::cos(th)).epsilon(1e-14));
  }
  const auto a = InterferometerGeometry::square(10e3, 3, 1550e-9);
  const auto b = InterferometerGeometry::square(10e3, 6, 1550e-9);
  CHECK(b.area == doctest::Approx(a.area / 2));
  CHECK(transmission(0.3, 1500, 1) * transmission(0.3, 2500, 1) ==
        doctest::Approx(transmission(0.3, 4000, 1)).epsilon(1e-14));
}

TEST_CASE("latitude projection and enum strings") {
  auto g = our_frame();
  g.latitude = deg_to_rad(48.2);
  CHECK(sagnac_phase(g, 1e-5, SwitchState::On, Projection::Latitude) ==
        doctest::Approx(scale_factor(g) * 1e-5 * std::sin(g.latitude)));
  CHECK(to_string(switch_state_from_string("off")) == "off");
  CHECK(frame_shape_from_string("circular") == FrameShape::Circular);
  CHECK(projection_from_string("latitude") == Projection::Latitude);
  CHECK_THROWS_AS(frame_shape_from_string("hex"), ValidationError);
}
