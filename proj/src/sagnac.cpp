#include "qsagnac/sagnac.hpp"

#include <algorithm>
#include <cmath>

#include "qsagnac/errors.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::sagnac {

void PhysicalConstants::validate() const {
  if (!(speed_of_light > 0.0) || !(earth_rate > 0.0) || !(gr_ratio > 0.0))
    throw ValidationError("physical constants must be strictly positive");
}

std::string to_string(FrameShape shape) {
  return shape == FrameShape::Square ? "square" : "circular";
}

std::string to_string(SwitchState state) {
  return state == SwitchState::On ? "on" : "off";
}

std::string to_string(Projection projection) {
  return projection == Projection::FrameAngle ? "frame_angle" : "latitude";
}

FrameShape frame_shape_from_string(const std::string& s) {
  if (s == "square") return FrameShape::Square;
  if (s == "circular") return FrameShape::Circular;
  throw ValidationError("unknown frame shape '" + s + "'");
}

SwitchState switch_state_from_string(const std::string& s) {
  if (s == "on" || s == "ON") return SwitchState::On;
  if (s == "off" || s == "OFF") return SwitchState::Off;
  throw ValidationError("unknown switch state '" + s + "'");
}

Projection projection_from_string(const std::string& s) {
  if (s == "frame_angle" || s == "cos") return Projection::FrameAngle;
  if (s == "latitude" || s == "sin") return Projection::Latitude;
  throw ValidationError("unknown projection '" + s + "'");
}

InterferometerGeometry InterferometerGeometry::square(double fiber_length,
                                                      int turns,
                                                      double wavelength) {
  if (turns < 1) throw ValidationError("square geometry needs turns >= 1");
  InterferometerGeometry g;
  g.shape = FrameShape::Square;
  g.fiber_length = fiber_length;
  g.turns = turns;
  g.perimeter = fiber_length / turns;
  const double side_total = fiber_length / 4.0;
  g.area = side_total * side_total / turns;
  g.wavelength = wavelength;
  g.validate();
  return g;
}

InterferometerGeometry InterferometerGeometry::circular(double fiber_length,
                                                        double perimeter,
                                                        double wavelength) {
  if (!(perimeter > 0.0))
    throw ValidationError("circular geometry needs a positive perimeter");
  InterferometerGeometry g;
  g.shape = FrameShape::Circular;
  g.fiber_length = fiber_length;
  g.perimeter = perimeter;
  g.turns = static_cast<int>(std::lround(fiber_length / perimeter));
  const double radius = perimeter / (2.0 * pi);
  g.area = g.turns * pi * radius * radius;
  g.wavelength = wavelength;
  g.validate();
  return g;
}

InterferometerGeometry InterferometerGeometry::with_area(FrameShape shape,
                                                         double fiber_length,
                                                         double perimeter,
                                                         double area,
                                                         double wavelength) {
  InterferometerGeometry g;
  g.shape = shape;
  g.fiber_length = fiber_length;
  g.perimeter = perimeter;
  g.turns = perimeter > 0.0
                ? std::max(1, static_cast<int>(std::lround(fiber_length / perimeter)))
                : 1;
  g.area = area;
  g.wavelength = wavelength;
  g.validate();
  return g;
}

void InterferometerGeometry::validate() const {
  if (!(fiber_length > 0.0))
    throw ValidationError("geometry: fiber length must be positive");
  if (!(area > 0.0)) throw ValidationError("geometry: area must be positive");
  if (!(wavelength > 0.0))
    throw ValidationError("geometry: wavelength must be positive");
  if (turns < 1) throw ValidationError("geometry: turns must be >= 1");
  if (perimeter < 0.0)
    throw ValidationError("geometry: perimeter must be non-negative");
  if (perimeter > 0.0 && std::abs(turns - fiber_length / perimeter) > 1.0)
    throw ValidationError("geometry: turns inconsistent with L_f / P");
  if (off_area_imbalance < 0.0 || off_area_imbalance > 1.0)
    throw ValidationError("geometry: off_area_imbalance must be in [0, 1]");
}

double InterferometerGeometry::projection_factor(Projection p) const {
  return p == Projection::FrameAngle ? std::cos(frame_angle)
                                     : std::sin(latitude);
}

double InterferometerGeometry::effective_area(SwitchState s) const {
  return s == SwitchState::On ? area : off_area_imbalance * area;
}

double sagnac_phase(const InterferometerGeometry& geom, double omega,
                    SwitchState state, Projection projection,
                    const PhysicalConstants& constants) {
  return 8.0 * pi * omega * geom.effective_area(state) *
         geom.projection_factor(projection) /
         (geom.wavelength * constants.speed_of_light);
}

double scale_factor(const InterferometerGeometry& geom,
                    const PhysicalConstants& constants) {
  return 8.0 * pi * geom.area / (geom.wavelength * constants.speed_of_light);
}

double transmission(double alpha_db_per_km, double length_m, int n_photons) {
  if (alpha_db_per_km < 0.0)
    throw ValidationError("transmission: attenuation must be non-negative");
  if (n_photons < 1) throw ValidationError("transmission: n_photons >= 1");
  return std::pow(10.0, -alpha_db_per_km * (length_m / 1000.0) * n_photons /
                            10.0);
}

double noon_survival(double eta, int n) {
  if (!(eta > 0.0) || eta > 1.0)
    throw ValidationError("noon_survival: eta must be in (0, 1]");
  if (n < 1) throw ValidationError("noon_survival: n >= 1");
  return std::pow(eta, n);
}

}  // namespace qsagnac::sagnac
