#pragma once

// Sagnac phase physics: geometry, scale factor, switch-controlled effective
// area and fiber loss.

#include <string>

namespace qsagnac::sagnac {

struct PhysicalConstants {
  double speed_of_light = 299792458.0;  // m/s
  double earth_rate = 7.292115e-5;      // rad/s
  double gr_ratio = 1e-9;               // Omega_GR / Omega_E

  double gr_rate() const { return gr_ratio * earth_rate; }
  void validate() const;
};

enum class FrameShape { Square, Circular };
enum class SwitchState { On, Off };

// Which component of the rotation vector couples to the loop: cos(frame
// angle) for a rotatable frame, sin(latitude) for a frame parallel to the
// ground.
enum class Projection { FrameAngle, Latitude };

std::string to_string(FrameShape shape);
std::string to_string(SwitchState state);
std::string to_string(Projection projection);
FrameShape frame_shape_from_string(const std::string& s);
SwitchState switch_state_from_string(const std::string& s);
Projection projection_from_string(const std::string& s);

// Fraction of ON-state transmission left when the switch is OFF.
inline constexpr double off_transmission = 0.9;

struct InterferometerGeometry {
  FrameShape shape = FrameShape::Square;
  double fiber_length = 0.0;  // m
  double perimeter = 0.0;     // m; 0 when unknown
  int turns = 1;
  double area = 0.0;          // effective area, m^2
  double frame_angle = 0.0;   // rad, between area vector and rotation axis
  double latitude = 0.0;      // rad
  double wavelength = 1550e-9;  // m
  // Residual |A_off| / A when the switch cancels the two half-loops.
  double off_area_imbalance = 0.0;

  // Square frame wound from `fiber_length` in `turns` turns:
  // A = (L/4)^2 / n_t, P = L / n_t.
  static InterferometerGeometry square(double fiber_length, int turns,
                                       double wavelength);
  // Circular coil of perimeter P: n_t = round(L/P), A = n_t * pi * (P/2pi)^2.
  static InterferometerGeometry circular(double fiber_length, double perimeter,
                                         double wavelength);
  // Explicit calibrated area (turns derived from L/P when P is given).
  static InterferometerGeometry with_area(FrameShape shape, double fiber_length,
                                          double perimeter, double area,
                                          double wavelength);

  // Throws ValidationError when an invariant fails.
  void validate() const;

  double projection_factor(Projection p) const;
  double effective_area(SwitchState s) const;
};

// 8 pi omega A_eff p / (lambda c), p = cos(frame_angle) or sin(latitude).
double sagnac_phase(const InterferometerGeometry& geom, double omega,
                    SwitchState state,
                    Projection projection = Projection::FrameAngle,
                    const PhysicalConstants& constants = {});

// 8 pi A / (lambda c), seconds.
double scale_factor(const InterferometerGeometry& geom,
                    const PhysicalConstants& constants = {});

// 10^(-alpha * L_km * n / 10).
double transmission(double alpha_db_per_km, double length_m, int n_photons = 1);

// Probability that all n photons survive a channel of transmission eta.
double noon_survival(double eta, int n);

}  // namespace qsagnac::sagnac
