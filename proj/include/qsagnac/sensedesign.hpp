#pragma once

// Shot-noise sensitivity of N00N-probed fiber gyroscopes and a geometry
// optimizer for a large square ring.

#include <optional>
#include <string>
#include <vector>

#include "qsagnac/sagnac.hpp"

namespace qsagnac::sensedesign {

using sagnac::InterferometerGeometry;
using sagnac::PhysicalConstants;
using sagnac::Projection;

struct DesignSpec {
  std::string name;
  InterferometerGeometry geometry;
  double alpha = 0.5;                   // dB/km
  double pair_rate_in = 1e9;            // Hz
  double integration_time = 5.56e6;     // s
  int photons = 2;
  Projection projection = Projection::FrameAngle;
  // Measured phase resolution; replaces the shot-noise estimate.
  std::optional<double> measured_delta_phi;

  void validate() const;
};

enum class Regime { AboveEarthRate, BelowEarthRate, BelowGrRate };

std::string to_string(Regime regime);
Regime classify(double delta_omega, const PhysicalConstants& constants = {});

struct SensitivityReport {
  std::string name;
  double area = 0.0;               // m^2
  double eta = 0.0;                // single-photon fiber transmission
  double pair_rate_out = 0.0;      // Hz
  double delta_phi = 0.0;          // rad, raw phase resolution
  double delta_phi_projected = 0.0;  // rad, delta_phi / p
  double scale_factor = 0.0;       // s
  double projection_factor = 1.0;  // cos(frame angle) or sin(latitude)
  double delta_omega = 0.0;        // rad/s
  double snr_vs_gr = 0.0;          // Omega_GR / delta_omega
  Regime regime = Regime::AboveEarthRate;
};

// R_in * 10^(-N alpha L_km / 10).
double pair_rate_out(const DesignSpec& spec);

// 1 / sqrt(2 R_out T), or the measured value when given.
double phase_resolution(const DesignSpec& spec);

// delta_omega = delta_phi / (S p).
SensitivityReport rotation_resolution(const DesignSpec& spec,
                                      const PhysicalConstants& constants = {});

// Closed form for a square ring with A = L^2 / (16 n_t) and p = sin(latitude):
// sqrt(2 / (R_in T)) (lambda c / (pi sin theta_L)) n_t 10^(alpha L_km / 10) / L^2.
double square_ring_rotation_resolution(double fiber_length, int turns,
                                       double alpha, double pair_rate_in,
                                       double integration_time,
                                       double latitude, double wavelength,
                                       const PhysicalConstants& constants = {});

struct GfringOptions {
  double target_snr = 3.0;
  double latitude = 0.0;  // rad
  double alpha = 0.16;    // dB/km
  double pair_rate_in = 10e9;
  double integration_time = 5.56e6;
  double wavelength = 1550e-9;
  int photons = 2;
  int max_turns = 1000;
  double min_fiber_length = 1e3;   // m
  double max_fiber_length = 1e6;   // m
  PhysicalConstants constants;

  void validate() const;
};

struct GfringDesign {
  double fiber_length = 0.0;  // m
  int turns = 0;
  DesignSpec spec;
  SensitivityReport report;
};

// Largest n_t for which some fiber length reaches Omega_GR / delta_omega >=
// target_snr, and the shortest such length. Throws InfeasibleError naming the
// binding constraint.
GfringDesign optimize_gfring(const GfringOptions& options);

enum class Execution { Serial, Parallel };

struct LandscapePoint {
  std::size_t index = 0;
  std::string name;
  double area = 0.0;
  double delta_omega = 0.0;
  double log10_area = 0.0;
  double log10_delta_omega = 0.0;
  Regime regime = Regime::AboveEarthRate;
};

// One point per spec, in input order.
std::vector<LandscapePoint> landscape(const std::vector<DesignSpec>& specs,
                                      Execution execution = Execution::Parallel,
                                      const PhysicalConstants& constants = {});

}  // namespace qsagnac::sensedesign
