#pragma once

// Estimation pipeline: fringe fits, Monte-Carlo uncertainties, switch
// demodulation, Earth-phase extraction, angle-sweep and scale-factor fits.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsagnac/expsim.hpp"
#include "qsagnac/nlls.hpp"
#include "qsagnac/sagnac.hpp"
#include "qsagnac/stats.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::analysis {

using expsim::CountRecord;

enum class Execution { Serial, Parallel };

// TwoPhoton:    y = (A/2) [1 + V cos(k phi0 + phi)],  params (A, V, phi)
// SinglePhoton: y = a (1 - V c) / (1 + eta V c), c = cos(phi0 + phi),
//               params (a, eta, V, phi), y = N_V / (N_H + N_V)
enum class FringeModel { TwoPhoton, SinglePhoton };

std::string to_string(FringeModel model);

struct FringeSample {
  double phi0 = 0.0;
  double value = 0.0;
  double variance = 1.0;
};

struct FringeParameters {
  double amplitude = 0.0;  // A_HV or a_V
  double eta = 0.0;        // SinglePhoton only
  double visibility = 0.0;
  double phase = 0.0;
};

struct FringeFit {
  FringeModel model = FringeModel::TwoPhoton;
  int harmonic = 2;  // k for the two-photon model
  FringeParameters params;
  FringeParameters sigmas;
  Eigen::MatrixXd covariance;  // order as listed for the model
  double rss = 0.0;            // weighted residual sum of squares
  int iterations = 0;
  int starts = 0;
  bool converged = false;
  std::string diagnostics;
};

struct FitOptions {
  LmOptions lm;
  int phase_starts = 8;
  // Tried before the phase grid when present.
  std::optional<FringeParameters> initial;
  // Skip the phase grid when the initial guess converges.
  bool warm_start_only = false;
};

// Observables with Poisson weights (variance floored at one count).
std::vector<FringeSample> noon_samples(std::span<const CountRecord> records);
std::vector<FringeSample> single_samples(std::span<const CountRecord> records);

double model_value(FringeModel model, int harmonic, const FringeParameters& p,
                   double phi0);

// Multi-start damped least squares. Returns converged = false when every
// start fails; throws DegenerateDesignError when the data cannot identify
// the phase.
FringeFit nlls(FringeModel model, std::span<const FringeSample> samples,
               const FitOptions& options = {}, int harmonic = 2);

// Throw FitError when the optimizer does not converge.
FringeFit fit_noon_fringe(std::span<const CountRecord> records,
                          const FitOptions& options = {}, int photons = 2);
FringeFit fit_single_fringe(std::span<const CountRecord> records,
                            const FitOptions& options = {});

struct EarthPhaseResult {
  double phi_on = 0.0;
  double phi_on_sigma = 0.0;
  double phi_off = 0.0;
  double phi_off_sigma = 0.0;
  double phi_e = 0.0;  // wrap(phi_off - phi_on)
  double phi_e_sigma = 0.0;
  std::string sigma_method = "quadrature";
};

EarthPhaseResult extract_earth_phase(const FringeFit& fit_on,
                                     const FringeFit& fit_off);

// Bias-offset noise applied in Monte-Carlo resampling.
struct OffsetNoise {
  double common_sigma = 0.0;       // one draw per sample, all settings
  double per_setting_sigma = 0.0;  // one draw per bias setting
};

struct McOptions {
  std::size_t samples = 100000;
  OffsetNoise offsets;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;
  int photons = 2;
  double max_failure_fraction = 0.01;
};

inline constexpr std::size_t mc_fast_samples = 1000;

struct McResult {
  FringeModel model = FringeModel::TwoPhoton;
  std::size_t samples = 0;
  std::size_t failures = 0;
  stats::MeanStd amplitude, eta, visibility, phase;
};

// Resample counts ~ Poisson(observed), perturb bias offsets, refit; mean and
// standard deviation over samples. Throws FitError when more than
// max_failure_fraction of the refits fail.
McResult mc_uncertainty(std::span<const CountRecord> records,
                        FringeModel model, const McOptions& options);

struct EarthPhaseMc {
  McResult on;
  McResult off;
  stats::MeanStd phi_e;
  EarthPhaseResult result;  // MC means and sigmas
};

// Joint resampling of an ON/OFF pair: bias offsets are shared between the
// two switch states, so common-mode offsets cancel in phi_e.
EarthPhaseMc mc_earth_phase(std::span<const CountRecord> on,
                            std::span<const CountRecord> off,
                            FringeModel model, const McOptions& options);

struct DemodulationResult {
  double delta_chi = 0.0;
  double delta_psi = 0.0;
  double phi_s = 0.0;  // 2 sqrt(dchi^2 + dpsi^2), sign of dchi
  double phi_s_sigma = 0.0;
  std::size_t segments = 0;
  std::size_t samples_used = 0;
};

// Cuts samples within schedule.transition_halfwidth of each edge, averages
// every half-period and differences each segment against the interpolated
// neighbouring segments of the opposite state (rejects linear drift).
DemodulationResult demodulate_trace(const expsim::PolarimeterTrace& trace,
                                    const expsim::SwitchSchedule& schedule);

struct PhasePoint {
  double frame_angle = 0.0;  // rad
  double phase = 0.0;        // rad
  double sigma = 0.0;        // rad
};

struct CalibrationOptions {
  double earth_rate = 7.29e-5;
  std::size_t samples = 10000;
  double angle_halfwidth = deg_to_rad(1.0);
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;
};

struct CalibrationResult {
  double scale_factor = 0.0;  // MC mean, s
  double scale_factor_sigma = 0.0;
  double theta_offset = 0.0;  // MC mean, rad
  double theta_offset_sigma = 0.0;
  double nominal_scale_factor = 0.0;  // fit to the unperturbed data
  double nominal_theta_offset = 0.0;
  std::size_t samples = 0;
};

// phi(theta) = S Omega cos(theta + theta0), weighted by 1/sigma^2, with
// phases resampled ~ N(phi, sigma) and angles ~ U[theta - h, theta + h].
CalibrationResult calibrate_scale_factor(std::span<const PhasePoint> points,
                                         const CalibrationOptions& options);

struct CosineFit {
  double amplitude = 0.0;
  double amplitude_sigma = 0.0;
  double offset = 0.0;  // rad
  double offset_sigma = 0.0;
};

// Weighted linear least squares for amplitude * cos(theta + offset).
CosineFit fit_cosine(std::span<const PhasePoint> points);

struct AngleSweepFit {
  double max_phase = 0.0;
  double max_phase_sigma = 0.0;
  double offset = 0.0;
  double offset_sigma = 0.0;
  double omega = 0.0;
  double omega_sigma = 0.0;
};

// max_phase = fitted amplitude; omega = max_phase / (enhancement * S).
AngleSweepFit fit_angle_sweep(std::span<const PhasePoint> earth_phases,
                              const sagnac::InterferometerGeometry& geom,
                              int enhancement,
                              const sagnac::PhysicalConstants& constants = {});

struct Ratio {
  double value = 0.0;
  double sigma = 0.0;
};

// First-order propagated ratio two / one. Throws DegenerateDesignError when
// |one| < 3 sigma_one.
Ratio enhancement_factor(double two, double two_sigma, double one,
                         double one_sigma);

}  // namespace qsagnac::analysis
