#pragma once

// Synthetic experiment: photon count records for fringe scans and CW
// polarimeter traces, with the apparatus' rates, losses, switch modulation
// and noise.

#include <cstdint>
#include <vector>

#include "qsagnac/probe.hpp"
#include "qsagnac/sagnac.hpp"

namespace qsagnac::expsim {

using sagnac::InterferometerGeometry;
using sagnac::SwitchState;

struct NoiseConfig {
  // Bias-offset error of the waveplate motors. One draw per scan, shared by
  // every bias setting and both switch states.
  double motor_repeatability_sigma = 2.4e-3;  // rad
  // Additional per-setting offset error, shared by the ON and OFF records.
  double motor_jitter_sigma = 0.0;  // rad
  double dark_rate = 300.0;               // Hz per detector
  double background_singles_rate = 0.0;   // Hz per detector, feeds accidentals
  double coincidence_window = 3.75e-9;    // s
  double phase_drift_rate = 0.0;          // rad/s, linear drift of the bias
  double phase_random_walk = 0.0;         // rad/sqrt(s)
  double polarimeter_noise_sigma = 0.0;   // rad per polarimeter sample
  double azimuth_leakage_fraction = 0.1;  // share of the signal seen on psi

  void validate() const;
  // r1 r2 tau with r = dark + background singles.
  double accidental_rate() const;
  // Every noise source disabled.
  static NoiseConfig none();
};

struct RateConfig {
  double pair_rate_detected = 4e3;     // Hz, two-photon coincidences
  double heralded_single_rate = 20e3;  // Hz, both output ports
  double cw_sample_rate = 20.0;        // Hz, polarimeter

  void validate() const;
  // Rates implied by a source pair rate and the interferometer/trigger
  // transmissions: pairs survive with eta_i^2, heralded singles with
  // eta_t * eta_i.
  static RateConfig from_source(double source_pair_rate,
                                double interferometer_transmission,
                                double trigger_transmission);
};

struct SwitchSchedule {
  double frequency = 0.1;              // Hz
  double duty = 0.5;                   // ON fraction of each period
  double transition_halfwidth = 10e-3; // s, discarded around each edge
  double noisy_halfwidth = 10e-3;      // s, where the switch is physically unsettled

  static SwitchSchedule for_counts();
  static SwitchSchedule for_polarimeter();

  void validate() const;
  double period() const { return 1.0 / frequency; }
  // ON during the first `duty` fraction of each period.
  SwitchState state_at(double t) const;
  double distance_to_edge(double t) const;
  // Usable fraction of wall time spent in `state` after edge cuts.
  double live_fraction(SwitchState state) const;
};

struct SourceConfig {
  double single_photon_visibility = 1.0;
  double distinguishability = 0.0;  // two-photon visibility is 1 - d
  double channel_ratio = 1.0;       // A_H / A_V for the heralded scan

  void validate() const;
};

enum class SamplingMode { Poisson, Expected };

struct ExperimentConfig {
  RateConfig rates;
  NoiseConfig noise;
  SwitchSchedule schedule = SwitchSchedule::for_counts();
  SourceConfig source;
  SamplingMode sampling = SamplingMode::Poisson;

  void validate() const;
};

struct CountRecord {
  double frame_angle = 0.0;  // rad
  double phi0 = 0.0;         // nominal bias phase, rad
  SwitchState state = SwitchState::On;
  double duration = 0.0;     // live time, s
  std::int64_t n_h = 0;
  std::int64_t n_v = 0;
  std::int64_t n_hv = 0;
};

// Bias phases of one fringe scan and the wall time spent at each of them
// (both switch states interleaved).
struct CountingPlan {
  std::vector<double> phi0;
  double set_duration = 1800.0;  // s

  static std::vector<double> linspace(double start, double stop, int count);
  // 11 settings over [-pi/8, 2pi + pi/8], 30 min each.
  static CountingPlan two_photon_default();
  // 11 settings over [-pi/4, 2pi + pi/4], 15 min each.
  static CountingPlan single_photon_default();

  void validate() const;
};

// One ON and one OFF record per bias phase, in plan order (ON first).
//
// The detected fringe is cos(N (phi0 + offset) - N phi_s): the Sagnac phase
// is acquired by the H (clockwise) mode while the bias acts on V, so a
// positive rotation moves the fitted fringe phase down and
// phi_off - phi_on = N phi_s.
std::vector<CountRecord> simulate_counts(const probe::ProbeKind& kind,
                                         const InterferometerGeometry& geom,
                                         const CountingPlan& plan,
                                         const ExperimentConfig& config,
                                         double true_omega, std::uint64_t seed);

struct AngleRecords {
  double frame_angle = 0.0;
  std::vector<CountRecord> records;
};

// simulate_counts at each frame angle; angle i uses its own substream.
std::vector<AngleRecords> angle_sweep(const probe::ProbeKind& kind,
                                      const InterferometerGeometry& geom,
                                      const std::vector<double>& frame_angles,
                                      const std::vector<CountingPlan>& plans,
                                      const ExperimentConfig& config,
                                      double true_omega, std::uint64_t seed);

struct PolarimeterSample {
  double t = 0.0;
  double psi = 0.0;
  double chi = 0.0;
  bool drive = false;  // true while the switch is driven ON
};

struct PolarimeterTrace {
  double sample_rate = 20.0;
  std::vector<PolarimeterSample> samples;
};

// CW polarimeter trace behind the compensated readout optics. The trace keeps
// the transition samples; the analysis cuts them.
PolarimeterTrace simulate_polarimeter(const InterferometerGeometry& geom,
                                      const SwitchSchedule& schedule,
                                      const RateConfig& rates,
                                      const NoiseConfig& noise,
                                      double true_omega, double total_time,
                                      std::uint64_t seed);

}  // namespace qsagnac::expsim
