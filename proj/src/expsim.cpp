#include "qsagnac/expsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qsagnac/errors.hpp"
#include "qsagnac/polarization.hpp"
#include "qsagnac/rng.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::expsim {

void NoiseConfig::validate() const {
  if (motor_repeatability_sigma < 0.0 || motor_jitter_sigma < 0.0 ||
      dark_rate < 0.0 || background_singles_rate < 0.0 ||
      coincidence_window < 0.0 || phase_random_walk < 0.0 ||
      polarimeter_noise_sigma < 0.0)
    throw ValidationError("noise: parameters must be non-negative");
  if (azimuth_leakage_fraction < 0.0 || azimuth_leakage_fraction >= 1.0)
    throw ValidationError("noise: azimuth_leakage_fraction must be in [0, 1)");
}

double NoiseConfig::accidental_rate() const {
  const double r = dark_rate + background_singles_rate;
  return r * r * coincidence_window;
}

NoiseConfig NoiseConfig::none() {
  NoiseConfig n;
  n.motor_repeatability_sigma = 0.0;
  n.motor_jitter_sigma = 0.0;
  n.dark_rate = 0.0;
  n.background_singles_rate = 0.0;
  n.phase_drift_rate = 0.0;
  n.phase_random_walk = 0.0;
  n.polarimeter_noise_sigma = 0.0;
  n.azimuth_leakage_fraction = 0.0;
  return n;
}

void RateConfig::validate() const {
  if (!(pair_rate_detected > 0.0) || !(heralded_single_rate > 0.0) ||
      !(cw_sample_rate > 0.0))
    throw ValidationError("rates must be positive");
}

RateConfig RateConfig::from_source(double source_pair_rate,
                                   double interferometer_transmission,
                                   double trigger_transmission) {
  RateConfig r;
  r.pair_rate_detected =
      source_pair_rate *
      sagnac::noon_survival(interferometer_transmission, 2);
  r.heralded_single_rate =
      source_pair_rate * trigger_transmission * interferometer_transmission;
  r.validate();
  return r;
}

SwitchSchedule SwitchSchedule::for_counts() { return {}; }

SwitchSchedule SwitchSchedule::for_polarimeter() {
  SwitchSchedule s;
  s.transition_halfwidth = 50e-3;
  return s;
}

void SwitchSchedule::validate() const {
  if (!(frequency > 0.0)) throw ValidationError("schedule: frequency > 0");
  if (!(duty > 0.0 && duty < 1.0))
    throw ValidationError("schedule: duty must be in (0, 1)");
  if (transition_halfwidth < 0.0 || noisy_halfwidth < 0.0)
    throw ValidationError("schedule: half-widths must be non-negative");
  if (!(transition_halfwidth * 2.0 * frequency < std::min(duty, 1.0 - duty)))
    throw ValidationError(
        "schedule: transition cuts leave no live time in a switch state");
}

SwitchState SwitchSchedule::state_at(double t) const {
  double frac = std::fmod(t * frequency, 1.0);
  if (frac < 0.0) frac += 1.0;
  return frac < duty ? SwitchState::On : SwitchState::Off;
}

double SwitchSchedule::distance_to_edge(double t) const {
  const double p = period();
  const double k = std::floor(t / p);
  const double start = k * p;
  const double candidates[] = {t - start, std::abs(t - (start + duty * p)),
                               start + p - t};
  return *std::min_element(std::begin(candidates), std::end(candidates));
}

double SwitchSchedule::live_fraction(SwitchState state) const {
  const double share = state == SwitchState::On ? duty : 1.0 - duty;
  return share - 2.0 * transition_halfwidth * frequency;
}

void SourceConfig::validate() const {
  if (single_photon_visibility < 0.0 || single_photon_visibility > 1.0)
    throw ValidationError("source: single_photon_visibility in [0, 1]");
  if (distinguishability < 0.0 || distinguishability > 1.0)
    throw ValidationError("source: distinguishability in [0, 1]");
  if (!(channel_ratio > 0.0))
    throw ValidationError("source: channel_ratio must be positive");
}

void ExperimentConfig::validate() const {
  rates.validate();
  noise.validate();
  schedule.validate();
  source.validate();
}

std::vector<double> CountingPlan::linspace(double start, double stop,
                                           int count) {
  if (count < 1) throw ValidationError("linspace: count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        count == 1 ? start : start + (stop - start) * i / (count - 1);
  return out;
}

CountingPlan CountingPlan::two_photon_default() {
  return {linspace(-pi / 8.0, 2.0 * pi + pi / 8.0, 11), 1800.0};
}

CountingPlan CountingPlan::single_photon_default() {
  return {linspace(-pi / 4.0, 2.0 * pi + pi / 4.0, 11), 900.0};
}

void CountingPlan::validate() const {
  if (phi0.empty()) throw ValidationError("plan: phi0 list is empty");
  if (!(set_duration > 0.0))
    throw ValidationError("plan: record duration must be positive");
}

namespace {

std::int64_t sample_count(double mean, SamplingMode mode,
                          std::mt19937_64& rng) {
  if (!(mean > 0.0)) return 0;
  if (mode == SamplingMode::Expected) return std::llround(mean);
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

double normal(std::mt19937_64& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

}  // namespace

std::vector<CountRecord> simulate_counts(const probe::ProbeKind& kind,
                                         const InterferometerGeometry& geom,
                                         const CountingPlan& plan,
                                         const ExperimentConfig& config,
                                         double true_omega,
                                         std::uint64_t seed) {
  if (kind.type == probe::ProbeType::Classical)
    throw ValidationError(
        "simulate_counts: classical light is read out by the polarimeter");
  geom.validate();
  plan.validate();
  config.validate();

  const NoiseConfig& noise = config.noise;
  const int n = kind.enhancement();
  const bool two_photon = kind.type == probe::ProbeType::Noon;
  const double visibility =
      two_photon ? probe::two_photon_visibility(config.source.distinguishability)
                 : config.source.single_photon_visibility;
  const double accidentals = noise.accidental_rate();

  auto scan_rng = substream(seed, StreamTag::ScanOffset);
  const double common_offset = normal(scan_rng, noise.motor_repeatability_sigma);

  // Bias drift at the centre of each (interleaved) set.
  std::vector<double> drift(plan.phi0.size(), 0.0);
  {
    auto drift_rng = substream(seed, StreamTag::Drift);
    double walk = 0.0;
    double t_prev = 0.0;
    for (std::size_t k = 0; k < plan.phi0.size(); ++k) {
      const double t = (static_cast<double>(k) + 0.5) * plan.set_duration;
      walk += normal(drift_rng, noise.phase_random_walk * std::sqrt(t - t_prev));
      t_prev = t;
      drift[k] = noise.phase_drift_rate * t + walk;
    }
  }

  std::vector<CountRecord> out;
  out.reserve(plan.phi0.size() * 2);
  for (std::size_t k = 0; k < plan.phi0.size(); ++k) {
    auto offset_rng = substream(seed, StreamTag::RecordOffset, k);
    const double offset =
        common_offset + normal(offset_rng, noise.motor_jitter_sigma) + drift[k];
    for (SwitchState state : {SwitchState::On, SwitchState::Off}) {
      const double phi_s = sagnac::sagnac_phase(geom, true_omega, state);
      const double duration =
          plan.set_duration * config.schedule.live_fraction(state);
      const double tf = state == SwitchState::On ? 1.0 : sagnac::off_transmission;
      const double c = std::cos(n * (plan.phi0[k] + offset) - n * phi_s);

      CountRecord rec;
      rec.frame_angle = geom.frame_angle;
      rec.phi0 = plan.phi0[k];
      rec.state = state;
      rec.duration = duration;
      auto count_rng =
          substream(seed, StreamTag::RecordCounts,
                    2 * k + (state == SwitchState::On ? 0 : 1));
      if (two_photon) {
        const double mean =
            config.rates.pair_rate_detected * duration * tf * 0.5 *
                (1.0 + visibility * c) +
            accidentals * duration;
        rec.n_hv = sample_count(mean, config.sampling, count_rng);
      } else {
        const double total =
            2.0 * config.rates.heralded_single_rate * duration * tf;
        const double r = config.source.channel_ratio;
        const double a_h = total * r / (1.0 + r);
        const double a_v = total / (1.0 + r);
        const double mean_h =
            0.5 * a_h * (1.0 + visibility * c) + accidentals * duration;
        const double mean_v =
            0.5 * a_v * (1.0 - visibility * c) + accidentals * duration;
        rec.n_h = sample_count(mean_h, config.sampling, count_rng);
        rec.n_v = sample_count(mean_v, config.sampling, count_rng);
      }
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<AngleRecords> angle_sweep(const probe::ProbeKind& kind,
                                      const InterferometerGeometry& geom,
                                      const std::vector<double>& frame_angles,
                                      const std::vector<CountingPlan>& plans,
                                      const ExperimentConfig& config,
                                      double true_omega, std::uint64_t seed) {
  if (plans.size() != 1 && plans.size() != frame_angles.size())
    throw ValidationError(
        "angle_sweep: need one counting plan or one per frame angle");
  std::vector<AngleRecords> out;
  out.reserve(frame_angles.size());
  for (std::size_t i = 0; i < frame_angles.size(); ++i) {
    InterferometerGeometry g = geom;
    g.frame_angle = frame_angles[i];
    const CountingPlan& plan = plans.size() == 1 ? plans[0] : plans[i];
    const std::uint64_t angle_seed =
        substream(seed, StreamTag::AngleSweep, i)();
    out.push_back({frame_angles[i],
                   simulate_counts(kind, g, plan, config, true_omega,
                                   angle_seed)});
  }
  return out;
}

PolarimeterTrace simulate_polarimeter(const InterferometerGeometry& geom,
                                      const SwitchSchedule& schedule,
                                      const RateConfig& rates,
                                      const NoiseConfig& noise,
                                      double true_omega, double total_time,
                                      std::uint64_t seed) {
  geom.validate();
  schedule.validate();
  rates.validate();
  noise.validate();
  if (total_time * schedule.frequency < 10.0 - 1e-9)
    throw ValidationError(
        "simulate_polarimeter: trace must cover at least 10 switch periods");

  using namespace polarization;
  const double leak_angle = std::asin(noise.azimuth_leakage_fraction);
  const JonesMatrix leakage = hv_retarder(leak_angle);
  auto readout = [&](double phi) {
    return ellipse_of(leakage * cw_readout(phi, JonesMatrix::identity()));
  };
  const double phi_on =
      sagnac::sagnac_phase(geom, true_omega, SwitchState::On);
  const double phi_off =
      sagnac::sagnac_phase(geom, true_omega, SwitchState::Off);
  const PolarizationEllipse on = readout(phi_on);
  const PolarizationEllipse off = readout(phi_off);
  const PolarizationEllipse mid = readout(0.5 * (phi_on + phi_off));

  PolarimeterTrace trace;
  trace.sample_rate = rates.cw_sample_rate;
  const auto count =
      static_cast<std::size_t>(std::floor(total_time * rates.cw_sample_rate));
  trace.samples.reserve(count);

  auto rng = substream(seed, StreamTag::Polarimeter);
  auto drift_rng = substream(seed, StreamTag::Drift);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double dt = 1.0 / rates.cw_sample_rate;
  double walk = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / rates.cw_sample_rate;
    if (i > 0 && noise.phase_random_walk > 0.0)
      walk += noise.phase_random_walk * std::sqrt(dt) * unit(drift_rng);
    const SwitchState state = schedule.state_at(t);
    const PolarizationEllipse& level =
        schedule.distance_to_edge(t) <= schedule.noisy_halfwidth + 1e-9
            ? mid
            : (state == SwitchState::On ? on : off);
    const double drift = 0.5 * (noise.phase_drift_rate * t + walk);
    PolarimeterSample s;
    s.t = t;
    s.drive = state == SwitchState::On;
    s.chi = level.ellipticity + drift;
    s.psi = level.azimuth;
    if (noise.polarimeter_noise_sigma > 0.0) {
      s.chi += noise.polarimeter_noise_sigma * unit(rng);
      s.psi += noise.polarimeter_noise_sigma * unit(rng);
    }
    trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace qsagnac::expsim
