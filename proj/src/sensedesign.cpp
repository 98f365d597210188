#include "qsagnac/sensedesign.hpp"

#include <cmath>
#include <sstream>

#include "qsagnac/errors.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::sensedesign {

void DesignSpec::validate() const {
  geometry.validate();
  if (alpha < 0.0) throw ValidationError(name + ": alpha must be >= 0");
  if (!(pair_rate_in > 0.0))
    throw ValidationError(name + ": pair rate must be positive");
  if (!(integration_time > 0.0))
    throw ValidationError(name + ": integration time must be positive");
  if (photons < 1) throw ValidationError(name + ": photons must be >= 1");
  if (measured_delta_phi && !(*measured_delta_phi > 0.0))
    throw ValidationError(name + ": measured delta_phi must be positive");
  if (!(geometry.projection_factor(projection) > 0.0))
    throw ValidationError(name + ": projection factor must be positive");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::AboveEarthRate:
      return "above_omega_e";
    case Regime::BelowEarthRate:
      return "below_omega_e";
    case Regime::BelowGrRate:
      return "below_omega_gr";
  }
  return "unknown";
}

Regime classify(double delta_omega, const PhysicalConstants& constants) {
  if (delta_omega < constants.gr_rate()) return Regime::BelowGrRate;
  if (delta_omega < constants.earth_rate) return Regime::BelowEarthRate;
  return Regime::AboveEarthRate;
}

double pair_rate_out(const DesignSpec& spec) {
  spec.validate();
  return spec.pair_rate_in *
         sagnac::transmission(spec.alpha, spec.geometry.fiber_length,
                              spec.photons);
}

double phase_resolution(const DesignSpec& spec) {
  if (spec.measured_delta_phi) {
    spec.validate();
    return *spec.measured_delta_phi;
  }
  return 1.0 / std::sqrt(2.0 * pair_rate_out(spec) * spec.integration_time);
}

SensitivityReport rotation_resolution(const DesignSpec& spec,
                                      const PhysicalConstants& constants) {
  spec.validate();
  constants.validate();
  SensitivityReport r;
  r.name = spec.name;
  r.area = spec.geometry.area;
  r.eta = sagnac::transmission(spec.alpha, spec.geometry.fiber_length, 1);
  r.pair_rate_out = pair_rate_out(spec);
  r.delta_phi = phase_resolution(spec);
  r.projection_factor = spec.geometry.projection_factor(spec.projection);
  r.delta_phi_projected = r.delta_phi / r.projection_factor;
  r.scale_factor = sagnac::scale_factor(spec.geometry, constants);
  r.delta_omega = r.delta_phi_projected / r.scale_factor;
  r.snr_vs_gr = constants.gr_rate() / r.delta_omega;
  r.regime = classify(r.delta_omega, constants);
  return r;
}

double square_ring_rotation_resolution(double fiber_length, int turns,
                                       double alpha, double pair_rate_in,
                                       double integration_time,
                                       double latitude, double wavelength,
                                       const PhysicalConstants& constants) {
  return std::sqrt(2.0 / (pair_rate_in * integration_time)) *
         (wavelength * constants.speed_of_light / (pi * std::sin(latitude))) *
         turns * std::pow(10.0, alpha * (fiber_length / 1000.0) / 10.0) /
         (fiber_length * fiber_length);
}

void GfringOptions::validate() const {
  if (!std::isfinite(target_snr))
    throw ValidationError("gfring: target_snr must be finite");
  if (!(std::sin(latitude) > 0.0))
    throw ValidationError("gfring: latitude must give sin(theta_L) > 0");
  if (!(alpha > 0.0))
    throw ValidationError("gfring: alpha must be positive");
  if (!(pair_rate_in > 0.0) || !(integration_time > 0.0) ||
      !(wavelength > 0.0))
    throw ValidationError("gfring: rates, time and wavelength must be positive");
  if (photons < 1) throw ValidationError("gfring: photons >= 1");
  if (max_turns < 1) throw ValidationError("gfring: max_turns >= 1");
  if (!(min_fiber_length > 0.0) || !(max_fiber_length > min_fiber_length))
    throw ValidationError("gfring: need 0 < min_fiber_length < max_fiber_length");
  constants.validate();
}

namespace {

DesignSpec square_spec(const GfringOptions& o, double length, int turns) {
  DesignSpec s;
  s.name = "GFRING";
  s.geometry = InterferometerGeometry::square(length, turns, o.wavelength);
  s.geometry.latitude = o.latitude;
  s.alpha = o.alpha;
  s.pair_rate_in = o.pair_rate_in;
  s.integration_time = o.integration_time;
  s.photons = o.photons;
  s.projection = Projection::Latitude;
  return s;
}

double snr(const GfringOptions& o, double length, int turns) {
  return rotation_resolution(square_spec(o, length, turns), o.constants)
      .snr_vs_gr;
}

GfringDesign make(const GfringOptions& o, double length, int turns) {
  GfringDesign d;
  d.fiber_length = length;
  d.turns = turns;
  d.spec = square_spec(o, length, turns);
  d.report = rotation_resolution(d.spec, o.constants);
  return d;
}

}  // namespace

GfringDesign optimize_gfring(const GfringOptions& options) {
  options.validate();
  if (options.target_snr <= 0.0)
    return make(options, options.min_fiber_length, options.max_turns);

  // delta_omega ~ 10^(N alpha L / 20) / L^2 is smallest at
  // L* = 40 / (N alpha ln 10) km.
  const double l_star =
      40.0 / (options.photons * options.alpha * std::log(10.0)) * 1000.0;
  const double l_best = std::min(l_star, options.max_fiber_length);
  if (l_best < options.min_fiber_length)
    throw InfeasibleError(
        "gfring: loss-optimal length is below the minimum fiber length",
        "min_fiber_length");

  // SNR is proportional to 1 / n_t at fixed length: take the largest n_t
  // that is feasible at the best length.
  int turns = 0;
  for (int n = options.max_turns; n >= 1; --n) {
    if (snr(options, l_best, n) >= options.target_snr) {
      turns = n;
      break;
    }
  }
  if (turns == 0) {
    std::ostringstream msg;
    msg << "gfring: SNR target " << options.target_snr
        << " unreachable with a single turn (best SNR "
        << snr(options, l_best, 1) << " at L = " << l_best << " m)";
    throw InfeasibleError(msg.str(), l_best < l_star ? "max_fiber_length"
                                                     : "target_snr");
  }

  // SNR increases with L on [min, L*]: shortest feasible length.
  double lo = options.min_fiber_length;
  double hi = l_best;
  if (snr(options, lo, turns) >= options.target_snr)
    return make(options, lo, turns);
  for (int i = 0; i < 200 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (snr(options, mid, turns) >= options.target_snr)
      hi = mid;
    else
      lo = mid;
  }
  return make(options, hi, turns);
}

std::vector<LandscapePoint> landscape(const std::vector<DesignSpec>& specs,
                                      Execution execution,
                                      const PhysicalConstants& constants) {
  std::vector<LandscapePoint> out(specs.size());
  auto eval = [&](std::size_t i) {
    const SensitivityReport r = rotation_resolution(specs[i], constants);
    LandscapePoint& p = out[i];
    p.index = i;
    p.name = r.name;
    p.area = r.area;
    p.delta_omega = r.delta_omega;
    p.log10_area = std::log10(r.area);
    p.log10_delta_omega = std::log10(r.delta_omega);
    p.regime = r.regime;
  };
  for (const auto& s : specs) s.validate();
  if (execution == Execution::Serial) {
    for (std::size_t i = 0; i < specs.size(); ++i) eval(i);
  } else {
    const auto n = static_cast<std::int64_t>(specs.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) eval(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace qsagnac::sensedesign
