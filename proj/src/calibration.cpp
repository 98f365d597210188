#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/rng.hpp"

namespace qsagnac::analysis {

namespace {

void check_points(std::span<const PhasePoint> points) {
  if (points.size() < 3)
    throw IllConditionedError("cosine fit needs >= 3 angles");
  double lo = points.front().frame_angle;
  double hi = lo;
  for (const auto& p : points) {
    if (!std::isfinite(p.frame_angle) || !std::isfinite(p.phase))
      throw ValidationError("cosine fit: non-finite input");
    if (!(p.sigma > 0.0))
      throw ValidationError("cosine fit: sigmas must be positive");
    lo = std::min(lo, p.frame_angle);
    hi = std::max(hi, p.frame_angle);
  }
  if (hi - lo < deg_to_rad(5.0))
    throw IllConditionedError("cosine fit: angles span less than 5 degrees");
}

// y = a cos(theta) + b sin(theta) = R cos(theta + offset) with
// a = R cos(offset), b = -R sin(offset).
CosineFit solve(std::span<const PhasePoint> points) {
  Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  for (const auto& p : points) {
    const double w = 1.0 / (p.sigma * p.sigma);
    const Eigen::Vector2d x(std::cos(p.frame_angle), std::sin(p.frame_angle));
    normal += w * x * x.transpose();
    rhs += w * p.phase * x;
  }
  Eigen::FullPivLU<Eigen::Matrix2d> lu(normal);
  if (!lu.isInvertible() ||
      lu.rcond() < 1e-12)
    throw IllConditionedError("cosine fit: singular normal equations");
  const Eigen::Vector2d ab = lu.solve(rhs);
  const Eigen::Matrix2d cov = lu.inverse();

  CosineFit f;
  const double a = ab(0), b = ab(1);
  const double r = std::hypot(a, b);
  f.amplitude = r;
  f.offset = std::atan2(-b, a);
  if (r > 0.0) {
    const Eigen::Vector2d g_amp(a / r, b / r);
    const Eigen::Vector2d g_off(b / (r * r), -a / (r * r));
    f.amplitude_sigma = std::sqrt(g_amp.dot(cov * g_amp));
    f.offset_sigma = std::sqrt(g_off.dot(cov * g_off));
  } else {
    f.amplitude_sigma = std::sqrt(0.5 * cov.trace());
    f.offset_sigma = pi;
  }
  return f;
}

struct CalibrationProblem {
  std::span<const PhasePoint> points;
  double earth_rate;
  double halfwidth;
  std::uint64_t seed;
  double nominal_offset;

  // Writes (S, offset); false if the resampled design is singular.
  bool run(std::size_t sample, double* out) const {
    auto rng = substream(seed, StreamTag::Calibration, sample);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> shift(-halfwidth, halfwidth);
    std::vector<PhasePoint> draw(points.begin(), points.end());
    for (auto& p : draw) {
      p.phase += p.sigma * unit(rng);
      p.frame_angle += shift(rng);
    }
    try {
      const CosineFit f = solve(draw);
      out[0] = f.amplitude / earth_rate;
      out[1] = nominal_offset + wrap_phase(f.offset - nominal_offset);
    } catch (const IllConditionedError&) {
      return false;
    }
    return true;
  }
};

}  // namespace

CosineFit fit_cosine(std::span<const PhasePoint> points) {
  check_points(points);
  return solve(points);
}

CalibrationResult calibrate_scale_factor(std::span<const PhasePoint> points,
                                         const CalibrationOptions& options) {
  check_points(points);
  if (!(options.earth_rate > 0.0))
    throw ValidationError("calibration: earth rate must be positive");
  if (options.samples < 2)
    throw ValidationError("calibration: need at least two MC samples");
  if (options.angle_halfwidth < 0.0)
    throw ValidationError("calibration: angle half-width must be >= 0");

  const CosineFit nominal = solve(points);
  const CalibrationProblem problem{points, options.earth_rate,
                                   options.angle_halfwidth, options.seed,
                                   nominal.offset};

  const std::size_t n = options.samples;
  std::vector<double> table(2 * n, 0.0);
  std::vector<char> ok(n, 0);
  if (options.execution == Execution::Serial) {
    for (std::size_t s = 0; s < n; ++s)
      ok[s] = problem.run(s, &table[2 * s]) ? 1 : 0;
  } else {
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < count; ++s) {
      const auto i = static_cast<std::size_t>(s);
      ok[i] = problem.run(i, &table[2 * i]) ? 1 : 0;
    }
  }

  std::vector<double> scale, offset;
  scale.reserve(n);
  offset.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (!ok[s]) continue;
    scale.push_back(table[2 * s]);
    offset.push_back(table[2 * s + 1]);
  }
  if (scale.size() < 2)
    throw IllConditionedError("calibration: every MC sample was singular");

  const auto s_stats = stats::mean_stddev(scale);
  const auto o_stats = stats::mean_stddev(offset);
  CalibrationResult r;
  r.scale_factor = s_stats.mean;
  r.scale_factor_sigma = s_stats.stddev;
  r.theta_offset = wrap_phase(o_stats.mean);
  r.theta_offset_sigma = o_stats.stddev;
  r.nominal_scale_factor = nominal.amplitude / options.earth_rate;
  r.nominal_theta_offset = nominal.offset;
  r.samples = scale.size();
  return r;
}

AngleSweepFit fit_angle_sweep(std::span<const PhasePoint> earth_phases,
                              const sagnac::InterferometerGeometry& geom,
                              int enhancement,
                              const sagnac::PhysicalConstants& constants) {
  if (enhancement < 1)
    throw ValidationError("fit_angle_sweep: enhancement must be >= 1");
  geom.validate();
  const CosineFit c = fit_cosine(earth_phases);
  const double s = sagnac::scale_factor(geom, constants);
  AngleSweepFit f;
  f.max_phase = c.amplitude;
  f.max_phase_sigma = c.amplitude_sigma;
  f.offset = c.offset;
  f.offset_sigma = c.offset_sigma;
  f.omega = c.amplitude / (enhancement * s);
  f.omega_sigma = c.amplitude_sigma / (enhancement * s);
  return f;
}

}  // namespace qsagnac::analysis
