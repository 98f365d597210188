#include <cmath>
#include <map>
#include <vector>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"

namespace qsagnac::analysis {

namespace {

struct Segment {
  bool on = false;
  std::size_t n = 0;
  double t = 0.0;  // mean sample time
  double chi = 0.0;
  double psi = 0.0;
};

// Neighbouring differences share segments, so they are correlated up to
// lag 2. Standard error of the mean from the lag-2 long-run variance.
double standard_error(const std::vector<double>& d, double mean) {
  const std::size_t n = d.size();
  double g[3] = {0.0, 0.0, 0.0};
  for (std::size_t lag = 0; lag < 3; ++lag) {
    for (std::size_t i = lag; i < n; ++i)
      g[lag] += (d[i] - mean) * (d[i - lag] - mean);
    g[lag] /= static_cast<double>(n - 1);
  }
  double lrv = g[0] + 2.0 * (g[1] + g[2]);
  if (!(lrv > 0.0)) lrv = g[0];
  return std::sqrt(lrv / static_cast<double>(n));
}

}  // namespace

DemodulationResult demodulate_trace(const expsim::PolarimeterTrace& trace,
                                    const expsim::SwitchSchedule& schedule) {
  schedule.validate();
  if (!(trace.sample_rate > 0.0))
    throw ValidationError("demodulate_trace: sample rate must be positive");
  if (trace.samples.size() < 2)
    throw ValidationError("demodulate_trace: empty trace");
  const double t_begin = trace.samples.front().t;
  const double t_end = trace.samples.back().t;
  const double period = schedule.period();
  if ((t_end - t_begin + 1.0 / trace.sample_rate) < 10.0 * period - 1e-9)
    throw ValidationError("demodulate_trace: trace must cover >= 10 periods");

  // Half-period segments: 2k is ON, 2k + 1 is OFF of period k.
  const double cut = schedule.transition_halfwidth + 1e-9;
  std::map<long long, Segment> segments;
  std::size_t used = 0;
  for (const auto& s : trace.samples) {
    if (schedule.distance_to_edge(s.t) <= cut) continue;
    const auto k = static_cast<long long>(std::floor(s.t / period));
    const bool on = schedule.state_at(s.t) == sagnac::SwitchState::On;
    if (on != s.drive)
      throw ValidationError(
          "demodulate_trace: drive signal disagrees with the schedule");
    Segment& seg = segments[2 * k + (on ? 0 : 1)];
    seg.on = on;
    ++seg.n;
    seg.t += s.t;
    seg.chi += s.chi;
    seg.psi += s.psi;
    ++used;
  }

  // Keep segments lying entirely inside the trace.
  std::vector<Segment> full;
  for (auto& [id, seg] : segments) {
    const long long k = id >= 0 ? id / 2 : (id - 1) / 2;
    const double start = k * period + (seg.on ? 0.0 : schedule.duty * period);
    const double stop = seg.on ? k * period + schedule.duty * period
                               : (k + 1) * period;
    if (start < t_begin - 0.5 / trace.sample_rate ||
        stop > t_end + 0.5 / trace.sample_rate)
      continue;
    if (seg.n < 2)
      throw ValidationError(
          "demodulate_trace: fewer than 2 valid samples in a half-period");
    const auto n = static_cast<double>(seg.n);
    seg.t /= n;
    seg.chi /= n;
    seg.psi /= n;
    full.push_back(seg);
  }

  // Difference each segment against the opposite-state level interpolated
  // from its neighbours, signed as ON - OFF.
  std::vector<double> d_chi, d_psi;
  for (std::size_t i = 1; i + 1 < full.size(); ++i) {
    const Segment& a = full[i - 1];
    const Segment& b = full[i];
    const Segment& c = full[i + 1];
    if (a.on == b.on || c.on == b.on) continue;
    const double w = (b.t - a.t) / (c.t - a.t);
    const double sign = b.on ? 1.0 : -1.0;
    d_chi.push_back(sign * (b.chi - ((1.0 - w) * a.chi + w * c.chi)));
    d_psi.push_back(sign * (b.psi - ((1.0 - w) * a.psi + w * c.psi)));
  }
  if (d_chi.size() < 3)
    throw ValidationError(
        "demodulate_trace: too few complete switch segments");

  const auto chi = stats::mean_stddev(d_chi);
  const auto psi = stats::mean_stddev(d_psi);
  const double s_chi = standard_error(d_chi, chi.mean);
  const double s_psi = standard_error(d_psi, psi.mean);

  DemodulationResult r;
  r.delta_chi = chi.mean;
  r.delta_psi = psi.mean;
  const double radius = std::hypot(chi.mean, psi.mean);
  r.phi_s = 2.0 * radius * (chi.mean < 0.0 ? -1.0 : 1.0);
  r.phi_s_sigma =
      radius > 0.0
          ? 2.0 * std::hypot(chi.mean * s_chi, psi.mean * s_psi) / radius
          : 2.0 * std::hypot(s_chi, s_psi);
  r.segments = d_chi.size();
  r.samples_used = used;
  return r;
}

}  // namespace qsagnac::analysis
