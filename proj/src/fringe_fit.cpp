#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::analysis {

std::string to_string(LmStatus status) {
  switch (status) {
    case LmStatus::Converged:
      return "converged";
    case LmStatus::MaxIterations:
      return "max_iterations";
    case LmStatus::Singular:
      return "singular";
  }
  return "unknown";
}

Eigen::MatrixXd LmResult::covariance() const {
  Eigen::MatrixXd inv;
  if (!scaled_inverse(normal_matrix, &inv)) return {};
  return inv;
}

std::string to_string(FringeModel model) {
  return model == FringeModel::TwoPhoton ? "two_photon" : "single_photon";
}

std::vector<FringeSample> noon_samples(std::span<const CountRecord> records) {
  std::vector<FringeSample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double n = static_cast<double>(r.n_hv);
    out.push_back({r.phi0, n, std::max(n, 1.0)});
  }
  return out;
}

std::vector<FringeSample> single_samples(std::span<const CountRecord> records) {
  std::vector<FringeSample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double nh = static_cast<double>(r.n_h);
    const double nv = static_cast<double>(r.n_v);
    const double total = nh + nv;
    if (total <= 0.0)
      throw ValidationError("single-photon record with zero H+V counts");
    // Binomial variance of N_V / (N_H + N_V).
    const double var = std::max(nh, 1.0) * std::max(nv, 1.0) /
                       (total * total * total);
    out.push_back({r.phi0, nv / total, var});
  }
  return out;
}

namespace {

int parameter_count(FringeModel model) {
  return model == FringeModel::TwoPhoton ? 3 : 4;
}

Eigen::VectorXd pack(FringeModel model, const FringeParameters& p) {
  Eigen::VectorXd x(parameter_count(model));
  if (model == FringeModel::TwoPhoton)
    x << p.amplitude, p.visibility, p.phase;
  else
    x << p.amplitude, p.eta, p.visibility, p.phase;
  return x;
}

FringeParameters unpack(FringeModel model, const Eigen::VectorXd& x) {
  FringeParameters p;
  if (model == FringeModel::TwoPhoton) {
    p.amplitude = x(0);
    p.visibility = x(1);
    p.phase = x(2);
  } else {
    p.amplitude = x(0);
    p.eta = x(1);
    p.visibility = x(2);
    p.phase = x(3);
  }
  return p;
}

// V < 0 is the same fringe shifted by pi.
FringeParameters canonical(FringeParameters p) {
  if (p.visibility < 0.0) {
    p.visibility = -p.visibility;
    p.phase += pi;
  }
  p.phase = wrap_phase(p.phase);
  return p;
}

void check_design(FringeModel model, int harmonic,
                  std::span<const FringeSample> samples) {
  std::set<double> distinct;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : samples) {
    if (!std::isfinite(s.phi0) || !std::isfinite(s.value) ||
        !(s.variance > 0.0))
      throw ValidationError("fringe data must be finite with positive variance");
    distinct.insert(s.phi0);
    lo = std::min(lo, s.phi0);
    hi = std::max(hi, s.phi0);
  }
  if (distinct.size() < 5)
    throw DegenerateDesignError("fringe fit needs >= 5 distinct bias phases");
  const double half_period =
      model == FringeModel::TwoPhoton ? pi / harmonic : pi;
  if (hi - lo < half_period - 1e-12)
    throw DegenerateDesignError(
        "bias phases span less than half a fringe period");
  const auto [mn, mx] = std::minmax_element(
      samples.begin(), samples.end(),
      [](const FringeSample& a, const FringeSample& b) {
        return a.value < b.value;
      });
  if (mn->value == mx->value)
    throw DegenerateDesignError("flat fringe: phase is unidentifiable");
}

}  // namespace

double model_value(FringeModel model, int harmonic, const FringeParameters& p,
                   double phi0) {
  if (model == FringeModel::TwoPhoton)
    return 0.5 * p.amplitude *
           (1.0 + p.visibility * std::cos(harmonic * phi0 + p.phase));
  const double u = p.visibility * std::cos(phi0 + p.phase);
  return p.amplitude * (1.0 - u) / (1.0 + p.eta * u);
}

FringeFit nlls(FringeModel model, std::span<const FringeSample> samples,
               const FitOptions& options, int harmonic) {
  if (harmonic < 1) throw ValidationError("nlls: harmonic >= 1");
  check_design(model, harmonic, samples);

  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::VectorXd phi0(m), y(m), inv_sigma(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    phi0(i) = s.phi0;
    y(i) = s.value;
    inv_sigma(i) = 1.0 / std::sqrt(s.variance);
  }

  auto problem = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                     Eigen::MatrixXd* jac) {
    r.resize(m);
    if (jac) jac->resize(m, x.size());
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = inv_sigma(i);
      if (model == FringeModel::TwoPhoton) {
        const double a = x(0), v = x(1), ph = x(2);
        const double arg = harmonic * phi0(i) + ph;
        const double c = std::cos(arg);
        r(i) = w * (0.5 * a * (1.0 + v * c) - y(i));
        if (jac) {
          (*jac)(i, 0) = w * 0.5 * (1.0 + v * c);
          (*jac)(i, 1) = w * 0.5 * a * c;
          (*jac)(i, 2) = -w * 0.5 * a * v * std::sin(arg);
        }
      } else {
        const double a = x(0), eta = x(1), v = x(2), ph = x(3);
        const double c = std::cos(phi0(i) + ph);
        const double u = v * c;
        const double d = 1.0 + eta * u;
        r(i) = w * (a * (1.0 - u) / d - y(i));
        if (jac) {
          const double d2 = d * d;
          (*jac)(i, 0) = w * (1.0 - u) / d;
          (*jac)(i, 1) = -w * a * (1.0 - u) * u / d2;
          (*jac)(i, 2) = -w * a * (1.0 + eta) * c / d2;
          (*jac)(i, 3) = w * a * (1.0 + eta) * v * std::sin(phi0(i) + ph) / d2;
        }
      }
    }
  };

  // Starting amplitude and visibility from the data range.
  const double y_max = y.maxCoeff();
  const double y_min = y.minCoeff();
  const double y_mean = y.mean();
  const double v0 =
      std::clamp((y_max - y_min) / std::max(y_max + y_min, 1e-300), 0.05, 1.0);
  FringeParameters base;
  base.visibility = v0;
  base.amplitude = model == FringeModel::TwoPhoton ? 2.0 * y_mean : y_mean;
  base.eta = 0.0;

  std::vector<FringeParameters> starts;
  if (options.initial) starts.push_back(*options.initial);
  const std::size_t grid_begin = starts.size();
  for (int j = 0; j < options.phase_starts; ++j) {
    FringeParameters p = base;
    p.phase = -pi + 2.0 * pi * j / options.phase_starts;
    starts.push_back(p);
  }

  FringeFit best;
  best.model = model;
  best.harmonic = harmonic;
  double best_cost = std::numeric_limits<double>::infinity();
  LmResult best_lm;
  std::ostringstream diag;
  int tried = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (s == grid_begin && options.warm_start_only && best.converged) break;
    ++tried;
    LmResult lm = levenberg_marquardt(problem, pack(model, starts[s]),
                                      options.lm);
    if (lm.status != LmStatus::Converged) {
      diag << "start " << s << ": " << to_string(lm.status) << " after "
           << lm.iterations << " iterations (cost " << lm.cost << "); ";
      if (lm.status == LmStatus::Singular && lm.cost < best_cost &&
          !best.converged) {
        best_cost = lm.cost;
        best_lm = lm;
      }
      continue;
    }
    if (!best.converged || lm.cost < best_cost) {
      best_cost = lm.cost;
      best_lm = std::move(lm);
      best.converged = true;
    }
  }
  best.starts = tried;

  if (best_lm.params.size() == 0) {
    best.converged = false;
    best.diagnostics = diag.str();
    return best;
  }
  const FringeParameters raw = unpack(model, best_lm.params);
  best.params = canonical(raw);
  best.rss = best_lm.cost;
  best.iterations = best_lm.iterations;
  best.diagnostics = diag.str();

  if (best.converged && std::abs(best.params.visibility) < 1e-9)
    throw DegenerateDesignError(
        "fitted visibility is zero: phase is unidentifiable");

  best.covariance = best_lm.covariance();
  if (best.covariance.size() > 0) {
    // Flipping V and phase leaves the covariance diagonal unchanged.
    const Eigen::VectorXd sd = best.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    best.sigmas = unpack(model, sd);
  } else {
    best.converged = false;
    best.diagnostics += "normal equations singular at optimum; ";
  }
  return best;
}

FringeFit fit_noon_fringe(std::span<const CountRecord> records,
                          const FitOptions& options, int photons) {
  const auto samples = noon_samples(records);
  FringeFit fit = nlls(FringeModel::TwoPhoton, samples, options, photons);
  if (!fit.converged)
    throw FitError("two-photon fringe fit did not converge: " +
                   fit.diagnostics);
  return fit;
}

FringeFit fit_single_fringe(std::span<const CountRecord> records,
                            const FitOptions& options) {
  const auto samples = single_samples(records);
  FringeFit fit = nlls(FringeModel::SinglePhoton, samples, options, 1);
  if (!fit.converged)
    throw FitError("single-photon fringe fit did not converge: " +
                   fit.diagnostics);
  return fit;
}

EarthPhaseResult extract_earth_phase(const FringeFit& fit_on,
                                     const FringeFit& fit_off) {
  if (!fit_on.converged || !fit_off.converged)
    throw FitError("extract_earth_phase: both fits must have converged");
  EarthPhaseResult r;
  r.phi_on = fit_on.params.phase;
  r.phi_on_sigma = fit_on.sigmas.phase;
  r.phi_off = fit_off.params.phase;
  r.phi_off_sigma = fit_off.sigmas.phase;
  r.phi_e = wrap_phase(r.phi_off - r.phi_on);
  r.phi_e_sigma = std::hypot(r.phi_on_sigma, r.phi_off_sigma);
  r.sigma_method = "quadrature";
  return r;
}

Ratio enhancement_factor(double two, double two_sigma, double one,
                         double one_sigma) {
  if (two_sigma < 0.0 || one_sigma < 0.0)
    throw ValidationError("enhancement_factor: sigmas must be non-negative");
  if (one == 0.0 || std::abs(one) < 3.0 * one_sigma)
    throw DegenerateDesignError(
        "enhancement_factor: denominator is consistent with zero");
  Ratio r;
  r.value = two / one;
  const double rel_two = two == 0.0 ? 0.0 : two_sigma / two;
  r.sigma = std::abs(r.value) * std::hypot(rel_two, one_sigma / one);
  if (two == 0.0) r.sigma = two_sigma / std::abs(one);
  return r;
}

}  // namespace qsagnac::analysis
