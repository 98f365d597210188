#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/rng.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::analysis {

namespace {

constexpr std::size_t kColumns = 4;  // amplitude, eta, visibility, phase

// Resampling problem for one or more record groups that share bias settings.
class McProblem {
 public:
  McProblem(FringeModel model, int photons,
            std::vector<std::span<const CountRecord>> groups,
            const McOptions& options)
      : model_(model),
        photons_(photons),
        groups_(std::move(groups)),
        offsets_(options.offsets),
        seed_(options.seed) {
    std::map<double, std::size_t> settings;
    for (const auto& g : groups_)
      for (const auto& r : g) settings.emplace(r.phi0, 0);
    std::size_t idx = 0;
    for (auto& [phi0, i] : settings) i = idx++;
    n_settings_ = settings.size();
    for (const auto& g : groups_) {
      std::vector<std::size_t> ids;
      ids.reserve(g.size());
      for (const auto& r : g) ids.push_back(settings.at(r.phi0));
      setting_of_.push_back(std::move(ids));
      nominal_.push_back(fit(g, nullptr));
      if (!nominal_.back().converged)
        throw FitError("Monte-Carlo: nominal fit did not converge: " +
                       nominal_.back().diagnostics);
    }
  }

  std::size_t columns() const { return kColumns * groups_.size(); }
  const FringeFit& nominal(std::size_t g) const { return nominal_[g]; }

  // Fills one row; returns false when a refit fails.
  bool run(std::size_t sample, double* row) const {
    auto rng = substream(seed_, StreamTag::MonteCarlo, sample);
    std::normal_distribution<double> unit(0.0, 1.0);
    const double common = offsets_.common_sigma * unit(rng);
    std::vector<double> offset(n_settings_);
    for (auto& o : offset) o = common + offsets_.per_setting_sigma * unit(rng);

    std::vector<CountRecord> resampled;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& records = groups_[g];
      resampled.assign(records.begin(), records.end());
      for (std::size_t i = 0; i < resampled.size(); ++i) {
        auto& r = resampled[i];
        r.phi0 += offset[setting_of_[g][i]];
        r.n_h = poisson(rng, r.n_h);
        r.n_v = poisson(rng, r.n_v);
        r.n_hv = poisson(rng, r.n_hv);
      }
      FringeFit f;
      try {
        f = fit(resampled, &nominal_[g].params);
      } catch (const Error&) {
        return false;
      }
      if (!f.converged) return false;
      double* out = row + kColumns * g;
      out[0] = f.params.amplitude;
      out[1] = f.params.eta;
      out[2] = f.params.visibility;
      // Keep the phase on the branch of the nominal fit.
      const double ref = nominal_[g].params.phase;
      out[3] = ref + wrap_phase(f.params.phase - ref);
    }
    return true;
  }

 private:
  static std::int64_t poisson(std::mt19937_64& rng, std::int64_t mean) {
    if (mean <= 0) return 0;
    std::poisson_distribution<std::int64_t> d(static_cast<double>(mean));
    return d(rng);
  }

  FringeFit fit(std::span<const CountRecord> records,
                const FringeParameters* warm) const {
    FitOptions opt;
    if (warm) {
      opt.initial = *warm;
      opt.warm_start_only = true;
    }
    if (model_ == FringeModel::TwoPhoton)
      return nlls(model_, noon_samples(records), opt, photons_);
    return nlls(model_, single_samples(records), opt, 1);
  }

  FringeModel model_;
  int photons_;
  std::vector<std::span<const CountRecord>> groups_;
  OffsetNoise offsets_;
  std::uint64_t seed_;
  std::size_t n_settings_ = 0;
  std::vector<std::vector<std::size_t>> setting_of_;
  std::vector<FringeFit> nominal_;
};

struct McTable {
  std::size_t columns = 0;
  std::vector<double> values;  // row-major, samples x columns
  std::vector<char> ok;
};

// Reference implementation.
McTable run_serial(const McProblem& problem, std::size_t samples) {
  McTable t;
  t.columns = problem.columns();
  t.values.assign(samples * t.columns, 0.0);
  t.ok.assign(samples, 0);
  for (std::size_t s = 0; s < samples; ++s)
    t.ok[s] = problem.run(s, &t.values[s * t.columns]) ? 1 : 0;
  return t;
}

McTable run_openmp(const McProblem& problem, std::size_t samples) {
  McTable t;
  t.columns = problem.columns();
  t.values.assign(samples * t.columns, 0.0);
  t.ok.assign(samples, 0);
  const auto n = static_cast<std::int64_t>(samples);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    t.ok[i] = problem.run(i, &t.values[i * t.columns]) ? 1 : 0;
  }
  return t;
}

McTable run(const McProblem& problem, const McOptions& options) {
  if (options.samples < 2)
    throw ValidationError("Monte-Carlo needs at least two samples");
  return options.execution == Execution::Serial
             ? run_serial(problem, options.samples)
             : run_openmp(problem, options.samples);
}

std::size_t failures(const McTable& t) {
  std::size_t f = 0;
  for (char c : t.ok) f += c ? 0 : 1;
  return f;
}

// Column statistics over successful rows, in sample order.
stats::MeanStd column_stats(const McTable& t, std::size_t col) {
  std::vector<double> v;
  v.reserve(t.ok.size());
  for (std::size_t s = 0; s < t.ok.size(); ++s)
    if (t.ok[s]) v.push_back(t.values[s * t.columns + col]);
  return stats::mean_stddev(v);
}

McResult summarize(const McTable& t, std::size_t group, FringeModel model) {
  McResult r;
  r.model = model;
  r.samples = t.ok.size();
  r.failures = failures(t);
  const std::size_t base = kColumns * group;
  r.amplitude = column_stats(t, base + 0);
  r.eta = column_stats(t, base + 1);
  r.visibility = column_stats(t, base + 2);
  r.phase = column_stats(t, base + 3);
  return r;
}

void check_failures(const McTable& t, const McOptions& options) {
  const std::size_t f = failures(t);
  if (static_cast<double>(f) >
      options.max_failure_fraction * static_cast<double>(t.ok.size()))
    throw FitError("Monte-Carlo: " + std::to_string(f) + " of " +
                   std::to_string(t.ok.size()) + " refits failed");
}

}  // namespace

McResult mc_uncertainty(std::span<const CountRecord> records,
                        FringeModel model, const McOptions& options) {
  if (options.samples < 1000)
    throw ValidationError("mc_uncertainty needs n_samples >= 1000");
  const McProblem problem(model, options.photons, {records}, options);
  const McTable t = run(problem, options);
  check_failures(t, options);
  return summarize(t, 0, model);
}

EarthPhaseMc mc_earth_phase(std::span<const CountRecord> on,
                            std::span<const CountRecord> off,
                            FringeModel model, const McOptions& options) {
  const McProblem problem(model, options.photons, {on, off}, options);
  const McTable t = run(problem, options);
  check_failures(t, options);

  EarthPhaseMc out;
  out.on = summarize(t, 0, model);
  out.off = summarize(t, 1, model);

  const double nominal_e =
      wrap_phase(problem.nominal(1).params.phase - problem.nominal(0).params.phase);
  std::vector<double> phi_e;
  phi_e.reserve(t.ok.size());
  for (std::size_t s = 0; s < t.ok.size(); ++s) {
    if (!t.ok[s]) continue;
    const double d = t.values[s * t.columns + kColumns + 3] -
                     t.values[s * t.columns + 3];
    phi_e.push_back(nominal_e + wrap_phase(d - nominal_e));
  }
  out.phi_e = stats::mean_stddev(phi_e);

  out.result.phi_on = wrap_phase(out.on.phase.mean);
  out.result.phi_on_sigma = out.on.phase.stddev;
  out.result.phi_off = wrap_phase(out.off.phase.mean);
  out.result.phi_off_sigma = out.off.phase.stddev;
  out.result.phi_e = wrap_phase(out.phi_e.mean);
  out.result.phi_e_sigma = out.phi_e.stddev;
  out.result.sigma_method = "monte_carlo";
  return out;
}

}  // namespace qsagnac::analysis
