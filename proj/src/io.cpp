#include "qsagnac/io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qsagnac/errors.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (trim(s.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("line " + std::to_string(line) + ": bad number '" + s +
                        "'");
}

std::int64_t to_int(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (trim(s.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("line " + std::to_string(line) + ": bad integer '" +
                        s + "'");
}

// Reads "# key: value" comment lines and returns the header row.
std::string read_preamble(std::istream& in, const char* schema,
                          std::vector<std::pair<std::string, std::string>>& meta,
                          int& line_no) {
  std::string line;
  std::string header;
  bool schema_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() != '#') {
      header = line;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = trim(line.substr(1, colon - 1));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "schema") {
      if (value != schema)
        throw ValidationError("schema mismatch: expected '" +
                              std::string(schema) + "', got '" + value + "'");
      schema_seen = true;
    } else {
      meta.emplace_back(key, value);
    }
  }
  if (!schema_seen)
    throw ValidationError("missing '# schema: " + std::string(schema) +
                          "' line");
  if (header.empty()) throw ValidationError("empty CSV: no header row");
  return header;
}

void expect_header(const std::string& header, const char* expected) {
  if (header != expected)
    throw ValidationError("unexpected CSV header '" + header +
                          "', expected '" + expected + "'");
}

constexpr const char* counts_header =
    "theta_deg,phi0_rad,switch,duration_s,n_h,n_v,n_hv";
constexpr const char* trace_header = "t_s,psi_rad,chi_rad,drive";

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object())
    throw ValidationError(std::string(what) + " must be a JSON object");
}

}  // namespace

void write_counts_csv(std::ostream& out,
                      std::span<const expsim::CountRecord> records) {
  out << "# schema: " << counts_schema << '\n' << counts_header << '\n';
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << rad_to_deg(r.frame_angle) << ',' << r.phi0 << ','
        << sagnac::to_string(r.state) << ',' << r.duration << ',' << r.n_h
        << ',' << r.n_v << ',' << r.n_hv << '\n';
  }
}

std::vector<expsim::CountRecord> read_counts_csv(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> meta;
  int line_no = 0;
  expect_header(read_preamble(in, counts_schema, meta, line_no), counts_header);
  std::vector<expsim::CountRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line));
    if (f.size() != 7)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 7 fields");
    expsim::CountRecord r;
    r.frame_angle = deg_to_rad(to_double(f[0], line_no));
    r.phi0 = to_double(f[1], line_no);
    r.state = sagnac::switch_state_from_string(trim(f[2]));
    r.duration = to_double(f[3], line_no);
    r.n_h = to_int(f[4], line_no);
    r.n_v = to_int(f[5], line_no);
    r.n_hv = to_int(f[6], line_no);
    if (r.n_h < 0 || r.n_v < 0 || r.n_hv < 0 || !(r.duration > 0.0))
      throw ValidationError("line " + std::to_string(line_no) +
                            ": counts must be >= 0 and duration > 0");
    out.push_back(r);
  }
  if (out.empty()) throw ValidationError("counts CSV has no records");
  return out;
}

void write_trace_csv(std::ostream& out, const expsim::PolarimeterTrace& trace) {
  out << std::setprecision(17);
  out << "# schema: " << trace_schema << '\n'
      << "# sample_rate_hz: " << trace.sample_rate << '\n'
      << trace_header << '\n';
  for (const auto& s : trace.samples)
    out << s.t << ',' << s.psi << ',' << s.chi << ',' << (s.drive ? 1 : 0)
        << '\n';
}

expsim::PolarimeterTrace read_trace_csv(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> meta;
  int line_no = 0;
  expect_header(read_preamble(in, trace_schema, meta, line_no), trace_header);
  expsim::PolarimeterTrace trace;
  bool rate_seen = false;
  for (const auto& [k, v] : meta)
    if (k == "sample_rate_hz") {
      trace.sample_rate = to_double(v, 0);
      rate_seen = true;
    }
  if (!rate_seen) throw ValidationError("trace CSV lacks '# sample_rate_hz'");
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line));
    if (f.size() != 4)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 4 fields");
    expsim::PolarimeterSample s;
    s.t = to_double(f[0], line_no);
    s.psi = to_double(f[1], line_no);
    s.chi = to_double(f[2], line_no);
    s.drive = to_int(f[3], line_no) != 0;
    trace.samples.push_back(s);
  }
  if (trace.samples.empty()) throw ValidationError("trace CSV has no samples");
  return trace;
}

sagnac::InterferometerGeometry geometry_from_json(const json& j) {
  require_object(j, "geometry");
  using sagnac::InterferometerGeometry;
  const auto shape =
      sagnac::frame_shape_from_string(get<std::string>(j, "shape", "square"));
  const double length = get<double>(j, "fiber_length", 0.0);
  const double perimeter = get<double>(j, "perimeter", 0.0);
  const double wavelength = get<double>(j, "wavelength", 1550e-9);
  InterferometerGeometry g;
  if (j.contains("area")) {
    g = InterferometerGeometry::with_area(shape, length, perimeter,
                                          get<double>(j, "area", 0.0),
                                          wavelength);
  } else if (shape == sagnac::FrameShape::Square) {
    g = InterferometerGeometry::square(length, get<int>(j, "turns", 1),
                                       wavelength);
  } else {
    g = InterferometerGeometry::circular(length, perimeter, wavelength);
  }
  g.frame_angle = deg_to_rad(get<double>(j, "frame_angle_deg", 0.0));
  g.latitude = deg_to_rad(get<double>(j, "latitude_deg", 0.0));
  g.off_area_imbalance = get<double>(j, "off_area_imbalance", 0.0);
  g.validate();
  return g;
}

expsim::RateConfig rates_from_json(const json& j) {
  require_object(j, "rates");
  expsim::RateConfig r;
  r.pair_rate_detected = get(j, "pair_rate_detected", r.pair_rate_detected);
  r.heralded_single_rate =
      get(j, "heralded_single_rate", r.heralded_single_rate);
  r.cw_sample_rate = get(j, "cw_sample_rate", r.cw_sample_rate);
  r.validate();
  return r;
}

expsim::NoiseConfig noise_from_json(const json& j) {
  require_object(j, "noise");
  expsim::NoiseConfig n;
  n.motor_repeatability_sigma =
      get(j, "motor_repeatability_sigma", n.motor_repeatability_sigma);
  n.motor_jitter_sigma = get(j, "motor_jitter_sigma", n.motor_jitter_sigma);
  n.dark_rate = get(j, "dark_rate", n.dark_rate);
  n.background_singles_rate =
      get(j, "background_singles_rate", n.background_singles_rate);
  n.coincidence_window = get(j, "coincidence_window", n.coincidence_window);
  n.phase_drift_rate = get(j, "phase_drift_rate", n.phase_drift_rate);
  n.phase_random_walk = get(j, "phase_random_walk", n.phase_random_walk);
  n.polarimeter_noise_sigma =
      get(j, "polarimeter_noise_sigma", n.polarimeter_noise_sigma);
  n.azimuth_leakage_fraction =
      get(j, "azimuth_leakage_fraction", n.azimuth_leakage_fraction);
  n.validate();
  return n;
}

expsim::SwitchSchedule schedule_from_json(const json& j,
                                          expsim::SwitchSchedule s) {
  require_object(j, "schedule");
  s.frequency = get(j, "frequency", s.frequency);
  s.duty = get(j, "duty", s.duty);
  s.transition_halfwidth = get(j, "transition_halfwidth", s.transition_halfwidth);
  s.noisy_halfwidth = get(j, "noisy_halfwidth", s.noisy_halfwidth);
  s.validate();
  return s;
}

expsim::ExperimentConfig experiment_from_json(const json& j) {
  require_object(j, "experiment");
  expsim::ExperimentConfig c;
  if (j.contains("rates")) c.rates = rates_from_json(j.at("rates"));
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  if (j.contains("schedule"))
    c.schedule = schedule_from_json(j.at("schedule"), c.schedule);
  if (j.contains("source")) {
    const json& s = j.at("source");
    require_object(s, "source");
    c.source.single_photon_visibility =
        get(s, "single_photon_visibility", c.source.single_photon_visibility);
    c.source.distinguishability =
        get(s, "distinguishability", c.source.distinguishability);
    c.source.channel_ratio = get(s, "channel_ratio", c.source.channel_ratio);
  }
  const std::string sampling = get<std::string>(j, "sampling", "poisson");
  if (sampling == "poisson")
    c.sampling = expsim::SamplingMode::Poisson;
  else if (sampling == "expected")
    c.sampling = expsim::SamplingMode::Expected;
  else
    throw ValidationError("unknown sampling mode '" + sampling + "'");
  c.validate();
  return c;
}

probe::ProbeKind probe_from_json(const json& j) {
  require_object(j, "scan");
  return probe::probe_kind_from_string(get<std::string>(j, "probe", "noon"),
                                       get<int>(j, "photons", 2));
}

expsim::CountingPlan plan_from_json(const json& j,
                                    const probe::ProbeKind& kind) {
  require_object(j, "scan");
  expsim::CountingPlan plan = kind.type == probe::ProbeType::Noon
                                  ? expsim::CountingPlan::two_photon_default()
                                  : expsim::CountingPlan::single_photon_default();
  if (j.contains("phi0")) {
    const json& p = j.at("phi0");
    if (p.is_array()) {
      plan.phi0 = get<std::vector<double>>(j, "phi0", {});
    } else {
      require_object(p, "phi0");
      plan.phi0 = expsim::CountingPlan::linspace(
          get<double>(p, "start", 0.0), get<double>(p, "stop", 0.0),
          get<int>(p, "count", 0));
    }
  }
  plan.set_duration = get(j, "set_duration", plan.set_duration);
  plan.validate();
  return plan;
}

sensedesign::DesignSpec design_spec_from_json(const json& j) {
  require_object(j, "design spec");
  sensedesign::DesignSpec s;
  s.name = get<std::string>(j, "name", "");
  if (!j.contains("geometry"))
    throw ValidationError("design spec '" + s.name + "' lacks geometry");
  s.geometry = geometry_from_json(j.at("geometry"));
  s.alpha = get(j, "alpha", s.alpha);
  s.pair_rate_in = get(j, "pair_rate_in", s.pair_rate_in);
  s.integration_time = get(j, "integration_time", s.integration_time);
  s.photons = get(j, "photons", s.photons);
  s.projection = sagnac::projection_from_string(
      get<std::string>(j, "projection", "frame_angle"));
  if (j.contains("measured_delta_phi"))
    s.measured_delta_phi = get<double>(j, "measured_delta_phi", 0.0);
  s.validate();
  return s;
}

sensedesign::GfringOptions gfring_from_json(const json& j) {
  require_object(j, "gfring");
  sensedesign::GfringOptions o;
  o.target_snr = get(j, "target_snr", o.target_snr);
  o.latitude = deg_to_rad(get<double>(j, "latitude_deg", 0.0));
  o.alpha = get(j, "alpha", o.alpha);
  o.pair_rate_in = get(j, "pair_rate_in", o.pair_rate_in);
  o.integration_time = get(j, "integration_time", o.integration_time);
  o.wavelength = get(j, "wavelength", o.wavelength);
  o.photons = get(j, "photons", o.photons);
  o.max_turns = get(j, "max_turns", o.max_turns);
  o.min_fiber_length = get(j, "min_fiber_length", o.min_fiber_length);
  o.max_fiber_length = get(j, "max_fiber_length", o.max_fiber_length);
  o.validate();
  return o;
}

json to_json(const analysis::FringeFit& fit) {
  json params = {{"amplitude", fit.params.amplitude},
                 {"visibility", fit.params.visibility},
                 {"phase", fit.params.phase}};
  json sigmas = {{"amplitude", fit.sigmas.amplitude},
                 {"visibility", fit.sigmas.visibility},
                 {"phase", fit.sigmas.phase}};
  if (fit.model == analysis::FringeModel::SinglePhoton) {
    params["eta"] = fit.params.eta;
    sigmas["eta"] = fit.sigmas.eta;
  }
  json cov = json::array();
  for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c)
      row.push_back(fit.covariance(r, c));
    cov.push_back(row);
  }
  return {{"model", analysis::to_string(fit.model)},
          {"harmonic", fit.harmonic},
          {"params", params},
          {"sigmas", sigmas},
          {"covariance", cov},
          {"rss", fit.rss},
          {"iterations", fit.iterations},
          {"starts", fit.starts},
          {"converged", fit.converged},
          {"diagnostics", fit.diagnostics}};
}

json to_json(const analysis::EarthPhaseResult& r) {
  return {{"phi_on", r.phi_on},   {"phi_on_sigma", r.phi_on_sigma},
          {"phi_off", r.phi_off}, {"phi_off_sigma", r.phi_off_sigma},
          {"phi_e", r.phi_e},     {"phi_e_sigma", r.phi_e_sigma},
          {"sigma_method", r.sigma_method}};
}

json to_json(const analysis::McResult& r) {
  auto ms = [](const stats::MeanStd& m) {
    return json{{"mean", m.mean}, {"stddev", m.stddev}};
  };
  json out = {{"model", analysis::to_string(r.model)},
              {"samples", r.samples},
              {"failures", r.failures},
              {"amplitude", ms(r.amplitude)},
              {"visibility", ms(r.visibility)},
              {"phase", ms(r.phase)}};
  if (r.model == analysis::FringeModel::SinglePhoton) out["eta"] = ms(r.eta);
  return out;
}

json to_json(const analysis::CalibrationResult& r) {
  return {{"scale_factor", r.scale_factor},
          {"scale_factor_sigma", r.scale_factor_sigma},
          {"theta_offset_deg", rad_to_deg(r.theta_offset)},
          {"theta_offset_sigma_deg", rad_to_deg(r.theta_offset_sigma)},
          {"nominal_scale_factor", r.nominal_scale_factor},
          {"nominal_theta_offset_deg", rad_to_deg(r.nominal_theta_offset)},
          {"samples", r.samples}};
}

json to_json(const analysis::AngleSweepFit& r) {
  return {{"max_phase", r.max_phase},
          {"max_phase_sigma", r.max_phase_sigma},
          {"offset_deg", rad_to_deg(r.offset)},
          {"offset_sigma_deg", rad_to_deg(r.offset_sigma)},
          {"omega", r.omega},
          {"omega_sigma", r.omega_sigma}};
}

json to_json(const analysis::DemodulationResult& r) {
  return {{"delta_chi", r.delta_chi},     {"delta_psi", r.delta_psi},
          {"phi_s", r.phi_s},             {"phi_s_sigma", r.phi_s_sigma},
          {"segments", r.segments},       {"samples_used", r.samples_used}};
}

json to_json(const sensedesign::SensitivityReport& r) {
  return {{"name", r.name},
          {"area", r.area},
          {"eta", r.eta},
          {"pair_rate_out", r.pair_rate_out},
          {"delta_phi", r.delta_phi},
          {"delta_phi_projected", r.delta_phi_projected},
          {"scale_factor", r.scale_factor},
          {"projection_factor", r.projection_factor},
          {"delta_omega", r.delta_omega},
          {"snr_vs_gr", r.snr_vs_gr},
          {"regime", sensedesign::to_string(r.regime)}};
}

json to_json(const sensedesign::GfringDesign& d) {
  return {{"fiber_length", d.fiber_length},
          {"turns", d.turns},
          {"perimeter", d.spec.geometry.perimeter},
          {"side", d.spec.geometry.perimeter / 4.0},
          {"report", to_json(d.report)}};
}

void write_phase_table_csv(std::ostream& out,
                           std::span<const PhaseTableRow> rows) {
  out << "theta_deg,v_on_pct,v_on_sigma_pct,v_off_pct,v_off_sigma_pct,"
         "phi_on_mrad,phi_on_sigma_mrad,phi_off_mrad,phi_off_sigma_mrad,"
         "phi_e_mrad,phi_e_sigma_mrad\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << rad_to_deg(r.frame_angle) << ',' << 100.0 * r.v_on << ','
        << 100.0 * r.v_on_sigma << ',' << 100.0 * r.v_off << ','
        << 100.0 * r.v_off_sigma << ',' << 1e3 * r.phi_on << ','
        << 1e3 * r.phi_on_sigma << ',' << 1e3 * r.phi_off << ','
        << 1e3 * r.phi_off_sigma << ',' << 1e3 * r.phi_e << ','
        << 1e3 * r.phi_e_sigma << '\n';
  }
}

void write_resolution_table_csv(std::ostream& out,
                      std::span<const sensedesign::SensitivityReport> rows) {
  out << "name,area_m2,scale_factor_s,delta_phi_rad,delta_phi_projected_rad,"
         "projection_factor,delta_omega_rad_s,snr_vs_gr,regime\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.name << ',' << r.area << ',' << r.scale_factor << ','
        << r.delta_phi << ',' << r.delta_phi_projected << ','
        << r.projection_factor << ',' << r.delta_omega << ',' << r.snr_vs_gr
        << ',' << sensedesign::to_string(r.regime) << '\n';
  }
}

void write_landscape_csv(std::ostream& out,
                         std::span<const sensedesign::LandscapePoint> points) {
  out << "name,log10_area_m2,log10_delta_omega_rad_s,regime\n";
  out << std::setprecision(10);
  for (const auto& p : points)
    out << p.name << ',' << p.log10_area << ',' << p.log10_delta_omega << ','
        << sensedesign::to_string(p.regime) << '\n';
}

}  // namespace qsagnac::io
