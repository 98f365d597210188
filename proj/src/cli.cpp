#include "qsagnac/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qsagnac/analysis.hpp"
#include "qsagnac/errors.hpp"
#include "qsagnac/expsim.hpp"
#include "qsagnac/io.hpp"
#include "qsagnac/rng.hpp"
#include "qsagnac/sensedesign.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::cli {

namespace fs = std::filesystem;
using io::json;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Config {
  json doc;
  std::string raw;
  fs::path dir;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config load_config(const Options& options, const char* command) {
  Config c;
  c.raw = read_file(options.config);
  c.dir = options.config.parent_path();
  try {
    c.doc = json::parse(c.raw);
  } catch (const json::parse_error& e) {
    throw ValidationError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!c.doc.is_object()) throw ValidationError("config must be a JSON object");
  if (!c.doc.contains("schema_version") ||
      !c.doc.at("schema_version").is_number_integer() ||
      c.doc.at("schema_version").get<int>() != schema_version)
    throw ValidationError("config: schema_version must be " +
                          std::to_string(schema_version));
  const std::string cmd = c.doc.value("command", std::string(command));
  if (cmd != command)
    throw ValidationError("config is for '" + cmd + "', not '" + command + "'");
  return c;
}

std::uint64_t seed_of(const Config& c, const Options& options) {
  if (options.seed) return *options.seed;
  if (!c.doc.contains("seed") || !c.doc.at("seed").is_number_unsigned())
    throw ValidationError("config: a non-negative integer 'seed' is required");
  return c.doc.at("seed").get<std::uint64_t>();
}

// Input files are looked up in the output directory, then next to the config.
fs::path resolve_input(const std::string& name, const Options& options,
                       const Config& c) {
  const fs::path p(name);
  if (p.is_absolute()) return p;
  if (fs::exists(options.out / p)) return options.out / p;
  if (fs::exists(c.dir / p)) return c.dir / p;
  throw ValidationError("input '" + name + "' not found in '" +
                        options.out.string() + "' or '" + c.dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

const json& section(const json& doc, const char* key) {
  if (!doc.contains(key))
    throw ValidationError(std::string("config: missing '") + key + "'");
  return doc.at(key);
}

std::vector<double> angles_of(const json& j) {
  if (!j.contains("frame_angles_deg")) return {0.0};
  std::vector<double> out;
  for (const auto& v : j.at("frame_angles_deg")) {
    if (!v.is_number())
      throw ValidationError("frame_angles_deg must hold numbers");
    out.push_back(deg_to_rad(v.get<double>()));
  }
  if (out.empty()) throw ValidationError("frame_angles_deg is empty");
  return out;
}

std::string stem(const std::string& name) {
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      throw ValidationError("names may only use [A-Za-z0-9_-]: '" + name + "'");
  if (name.empty()) throw ValidationError("empty name");
  return name;
}

int report_error(const std::exception& e, std::ostream& err) {
  if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e)) {
    err << "error: " << inf->what()
        << " (binding constraint: " << inf->binding_constraint() << ")\n";
    return FitFailure;
  }
  if (dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const json::exception*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e)) {
    err << "config error: " << e.what() << '\n';
    return ConfigError;
  }
  err << "fit error: " << e.what() << '\n';
  return FitFailure;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

// ---------------------------------------------------------------- simulate

int simulate(const Options& options, std::ostream& log) {
  const Config c = load_config(options, "simulate");
  const std::uint64_t seed = seed_of(c, options);
  const auto base_geom = io::geometry_from_json(section(c.doc, "geometry"));
  const double omega =
      c.doc.value("omega", sagnac::PhysicalConstants{}.earth_rate);
  const auto experiment = c.doc.contains("experiment")
                              ? io::experiment_from_json(c.doc.at("experiment"))
                              : expsim::ExperimentConfig{};
  fs::create_directories(options.out);

  json outputs = json::array();
  std::size_t total_records = 0;
  const json scans = c.doc.value("scans", json::array());
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const json& s = scans[i];
    const std::string name = stem(s.value("name", "scan" + std::to_string(i)));
    const auto kind = io::probe_from_json(s);
    const auto angles = angles_of(s);
    std::vector<expsim::CountingPlan> plans;
    const auto plan = io::plan_from_json(s, kind);
    if (s.contains("set_durations")) {
      const auto d = s.at("set_durations").get<std::vector<double>>();
      if (d.size() != angles.size())
        throw ValidationError(name + ": set_durations needs one per angle");
      for (double v : d) {
        auto p = plan;
        p.set_duration = v;
        p.validate();
        plans.push_back(p);
      }
    } else {
      plans.push_back(plan);
    }
    const auto sweep = expsim::angle_sweep(kind, base_geom, angles, plans,
                                           experiment, omega,
                                           mix64(seed ^ (0x5ca11ULL + i)));
    std::vector<expsim::CountRecord> all;
    for (const auto& a : sweep)
      all.insert(all.end(), a.records.begin(), a.records.end());
    std::ostringstream csv;
    io::write_counts_csv(csv, all);
    const std::string file = name + ".csv";
    write_text(options.out / file, csv.str());
    total_records += all.size();
    outputs.push_back({{"file", file},
                       {"kind", "counts"},
                       {"probe", kind.name()},
                       {"records", all.size()}});
  }

  const json traces = c.doc.value("polarimeter", json::array());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const json& t = traces[i];
    const std::string name = stem(t.value("name", "cw" + std::to_string(i)));
    auto schedule = expsim::SwitchSchedule::for_polarimeter();
    if (t.contains("schedule"))
      schedule = io::schedule_from_json(t.at("schedule"), schedule);
    const auto noise = t.contains("noise") ? io::noise_from_json(t.at("noise"))
                                           : experiment.noise;
    const double total_time = t.value("total_time", 600.0);
    const auto angles = angles_of(t);
    for (std::size_t k = 0; k < angles.size(); ++k) {
      auto geom = base_geom;
      geom.frame_angle = angles[k];
      const auto trace = expsim::simulate_polarimeter(
          geom, schedule, experiment.rates, noise, omega, total_time,
          mix64(seed ^ (0xc0ffeeULL + 1000 * i + k)));
      std::ostringstream csv;
      io::write_trace_csv(csv, trace);
      const std::string file = name + "_" + std::to_string(k) + ".csv";
      write_text(options.out / file, csv.str());
      outputs.push_back({{"file", file},
                         {"kind", "trace"},
                         {"frame_angle_deg", rad_to_deg(angles[k])},
                         {"samples", trace.samples.size()}});
    }
  }

  std::ostringstream hash;
  hash << std::hex << fnv1a(c.raw);
  const json manifest = {{"toolkit", "qsagnac"},
                         {"version", version},
                         {"command", "simulate"},
                         {"seed", seed},
                         {"config_hash", "fnv1a64:" + hash.str()},
                         {"config", c.doc},
                         {"outputs", outputs}};
  write_text(options.out / "manifest.json", manifest.dump(2) + "\n");
  log << "simulate: " << total_records << " count records, " << outputs.size()
      << " files in " << options.out.string() << '\n';
  return Success;
}

// --------------------------------------------------------------------- fit

struct AngleGroup {
  double frame_angle = 0.0;
  std::vector<expsim::CountRecord> on, off;
};

std::vector<AngleGroup> group_by_angle(
    const std::vector<expsim::CountRecord>& records) {
  std::vector<AngleGroup> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      return std::abs(g.frame_angle - r.frame_angle) < 1e-12;
    });
    if (it == groups.end()) {
      groups.push_back({r.frame_angle, {}, {}});
      it = groups.end() - 1;
    }
    (r.state == sagnac::SwitchState::On ? it->on : it->off).push_back(r);
  }
  return groups;
}

analysis::FringeModel model_of(const json& s) {
  const std::string m = s.value("model", "two_photon");
  if (m == "two_photon") return analysis::FringeModel::TwoPhoton;
  if (m == "single_photon") return analysis::FringeModel::SinglePhoton;
  throw ValidationError("unknown fringe model '" + m + "'");
}

int fit(const Options& options, std::ostream& log) {
  const Config c = load_config(options, "fit");
  const std::uint64_t seed = seed_of(c, options);
  const auto geom = io::geometry_from_json(section(c.doc, "geometry"));
  const json mc_cfg = c.doc.value("mc", json::object());
  analysis::McOptions mc;
  mc.samples = mc_cfg.value("samples", std::size_t{100000});
  if (options.fast) mc.samples = analysis::mc_fast_samples;
  mc.offsets.common_sigma = mc_cfg.value("common_sigma", 2.4e-3);
  mc.offsets.per_setting_sigma = mc_cfg.value("per_setting_sigma", 0.0);
  const bool use_mc = mc.samples > 0;
  fs::create_directories(options.out);

  json report = {{"toolkit", "qsagnac"},
                 {"version", version},
                 {"seed", seed},
                 {"mc_samples", mc.samples}};
  json scans_out = json::object();
  std::map<std::string, analysis::AngleSweepFit> sweeps;

  const json scans = c.doc.value("scans", json::array());
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const json& s = scans[i];
    const std::string name = stem(s.value("name", "scan" + std::to_string(i)));
    const auto model = model_of(s);
    const int photons =
        model == analysis::FringeModel::TwoPhoton ? s.value("photons", 2) : 1;
    std::ifstream in(resolve_input(section(s, "input").get<std::string>(),
                                   options, c));
    const auto groups = group_by_angle(io::read_counts_csv(in));

    json angles_out = json::array();
    std::vector<io::PhaseTableRow> rows;
    std::vector<analysis::PhasePoint> points;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& grp = groups[g];
      analysis::FringeFit on, off;
      if (model == analysis::FringeModel::TwoPhoton) {
        on = analysis::fit_noon_fringe(grp.on, {}, photons);
        off = analysis::fit_noon_fringe(grp.off, {}, photons);
      } else {
        on = analysis::fit_single_fringe(grp.on);
        off = analysis::fit_single_fringe(grp.off);
      }
      analysis::EarthPhaseResult e = analysis::extract_earth_phase(on, off);
      json entry = {{"frame_angle_deg", rad_to_deg(grp.frame_angle)},
                    {"fit_on", io::to_json(on)},
                    {"fit_off", io::to_json(off)},
                    {"earth_phase_quadrature", io::to_json(e)}};
      io::PhaseTableRow row;
      row.v_on_sigma = on.sigmas.visibility;
      row.v_off_sigma = off.sigmas.visibility;
      if (use_mc) {
        mc.seed = mix64(seed ^ (0x3c0ULL + 1000 * i + g));
        mc.photons = photons;
        const auto m = analysis::mc_earth_phase(grp.on, grp.off, model, mc);
        entry["mc_on"] = io::to_json(m.on);
        entry["mc_off"] = io::to_json(m.off);
        e.phi_on_sigma = m.result.phi_on_sigma;
        e.phi_off_sigma = m.result.phi_off_sigma;
        e.phi_e_sigma = m.result.phi_e_sigma;
        e.sigma_method = "monte_carlo";
        row.v_on_sigma = m.on.visibility.stddev;
        row.v_off_sigma = m.off.visibility.stddev;
      }
      entry["earth_phase"] = io::to_json(e);
      angles_out.push_back(entry);

      row.frame_angle = grp.frame_angle;
      row.v_on = on.params.visibility;
      row.v_off = off.params.visibility;
      row.phi_on = e.phi_on;
      row.phi_on_sigma = e.phi_on_sigma;
      row.phi_off = e.phi_off;
      row.phi_off_sigma = e.phi_off_sigma;
      row.phi_e = e.phi_e;
      row.phi_e_sigma = e.phi_e_sigma;
      rows.push_back(row);
      points.push_back({grp.frame_angle, e.phi_e, e.phi_e_sigma});
    }

    json scan_out = {{"model", analysis::to_string(model)},
                     {"photons", photons},
                     {"angles", angles_out}};
    if (points.size() >= 3) {
      const int k = model == analysis::FringeModel::TwoPhoton ? photons : 1;
      const auto sweep = analysis::fit_angle_sweep(points, geom, k);
      scan_out["angle_sweep"] = io::to_json(sweep);
      sweeps[name] = sweep;
    }
    scans_out[name] = scan_out;

    std::ostringstream table;
    io::write_phase_table_csv(table, rows);
    write_text(options.out / ("table_" + name + ".csv"), table.str());
    log << "fit: " << name << ": " << groups.size() << " angles\n";
  }
  report["scans"] = scans_out;

  if (c.doc.contains("enhancement")) {
    const json& e = c.doc.at("enhancement");
    const std::string two = e.value("two", "two_photon");
    const std::string one = e.value("one", "single_photon");
    if (!sweeps.count(two) || !sweeps.count(one))
      throw ValidationError("enhancement: needs angle sweeps for '" + two +
                            "' and '" + one + "'");
    const auto r = analysis::enhancement_factor(
        sweeps[two].max_phase, sweeps[two].max_phase_sigma,
        sweeps[one].max_phase, sweeps[one].max_phase_sigma);
    report["enhancement"] = {{"value", r.value}, {"sigma", r.sigma}};
  }

  if (c.doc.contains("calibration")) {
    const json& cal = c.doc.at("calibration");
    analysis::CalibrationOptions copt;
    copt.earth_rate = cal.value("earth_rate", copt.earth_rate);
    copt.samples = cal.value("samples", copt.samples);
    if (options.fast) copt.samples = std::min<std::size_t>(copt.samples, 1000);
    copt.angle_halfwidth =
        deg_to_rad(cal.value("angle_halfwidth_deg", 1.0));
    copt.seed = mix64(seed ^ 0xca1ULL);
    std::vector<analysis::PhasePoint> points;
    json demod = json::array();
    if (cal.contains("points")) {
      for (const auto& p : cal.at("points"))
        points.push_back({deg_to_rad(p.at("theta_deg").get<double>()),
                          p.at("phase").get<double>(),
                          p.at("sigma").get<double>()});
    } else {
      auto schedule = expsim::SwitchSchedule::for_polarimeter();
      if (cal.contains("schedule"))
        schedule = io::schedule_from_json(cal.at("schedule"), schedule);
      const double floor = cal.value("sigma_floor", 1e-6);
      for (const auto& t : section(cal, "traces")) {
        std::ifstream in(resolve_input(section(t, "input").get<std::string>(),
                                       options, c));
        const auto trace = io::read_trace_csv(in);
        const auto d = analysis::demodulate_trace(trace, schedule);
        const double theta = deg_to_rad(section(t, "frame_angle_deg").get<double>());
        points.push_back({theta, d.phi_s, std::max(d.phi_s_sigma, floor)});
        json dj = io::to_json(d);
        dj["frame_angle_deg"] = rad_to_deg(theta);
        demod.push_back(dj);
      }
    }
    const auto r = analysis::calibrate_scale_factor(points, copt);
    report["calibration"] = io::to_json(r);
    if (!demod.empty()) report["calibration"]["demodulation"] = demod;
    log << "fit: calibration S = " << r.scale_factor << " +- "
        << r.scale_factor_sigma << " s\n";
  }

  write_text(options.out / "fit_report.json", report.dump(2) + "\n");
  return Success;
}

// ------------------------------------------------------------------ design

int design(const Options& options, std::ostream& log) {
  const Config c = load_config(options, "design");
  fs::create_directories(options.out);
  std::vector<sensedesign::DesignSpec> specs;
  for (const auto& s : c.doc.value("specs", json::array()))
    specs.push_back(io::design_spec_from_json(s));

  std::vector<sensedesign::SensitivityReport> reports;
  for (const auto& s : specs)
    reports.push_back(sensedesign::rotation_resolution(s));
  const auto points = sensedesign::landscape(specs);

  std::ostringstream t3, l5;
  io::write_resolution_table_csv(t3, reports);
  io::write_landscape_csv(l5, points);
  write_text(options.out / "resolutions.csv", t3.str());
  write_text(options.out / "landscape.csv", l5.str());

  json out = {{"toolkit", "qsagnac"}, {"version", version}};
  json rows = json::array();
  for (const auto& r : reports) rows.push_back(io::to_json(r));
  out["reports"] = rows;
  log << "design: " << reports.size() << " specs\n";

  if (options.optimize_gfring) {
    const auto opt = io::gfring_from_json(
        c.doc.value("gfring", json::object()));
    const auto d = sensedesign::optimize_gfring(opt);
    out["gfring"] = io::to_json(d);
    log << "design: GFRING L_f = " << d.fiber_length / 1000.0
        << " km, n_t = " << d.turns << ", SNR = " << d.report.snr_vs_gr
        << '\n';
  }
  write_text(options.out / "design_report.json", out.dump(2) + "\n");
  return Success;
}

}  // namespace

int cmd_simulate(const Options& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] { return simulate(options, log); });
}

int cmd_fit(const Options& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] { return fit(options, log); });
}

int cmd_design(const Options& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] { return design(options, log); });
}

int run(int argc, char** argv) {
  CLI::App app{"Quantum Sagnac interferometer simulator and analysis"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  Options options;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config, "JSON recipe")->required();
    sub->add_option("--seed", seed, "Override the recipe seed");
    sub->add_option("--out", options.out, "Output directory");
    sub->add_flag("--fast", options.fast, "Monte-Carlo with 1e3 samples");
  };
  CLI::App* sim = app.add_subcommand("simulate", "Synthesize count and trace files");
  CLI::App* fit = app.add_subcommand("fit", "Fit count files and calibration traces");
  CLI::App* des = app.add_subcommand("design", "Sensitivity table and landscape");
  add_common(sim);
  add_common(fit);
  add_common(des);
  des->add_flag("--optimize-gfring", options.optimize_gfring,
                "Solve for the square-ring geometry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Success : ConfigError;
  }
  for (CLI::App* sub : {sim, fit, des})
    if (sub->parsed() && sub->count("--seed") > 0) options.seed = seed;

  if (sim->parsed()) return cmd_simulate(options, std::cout, std::cerr);
  if (fit->parsed()) return cmd_fit(options, std::cout, std::cerr);
  return cmd_design(options, std::cout, std::cerr);
}

}  // namespace qsagnac::cli
