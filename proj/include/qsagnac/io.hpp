#pragma once

// CSV tables, JSON reports and JSON config parsing.

#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "qsagnac/analysis.hpp"
#include "qsagnac/expsim.hpp"
#include "qsagnac/probe.hpp"
#include "qsagnac/sensedesign.hpp"

namespace qsagnac::io {

using nlohmann::json;

inline constexpr const char* counts_schema = "counts/1";
inline constexpr const char* trace_schema = "trace/1";

// Counts: "# schema: counts/1", then
// theta_deg,phi0_rad,switch,duration_s,n_h,n_v,n_hv
void write_counts_csv(std::ostream& out,
                      std::span<const expsim::CountRecord> records);
std::vector<expsim::CountRecord> read_counts_csv(std::istream& in);

// Trace: "# schema: trace/1", "# sample_rate_hz: <r>", then
// t_s,psi_rad,chi_rad,drive
void write_trace_csv(std::ostream& out, const expsim::PolarimeterTrace& trace);
expsim::PolarimeterTrace read_trace_csv(std::istream& in);

// Config sections. Missing keys keep the library defaults; wrong types and
// unknown enum values throw ValidationError.
sagnac::InterferometerGeometry geometry_from_json(const json& j);
expsim::ExperimentConfig experiment_from_json(const json& j);
expsim::SwitchSchedule schedule_from_json(const json& j,
                                          expsim::SwitchSchedule defaults);
expsim::NoiseConfig noise_from_json(const json& j);
expsim::RateConfig rates_from_json(const json& j);
probe::ProbeKind probe_from_json(const json& j);
expsim::CountingPlan plan_from_json(const json& j, const probe::ProbeKind& kind);
sensedesign::DesignSpec design_spec_from_json(const json& j);
sensedesign::GfringOptions gfring_from_json(const json& j);

json to_json(const analysis::FringeFit& fit);
json to_json(const analysis::EarthPhaseResult& r);
json to_json(const analysis::McResult& r);
json to_json(const analysis::CalibrationResult& r);
json to_json(const analysis::AngleSweepFit& r);
json to_json(const analysis::DemodulationResult& r);
json to_json(const sensedesign::SensitivityReport& r);
json to_json(const sensedesign::GfringDesign& d);

// One row of the per-angle fit table (visibilities as fractions, phases in
// rad; written in percent and mrad).
struct PhaseTableRow {
  double frame_angle = 0.0;
  double v_on = 0.0, v_on_sigma = 0.0;
  double v_off = 0.0, v_off_sigma = 0.0;
  double phi_on = 0.0, phi_on_sigma = 0.0;
  double phi_off = 0.0, phi_off_sigma = 0.0;
  double phi_e = 0.0, phi_e_sigma = 0.0;
};

void write_phase_table_csv(std::ostream& out,
                           std::span<const PhaseTableRow> rows);
void write_resolution_table_csv(std::ostream& out,
                      std::span<const sensedesign::SensitivityReport> rows);
void write_landscape_csv(std::ostream& out,
                         std::span<const sensedesign::LandscapePoint> points);

}  // namespace qsagnac::io
