#include "qsagnac/probe.hpp"

#include <cmath>

#include "qsagnac/errors.hpp"

namespace qsagnac::probe {

namespace {
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
}

ProbeKind ProbeKind::noon(int n) {
  if (n < 2) throw ValidationError("N00N probe needs n >= 2");
  return {ProbeType::Noon, n};
}

std::string ProbeKind::name() const {
  switch (type) {
    case ProbeType::SinglePhoton:
      return "single";
    case ProbeType::Noon:
      return "noon";
    case ProbeType::Classical:
      return "classical";
  }
  return "unknown";
}

ProbeKind probe_kind_from_string(const std::string& s, int photons) {
  if (s == "single" || s == "single_photon") return ProbeKind::single_photon();
  if (s == "noon") return ProbeKind::noon(photons);
  if (s == "classical" || s == "cw") return ProbeKind::classical();
  throw ValidationError("unknown probe kind '" + s + "'");
}

TwoModeState TwoModeState::noon(int n) {
  if (n < 1) throw ValidationError("TwoModeState::noon: n >= 1");
  return {n, inv_sqrt2, 0.0, -inv_sqrt2};
}

TwoModeState evolve(const TwoModeState& state, double phi_s) {
  TwoModeState out = state;
  out.zero_n *= std::polar(1.0, state.photons * phi_s);
  out.mixed *= std::polar(1.0, phi_s);
  return out;
}

TwoModeState hom_interfere(double d) {
  if (d < 0.0 || d > 1.0)
    throw ValidationError("hom_interfere: distinguishability in [0, 1]");
  const double p_mixed = d / 2.0;
  const double p_branch = (1.0 - p_mixed) / 2.0;
  return {2, std::sqrt(p_branch), std::sqrt(p_mixed), -std::sqrt(p_branch)};
}

double two_photon_visibility(double d) {
  if (d < 0.0 || d > 1.0)
    throw ValidationError("two_photon_visibility: d in [0, 1]");
  return 1.0 - d;
}

std::pair<double, double> single_photon_probs(double phi_s) {
  return noon_probs(1, phi_s);
}

std::pair<double, double> noon_probs(int n, double phi_s) {
  if (n < 1) throw ValidationError("noon_probs: n >= 1");
  const double c = std::cos(n * phi_s);
  return {(1.0 + c) / 2.0, (1.0 - c) / 2.0};
}

double coincidence_prob(double phi0, double phi_s) {
  return 0.5 * (1.0 + std::cos(2.0 * phi0 + 2.0 * phi_s));
}

TwoModeState output_state_after_hwp(double phi_s) {
  const double s = std::sin(phi_s) * inv_sqrt2;
  return {2, s, Complex{0.0, -std::cos(phi_s)}, s};
}

}  // namespace qsagnac::probe
