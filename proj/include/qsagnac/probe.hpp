#pragma once

// Probe states (single photon, N00N) and their detection probabilities.

#include <complex>
#include <string>
#include <utility>

namespace qsagnac::probe {

using Complex = std::complex<double>;

enum class ProbeType { SinglePhoton, Noon, Classical };

struct ProbeKind {
  ProbeType type = ProbeType::SinglePhoton;
  int photons = 1;

  static ProbeKind single_photon() { return {ProbeType::SinglePhoton, 1}; }
  static ProbeKind noon(int n);
  static ProbeKind classical() { return {ProbeType::Classical, 1}; }

  // Factor multiplying the Sagnac and bias phases in the observed fringe.
  int enhancement() const { return type == ProbeType::Noon ? photons : 1; }
  std::string name() const;
};

ProbeKind probe_kind_from_string(const std::string& s, int photons = 2);

// State in the occupation subspace {(N,0), (1,1), (0,N)}. The (1,1)
// component only exists for N = 2.
struct TwoModeState {
  int photons = 2;
  Complex n0{};     // |N>_a |0>_b
  Complex mixed{};  // |1>_a |1>_b
  Complex zero_n{}; // |0>_a |N>_b

  double norm_squared() const {
    return std::norm(n0) + std::norm(mixed) + std::norm(zero_n);
  }

  // (|N,0> - |0,N>)/sqrt2
  static TwoModeState noon(int n);
};

// Mode b acquires e^{i phi} per photon.
TwoModeState evolve(const TwoModeState& state, double phi_s);

// |1_H 1_V> through the 22.5 deg HWP. distinguishability d in [0, 1]:
// d = 0 gives the N00N state, d = 1 the classical 1/4, 1/2, 1/4 split. The
// returned pure state is a surrogate; only its populations carry meaning for
// d > 0.
TwoModeState hom_interfere(double distinguishability = 0.0);

// Two-photon fringe visibility for a given distinguishability (V = 1 - d).
double two_photon_visibility(double distinguishability);

// (P_a, P_b) = ((1 + cos phi)/2, (1 - cos phi)/2)
std::pair<double, double> single_photon_probs(double phi_s);

// (P_a, P_b) = ((1 + cos N phi)/2, (1 - cos N phi)/2)
std::pair<double, double> noon_probs(int n, double phi_s);

// P_HV = [1 + cos(2 phi0 + 2 phi_s)] / 2
double coincidence_prob(double phi0, double phi_s);

// Two-photon state after the return pass through the 22.5 deg HWP:
// sin(phi)(|2,0> + |0,2>)/sqrt2 - i cos(phi) |1,1>.
TwoModeState output_state_after_hwp(double phi_s);

}  // namespace qsagnac::probe
