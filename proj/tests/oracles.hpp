#pragma once

// Reference formulas written out independently of the library, used as
// test oracles.

#include <array>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using C = std::complex<double>;
using M2 = std::array<C, 4>;  // row-major
using V2 = std::array<C, 2>;

constexpr double pi = 3.14159265358979323846;
constexpr double c_light = 299792458.0;

// Half-wave plate, fast axis at theta, hwp(0) = diag(1, -1).
inline M2 hwp(double t) {
  return {C(std::cos(2 * t)), C(std::sin(2 * t)), C(std::sin(2 * t)),
          C(-std::cos(2 * t))};
}

// Quarter-wave plate, qwp(0) = diag(1, i).
inline M2 qwp(double t) {
  const double c = std::cos(t), s = std::sin(t);
  const C i(0, 1);
  return {c * c + i * s * s, (1.0 - i) * s * c, (1.0 - i) * s * c,
          s * s + i * c * c};
}

inline M2 mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline V2 apply(const M2& a, const V2& x) {
  return {a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]};
}

// |<a|b>| for normalized vectors.
inline double overlap(const V2& a, const V2& b) {
  return std::abs(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
}

// Haar-ish random unitary from a random complex matrix via Gram-Schmidt.
inline M2 random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  V2 a{C(n(rng), n(rng)), C(n(rng), n(rng))};
  V2 b{C(n(rng), n(rng)), C(n(rng), n(rng))};
  const double na = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
  a = {a[0] / na, a[1] / na};
  const C p = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  b = {b[0] - p * a[0], b[1] - p * a[1]};
  const double nb = std::sqrt(std::norm(b[0]) + std::norm(b[1]));
  b = {b[0] / nb, b[1] / nb};
  const C phase = std::polar(1.0, 2 * pi * std::uniform_real_distribution<>(0, 1)(rng));
  return {a[0] * phase, b[0] * phase, a[1] * phase, b[1] * phase};
}

// Sagnac phase 8 pi Omega A cos(Theta) / (lambda c).
inline double sagnac_phase(double area, double omega, double theta,
                           double lambda) {
  return 8 * pi * omega * area * std::cos(theta) / (lambda * c_light);
}

// Shot-noise rotation resolution of a square ring (closed form).
inline double square_ring_domega(double length_m, int turns, double alpha,
                                 double r_in, double t, double lat,
                                 double lambda) {
  return std::sqrt(2.0 / (r_in * t)) * lambda * c_light /
         (pi * std::sin(lat)) * turns *
         std::pow(10.0, alpha * length_m / 1000.0 / 10.0) /
         (length_m * length_m);
}

// Two-photon expected coincidences (A/2)[1 + V cos(2 phi0 + phi)].
inline double noon_fringe(double amp, double vis, double phase, double phi0,
                          int k = 2) {
  return 0.5 * amp * (1 + vis * std::cos(k * phi0 + phase));
}

}  // namespace oracle
