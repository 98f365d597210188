#pragma once

// Jones calculus for the classical (CW) arm: waveplates, bias phase, fiber
// compensation and polarization-ellipse readout.
//
// Conventions: hwp(0) = diag(1, -1) and qwp(0) = diag(1, i) exactly, with the
// fast axis rotated by R(theta) M R(-theta). Only global-phase invariant
// quantities are physically meaningful.

#include <complex>

#include <Eigen/Dense>

namespace qsagnac::polarization {

using Complex = std::complex<double>;

class JonesVector {
 public:
  JonesVector() : e_(1.0, 0.0) {}
  JonesVector(Complex h, Complex v) : e_(h, v) {}
  explicit JonesVector(const Eigen::Vector2cd& e) : e_(e) {}

  static JonesVector horizontal() { return {1.0, 0.0}; }
  static JonesVector vertical() { return {0.0, 1.0}; }
  static JonesVector diagonal();       // +
  static JonesVector antidiagonal();   // -
  static JonesVector right_circular(); // (1, -i)/sqrt2
  static JonesVector left_circular();  // (1, i)/sqrt2

  Complex h() const { return e_(0); }
  Complex v() const { return e_(1); }
  const Eigen::Vector2cd& vector() const { return e_; }

  double norm() const { return e_.norm(); }
  JonesVector normalized() const;

  // <this|other>
  Complex inner(const JonesVector& other) const { return e_.dot(other.e_); }

  // |<this|other>|^2 for normalized states.
  double fidelity(const JonesVector& other) const {
    return std::norm(inner(other));
  }

 private:
  Eigen::Vector2cd e_;
};

class JonesMatrix {
 public:
  JonesMatrix() : m_(Eigen::Matrix2cd::Identity()) {}
  explicit JonesMatrix(const Eigen::Matrix2cd& m) : m_(m) {}
  JonesMatrix(Complex a, Complex b, Complex c, Complex d) {
    m_ << a, b, c, d;
  }

  static JonesMatrix identity() { return JonesMatrix(); }

  Complex operator()(int r, int c) const { return m_(r, c); }
  const Eigen::Matrix2cd& matrix() const { return m_; }

  JonesMatrix adjoint() const { return JonesMatrix(m_.adjoint()); }
  Complex trace() const { return m_.trace(); }
  Complex determinant() const { return m_.determinant(); }

  // max |(U^dagger U - I)_ij|
  double unitarity_error() const;
  bool is_unitary(double tol = 1e-12) const { return unitarity_error() <= tol; }

  friend JonesMatrix operator*(const JonesMatrix& a, const JonesMatrix& b) {
    return JonesMatrix(a.m_ * b.m_);
  }
  friend JonesVector operator*(const JonesMatrix& a, const JonesVector& x) {
    return JonesVector(Eigen::Vector2cd(a.m_ * x.vector()));
  }

 private:
  Eigen::Matrix2cd m_;
};

// 1 - |tr(A^dagger B)|/2: zero iff A and B agree up to a global phase.
double phase_distance(const JonesMatrix& a, const JonesMatrix& b);

// Frobenius distance min_alpha ||B - e^{i alpha} A||.
double phase_aligned_error(const JonesMatrix& a, const JonesMatrix& b);

// Fidelity defect 1 - |<a|b>| for normalized states (global phase blind).
double state_distance(const JonesVector& a, const JonesVector& b);

struct PolarizationEllipse {
  double azimuth = 0.0;      // psi in (-pi/2, pi/2]
  double ellipticity = 0.0;  // chi in [-pi/4, pi/4]
  bool degenerate = false;   // circular light: azimuth undefined, set to 0
};

struct WaveplateAngles {
  double theta1 = 0.0;  // first QWP
  double theta2 = 0.0;  // second QWP
  double theta3 = 0.0;  // HWP
};

JonesMatrix hwp(double theta);
JonesMatrix qwp(double theta);
JonesMatrix phase_shift(double phi);

// hwp(-pi/8) * phase_shift(phi) * hwp(-pi/8): relative phase about the
// diagonal axis.
JonesMatrix bias_unitary(double phi);

// hwp(theta3) * qwp(theta2) * qwp(theta1)
JonesMatrix waveplate_triplet(const WaveplateAngles& angles);

// Angles whose triplet equals `target` up to global phase within 1e-8.
// Throws ValidationError for non-unitary targets and FitError if no start
// converges.
WaveplateAngles solve_triplet(const JonesMatrix& target);

// Fiber unitary from the output states measured for H and + inputs. Each
// measured state may carry an arbitrary global phase; the result is the
// nearest unitary (polar decomposition). Throws IllConditionedError when the
// two outputs are (anti)parallel.
JonesMatrix reconstruct_fiber_unitary(const JonesVector& out_h,
                                      const JonesVector& out_plus);

PolarizationEllipse ellipse_of(const JonesVector& state);
JonesVector vector_of(const PolarizationEllipse& ellipse);

// Counter-propagating loop: the clockwise (H) component leads the
// counter-clockwise (V) component by phi.
JonesMatrix sagnac_loop(double phi);

// Retarder about the H/V axis; rotates small Poincare-sphere displacements
// around H by `angle`. Models imperfect waveplate settings that leak the
// ellipticity signal into the azimuth.
JonesMatrix hv_retarder(double angle);

// Output of the CW readout chain: H -> hwp(22.5deg) -> loop(phi_s) ->
// hwp(22.5deg) -> fiber -> waveplates implementing bias(bias_phase) * fiber^-1.
JonesVector cw_readout(double phi_s, const JonesMatrix& fiber,
                       double bias_phase = 0.0);

}  // namespace qsagnac::polarization
