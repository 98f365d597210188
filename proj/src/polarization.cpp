#include "qsagnac/polarization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qsagnac/errors.hpp"
#include "qsagnac/nlls.hpp"
#include "qsagnac/units.hpp"

namespace qsagnac::polarization {

namespace {

constexpr Complex I{0.0, 1.0};
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

Eigen::Matrix2cd rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2cd r;
  r << c, -s, s, c;
  return r;
}

JonesMatrix rotated(const Eigen::Matrix2cd& m, double theta) {
  const Eigen::Matrix2cd r = rotation(theta);
  return JonesMatrix(r * m * r.transpose());
}

}  // namespace

JonesVector JonesVector::diagonal() { return {inv_sqrt2, inv_sqrt2}; }
JonesVector JonesVector::antidiagonal() { return {inv_sqrt2, -inv_sqrt2}; }
JonesVector JonesVector::right_circular() {
  return {inv_sqrt2, -I * inv_sqrt2};
}
JonesVector JonesVector::left_circular() { return {inv_sqrt2, I * inv_sqrt2}; }

JonesVector JonesVector::normalized() const {
  const double n = e_.norm();
  if (n == 0.0) throw ValidationError("cannot normalize a zero Jones vector");
  return JonesVector(Eigen::Vector2cd(e_ / n));
}

double JonesMatrix::unitarity_error() const {
  const Eigen::Matrix2cd d = m_.adjoint() * m_ - Eigen::Matrix2cd::Identity();
  return d.cwiseAbs().maxCoeff();
}

double phase_distance(const JonesMatrix& a, const JonesMatrix& b) {
  return 1.0 - std::abs((a.adjoint() * b).trace()) / 2.0;
}

double phase_aligned_error(const JonesMatrix& a, const JonesMatrix& b) {
  const Complex t = (a.adjoint() * b).trace();
  const Complex phase = std::abs(t) > 0.0 ? t / std::abs(t) : Complex{1.0};
  return (b.matrix() - phase * a.matrix()).norm();
}

double state_distance(const JonesVector& a, const JonesVector& b) {
  return 1.0 - std::abs(a.inner(b));
}

JonesMatrix hwp(double theta) {
  Eigen::Matrix2cd m;
  m << 1.0, 0.0, 0.0, -1.0;
  return rotated(m, theta);
}

JonesMatrix qwp(double theta) {
  Eigen::Matrix2cd m;
  m << 1.0, 0.0, 0.0, I;
  return rotated(m, theta);
}

JonesMatrix phase_shift(double phi) {
  return JonesMatrix(1.0, 0.0, 0.0, std::polar(1.0, phi));
}

JonesMatrix bias_unitary(double phi) {
  const JonesMatrix h = hwp(-pi / 8.0);
  return h * phase_shift(phi) * h;
}

JonesMatrix waveplate_triplet(const WaveplateAngles& a) {
  return hwp(a.theta3) * qwp(a.theta2) * qwp(a.theta1);
}

WaveplateAngles solve_triplet(const JonesMatrix& target) {
  if (!target.is_unitary(1e-10)) {
    throw ValidationError("solve_triplet: target is not unitary (error " +
                          std::to_string(target.unitarity_error()) + ")");
  }

  // Residual: real and imaginary parts of W(theta) - e^{i alpha} target with
  // alpha chosen optimally, so ||r||^2 = 4 * phase_distance.
  auto residual = [&](const Eigen::Vector3d& x) {
    const JonesMatrix w = waveplate_triplet({x(0), x(1), x(2)});
    const Complex t = (target.adjoint() * w).trace();
    const Complex phase = std::abs(t) > 0.0 ? t / std::abs(t) : Complex{1.0};
    const Eigen::Matrix2cd d = w.matrix() - phase * target.matrix();
    Eigen::VectorXd r(8);
    for (int i = 0; i < 4; ++i) {
      r(2 * i) = d(i / 2, i % 2).real();
      r(2 * i + 1) = d(i / 2, i % 2).imag();
    }
    return r;
  };
  auto problem = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                     Eigen::MatrixXd* jac) {
    r = residual(x);
    if (jac == nullptr) return;
    jac->resize(8, 3);
    constexpr double h = 1e-7;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      jac->col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
  };

  constexpr double tolerance = 1e-8;
  analysis::LmOptions opt;
  opt.max_iterations = 200;
  opt.relative_tolerance = 0.0;

  WaveplateAngles best;
  double best_err = std::numeric_limits<double>::infinity();
  auto try_start = [&](double a, double b, double c) {
    Eigen::VectorXd x0(3);
    x0 << a, b, c;
    const analysis::LmResult fit = analysis::levenberg_marquardt(problem, x0, opt);
    const WaveplateAngles angles{wrap_phase(fit.params(0)),
                                 wrap_phase(fit.params(1)),
                                 wrap_phase(fit.params(2))};
    const double err = phase_aligned_error(target, waveplate_triplet(angles));
    if (err < best_err) {
      best_err = err;
      best = angles;
    }
    return best_err < tolerance * 1e-2;
  };

  // Eight starts on a coarse grid, then a finer grid as fallback.
  constexpr std::array<double, 2> coarse{pi / 8.0, 5.0 * pi / 8.0};
  for (double a : coarse)
    for (double b : coarse)
      for (double c : coarse)
        if (try_start(a, b, c)) return best;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (try_start(0.1 + i * pi / 4.0, 0.2 + j * pi / 4.0,
                      0.3 + k * pi / 4.0))
          return best;

  if (best_err <= tolerance) return best;
  throw FitError("solve_triplet: no start converged; best residual " +
                 std::to_string(best_err));
}

JonesMatrix reconstruct_fiber_unitary(const JonesVector& out_h,
                                      const JonesVector& out_plus) {
  const JonesVector h = out_h.normalized();
  const JonesVector p = out_plus.normalized();
  const Complex overlap = h.inner(p);
  const double mag = std::abs(overlap);
  // Inputs H and + overlap with modulus 1/sqrt2; the outputs of a unitary must
  // too. Near 0 the relative phase is unobservable, near 1 the columns
  // collapse onto each other.
  if (mag > 0.95 || mag < 0.05) {
    throw IllConditionedError(
        "reconstruct_fiber_unitary: |<out_h|out_plus>| = " +
        std::to_string(mag) + " is too far from 1/sqrt(2)");
  }
  // U H = h fixes the global phase; U + = e^{i beta} p with beta chosen so
  // that the second column is as orthogonal to the first as possible.
  const Complex beta_phase = std::conj(overlap) / mag;
  const Eigen::Vector2cd col0 = h.vector();
  const Eigen::Vector2cd col1 =
      std::sqrt(2.0) * beta_phase * p.vector() - h.vector();
  Eigen::Matrix2cd m;
  m.col(0) = col0;
  m.col(1) = col1;
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m,
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
  return JonesMatrix(Eigen::Matrix2cd(svd.matrixU() * svd.matrixV().adjoint()));
}

PolarizationEllipse ellipse_of(const JonesVector& state) {
  const Complex eh = state.h();
  const Complex ev = state.v();
  const double s0 = std::norm(eh) + std::norm(ev);
  if (s0 == 0.0) throw ValidationError("ellipse_of: zero state");
  const double s1 = (std::norm(eh) - std::norm(ev)) / s0;
  const Complex cross = std::conj(eh) * ev;
  const double s2 = 2.0 * cross.real() / s0;
  const double s3 = 2.0 * cross.imag() / s0;

  PolarizationEllipse e;
  e.ellipticity = 0.5 * std::asin(std::clamp(s3, -1.0, 1.0));
  const double linear = std::hypot(s1, s2);
  if (linear < 1e-14) {
    e.azimuth = 0.0;
    e.degenerate = true;
  } else {
    e.azimuth = 0.5 * std::atan2(s2, s1);
    if (e.azimuth <= -pi / 2.0) e.azimuth += pi;
  }
  return e;
}

JonesVector vector_of(const PolarizationEllipse& ellipse) {
  const JonesVector canonical(std::cos(ellipse.ellipticity),
                              I * std::sin(ellipse.ellipticity));
  return JonesVector(
      Eigen::Vector2cd(rotation(ellipse.azimuth) * canonical.vector()));
}

JonesMatrix sagnac_loop(double phi) {
  return JonesMatrix(std::polar(1.0, phi / 2.0), 0.0, 0.0,
                     std::polar(1.0, -phi / 2.0));
}

JonesMatrix hv_retarder(double angle) {
  return JonesMatrix(std::polar(1.0, -angle / 2.0), 0.0, 0.0,
                     std::polar(1.0, angle / 2.0));
}

JonesVector cw_readout(double phi_s, const JonesMatrix& fiber,
                       double bias_phase) {
  const JonesMatrix h = hwp(pi / 8.0);
  const JonesVector after_loop =
      h * (sagnac_loop(phi_s) * (h * JonesVector::horizontal()));
  const JonesMatrix compensation = bias_unitary(bias_phase) * fiber.adjoint();
  return compensation * (fiber * after_loop);
}

}  // namespace qsagnac::polarization
