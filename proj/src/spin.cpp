#include "tact/spin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace tact {

void SimConfig::validate() const {
  if (n < 1) throw std::invalid_argument("particle count N must be >= 1, got " + std::to_string(n));
  if (!(chi > 0.0) || !std::isfinite(chi))
    throw std::invalid_argument("nonlinearity chi must be positive and finite");
}

Direction::Direction(double x, double y, double z) : v_(x, y, z) {
  const double norm = v_.norm();
  if (!std::isfinite(norm) || norm == 0.0)
    throw std::invalid_argument("direction must be a finite nonzero vector");
  v_ /= norm;
}

const CMatrix& SpinOps::component(int i) const {
  switch (i) {
    case 0: return sx;
    case 1: return sy;
    case 2: return sz;
    default: throw std::out_of_range("spin component index must be 0, 1 or 2");
  }
}

SpinOps spin_operators(const SimConfig& cfg) {
  cfg.validate();
  const int d = cfg.dim();
  const double j = cfg.spin();
  SpinOps ops;
  ops.sx = CMatrix::Zero(d, d);
  ops.sy = CMatrix::Zero(d, d);
  ops.sz = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) ops.sz(k, k) = k - j;
  // <k+1| S_+ |k> = sqrt((k+1)(N-k))
  for (int k = 0; k + 1 < d; ++k) {
    const double raise = std::sqrt(double(k + 1) * double(cfg.n - k));
    ops.sx(k + 1, k) = 0.5 * raise;
    ops.sx(k, k + 1) = 0.5 * raise;
    ops.sy(k + 1, k) = cplx(0.0, -0.5 * raise);
    ops.sy(k, k + 1) = cplx(0.0, 0.5 * raise);
  }
  return ops;
}

StateVector coherent_state_x(const SimConfig& cfg) {
  cfg.validate();
  StateVector psi(cfg.dim());
  const double n = cfg.n;
  for (int k = 0; k <= cfg.n; ++k) {
    const double log_amp =
        0.5 * (std::lgamma(n + 1) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1)) - 0.5 * n * std::log(2.0);
    psi(k) = std::exp(log_amp);
  }
  return psi / psi.norm();
}

StateVector coherent_state(int n, double theta, double phi) {
  if (n < 1) throw std::invalid_argument("particle count N must be >= 1");
  StateVector psi(n + 1);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double j = 0.5 * n;
  for (int k = 0; k <= n; ++k) {
    // binom(N,k)^{1/2} cos^k(theta/2) sin^{N-k}(theta/2), assembled in logs
    double mag = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
    double amp;
    if ((k > 0 && c == 0.0) || (k < n && s == 0.0)) {
      amp = 0.0;
    } else {
      if (k > 0) mag += k * std::log(std::abs(c));
      if (k < n) mag += (n - k) * std::log(std::abs(s));
      amp = std::exp(mag);
      if (c < 0.0 && (k % 2 == 1)) amp = -amp;
      if (s < 0.0 && ((n - k) % 2 == 1)) amp = -amp;
    }
    psi(k) = amp * std::exp(cplx(0.0, -(k - j) * phi));
  }
  return psi;
}

CMatrix hermitian_exp(const CMatrix& h, cplx factor) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigendecomposition failed");
  const Eigen::VectorXcd phases = (factor * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix rotation(const SpinOps& ops, const Direction& n, double theta) {
  return hermitian_exp(ops.along(n), cplx(0.0, theta));
}

double commutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).norm(); }

ParityOps parity_operators(const SpinOps& ops) {
  const int d = ops.dim();
  const int n = ops.n();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ops.sx);
  if (es.info() != Eigen::Success) throw std::runtime_error("S_x eigendecomposition failed");
  const RVector& eig = es.eigenvalues();  // ascending: index i has eigenvalue i - N/2
  for (int i = 0; i < d; ++i) {
    if (std::abs(eig(i) - (i - 0.5 * n)) > 1e-9)
      throw std::runtime_error("S_x spectrum deviates from {-N/2..N/2}");
    if (i > 0 && eig(i) - eig(i - 1) < 0.5) throw std::runtime_error("degenerate S_x spectrum");
  }
  ParityOps out;
  out.p_plus = CMatrix::Zero(d, d);
  out.p_minus = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    // eigenvalue i - N/2; its distance to the top N/2 is N - i
    const auto col = es.eigenvectors().col(i);
    CMatrix proj = col * col.adjoint();
    if ((n - i) % 2 == 0)
      out.p_plus += proj;
    else
      out.p_minus += proj;
  }
  out.pi_op = out.p_plus - out.p_minus;
  return out;
}

ParityOps parity_operators(const SimConfig& cfg) { return parity_operators(spin_operators(cfg)); }

}  // namespace tact
