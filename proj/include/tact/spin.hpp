#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace tact {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
/// Complex amplitudes over the Dicke basis |k, N-k>, k = 0..N.
using StateVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Particle count and nonlinearity (natural units, hbar = 1).
struct SimConfig {
  int n = 50;
  double chi = 1.0;

  int dim() const { return n + 1; }
  double spin() const { return 0.5 * n; }
  void validate() const;
};

/// Real unit vector. The constructor normalizes its input.
class Direction {
 public:
  Direction(double x, double y, double z);
  explicit Direction(const Eigen::Vector3d& v) : Direction(v.x(), v.y(), v.z()) {}

  static Direction x_axis() { return {1.0, 0.0, 0.0}; }
  static Direction y_axis() { return {0.0, 1.0, 0.0}; }
  static Direction z_axis() { return {0.0, 0.0, 1.0}; }

  const Eigen::Vector3d& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

 private:
  Eigen::Vector3d v_;
};

/// Collective spin components. Basis index k labels |k, N-k> and
/// S_z|k> = (k - N/2)|k>.
struct SpinOps {
  CMatrix sx, sy, sz;

  int dim() const { return static_cast<int>(sz.rows()); }
  int n() const { return dim() - 1; }
  CMatrix along(const Direction& n) const { return n.x() * sx + n.y() * sy + n.z() * sz; }
  const CMatrix& component(int i) const;
};

/// Pi = P+ - P-. P+ spans the S_x eigenstates with eigenvalues N/2, N/2 - 2, ...
struct ParityOps {
  CMatrix pi_op, p_plus, p_minus;
};

SpinOps spin_operators(const SimConfig& cfg);

/// Spin coherent state along +X: amplitudes 2^{-N/2} binom(N,k)^{1/2}.
StateVector coherent_state_x(const SimConfig& cfg);

/// Spin coherent state pointing at colatitude theta and longitude phi.
StateVector coherent_state(int n, double theta, double phi);

/// exp(i theta S_n).
CMatrix rotation(const SpinOps& ops, const Direction& n, double theta);

ParityOps parity_operators(const SimConfig& cfg);
ParityOps parity_operators(const SpinOps& ops);

/// exp(factor * h) for Hermitian h, through its eigendecomposition.
CMatrix hermitian_exp(const CMatrix& h, cplx factor);

/// Frobenius norm of the commutator [a, b].
double commutator_norm(const CMatrix& a, const CMatrix& b);

}  // namespace tact
