#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tact/ensemble.hpp"

namespace tact {

/// Symmetric 3x3 matrix over spin components (x, y, z).
using CovarianceMatrix = Eigen::Matrix3d;

struct QfiResult {
  double f_q = 0.0;
  Eigen::Vector3d n_opt = Eigen::Vector3d::UnitX();
};

/// Gamma_ij = (1/2)<S_i S_j + S_j S_i> - <S_i><S_j>.
CovarianceMatrix covariance_pure(const StateVector& psi, const SpinOps& ops);

/// Mixed-state covariance built from the eigenpairs (p_l, |l>) of rho:
/// (1/2) sum_{l,m} (p_l - p_m)^2 / (p_l + p_m) Re[<l|S_i|m><m|S_j|l>],
/// skipping pairs with p_l + p_m below 1e-12.
CovarianceMatrix covariance_mixed(const DensityMatrix& rho, const SpinOps& ops);

/// Plain covariance of a mixed state: symmetrized second moments
/// minus products of means.
CovarianceMatrix covariance_moments(const DensityMatrix& rho, const SpinOps& ops);

/// 4 * lambda_max of the covariance; n_opt is the matching unit eigenvector
/// with its largest-magnitude component made positive.
QfiResult qfi_from_covariance(const CovarianceMatrix& gamma);
QfiResult qfi(const StateVector& psi, const SpinOps& ops);
QfiResult qfi(const DensityMatrix& rho, const SpinOps& ops);

/// Variance of S_n in rho.
double spin_variance(const DensityMatrix& rho, const SpinOps& ops, const Direction& n);
double spin_variance(const StateVector& psi, const SpinOps& ops, const Direction& n);

/// Fisher information of measuring `observable` after a small rotation
/// exp(-i theta S_n), at theta -> 0. Outcomes are the distinct eigenvalues of
/// the observable. Derivatives use Richardson-extrapolated central
/// differences; outcomes with vanishing probability use the 2 p''(0) limit.
/// Throws std::runtime_error if the extrapolation does not settle.
double classical_fisher(const DensityMatrix& rho, const CMatrix& observable, const Direction& n,
                        const SpinOps& ops);

/// 4 Var(S_n), the parity-measurement Fisher information, valid when rho sits
/// in the "+" parity sector and P_mu S_n P_mu = 0. Lower bound on F_Q.
/// Throws std::domain_error when either precondition fails.
double parity_fisher_bound(const DensityMatrix& rho, const ParityOps& parity, const Direction& n,
                           const SpinOps& ops);

/// Direction in the y-z plane maximizing Var(S_n).
Direction best_transverse_direction(const DensityMatrix& rho, const SpinOps& ops);

/// <psi0| rho |psi0>.
double fidelity(const DensityMatrix& rho, const StateVector& psi0);

/// Expansion coefficients of a state in a chosen basis.
struct AmplitudeSet {
  std::vector<cplx> c;

  /// Fock (S_z eigen-) basis, for noise along Z.
  static AmplitudeSet fock(const StateVector& psi);
  /// S_y eigenbasis ordered by eigenvalue, for noise along Y.
  static AmplitudeSet sy_basis(const StateVector& psi, const SpinOps& ops);
  static AmplitudeSet equal_weights(int n);
  double total_weight() const;
};

/// 2 sum_{n>=1} exp(-T^2 sigma^2 n^2 / 2) sum_{k>=n} |c_k|^2 |c_{k-n}|^2 + sum_k |c_k|^4.
double fidelity_sum_z(const AmplitudeSet& c, double sigma, double t);

/// (1/lambda) [sqrt(pi) erf(lambda) - (1 - exp(-lambda^2)) / lambda], equal to 1 at 0.
double fidelity_erf(double lambda);

/// (2/3)^{1/3} (chi sigma^2 N)^{-1/3}; +infinity for sigma = 0.
double t_star(const SimConfig& cfg, double sigma_z);

struct WeakNoiseCheck {
  std::string name;
  double value = 0.0;  // sigma / chi
  double bound = 0.0;  // the bound as written
  double limit = 0.0;  // value must not exceed this
  double margin = 0.0; // limit / value, infinite for zero noise
  bool pass = true;
};

struct WeakNoiseVerdict {
  std::vector<WeakNoiseCheck> checks;
  bool pass() const;
};

/// Weak-noise conditions. "much less than" is enforced as at most a tenth of the bound.
///  (i)  sigma_{y,z}/chi << sqrt(N)/2 and sigma_x/chi < N
///  (ii) sigma_{x,y,z}/chi << 2 sqrt(2N) / ln(2 pi N)
WeakNoiseVerdict validate_weak_noise(const NoiseSpec& spec, const SimConfig& cfg);

struct DecayPoint {
  int n = 0;
  double sigma = 0.0;
  double tau_half = 0.0;
};

/// tau_half = amplitude * (N sigma)^exponent.
struct DecayModel {
  double amplitude = 0.0;
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  std::vector<double> residuals;  // in log tau_half
};

DecayModel half_decay_fit(const std::vector<DecayPoint>& points);

/// Time after the pulse at which `series` first drops to half its value at the
/// pulse, linearly interpolated. `series` must start at the post-pulse sample.
std::optional<double> half_decay_time(const std::vector<double>& times, const std::vector<double>& series);

}  // namespace tact
