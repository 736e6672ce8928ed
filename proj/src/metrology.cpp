#include "tact/metrology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tact {

namespace {

constexpr double kPairCutoff = 1e-12;

double expectation(const CMatrix& rho, const CMatrix& op) { return (rho * op).trace().real(); }

}  // namespace

CovarianceMatrix covariance_pure(const StateVector& psi, const SpinOps& ops) {
  if (psi.size() != ops.dim()) throw std::invalid_argument("state dimension does not match spin operators");
  std::array<StateVector, 3> applied;
  Eigen::Vector3d mean;
  for (int i = 0; i < 3; ++i) {
    applied[i] = ops.component(i) * psi;
    mean(i) = psi.dot(applied[i]).real();
  }
  CovarianceMatrix g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      // <S_i S_j> = (S_i psi)^dagger (S_j psi); symmetrization keeps the real part
      g(i, j) = applied[i].dot(applied[j]).real() - mean(i) * mean(j);
      g(j, i) = g(i, j);
    }
  return g;
}

CovarianceMatrix covariance_mixed(const DensityMatrix& rho, const SpinOps& ops) {
  if (rho.dim() != ops.dim()) throw std::invalid_argument("density matrix dimension does not match spin operators");
  const RVector& p = rho.probabilities();
  const CMatrix& v = rho.eigenvectors();
  const Eigen::Index d = p.size();
  RMatrix weight = RMatrix::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l)
    for (Eigen::Index m = 0; m < d; ++m) {
      const double s = p(l) + p(m);
      if (s > kPairCutoff) weight(l, m) = (p(l) - p(m)) * (p(l) - p(m)) / s;
    }
  std::array<CMatrix, 3> a;
  for (int i = 0; i < 3; ++i) a[i] = v.adjoint() * ops.component(i) * v;
  CovarianceMatrix g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      // <m|S_j|l> = conj(<l|S_j|m>)
      const RMatrix re = (a[i].array() * a[j].conjugate().array()).real();
      g(i, j) = 0.5 * (weight.array() * re.array()).sum();
      g(j, i) = g(i, j);
    }
  return g;
}

CovarianceMatrix covariance_moments(const DensityMatrix& rho, const SpinOps& ops) {
  const CMatrix& r = rho.matrix();
  Eigen::Vector3d mean;
  for (int i = 0; i < 3; ++i) mean(i) = expectation(r, ops.component(i));
  CovarianceMatrix g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const CMatrix sym = ops.component(i) * ops.component(j) + ops.component(j) * ops.component(i);
      g(i, j) = 0.5 * expectation(r, sym) - mean(i) * mean(j);
      g(j, i) = g(i, j);
    }
  return g;
}

QfiResult qfi_from_covariance(const CovarianceMatrix& gamma) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (gamma + gamma.transpose()));
  QfiResult out;
  out.f_q = std::max(4.0 * es.eigenvalues()(2), 0.0);
  Eigen::Vector3d n = es.eigenvectors().col(2).normalized();
  Eigen::Index big = 0;
  n.cwiseAbs().maxCoeff(&big);
  if (n(big) < 0.0) n = -n;
  out.n_opt = n;
  return out;
}

QfiResult qfi(const StateVector& psi, const SpinOps& ops) { return qfi_from_covariance(covariance_pure(psi, ops)); }

QfiResult qfi(const DensityMatrix& rho, const SpinOps& ops) { return qfi_from_covariance(covariance_mixed(rho, ops)); }

double spin_variance(const DensityMatrix& rho, const SpinOps& ops, const Direction& n) {
  const CMatrix sn = ops.along(n);
  const double mean = expectation(rho.matrix(), sn);
  return expectation(rho.matrix(), sn * sn) - mean * mean;
}

double spin_variance(const StateVector& psi, const SpinOps& ops, const Direction& n) {
  const StateVector applied = ops.along(n) * psi;
  const double mean = psi.dot(applied).real();
  return applied.squaredNorm() - mean * mean;
}

double classical_fisher(const DensityMatrix& rho, const CMatrix& observable, const Direction& n, const SpinOps& ops) {
  if ((observable - observable.adjoint()).norm() > 1e-10) throw std::invalid_argument("observable must be Hermitian");
  if (observable.rows() != rho.dim()) throw std::invalid_argument("observable dimension mismatch");

  // outcome projectors from the distinct eigenvalues of the observable
  Eigen::SelfAdjointEigenSolver<CMatrix> obs(observable);
  std::vector<CMatrix> projectors;
  {
    const RVector& ev = obs.eigenvalues();
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= ev.size(); ++i) {
      if (i == ev.size() || ev(i) - ev(start) > 1e-8) {
        const auto cols = obs.eigenvectors().middleCols(start, i - start);
        projectors.push_back(cols * cols.adjoint());
        start = i;
      }
    }
  }

  // everything in the eigenbasis of S_n, where the rotation is diagonal
  Eigen::SelfAdjointEigenSolver<CMatrix> gen(ops.along(n));
  const CMatrix& w = gen.eigenvectors();
  const RVector& lam = gen.eigenvalues();
  const CMatrix rho_w = w.adjoint() * rho.matrix() * w;
  std::vector<CMatrix> proj_w;
  for (const CMatrix& p : projectors) proj_w.push_back(w.adjoint() * p * w);

  const Eigen::Index d = lam.size();
  auto probability = [&](const CMatrix& pw, double theta) {
    // Tr{ D rho D^dagger P }, D = diag(exp(-i theta lambda))
    Eigen::VectorXcd phase(d);
    for (Eigen::Index a = 0; a < d; ++a) phase(a) = std::polar(1.0, -theta * lam(a));
    cplx acc = 0.0;
    for (Eigen::Index b = 0; b < d; ++b) {
      cplx col = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) col += phase(a) * rho_w(a, b) * pw(b, a);
      acc += col * std::conj(phase(b));
    }
    return acc.real();
  };

  constexpr double kSteps[3] = {1e-3, 5e-4, 2.5e-4};
  constexpr double kTolerance = 1e-4;
  auto richardson = [&](auto&& estimate, double scale) {
    double d0 = estimate(kSteps[0]);
    double d1 = estimate(kSteps[1]);
    double d2 = estimate(kSteps[2]);
    const double r01 = (4.0 * d1 - d0) / 3.0;
    const double r12 = (4.0 * d2 - d1) / 3.0;
    const double best = (16.0 * r12 - r01) / 15.0;
    const double change = std::abs(r12 - r01);
    if (change > kTolerance * std::abs(best) && change > 1e-9 * (1.0 + scale))
      throw std::runtime_error("finite-difference Fisher information did not converge");
    return best;
  };

  const double scale = lam.cwiseAbs().maxCoeff() * lam.cwiseAbs().maxCoeff();
  constexpr double kZeroProbability = 1e-10;
  double fisher = 0.0;
  for (const CMatrix& pw : proj_w) {
    const double p0 = probability(pw, 0.0);
    if (p0 > kZeroProbability) {
      const double slope = richardson(
          [&](double h) { return (probability(pw, h) - probability(pw, -h)) / (2.0 * h); }, scale);
      fisher += slope * slope / p0;
    } else {
      // p ~ p''(0) theta^2 / 2, so p'^2 / p -> 2 p''(0)
      const double curvature = richardson(
          [&](double h) { return (probability(pw, h) - 2.0 * p0 + probability(pw, -h)) / (h * h); }, scale);
      fisher += 2.0 * std::max(curvature, 0.0);
    }
  }
  return fisher;
}

double parity_fisher_bound(const DensityMatrix& rho, const ParityOps& parity, const Direction& n, const SpinOps& ops) {
  constexpr double kTol = 1e-8;
  const CMatrix& r = rho.matrix();
  const double leakage = (r - parity.p_plus * r * parity.p_plus).norm();
  if (leakage > kTol)
    throw std::domain_error("density matrix leaks out of the + parity sector (" + std::to_string(leakage) + ")");
  const CMatrix sn = ops.along(n);
  const double diag = std::max((parity.p_plus * sn * parity.p_plus).norm(), (parity.p_minus * sn * parity.p_minus).norm());
  if (diag > kTol) throw std::domain_error("S_n has a component inside a parity sector");
  return 4.0 * spin_variance(rho, ops, n);
}

Direction best_transverse_direction(const DensityMatrix& rho, const SpinOps& ops) {
  const CovarianceMatrix g = covariance_moments(rho, ops);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g.block<2, 2>(1, 1));
  Eigen::Vector2d v = es.eigenvectors().col(1);
  if (std::abs(v(1)) >= std::abs(v(0)) ? v(1) < 0.0 : v(0) < 0.0) v = -v;
  return {0.0, v(0), v(1)};
}

double fidelity(const DensityMatrix& rho, const StateVector& psi0) {
  if (psi0.size() != rho.dim()) throw std::invalid_argument("state dimension mismatch");
  const StateVector u = psi0 / psi0.norm();
  return std::clamp(u.dot(rho.matrix() * u).real(), 0.0, 1.0);
}

AmplitudeSet AmplitudeSet::fock(const StateVector& psi) {
  AmplitudeSet out;
  out.c.assign(psi.data(), psi.data() + psi.size());
  return out;
}

AmplitudeSet AmplitudeSet::sy_basis(const StateVector& psi, const SpinOps& ops) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ops.sy);
  const StateVector c = es.eigenvectors().adjoint() * psi;
  return fock(c);
}

AmplitudeSet AmplitudeSet::equal_weights(int n) {
  AmplitudeSet out;
  out.c.assign(static_cast<std::size_t>(n + 1), cplx(1.0 / std::sqrt(n + 1.0), 0.0));
  return out;
}

double AmplitudeSet::total_weight() const {
  double s = 0.0;
  for (const cplx& v : c) s += std::norm(v);
  return s;
}

double fidelity_sum_z(const AmplitudeSet& c, double sigma, double t) {
  if (std::abs(c.total_weight() - 1.0) > 1e-10) throw std::invalid_argument("amplitudes must be normalized");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be non-negative");
  const std::size_t d = c.c.size();
  std::vector<double> p(d);
  for (std::size_t k = 0; k < d; ++k) p[k] = std::norm(c.c[k]);
  double total = 0.0;
  for (std::size_t k = 0; k < d; ++k) total += p[k] * p[k];
  const double rate = 0.5 * t * t * sigma * sigma;
  for (std::size_t shift = 1; shift < d; ++shift) {
    const double damping = std::exp(-rate * double(shift) * double(shift));
    if (damping == 0.0) break;
    double acf = 0.0;
    for (std::size_t k = shift; k < d; ++k) acf += p[k] * p[k - shift];
    total += 2.0 * damping * acf;
  }
  return total;
}

double fidelity_erf(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (lambda < 0.05) {
    // sum_n (-1)^n lambda^{2n} [2 / (n! (2n+1)) - 1 / (n+1)!]
    double sum = 0.0, power = 1.0, fact = 1.0;
    for (int n = 0; n < 8; ++n) {
      if (n > 0) fact *= n;
      const double term = 2.0 / (fact * (2 * n + 1)) - 1.0 / (fact * (n + 1));
      sum += ((n % 2) ? -1.0 : 1.0) * power * term;
      power *= lambda * lambda;
    }
    return sum;
  }
  return (std::sqrt(kPi) * std::erf(lambda) - (1.0 - std::exp(-lambda * lambda)) / lambda) / lambda;
}

double t_star(const SimConfig& cfg, double sigma_z) {
  cfg.validate();
  if (sigma_z < 0.0) throw std::invalid_argument("sigma_z must be non-negative");
  if (sigma_z == 0.0) return std::numeric_limits<double>::infinity();
  return std::cbrt(2.0 / 3.0) / std::cbrt(cfg.chi * sigma_z * sigma_z * cfg.n);
}

bool WeakNoiseVerdict::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const WeakNoiseCheck& c) { return c.pass; });
}

WeakNoiseVerdict validate_weak_noise(const NoiseSpec& spec, const SimConfig& cfg) {
  spec.validate();
  cfg.validate();
  constexpr double kMuchLess = 0.1;
  constexpr const char* kAxis[3] = {"x", "y", "z"};
  const double n = cfg.n;
  WeakNoiseVerdict out;
  auto add = [&](std::string name, double value, double bound, double limit, bool strict) {
    WeakNoiseCheck c{std::move(name), value, bound, limit, 0.0, true};
    c.margin = value == 0.0 ? std::numeric_limits<double>::infinity() : limit / value;
    c.pass = strict ? value < limit : value <= limit;
    out.checks.push_back(std::move(c));
  };
  const double bound_i = std::sqrt(n) / 2.0;
  add("(i) sigma_y/chi << sqrt(N)/2", spec.sigma[1] / cfg.chi, bound_i, kMuchLess * bound_i, false);
  add("(i) sigma_z/chi << sqrt(N)/2", spec.sigma[2] / cfg.chi, bound_i, kMuchLess * bound_i, false);
  add("(i) sigma_x/chi < N", spec.sigma[0] / cfg.chi, n, n, true);
  const double bound_ii = 2.0 * std::sqrt(2.0 * n) / std::log(2.0 * kPi * n);
  for (int j = 0; j < 3; ++j)
    add(std::string("(ii) sigma_") + kAxis[j] + "/chi << 2 sqrt(2N)/ln(2 pi N)", spec.sigma[j] / cfg.chi, bound_ii,
        kMuchLess * bound_ii, false);
  return out;
}

DecayModel half_decay_fit(const std::vector<DecayPoint>& points) {
  if (points.size() < 4) throw std::invalid_argument("half-decay fit needs at least four points");
  const std::size_t n = points.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = points[i];
    if (!(p.tau_half > 0.0) || !(p.sigma > 0.0) || p.n < 1)
      throw std::invalid_argument("half-decay points need positive N, sigma and tau_half");
    x[i] = std::log(p.n * p.sigma);
    y[i] = std::log(p.tau_half);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx < 1e-12) throw std::invalid_argument("half-decay points are degenerate in N*sigma");
  DecayModel model;
  model.exponent = sxy / sxx;
  const double intercept = my - model.exponent * mx;
  model.amplitude = std::exp(intercept);
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + model.exponent * x[i]);
    model.residuals.push_back(r);
    ssr += r * r;
  }
  model.exponent_stderr = std::sqrt(ssr / double(n - 2) / sxx);
  return model;
}

std::optional<double> half_decay_time(const std::vector<double>& times, const std::vector<double>& series) {
  if (times.size() != series.size() || times.size() < 2) throw std::invalid_argument("series and times must match");
  const double half = 0.5 * series.front();
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] <= half) {
      const double frac = (series[i - 1] - half) / (series[i - 1] - series[i]);
      return times[i - 1] + frac * (times[i] - times[i - 1]) - times.front();
    }
  }
  return std::nullopt;
}

}  // namespace tact
