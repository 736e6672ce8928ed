#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tact/metrology.hpp"

using namespace tact;

namespace {

StateVector noon(int n) {
  StateVector psi = StateVector::Zero(n + 1);
  psi(0) = psi(n) = 1.0 / std::sqrt(2.0);
  return psi;
}

Eigen::Matrix3d so3(const Direction& n, double theta) {
  return Eigen::AngleAxisd(theta, n.vec()).toRotationMatrix();
}

}  // namespace

TEST_CASE("coherent and NOON states") {
  for (int n : {1, 10, 50}) {
    const SimConfig cfg{n, 1.0};
    const SpinOps ops = spin_operators(cfg);
    const CovarianceMatrix g = covariance_pure(coherent_state_x(cfg), ops);
    CHECK((g - Eigen::Vector3d(0.0, n / 4.0, n / 4.0).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-10);
    const QfiResult r = qfi(coherent_state_x(cfg), ops);
    CHECK(r.f_q == doctest::Approx(n));
    CHECK(std::abs(r.n_opt.x()) < 1e-10);
    CHECK(qfi(noon(n), ops).f_q == doctest::Approx(double(n) * n));
    CHECK(4.0 * spin_variance(noon(n), ops, Direction::z_axis()) == doctest::Approx(double(n) * n));
    // rotated copies stay at N
    const StateVector tilted = coherent_state(n, 0.7, -1.9);
    CHECK(qfi(tilted, ops).f_q == doctest::Approx(n));
  }
}

TEST_CASE("mixed-state QFI") {
  const SimConfig cfg{12, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const int d = cfg.dim();
  const DensityMatrix mixed(CMatrix::Identity(d, d) / double(d));
  CHECK(covariance_mixed(mixed, ops).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(qfi(mixed, ops).f_q == doctest::Approx(0.0));

  const StateVector psi = propagate(build_tact(cfg, ops), coherent_state_x(cfg), 0.21);
  const DensityMatrix pure = DensityMatrix::pure(psi);
  CHECK((covariance_mixed(pure, ops) - covariance_pure(psi, ops)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(qfi(pure, ops).f_q == doctest::Approx(qfi(psi, ops).f_q).epsilon(1e-10));

  // QFI never exceeds the plain variance bound on mixed states
  const StateVector other = propagate(build_noisy(cfg, ops, {0.0, 0.4, 0.0}), coherent_state_x(cfg), 0.3);
  const std::vector<StateVector> pair{psi, other};
  const DensityMatrix rho = assemble_density(pair);
  const double fq = qfi(rho, ops).f_q;
  CHECK(fq >= 0.0);
  CHECK(fq <= 4.0 * covariance_moments(rho, ops).selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff() + 1e-10);
}

TEST_CASE("convexity over random coherent-state ensembles") {
  const SimConfig cfg{16, 1.0};
  const SpinOps ops = spin_operators(cfg);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<StateVector> states;
    double mean_pure = 0.0;
    const int m = 3 + trial % 5;
    for (int i = 0; i < m; ++i) {
      StateVector s = coherent_state(cfg.n, std::acos(2 * u(rng) - 1), 2 * kPi * u(rng));
      s = propagate(build_tact(cfg, ops), s, 0.05 * u(rng));
      mean_pure += qfi(s, ops).f_q / m;
      states.push_back(s);
    }
    CHECK(qfi(assemble_density(states), ops).f_q < mean_pure);
  }
}

TEST_CASE("rotation covariance of the covariance matrix") {
  const SimConfig cfg{10, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const StateVector psi = propagate(build_noisy(cfg, ops, {0.2, 0.1, -0.3}), coherent_state_x(cfg), 0.4);
  const StateVector alt = propagate(build_tact(cfg, ops), coherent_state(cfg.n, 1.0, 2.0), 0.3);
  const std::vector<StateVector> both{psi, alt};
  const DensityMatrix rho = assemble_density(both);
  const Direction axis(0.4, -0.2, 0.9);
  const double theta = 1.1;
  const CMatrix u = rotation(ops, axis, theta);
  const DensityMatrix rotated(u * rho.matrix() * u.adjoint());
  const CovarianceMatrix g0 = covariance_mixed(rho, ops);
  const CovarianceMatrix g1 = covariance_mixed(rotated, ops);
  // exp(i theta S_n) turns <S> by -theta about n
  const Eigen::Matrix3d o = so3(axis, -theta);
  CHECK((g1 - o * g0 * o.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(qfi(rotated, ops).f_q == doctest::Approx(qfi(rho, ops).f_q).epsilon(1e-8));
}

TEST_CASE("classical Fisher information") {
  const SimConfig cfg{8, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const ParityOps par = parity_operators(ops);
  const int d = cfg.dim();
  const double tau = optimal_pulse_time(cfg);
  const StorageTrajectory tr = run_storage_scheme(cfg, {0, 0, 0}, Schedule::uniform(5 * tau, 6, tau, true));
  const DensityMatrix rho = DensityMatrix::pure(tr.states[3]);
  const QfiResult q = qfi(rho, ops);

  CHECK(classical_fisher(rho, CMatrix::Identity(d, d), Direction::y_axis(), ops) == doctest::Approx(0.0));
  const Direction best = best_transverse_direction(rho, ops);
  const double fp = classical_fisher(rho, par.pi_op, best, ops);
  CHECK(fp == doctest::Approx(q.f_q).epsilon(1e-3));
  CHECK(parity_fisher_bound(rho, par, best, ops) == doctest::Approx(q.f_q).epsilon(1e-9));
  for (const Direction& n : {Direction(0.0, 1.0, 0.3), Direction(0.0, -0.2, 1.0), Direction(0.3, 0.4, 0.5)}) {
    CHECK(classical_fisher(rho, ops.sz, n, ops) <= q.f_q * (1 + 1e-6));
    CHECK(classical_fisher(rho, par.pi_op, n, ops) <= q.f_q * (1 + 1e-6));
  }
}

TEST_CASE("parity bound preconditions") {
  const SimConfig cfg{10, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const ParityOps par = parity_operators(ops);
  const StateVector psi = propagate(build_noisy(cfg, ops, {0.0, 0.5, 0.0}), coherent_state_x(cfg), 0.5);
  CHECK_THROWS_AS(parity_fisher_bound(DensityMatrix::pure(psi), par, Direction::z_axis(), ops), std::domain_error);
  const DensityMatrix good = DensityMatrix::pure(coherent_state_x(cfg));
  CHECK_THROWS_AS(parity_fisher_bound(good, par, Direction::x_axis(), ops), std::domain_error);
  CHECK(parity_fisher_bound(good, par, Direction::z_axis(), ops) == doctest::Approx(cfg.n));
}

TEST_CASE("fidelity") {
  const SimConfig cfg{6, 1.0};
  const StateVector psi = coherent_state_x(cfg);
  CHECK(fidelity(DensityMatrix::pure(psi), psi) == doctest::Approx(1.0));
  const StateVector flipped = coherent_state(6, kPi / 2, kPi);
  CHECK(fidelity(DensityMatrix::pure(flipped), psi) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fidelity sum for Z noise") {
  const SimConfig cfg{30, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const StateVector psi = apply_pulse(ops, propagate(build_tact(cfg, ops), coherent_state_x(cfg), optimal_pulse_time(cfg)));
  const AmplitudeSet c = AmplitudeSet::fock(psi);
  CHECK(c.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_sum_z(c, 0.3, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  double p4 = 0.0;
  for (const cplx& v : c.c) p4 += std::norm(v) * std::norm(v);
  CHECK(fidelity_sum_z(c, 0.3, 1e4) == doctest::Approx(p4).epsilon(1e-12));
  double last = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double f = fidelity_sum_z(c, 0.3, 0.05 * i);
    CHECK(f <= last + 1e-15);
    last = f;
  }
  CHECK(AmplitudeSet::sy_basis(psi, ops).total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  AmplitudeSet bad = c;
  bad.c[0] += 0.1;
  CHECK_THROWS(fidelity_sum_z(bad, 0.3, 1.0));
}

TEST_CASE("erf fidelity law") {
  CHECK(fidelity_erf(0.0) == 1.0);
  CHECK(fidelity_erf(1e-4) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fidelity_erf(0.049) == doctest::Approx(fidelity_erf(0.051)).epsilon(1e-3));
  CHECK(fidelity_erf(1.0) == doctest::Approx(0.861527706796).epsilon(1e-10));
  double last = 1.0;
  for (double l = 0.1; l < 50; l *= 1.3) {
    CHECK(fidelity_erf(l) < last);
    last = fidelity_erf(l);
  }
  CHECK(fidelity_erf(1e4) < 1e-3);
  const AmplitudeSet flat = AmplitudeSet::equal_weights(100);
  for (double lambda = 0.25; lambda <= 3.0; lambda += 0.25) {
    const double t = lambda * std::sqrt(2.0) / (100 * 0.1);
    CHECK(fidelity_sum_z(flat, 0.1, t) == doctest::Approx(fidelity_erf(lambda)).epsilon(0.01));
  }
}

TEST_CASE("T star") {
  CHECK(t_star({50, 1.0}, 1.0) == doctest::Approx(0.237126220299).epsilon(1e-10));
  CHECK(t_star({50, 1.0}, 0.5) / t_star({50, 1.0}, 1.0) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)));
  CHECK(t_star({100, 1.0}, 1.0) / t_star({50, 1.0}, 1.0) == doctest::Approx(std::pow(2.0, -1.0 / 3.0)));
  CHECK(std::isinf(t_star({50, 1.0}, 0.0)));
}

TEST_CASE("weak-noise validator") {
  const SimConfig cfg{50, 1.0};
  NoiseSpec ok;
  ok.sigma = {0.3, 0.3, 0.3};
  const WeakNoiseVerdict v = validate_weak_noise(ok, cfg);
  CHECK(v.pass());
  bool found = false;
  for (const auto& c : v.checks)
    if (c.bound > 3.4 && c.bound < 3.6) found = true;
  CHECK(found);

  const WeakNoiseVerdict zero = validate_weak_noise(NoiseSpec{}, cfg);
  CHECK(zero.pass());
  for (const auto& c : zero.checks) CHECK(std::isinf(c.margin));

  NoiseSpec big;
  big.sigma = {50.0, 0.0, 0.0};
  const WeakNoiseVerdict b = validate_weak_noise(big, cfg);
  CHECK_FALSE(b.pass());
  NoiseSpec loud;
  loud.sigma = {0.0, 0.0, 0.5};
  CHECK_FALSE(validate_weak_noise(loud, cfg).pass());
}

TEST_CASE("half-decay measurement and fit") {
  std::vector<DecayPoint> exact;
  for (int n : {10, 20, 40})
    for (double s : {0.1, 0.3}) exact.push_back({n, s, 1.0 / (n * s)});
  const DecayModel m = half_decay_fit(exact);
  CHECK(m.exponent == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(m.amplitude == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS(half_decay_fit({exact.begin(), exact.begin() + 3}));
  std::vector<DecayPoint> same(5, DecayPoint{10, 0.1, 1.0});
  CHECK_THROWS(half_decay_fit(same));

  const std::vector<double> t{1.0, 1.5, 2.0, 2.5};
  const std::vector<double> f{10.0, 8.0, 4.0, 3.0};
  REQUIRE(half_decay_time(t, f).has_value());
  CHECK(*half_decay_time(t, f) == doctest::Approx(0.875));
  CHECK_FALSE(half_decay_time(t, std::vector<double>{10.0, 9.0, 8.0, 7.0}).has_value());
}
