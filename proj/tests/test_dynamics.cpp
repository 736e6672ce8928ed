#include "doctest.h"

#include <cmath>

#include "tact/dynamics.hpp"
#include "tact/metrology.hpp"

using namespace tact;

TEST_CASE("TACT Hamiltonian basics") {
  const SimConfig cfg{20, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const Hamiltonian h = build_tact(cfg, ops);
  CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  const CMatrix expected = -(ops.sy * ops.sz + ops.sz * ops.sy);
  CHECK((h.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  const StateVector psi = coherent_state_x(cfg);
  CHECK(std::abs(psi.dot(h.matrix() * psi)) < 1e-12);
  CHECK((h.modes() * h.energies().asDiagonal() * h.modes().adjoint() - h.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(commutator_norm(h.matrix(), parity_operators(ops).pi_op) < 1e-10);
}

TEST_CASE("noisy Hamiltonian") {
  const SimConfig cfg{10, 0.7};
  const SpinOps ops = spin_operators(cfg);
  const Hamiltonian h0 = build_tact(cfg, ops);
  CHECK(build_noisy(cfg, ops, {0.0, 0.0, 0.0}).matrix() == h0.matrix());
  const ParityOps par = parity_operators(ops);
  CHECK(commutator_norm(build_noisy(cfg, ops, {2.5, 0.0, 0.0}).matrix(), par.pi_op) < 1e-10);
  const Hamiltonian hz = build_noisy(cfg, ops, {0.0, 0.0, 0.3});
  for (int k = 0; k <= cfg.n; ++k)
    CHECK((hz.matrix()(k, k) - h0.matrix()(k, k)).real() == doctest::Approx(0.3 * (k - 5.0)));
  CHECK(commutator_norm(build_noisy(cfg, ops, {0.0, 0.2, 0.0}).matrix(), par.pi_op) > 1e-3);
}

TEST_CASE("propagation") {
  const SimConfig cfg{16, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const Hamiltonian h = build_noisy(cfg, ops, {0.1, -0.2, 0.05});
  const StateVector psi = coherent_state_x(cfg);
  CHECK((propagate(h, psi, 0.0) - psi).norm() < 1e-14);
  const double e0 = psi.dot(h.matrix() * psi).real();
  StateVector phi = psi;
  for (int i = 0; i < 2000; ++i) phi = propagate(h, phi, 0.013);
  CHECK(phi.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(phi.dot(h.matrix() * phi).real() == doctest::Approx(e0).epsilon(1e-10));
  const StateVector two = propagate(h, propagate(h, psi, 0.31), 0.47);
  CHECK((two - propagate(h, psi, 0.78)).norm() < 1e-10);

  const Hamiltonian t = build_tact(cfg, ops);
  const CMatrix syz = ops.sy * ops.sz + ops.sz * ops.sy;
  const double c0 = psi.dot(syz * psi).real();
  for (double dt : {0.05, 0.3, 1.7}) {
    const StateVector s = propagate(t, psi, dt);
    CHECK(s.dot(syz * s).real() == doctest::Approx(c0).epsilon(1e-10));
  }
}

TEST_CASE("pulse") {
  const SimConfig cfg{14, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const ParityOps par = parity_operators(ops);
  const StateVector psi = propagate(build_tact(cfg, ops), coherent_state_x(cfg), 0.1);
  const StateVector out = apply_pulse(ops, psi);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((par.p_plus * out - out).norm() < 1e-12);
  CHECK(out.dot(ops.sx * out).real() == doctest::Approx(psi.dot(ops.sx * psi).real()));
  CHECK((pulse_operator(ops) - rotation(ops, Direction::x_axis(), kPi / 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("optimal pulse time") {
  CHECK(optimal_pulse_time({50, 1.0}) == doctest::Approx(0.05749900071837492).epsilon(1e-12));
  CHECK(optimal_pulse_time({100, 1.0}) == doctest::Approx(0.03221523626198718).epsilon(1e-12));
  for (int n : {3, 30, 300}) {
    const SimConfig cfg{n, 2.0};
    CHECK(optimal_pulse_time(cfg) * n / std::log(2 * kPi * n) == doctest::Approx(1.0 / (2 * cfg.chi)));
  }
}

TEST_CASE("schedules") {
  const SimConfig cfg{50, 1.0};
  const Schedule s = Schedule::storage(cfg);
  CHECK(s.times.size() == 400);
  CHECK(s.times.back() == doctest::Approx(60 * optimal_pulse_time(cfg)));
  CHECK(s.pulse_time == doctest::Approx(optimal_pulse_time(cfg)));
  const Schedule off = Schedule::storage(cfg, 400, 60.0, 0.2, -0.1);
  CHECK(off.pulse_time == doctest::Approx(1.2 * optimal_pulse_time(cfg)));
  CHECK(off.pulse_angle == doctest::Approx(0.9 * kPi / 4));
  const Schedule with = s.with_pulse_point();
  CHECK(with.times.size() == 401);
  CHECK(with.with_pulse_point().times.size() == 401);
  Schedule bad = s;
  bad.pulse_time = 100.0;
  CHECK_THROWS_AS(bad.validate(), std::out_of_range);
  bad = s;
  std::swap(bad.times[3], bad.times[4]);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("storage scheme against an independent QFI oracle") {
  // oracle values from a dense-matrix expm evaluation, N = 20, chi = 1
  const SimConfig cfg{20, 1.0};
  const double tau = optimal_pulse_time(cfg);
  Schedule sched = Schedule::uniform(11 * tau, 12, tau, true);
  const StorageTrajectory tr = run_storage_scheme(cfg, {0.0, 0.0, 0.0}, sched);
  const SpinOps ops = spin_operators(cfg);

  const QfiResult pre = qfi(tr.pre_pulse, ops);
  CHECK(pre.f_q == doctest::Approx(279.1838386266045).epsilon(1e-9));
  CHECK(std::abs(pre.n_opt.z()) == doctest::Approx(1.0).epsilon(1e-8));

  const QfiResult post = qfi(tr.post_pulse, ops);
  CHECK(post.f_q == doctest::Approx(279.1838386266045).epsilon(1e-9));
  CHECK(std::abs(post.n_opt.y()) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(std::abs(post.n_opt.z()) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(post.n_opt.y() * post.n_opt.z() > 0.0);

  CHECK(qfi(tr.states.back(), ops).f_q == doctest::Approx(307.82653303049614).epsilon(1e-8));
  const double bound = pre.f_q - 4.0 * spin_variance(tr.pre_pulse, ops, Direction::y_axis());
  CHECK(bound == doctest::Approx(276.2378003167008).epsilon(1e-9));
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(tr.states[i].norm() == doctest::Approx(1.0).epsilon(1e-10));
    if (tr.times[i] >= tau) CHECK(qfi(tr.states[i], ops).f_q >= bound - 1e-8);
  }
}

TEST_CASE("storage scheme rejects a pulse beyond the grid") {
  const SimConfig cfg{10, 1.0};
  Schedule s = Schedule::uniform(0.01, 5, 0.5, true);
  CHECK_THROWS_AS(run_storage_scheme(cfg, {0, 0, 0}, s), std::out_of_range);
}
