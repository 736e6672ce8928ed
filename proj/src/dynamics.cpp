#include "tact/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tact {

Hamiltonian::Hamiltonian(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("Hamiltonian must be square");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hamiltonian diagonalization failed");
  energies_ = es.eigenvalues();
  modes_ = es.eigenvectors();
}

StateVector Hamiltonian::evolve_modal(const StateVector& modal, double dt) const {
  StateVector out(modal.size());
  for (Eigen::Index m = 0; m < modal.size(); ++m) out(m) = modal(m) * std::polar(1.0, -energies_(m) * dt);
  return out;
}

StateVector Hamiltonian::propagate(const StateVector& psi, double dt) const {
  if (!std::isfinite(dt)) throw std::invalid_argument("propagation time must be finite");
  if (psi.size() != matrix_.rows()) throw std::invalid_argument("state dimension mismatch");
  return modes_ * evolve_modal(modes_.adjoint() * psi, dt);
}

Hamiltonian build_tact(const SimConfig& cfg, const SpinOps& ops) {
  CMatrix h = -cfg.chi * (ops.sy * ops.sz + ops.sz * ops.sy);
  return Hamiltonian(std::move(h));
}

Hamiltonian build_tact(const SimConfig& cfg) { return build_tact(cfg, spin_operators(cfg)); }

Hamiltonian build_noisy(const SimConfig& cfg, const SpinOps& ops, const GammaVector& g) {
  CMatrix h = -cfg.chi * (ops.sy * ops.sz + ops.sz * ops.sy);
  if (g.x != 0.0) h += g.x * ops.sx;
  if (g.y != 0.0) h += g.y * ops.sy;
  if (g.z != 0.0) h += g.z * ops.sz;
  return Hamiltonian(std::move(h));
}

Hamiltonian build_noisy(const SimConfig& cfg, const GammaVector& g) {
  return build_noisy(cfg, spin_operators(cfg), g);
}

StateVector propagate(const Hamiltonian& h, const StateVector& psi, double dt) { return h.propagate(psi, dt); }

CMatrix pulse_operator(const SpinOps& ops, double angle) { return rotation(ops, Direction::x_axis(), angle); }

StateVector apply_pulse(const SpinOps& ops, const StateVector& psi, double angle) {
  return pulse_operator(ops, angle) * psi;
}

double optimal_pulse_time(const SimConfig& cfg) {
  cfg.validate();
  return std::log(2.0 * kPi * cfg.n) / (2.0 * cfg.n * cfg.chi);
}

Schedule Schedule::uniform(double t_max, int points, double pulse_time, bool pulse) {
  if (points < 2) throw std::invalid_argument("time grid needs at least two points");
  if (!(t_max > 0.0)) throw std::invalid_argument("time span must be positive");
  Schedule s;
  s.times.resize(points);
  for (int i = 0; i < points; ++i) s.times[i] = t_max * i / (points - 1);
  s.pulse_time = pulse_time;
  s.pulse = pulse;
  return s;
}

Schedule Schedule::storage(const SimConfig& cfg, int points, double span_factor, double time_offset,
                           double angle_offset) {
  const double tau = optimal_pulse_time(cfg);
  Schedule s = uniform(span_factor * tau, points, tau * (1.0 + time_offset), true);
  s.pulse_angle = kPi / 4.0 * (1.0 + angle_offset);
  s.validate();
  return s;
}

Schedule Schedule::free_evolution(const SimConfig& cfg, int points, double span_factor) {
  const double tau = optimal_pulse_time(cfg);
  Schedule s = uniform(span_factor * tau, points, tau, false);
  s.validate();
  return s;
}

Schedule Schedule::with_pulse_point() const {
  Schedule s = *this;
  if (!pulse) return s;
  auto it = std::lower_bound(s.times.begin(), s.times.end(), pulse_time);
  if (it == s.times.end() || *it != pulse_time) s.times.insert(it, pulse_time);
  return s;
}

void Schedule::validate() const {
  if (times.empty()) throw std::invalid_argument("schedule has no time points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw std::invalid_argument("schedule contains a non-finite time");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("schedule grid must be strictly increasing");
  }
  if (pulse) {
    if (!std::isfinite(pulse_time) || !std::isfinite(pulse_angle))
      throw std::invalid_argument("pulse time and angle must be finite");
    if (pulse_time < times.front() || pulse_time > times.back())
      throw std::out_of_range("pulse time lies outside the schedule grid");
  }
}

StorageTrajectory run_storage_scheme(const SimConfig& cfg, const GammaVector& g, const Schedule& sched) {
  sched.validate();
  const SpinOps ops = spin_operators(cfg);
  const Hamiltonian h = build_noisy(cfg, ops, g);
  const StateVector modal0 = h.modes().adjoint() * coherent_state_x(cfg);

  StorageTrajectory out;
  out.times = sched.times;
  out.states.reserve(sched.times.size());
  StateVector modal_after;
  if (sched.pulse) {
    out.pre_pulse = h.modes() * h.evolve_modal(modal0, sched.pulse_time);
    out.post_pulse = apply_pulse(ops, out.pre_pulse, sched.pulse_angle);
    modal_after = h.modes().adjoint() * out.post_pulse;
  }
  for (double t : sched.times) {
    if (sched.after_pulse(t))
      out.states.push_back(h.modes() * h.evolve_modal(modal_after, t - sched.pulse_time));
    else
      out.states.push_back(h.modes() * h.evolve_modal(modal0, t));
  }
  return out;
}

}  // namespace tact
