#pragma once

#include <vector>

#include "tact/spin.hpp"

namespace tact {

/// Static detunings gamma = (gamma_x, gamma_y, gamma_z), units 1/time.
struct GammaVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }
};

/// Hermitian generator with its cached spectral decomposition.
class Hamiltonian {
 public:
  explicit Hamiltonian(CMatrix matrix);

  const CMatrix& matrix() const { return matrix_; }
  const RVector& energies() const { return energies_; }
  const CMatrix& modes() const { return modes_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  /// exp(-i H dt) psi.
  StateVector propagate(const StateVector& psi, double dt) const;
  /// exp(-i H dt) applied to coefficients already in the eigenbasis.
  StateVector evolve_modal(const StateVector& modal, double dt) const;

 private:
  CMatrix matrix_;
  RVector energies_;
  CMatrix modes_;
};

/// Time grid plus the rotation pulse that realises the storage scheme.
struct Schedule {
  std::vector<double> times;
  double pulse_time = 0.0;
  double pulse_angle = kPi / 4.0;
  bool pulse = true;

  /// Uniform grid of `points` samples on chi t in [0, span_factor * tau],
  /// pulse at tau * (1 + time_offset) with angle (pi/4) * (1 + angle_offset).
  static Schedule storage(const SimConfig& cfg, int points = 400, double span_factor = 60.0,
                          double time_offset = 0.0, double angle_offset = 0.0);
  /// Same grid with the pulse disabled.
  static Schedule free_evolution(const SimConfig& cfg, int points = 400, double span_factor = 60.0);
  static Schedule uniform(double t_max, int points, double pulse_time, bool pulse);

  /// Insert the pulse time into the grid if it is not already present.
  Schedule with_pulse_point() const;
  bool after_pulse(double t) const { return pulse && t >= pulse_time; }
  void validate() const;
};

/// -chi (S_y S_z + S_z S_y).
Hamiltonian build_tact(const SimConfig& cfg);
Hamiltonian build_tact(const SimConfig& cfg, const SpinOps& ops);

/// H_TACT + gamma . S.
Hamiltonian build_noisy(const SimConfig& cfg, const GammaVector& g);
Hamiltonian build_noisy(const SimConfig& cfg, const SpinOps& ops, const GammaVector& g);

StateVector propagate(const Hamiltonian& h, const StateVector& psi, double dt);

/// exp(i angle S_x) psi; angle defaults to the pi/4 storage pulse.
StateVector apply_pulse(const SpinOps& ops, const StateVector& psi, double angle = kPi / 4.0);
CMatrix pulse_operator(const SpinOps& ops, double angle = kPi / 4.0);

/// First QFI maximum of the free TACT evolution: ln(2 pi N) / (2 N chi).
double optimal_pulse_time(const SimConfig& cfg);

struct StorageTrajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  StateVector pre_pulse;   // tau^-
  StateVector post_pulse;  // tau^+
};

/// Evolves the X coherent state under H_gamma, applies the pulse at the
/// scheduled time and records the state at every grid time. Grid times at or
/// after the pulse time carry the post-pulse state.
StorageTrajectory run_storage_scheme(const SimConfig& cfg, const GammaVector& g, const Schedule& sched);

}  // namespace tact
