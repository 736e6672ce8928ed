#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tact/io.hpp"
#include "tact/meanfield.hpp"
#include "tact/metrology.hpp"

namespace tact::io {

/// Everything a command needs. Times (t_max, snapshots) are given in chi t.
struct ExperimentConfig {
  SimConfig sim;
  NoiseSpec noise;
  int grid = 400;
  double t_max = 0.0;  // 0 selects 60 tau
  bool pulse = true;
  double pulse_offset_time = 0.0;   // fractional shift of tau
  double pulse_offset_angle = 0.0;  // fractional shift of pi/4
  std::vector<double> snapshots;    // chi t
  int sphere_theta = 181;
  int sphere_phi = 360;
  bool dump_states = false;
  std::string out_dir = "out";
  Format format = Format::csv;

  /// Throws std::invalid_argument on any value a module would reject.
  void validate() const;
  /// Uniform grid plus the pulse; snapshot times are merged into the grid.
  Schedule schedule() const;
  json to_json() const;
};

/// Diagnostics at every grid time of an ensemble run.
std::vector<SeriesRow> qfi_series(const EnsembleEvolution& ens);

struct PlateauStats {
  double mean = 0.0;  // F_Q / N^2 averaged over the window
  double min = 0.0;
  double slope = 0.0;  // of F_Q / N^2 against t / tau
  double slope_stderr = 0.0;
  std::size_t samples = 0;
};

/// Statistics of F_Q/N^2 over grid times in [from, to] (units of 1/chi); the
/// slope is taken against t / tau.
PlateauStats plateau(const std::vector<SeriesRow>& rows, int n, double tau, double from, double to);

/// Grid that starts at the pulse and samples the post-pulse span geometrically
/// between first and last (offsets from tau, units of 1/chi).
Schedule decay_schedule(const SimConfig& cfg, int points, double first, double last);

/// tau_1/2 of one (N, sigma) ensemble with noise on `axis` (1 = y, 2 = z).
std::optional<double> measure_half_decay(int n, double sigma, int axis, std::size_t m, std::uint64_t seed,
                                         int points = 160);

struct ParityRow {
  double t = 0.0;
  double f_q = 0.0;
  double f_parity = 0.0;  // 4 Var(S_n) along the best y-z direction
  double f_classical = -1.0;  // finite-difference F(Pi, n) when requested
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
};

std::vector<ParityRow> parity_comparison(const EnsembleEvolution& ens, bool classical);

struct Snapshot {
  double t = 0.0;
  SphereGrid husimi;
  SphereGrid wigner;
  double negativity = 0.0;
};

Snapshot phase_space_snapshot(const DensityMatrix& rho, int n_theta, int n_phi, const MultipoleBasis& basis);

/// The five mean-field panels (unperturbed, gx = 0.4, gx = 1, gy = 0.4, gz = 0.4).
std::vector<std::pair<std::string, meanfield::Params>> default_portraits();

// Commands. Each validates its inputs before computing, stages its files and
// commits them with a manifest. Progress and warnings go to `log`.
struct PortraitOptions {
  std::optional<meanfield::Params> custom;
  int n_z = 41;
  int n_phi = 81;
};
json cmd_portrait(const ExperimentConfig& cfg, const PortraitOptions& opt, std::ostream& log);
json cmd_evolve(const ExperimentConfig& cfg, std::ostream& log);
json cmd_storage(const ExperimentConfig& cfg, std::ostream& log);

struct DecayOptions {
  std::vector<int> n_values{20, 35, 50, 70};
  std::vector<double> sigmas{0.05, 0.1, 0.2, 0.5};
  std::vector<int> axes{1, 2};
  int points = 160;
};
json cmd_decay_fit(const ExperimentConfig& cfg, const DecayOptions& opt, std::ostream& log);

struct ParityOptions {
  std::vector<double> sigma_x{1.0, 10.0, 15.0};
  bool classical = false;
};
json cmd_parity(const ExperimentConfig& cfg, const ParityOptions& opt, std::ostream& log);
json cmd_phasespace(const ExperimentConfig& cfg, std::ostream& log);
json cmd_validate_noise(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace tact::io
