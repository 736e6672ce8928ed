#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tact/dynamics.hpp"

namespace tact {

/// Shot-to-shot Gaussian detuning statistics.
struct NoiseSpec {
  std::array<double, 3> sigma{0.0, 0.0, 0.0};  // (sigma_x, sigma_y, sigma_z)
  std::size_t m = 2000;
  std::uint64_t seed = 20160101;

  bool noiseless() const { return sigma[0] == 0.0 && sigma[1] == 0.0 && sigma[2] == 0.0; }
  void validate() const;
};

/// Detunings of realization `index`. Each realization draws from its own
/// substream keyed by (seed, index), so the value does not depend on M or on
/// the order in which realizations are generated.
GammaVector sample_gamma(const NoiseSpec& spec, std::size_t index);
std::vector<GammaVector> sample_gammas(const NoiseSpec& spec);

/// Hermitian, PSD, unit-trace matrix with its eigendecomposition.
/// Eigenvalues are sorted descending; negative round-off is clipped to zero
/// and the spectrum renormalized.
class DensityMatrix {
 public:
  explicit DensityMatrix(const CMatrix& matrix);
  static DensityMatrix pure(const StateVector& psi);

  const CMatrix& matrix() const { return matrix_; }
  const RVector& probabilities() const { return probabilities_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  double trace() const { return matrix_.trace().real(); }

 private:
  CMatrix matrix_;
  RVector probabilities_;
  CMatrix eigenvectors_;
};

/// (1/M) sum_i |psi_i><psi_i|.
DensityMatrix assemble_density(std::span<const StateVector> states);

/// -sum p ln p with 0 ln 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);

/// Spectral data for every noise realization of one storage-scheme run.
/// States, density matrices and overlaps are reconstructed exactly at any
/// grid time from the per-realization eigendecomposition of H_gamma.
class EnsembleEvolution {
 public:
  EnsembleEvolution(const SimConfig& cfg, const NoiseSpec& noise, const Schedule& sched);

  const SimConfig& config() const { return cfg_; }
  const Schedule& schedule() const { return sched_; }
  const SpinOps& ops() const { return ops_; }
  std::size_t time_count() const { return sched_.times.size(); }
  std::size_t realizations() const { return members_.size(); }
  const GammaVector& gamma(std::size_t realization) const { return members_[realization].gamma; }

  StateVector state(std::size_t realization, std::size_t time_index) const;
  /// Noiseless trajectory under the same schedule.
  StateVector reference(std::size_t time_index) const;
  DensityMatrix density(std::size_t time_index) const;
  /// <psi_ref| rho |psi_ref> from the overlaps, without assembling rho.
  double mean_fidelity(std::size_t time_index) const;

 private:
  struct Member {
    GammaVector gamma;
    RVector energies;
    CMatrix modes;
    StateVector before;  // eigenbasis coefficients of the initial state
    StateVector after;   // eigenbasis coefficients right after the pulse
  };
  Member make_member(const GammaVector& g) const;
  StateVector member_state(const Member& m, double t) const;

  SimConfig cfg_;
  Schedule sched_;
  SpinOps ops_;
  CMatrix pulse_;
  std::vector<Member> members_;
  Member reference_;
};

struct ConvergenceReport {
  std::size_t m = 0;
  bool converged = false;
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> entropy;  // entropy[size][probe]
};

/// Doubles M from 1 until the von Neumann entropy at every probe time changes
/// by less than `tolerance` (relative) between successive sizes. Returns the
/// smaller of the first stable pair. Throws if M would exceed m_max.
ConvergenceReport converged_m(const NoiseSpec& spec, const SimConfig& cfg, const Schedule& sched,
                              std::span<const double> probe_times, double tolerance = 0.01,
                              std::size_t m_max = 16384);

}  // namespace tact
