#pragma once

#include <vector>

#include "tact/ensemble.hpp"

namespace tact {

/// Regular colatitude/longitude grid on the Bloch sphere. theta spans [0, pi]
/// including both poles; phi spans [-pi, pi) with uniform spacing.
struct SphereGrid {
  std::vector<double> theta;
  std::vector<double> phi;
  RMatrix values;  // n_theta x n_phi

  static SphereGrid regular(int n_theta, int n_phi);
  int n_theta() const { return static_cast<int>(theta.size()); }
  int n_phi() const { return static_cast<int>(phi.size()); }
  /// Trapezoid in theta (sin theta weight) times the uniform phi rule.
  double integrate(const RMatrix& f) const;
  double integrate() const { return integrate(values); }
};

/// Q(theta, phi) = <theta, phi| rho |theta, phi>.
SphereGrid husimi(const DensityMatrix& rho, SphereGrid grid);

/// Spherical tensor operators T_Kq, K = 0..N, q = -K..K, for spin N/2.
/// Each T_Kq lives on the q-th diagonal (entries <m| T |m-q>) and is real.
/// Built by diagonalizing the rotational Casimir superoperator on each
/// diagonal; phases follow the Condon-Shortley convention
/// (<j,j| T_K0 |j,j> > 0 and [S_+, T_Kq] a positive multiple of T_K,q+1).
class MultipoleBasis {
 public:
  explicit MultipoleBasis(int n);

  int n() const { return n_; }
  /// Entries of T_Kq along its diagonal, indexed by the column index k' = k - q.
  const RVector& diagonal(int k_rank, int q) const;
  CMatrix matrix(int k_rank, int q) const;
  /// rho_Kq = Tr(rho T_Kq^dagger).
  cplx coefficient(const CMatrix& rho, int k_rank, int q) const;

 private:
  std::size_t index(int k_rank, int q) const;
  int n_;
  std::vector<RVector> diagonals_;  // only q >= 0 stored
};

/// SU(2) Wigner function by multipole expansion,
/// W = sqrt((N+1)/(4 pi)) sum_{K,q} rho_Kq Y_Kq(theta, phi),
/// normalized so that its integral over the sphere equals Tr rho.
SphereGrid wigner_su2(const DensityMatrix& rho, SphereGrid grid);
SphereGrid wigner_su2(const DensityMatrix& rho, SphereGrid grid, const MultipoleBasis& basis);

/// Integral of the negative part, |min(W, 0)|, over the sphere. Measures how
/// much interference-fringe structure survives in a Wigner snapshot.
double wigner_negativity(const SphereGrid& w);

struct GridMaximum {
  int i = 0;
  int j = 0;
  double theta = 0.0;
  double phi = 0.0;
  double value = 0.0;
};

/// Local maxima (8-neighbourhood, periodic in phi), largest first. A pole row
/// counts as a single point; of two equal neighbouring samples only the first
/// in row-major order is reported.
std::vector<GridMaximum> local_maxima(const SphereGrid& grid);

}  // namespace tact
