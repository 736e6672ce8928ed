#include "tact/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tact {

SphereGrid SphereGrid::regular(int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("sphere grid needs at least 2 samples per axis");
  SphereGrid g;
  g.theta.resize(n_theta);
  g.phi.resize(n_phi);
  for (int i = 0; i < n_theta; ++i) g.theta[i] = kPi * i / (n_theta - 1);
  for (int j = 0; j < n_phi; ++j) g.phi[j] = -kPi + 2.0 * kPi * j / n_phi;
  g.values = RMatrix::Zero(n_theta, n_phi);
  return g;
}

double SphereGrid::integrate(const RMatrix& f) const {
  if (f.rows() != n_theta() || f.cols() != n_phi()) throw std::invalid_argument("grid values have the wrong shape");
  const double dtheta = kPi / (n_theta() - 1);
  const double dphi = 2.0 * kPi / n_phi();
  double total = 0.0;
  for (int i = 0; i < n_theta(); ++i) {
    const double w = (i == 0 || i == n_theta() - 1) ? 0.5 : 1.0;
    total += w * std::sin(theta[i]) * f.row(i).sum();
  }
  return total * dtheta * dphi;
}

namespace {

// amplitudes of the coherent state at colatitude theta, phi = 0
RVector coherent_profile(int n, double theta) {
  const StateVector psi = coherent_state(n, theta, 0.0);
  return psi.real();
}

// Row of a function f(phi) = c_0 + 2 sum_{q>0} Re(c_q e^{i q phi}).
void fill_fourier_row(const Eigen::VectorXcd& c, const std::vector<double>& phi, RMatrix& out, int row) {
  for (std::size_t j = 0; j < phi.size(); ++j) {
    double v = c(0).real();
    const cplx step = std::polar(1.0, phi[j]);
    cplx rot = step;
    for (Eigen::Index q = 1; q < c.size(); ++q) {
      v += 2.0 * (c(q) * rot).real();
      rot *= step;
    }
    out(row, static_cast<Eigen::Index>(j)) = v;
  }
}

}  // namespace

SphereGrid husimi(const DensityMatrix& rho, SphereGrid grid) {
  const int d = rho.dim();
  const int n = d - 1;
  const CMatrix& r = rho.matrix();
  for (int i = 0; i < grid.n_theta(); ++i) {
    const RVector a = coherent_profile(n, grid.theta[i]);
    // <psi|rho|psi> with psi_k = a_k e^{-i m_k phi}: sum_q e^{i q phi} B_q, q = k - k'
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d);
    for (int q = 0; q < d; ++q)
      for (int kp = 0; kp + q < d; ++kp) b(q) += a(kp + q) * a(kp) * r(kp + q, kp);
    fill_fourier_row(b, grid.phi, grid.values, i);
  }
  return grid;
}

MultipoleBasis::MultipoleBasis(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("multipole basis needs N >= 1");
  const double j = 0.5 * n;
  auto raise = [&](int k) { return (k < 0 || k >= n) ? 0.0 : std::sqrt(double(k + 1) * double(n - k)); };
  diagonals_.resize(index(n, n) + 1);

  for (int q = 0; q <= n; ++q) {
    const int len = n + 1 - q;
    // Casimir superoperator sum_i [S_i, [S_i, X]] restricted to X = sum_k' x_k' |k'+q><k'|
    RMatrix casimir = RMatrix::Zero(len, len);
    for (int kp = 0; kp < len; ++kp) {
      const double m = kp + q - j;
      const double mp = kp - j;
      casimir(kp, kp) = 2.0 * j * (j + 1.0) - 2.0 * m * mp;
      if (kp + 1 < len) {
        casimir(kp + 1, kp) = -raise(kp + q) * raise(kp);
        casimir(kp, kp + 1) = casimir(kp + 1, kp);
      }
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(casimir);
    if (es.info() != Eigen::Success) throw std::runtime_error("multipole construction failed");
    for (int r = 0; r < len; ++r) {
      const int k_rank = q + r;
      if (std::abs(es.eigenvalues()(r) - k_rank * (k_rank + 1.0)) > 1e-6 * (1.0 + k_rank * k_rank))
        throw std::runtime_error("multipole spectrum does not match K(K+1)");
      RVector v = es.eigenvectors().col(r);
      if (q == 0) {
        if (v(len - 1) < 0.0) v = -v;
      } else {
        // [S_+, T_{K,q-1}] along the q-th diagonal
        const RVector& t = diagonals_[index(k_rank, q - 1)];
        double overlap = 0.0;
        for (int kp = 0; kp < len; ++kp) {
          const double next = (kp + 1 < static_cast<int>(t.size())) ? t(kp + 1) : 0.0;
          overlap += v(kp) * (raise(kp + q - 1) * t(kp) - raise(kp) * next);
        }
        if (overlap < 0.0) v = -v;
      }
      diagonals_[index(k_rank, q)] = v;
    }
  }
}

std::size_t MultipoleBasis::index(int k_rank, int q) const {
  return static_cast<std::size_t>(k_rank) * (k_rank + 1) / 2 + static_cast<std::size_t>(q);
}

const RVector& MultipoleBasis::diagonal(int k_rank, int q) const {
  if (k_rank < 0 || k_rank > n_ || q < 0 || q > k_rank) throw std::out_of_range("multipole index out of range");
  return diagonals_[index(k_rank, q)];
}

CMatrix MultipoleBasis::matrix(int k_rank, int q) const {
  const int aq = std::abs(q);
  const RVector& t = diagonal(k_rank, aq);
  CMatrix out = CMatrix::Zero(n_ + 1, n_ + 1);
  for (int kp = 0; kp < t.size(); ++kp) {
    if (q >= 0)
      out(kp + q, kp) = t(kp);
    else
      out(kp, kp + aq) = ((aq % 2) ? -1.0 : 1.0) * t(kp);  // (-1)^q T_Kq^dagger
  }
  return out;
}

cplx MultipoleBasis::coefficient(const CMatrix& rho, int k_rank, int q) const {
  const int aq = std::abs(q);
  const RVector& t = diagonal(k_rank, aq);
  cplx acc = 0.0;
  for (int kp = 0; kp < t.size(); ++kp) acc += t(kp) * rho(kp + aq, kp);
  if (q < 0) acc = ((aq % 2) ? -1.0 : 1.0) * std::conj(acc);
  return acc;
}

SphereGrid wigner_su2(const DensityMatrix& rho, SphereGrid grid, const MultipoleBasis& basis) {
  const int n = rho.dim() - 1;
  if (basis.n() != n) throw std::invalid_argument("multipole basis built for a different N");
  const CMatrix& r = rho.matrix();
  // rho_Kq for q >= 0
  std::vector<Eigen::VectorXcd> coeff(n + 1);
  for (int k = 0; k <= n; ++k) {
    coeff[k].resize(k + 1);
    for (int q = 0; q <= k; ++q) coeff[k](q) = basis.coefficient(r, k, q);
  }
  const double norm = std::sqrt((n + 1.0) / (4.0 * kPi));
  for (int i = 0; i < grid.n_theta(); ++i) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n + 1);
    for (int k = 0; k <= n; ++k)
      for (int q = 0; q <= k; ++q)
        c(q) += coeff[k](q) * std::sph_legendre(static_cast<unsigned>(k), static_cast<unsigned>(q), grid.theta[i]);
    c *= norm;
    fill_fourier_row(c, grid.phi, grid.values, i);
  }
  return grid;
}

SphereGrid wigner_su2(const DensityMatrix& rho, SphereGrid grid) {
  return wigner_su2(rho, std::move(grid), MultipoleBasis(rho.dim() - 1));
}

double wigner_negativity(const SphereGrid& w) {
  return w.integrate(w.values.cwiseMin(0.0).cwiseAbs());
}

std::vector<GridMaximum> local_maxima(const SphereGrid& grid) {
  const int nt = grid.n_theta();
  const int np = grid.n_phi();
  const RMatrix& v = grid.values;
  std::vector<GridMaximum> out;
  auto pole = [&](int i, int neighbour_row) {
    const double value = v.row(i).mean();
    if (value > v.row(neighbour_row).maxCoeff()) out.push_back({i, 0, grid.theta[i], 0.0, value});
  };
  pole(0, 1);
  pole(nt - 1, nt - 2);
  for (int i = 1; i + 1 < nt; ++i) {
    for (int j = 0; j < np; ++j) {
      const double c = v(i, j);
      bool peak = true;
      for (int di = -1; di <= 1 && peak; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di;
          const int jj = (j + dj + np) % np;
          const double other = (ii == 0 || ii == nt - 1) ? v.row(ii).mean() : v(ii, jj);
          // ties go to the sample met first in scan order
          const bool earlier = di < 0 || (di == 0 && dj < 0);
          if (earlier ? other >= c : other > c) {
            peak = false;
            break;
          }
        }
      if (peak) out.push_back({i, j, grid.theta[i], grid.phi[j], c});
    }
  }
  std::sort(out.begin(), out.end(), [](const GridMaximum& a, const GridMaximum& b) { return a.value > b.value; });
  return out;
}

}  // namespace tact
