#include "doctest.h"

#include <cmath>

#include "tact/dynamics.hpp"
#include "tact/phasespace.hpp"

using namespace tact;

namespace {

Eigen::Vector3d unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double husimi_at(const DensityMatrix& rho, double theta, double phi) {
  SphereGrid g;
  g.theta = {theta};
  g.phi = {phi};
  g.values = RMatrix::Zero(1, 1);
  return husimi(rho, g).values(0, 0);
}

}  // namespace

TEST_CASE("sphere grid quadrature") {
  const SphereGrid g = SphereGrid::regular(181, 361);
  CHECK(g.theta.front() == 0.0);
  CHECK(g.theta.back() == doctest::Approx(kPi));
  CHECK(g.phi.front() == doctest::Approx(-kPi));
  CHECK(g.phi.back() < kPi);
  CHECK(g.integrate(RMatrix::Ones(181, 361)) == doctest::Approx(4 * kPi).epsilon(1e-4));
  CHECK_THROWS(SphereGrid::regular(1, 10));
}

TEST_CASE("Husimi function") {
  const int n = 20;
  const SimConfig cfg{n, 1.0};
  const SphereGrid grid = SphereGrid::regular(181, 360);
  const DensityMatrix x = DensityMatrix::pure(coherent_state_x(cfg));
  const SphereGrid q = husimi(x, grid);
  CHECK((n + 1) / (4 * kPi) * q.integrate() == doctest::Approx(1.0).epsilon(1e-3));
  const auto peaks = local_maxima(q);
  REQUIRE(!peaks.empty());
  CHECK(peaks[0].theta == doctest::Approx(kPi / 2));
  CHECK(peaks[0].phi == doctest::Approx(0.0));
  CHECK(peaks[0].value == doctest::Approx(1.0));

  const DensityMatrix mixed(CMatrix::Identity(n + 1, n + 1) / double(n + 1));
  const SphereGrid qm = husimi(mixed, SphereGrid::regular(19, 36));
  CHECK((qm.values.array() - 1.0 / (n + 1)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("Husimi rotational covariance") {
  const SimConfig cfg{12, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const StateVector psi = propagate(build_tact(cfg, ops), coherent_state(cfg.n, 0.8, 0.4), 0.17);
  const DensityMatrix rho = DensityMatrix::pure(psi);
  const Direction axis(0.2, 0.9, -0.3);
  const double angle = 0.8;
  const CMatrix u = rotation(ops, axis, angle);
  const DensityMatrix rotated(u * rho.matrix() * u.adjoint());
  // exp(i a S_n) turns directions by -a about n
  const Eigen::Matrix3d r = Eigen::AngleAxisd(-angle, axis.vec()).toRotationMatrix();
  for (double theta : {0.3, 1.2, 2.5})
    for (double phi : {-2.0, 0.1, 1.7}) {
      const Eigen::Vector3d back = r.transpose() * unit(theta, phi);
      const double t0 = std::acos(std::clamp(back.z(), -1.0, 1.0));
      const double p0 = std::atan2(back.y(), back.x());
      CHECK(husimi_at(rotated, theta, phi) == doctest::Approx(husimi_at(rho, t0, p0)).epsilon(1e-8));
    }
}

TEST_CASE("spherical tensor operators") {
  const int n = 6;
  const MultipoleBasis basis(n);
  const SpinOps ops = spin_operators({n, 1.0});
  for (int k1 = 0; k1 <= n; ++k1)
    for (int q1 = -k1; q1 <= k1; ++q1)
      for (int k2 = 0; k2 <= n; k2 += 2)
        for (int q2 = -k2; q2 <= k2; ++q2) {
          const cplx ip = (basis.matrix(k1, q1) * basis.matrix(k2, q2).adjoint()).trace();
          CHECK(std::abs(ip - ((k1 == k2 && q1 == q2) ? 1.0 : 0.0)) < 1e-10);
        }
  const double j = 0.5 * n;
  const double c = std::sqrt(3.0 / (j * (j + 1) * (2 * j + 1)));
  CHECK((basis.matrix(1, 0) - c * ops.sz).cwiseAbs().maxCoeff() < 1e-12);
  const CMatrix splus = ops.sx + kI * ops.sy;
  CHECK((basis.matrix(1, 1) + c / std::sqrt(2.0) * splus).cwiseAbs().maxCoeff() < 1e-12);
  // T_K,-q = (-1)^q T_Kq^dagger
  CHECK((basis.matrix(3, -2) - basis.matrix(3, 2).adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((basis.matrix(3, -1) + basis.matrix(3, 1).adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Wigner function") {
  const int n = 20;
  const MultipoleBasis basis(n);
  const SphereGrid grid = SphereGrid::regular(181, 361);

  const DensityMatrix mixed(CMatrix::Identity(n + 1, n + 1) / double(n + 1));
  const SphereGrid wm = wigner_su2(mixed, SphereGrid::regular(19, 36), basis);
  CHECK((wm.values.array() - 1.0 / (4 * kPi)).abs().maxCoeff() < 1e-12);

  const double theta0 = 1.1, phi0 = -0.7;
  const DensityMatrix coh = DensityMatrix::pure(coherent_state(n, theta0, phi0));
  const SphereGrid w = wigner_su2(coh, grid, basis);
  CHECK(w.integrate() == doctest::Approx(1.0).epsilon(1e-3));
  // purity: (4 pi / (N+1)) int W^2 = Tr rho^2
  CHECK(4 * kPi / (n + 1) * w.integrate(w.values.cwiseProduct(w.values)) == doctest::Approx(1.0).epsilon(1e-3));
  const auto peaks = local_maxima(w);
  REQUIRE(!peaks.empty());
  CHECK(unit(peaks[0].theta, peaks[0].phi).dot(unit(theta0, phi0)) > std::cos(2.0 * kPi / 180));
}

TEST_CASE("Wigner function is real") {
  // direct complex evaluation over q = -K..K must have no imaginary part
  const int n = 5;
  const SimConfig cfg{n, 1.0};
  const SpinOps ops = spin_operators(cfg);
  const StateVector a = propagate(build_noisy(cfg, ops, {0.3, -0.2, 0.5}), coherent_state(n, 0.4, 2.0), 0.6);
  const StateVector b = coherent_state(n, 2.0, -1.0);
  const std::vector<StateVector> states{a, b};
  const DensityMatrix rho = assemble_density(states);
  const MultipoleBasis basis(n);
  const double theta = 0.9, phi = 2.3;
  cplx total = 0.0;
  for (int k = 0; k <= n; ++k)
    for (int q = -k; q <= k; ++q) {
      const int aq = std::abs(q);
      cplx y = std::sph_legendre(k, aq, theta) * std::polar(1.0, aq * phi);
      if (q < 0) y = ((aq % 2) ? -1.0 : 1.0) * std::conj(y);
      total += basis.coefficient(rho.matrix(), k, q) * y;
    }
  total *= std::sqrt((n + 1) / (4 * kPi));
  CHECK(std::abs(total.imag()) < 1e-10);
  SphereGrid g;
  g.theta = {theta};
  g.phi = {phi};
  g.values = RMatrix::Zero(1, 1);
  CHECK(wigner_su2(rho, g, basis).values(0, 0) == doctest::Approx(total.real()).epsilon(1e-10));
}

TEST_CASE("negativity and maxima helpers") {
  SphereGrid g = SphereGrid::regular(5, 8);
  g.values.setConstant(0.1);
  g.values(2, 3) = 1.0;
  g.values(0, 0) = -0.1;
  const auto m = local_maxima(g);
  REQUIRE(m.size() == 1);
  CHECK(m[0].i == 2);
  CHECK(m[0].j == 3);
  CHECK(wigner_negativity(g) == 0.0);  // pole rows carry zero sin-weight
  g.values(1, 1) = -2.0;
  CHECK(wigner_negativity(g) > 0.0);
}
