#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace tact::meanfield {

/// Dimensionless detunings gamma_j / (N chi).
struct Params {
  double gx = 0.0;
  double gy = 0.0;
  double gz = 0.0;

  int active_axes() const { return (gx != 0.0) + (gy != 0.0) + (gz != 0.0); }
};

/// Population imbalance z in [-1, 1] and relative phase phi in [-pi, pi).
struct PhasePoint {
  double z = 0.0;
  double phi = 0.0;
};

/// Rates with respect to the scaled time N chi t.
struct Velocity {
  double dphi = 0.0;
  double dz = 0.0;
};

enum class Kind { center, saddle, degenerate };

struct FixedPoint {
  PhasePoint point;
  Kind kind = Kind::degenerate;
  std::array<std::complex<double>, 2> eigenvalues{};
};

enum class Axis { x, y, z };

double wrap_phase(double phi);
Params params_along(Axis axis, double value);
const char* kind_name(Kind kind);

/// Mean-field energy in units of chi N^2 / 2:
/// -z sqrt(1-z^2) sin(phi) + gz z + sqrt(1-z^2) (gx cos(phi) + gy sin(phi)).
double classical_energy(const PhasePoint& p, const Params& mp);

/// Hamilton's equations d(phi)/d(N chi t) = dH/dz, dz/d(N chi t) = -dH/dphi.
/// Throws std::domain_error at the chart poles |z| >= 1.
Velocity velocity_field(const PhasePoint& p, const Params& mp);

/// d(dphi, dz)/d(phi, z); rows are (dphi, dz), columns (phi, z).
Eigen::Matrix2d jacobian(const PhasePoint& p, const Params& mp);

/// Center when det J > 0 (imaginary pair), saddle when det J < 0.
FixedPoint classify(const PhasePoint& p, const Params& mp);

struct Trajectory {
  std::vector<PhasePoint> points;
  std::vector<double> times;
  bool singular = false;  // stopped at |z| > 1 - 1e-9
};

/// Fixed-step RK4 in (z, phi), time measured in N chi t.
Trajectory integrate_trajectory(const PhasePoint& p0, const Params& mp, double t_span, double dt);

/// Closed-form fixed points for the single-axis cases (and the unperturbed one).
/// Throws std::invalid_argument if more than one detuning is nonzero.
std::vector<FixedPoint> fixed_points_closed_form(const Params& mp);

/// Damped Newton on the velocity field from a seeds x seeds grid over the
/// chart (z restricted to |z| <= 1 - 1e-6), deduplicated.
std::vector<FixedPoint> fixed_points_numeric(const Params& mp, int seeds = 40);

/// Closed forms when at most one detuning is nonzero, numeric root finding otherwise.
std::vector<FixedPoint> fixed_points(const Params& mp);

/// phi_x = arctan(sqrt(1 - gx^2) / (gx sqrt(2))) and z_x = sqrt(1 - gx^2) / sqrt(2).
double z_x(double gx);
double phi_x(double gx);
/// gy/4 +- sqrt(gy^2 + 8)/4.
double z_y(double gy, int sign);
/// |4 - gz^2 +- |gz| sqrt(gz^2 + 8)|^{1/2} / sqrt(8).
double z_z(double gz, int sign);

struct BifurcationRow {
  double gamma = 0.0;
  int count = 0;
  int centers = 0;
  int saddles = 0;
};

std::vector<BifurcationRow> bifurcation_scan(Axis axis, const std::vector<double>& values);

enum class Counting { closed_form, numeric };

/// Bisection on the fixed-point count between lo and hi, which must differ in count.
double locate_bifurcation(Axis axis, double lo, double hi, double tol = 1e-6,
                          Counting counting = Counting::closed_form);

/// Velocity field sampled on an n_z x n_phi grid, z in [-1+1e-6, 1-1e-6].
struct PortraitSample {
  PhasePoint point;
  Velocity velocity;
  double energy = 0.0;
};
std::vector<PortraitSample> sample_portrait(const Params& mp, int n_z, int n_phi);

}  // namespace tact::meanfield
