#include "tact/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tact::meanfield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kChartEdge = 1e-6;

bool same_point(const PhasePoint& a, const PhasePoint& b, double tol) {
  return std::abs(a.z - b.z) < tol && std::abs(wrap_phase(a.phi - b.phi)) < tol;
}

void sort_points(std::vector<FixedPoint>& pts) {
  std::sort(pts.begin(), pts.end(), [](const FixedPoint& a, const FixedPoint& b) {
    if (a.point.z != b.point.z) return a.point.z < b.point.z;
    return a.point.phi < b.point.phi;
  });
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double wrap_phase(double phi) {
  double w = std::fmod(phi + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

Params params_along(Axis axis, double value) {
  switch (axis) {
    case Axis::x: return {value, 0.0, 0.0};
    case Axis::y: return {0.0, value, 0.0};
    case Axis::z: return {0.0, 0.0, value};
  }
  return {};
}

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::center: return "center";
    case Kind::saddle: return "saddle";
    case Kind::degenerate: return "degenerate";
  }
  return "unknown";
}

double classical_energy(const PhasePoint& p, const Params& mp) {
  const double w = std::sqrt(std::max(0.0, 1.0 - p.z * p.z));
  const double s = std::sin(p.phi), c = std::cos(p.phi);
  return -p.z * w * s + mp.gz * p.z + w * (mp.gx * c + mp.gy * s);
}

Velocity velocity_field(const PhasePoint& p, const Params& mp) {
  if (!(std::abs(p.z) < 1.0)) throw std::domain_error("velocity field is singular at the poles |z| = 1");
  const double w = std::sqrt(1.0 - p.z * p.z);
  const double s = std::sin(p.phi), c = std::cos(p.phi);
  Velocity v;
  v.dphi = -(1.0 - 2.0 * p.z * p.z) / w * s - p.z / w * (mp.gy * s + mp.gx * c) + mp.gz;
  v.dz = p.z * w * c - w * (mp.gy * c - mp.gx * s);
  return v;
}

Eigen::Matrix2d jacobian(const PhasePoint& p, const Params& mp) {
  if (!(std::abs(p.z) < 1.0)) throw std::domain_error("Jacobian is singular at the poles |z| = 1");
  const double z = p.z;
  const double w = std::sqrt(1.0 - z * z);
  const double w3 = w * w * w;
  const double s = std::sin(p.phi), c = std::cos(p.phi);
  Eigen::Matrix2d j;
  j(0, 0) = -(1.0 - 2.0 * z * z) / w * c - z / w * (mp.gy * c - mp.gx * s);
  j(0, 1) = -z * (2.0 * z * z - 3.0) / w3 * s - (mp.gy * s + mp.gx * c) / w3;
  j(1, 0) = -z * w * s + w * (mp.gy * s + mp.gx * c);
  j(1, 1) = -j(0, 0);
  return j;
}

FixedPoint classify(const PhasePoint& p, const Params& mp) {
  const Eigen::Matrix2d j = jacobian(p, mp);
  const double tr = j.trace();
  const double det = j.determinant();
  const std::complex<double> root = std::sqrt(std::complex<double>(0.25 * tr * tr - det, 0.0));
  FixedPoint fp;
  fp.point = p;
  fp.eigenvalues = {0.5 * tr + root, 0.5 * tr - root};
  constexpr double kDegenerate = 1e-10;
  if (det > kDegenerate && std::abs(tr) < 1e-8)
    fp.kind = Kind::center;
  else if (det < -kDegenerate)
    fp.kind = Kind::saddle;
  else
    fp.kind = Kind::degenerate;
  return fp;
}

Trajectory integrate_trajectory(const PhasePoint& p0, const Params& mp, double t_span, double dt) {
  if (!(dt > 0.0) || !(t_span >= 0.0)) throw std::invalid_argument("time step must be positive and span non-negative");
  if (!(std::abs(p0.z) <= 1.0)) throw std::invalid_argument("initial z must lie in [-1, 1]");
  constexpr double kSingular = 1.0 - 1e-9;
  Trajectory out;
  PhasePoint p{p0.z, wrap_phase(p0.phi)};
  out.points.push_back(p);
  out.times.push_back(0.0);
  if (std::abs(p.z) > kSingular) {
    out.singular = true;
    return out;
  }
  const auto steps = static_cast<std::size_t>(std::llround(t_span / dt));
  auto rate = [&](double z, double phi) {
    const Velocity v = velocity_field({z, phi}, mp);
    return std::array<double, 2>{v.dz, v.dphi};
  };
  auto inside = [&](double z) { return std::abs(z) <= kSingular; };
  for (std::size_t n = 0; n < steps; ++n) {
    const auto k1 = rate(p.z, p.phi);
    const double z2 = p.z + 0.5 * dt * k1[0];
    if (!inside(z2)) { out.singular = true; break; }
    const auto k2 = rate(z2, p.phi + 0.5 * dt * k1[1]);
    const double z3 = p.z + 0.5 * dt * k2[0];
    if (!inside(z3)) { out.singular = true; break; }
    const auto k3 = rate(z3, p.phi + 0.5 * dt * k2[1]);
    const double z4 = p.z + dt * k3[0];
    if (!inside(z4)) { out.singular = true; break; }
    const auto k4 = rate(z4, p.phi + dt * k3[1]);
    p.z += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    p.phi = wrap_phase(p.phi + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]));
    if (!inside(p.z)) { out.singular = true; break; }
    out.points.push_back(p);
    out.times.push_back(double(n + 1) * dt);
  }
  return out;
}

double z_x(double gx) { return std::sqrt(1.0 - gx * gx) / std::sqrt(2.0); }
double phi_x(double gx) { return std::atan(std::sqrt(1.0 - gx * gx) / (gx * std::sqrt(2.0))); }
double z_y(double gy, int sign) { return gy / 4.0 + sign * std::sqrt(gy * gy + 8.0) / 4.0; }
double z_z(double gz, int sign) {
  return std::sqrt(std::abs(4.0 - gz * gz + sign * std::abs(gz) * std::sqrt(gz * gz + 8.0))) / std::sqrt(8.0);
}

std::vector<FixedPoint> fixed_points_closed_form(const Params& mp) {
  if (mp.active_axes() > 1) throw std::invalid_argument("closed forms cover at most one nonzero detuning");
  std::vector<PhasePoint> pts;
  if (mp.active_axes() == 0) {
    const double zc = 1.0 / std::sqrt(2.0);
    pts = {{0.0, 0.0}, {0.0, -kPi}, {zc, kPi / 2}, {zc, -kPi / 2}, {-zc, kPi / 2}, {-zc, -kPi / 2}};
  } else if (mp.gx != 0.0) {
    const double g = mp.gx;
    pts = {{0.0, 0.0}, {0.0, -kPi}};
    if (std::abs(g) < 1.0) {
      // z cos(phi) = -g sin(phi) with z = +-z_x
      for (double z : {z_x(g), -z_x(g)})
        for (double s : {1.0, -1.0}) pts.push_back({z, std::atan2(-z * s, g * s)});
    }
  } else if (mp.gy != 0.0) {
    const double g = mp.gy;
    if (std::abs(g) < 1.0) {
      pts.push_back({g, 0.0});
      pts.push_back({g, -kPi});
    }
    for (int sign : {1, -1}) {
      const double z = z_y(g, sign);
      if (std::abs(z) < 1.0) {
        pts.push_back({z, kPi / 2});
        pts.push_back({z, -kPi / 2});
      }
    }
  } else {
    const double g = mp.gz;
    const double sg = sign_of(g);
    if (std::abs(g) < 1.0) {
      const double a = std::asin(g);
      pts.push_back({0.0, wrap_phase(a)});
      pts.push_back({0.0, wrap_phase(kPi - a)});
    }
    const double zp = z_z(g, 1);
    pts.push_back({zp, -sg * kPi / 2});
    pts.push_back({-zp, -sg * kPi / 2});
    if (std::abs(g) < 1.0) {
      const double zm = z_z(g, -1);
      pts.push_back({zm, sg * kPi / 2});
      pts.push_back({-zm, sg * kPi / 2});
    }
  }
  std::vector<FixedPoint> out;
  for (const PhasePoint& p : pts) out.push_back(classify({p.z, wrap_phase(p.phi)}, mp));
  sort_points(out);
  return out;
}

std::vector<FixedPoint> fixed_points_numeric(const Params& mp, int seeds) {
  if (seeds < 2) throw std::invalid_argument("need at least a 2x2 seed grid");
  const double z_limit = 1.0 - kChartEdge;
  auto residual = [&](const PhasePoint& p) {
    const Velocity v = velocity_field(p, mp);
    return std::hypot(v.dphi, v.dz);
  };
  std::vector<PhasePoint> found;
  for (int iz = 0; iz < seeds; ++iz) {
    for (int ip = 0; ip < seeds; ++ip) {
      PhasePoint p{-1.0 + (iz + 0.5) * 2.0 / seeds, -kPi + (ip + 0.5) * 2.0 * kPi / seeds};
      double r = residual(p);
      bool ok = false;
      for (int it = 0; it < 100; ++it) {
        if (r < 1e-14) { ok = true; break; }
        const Velocity v = velocity_field(p, mp);
        const Eigen::Matrix2d j = jacobian(p, mp);
        if (std::abs(j.determinant()) < 1e-300) break;
        const Eigen::Vector2d step = -j.partialPivLu().solve(Eigen::Vector2d(v.dphi, v.dz));
        double damp = 1.0;
        bool moved = false;
        for (int k = 0; k < 40; ++k, damp *= 0.5) {
          const PhasePoint q{p.z + damp * step(1), wrap_phase(p.phi + damp * step(0))};
          if (std::abs(q.z) >= 1.0 - 1e-9) continue;
          const double rq = residual(q);
          if (rq < r) {
            p = q;
            r = rq;
            moved = true;
            break;
          }
        }
        if (!moved) {
          ok = r < 1e-12;
          break;
        }
      }
      if (!ok || std::abs(p.z) > z_limit) continue;
      if (std::none_of(found.begin(), found.end(), [&](const PhasePoint& f) { return same_point(f, p, 1e-7); }))
        found.push_back(p);
    }
  }
  std::vector<FixedPoint> out;
  for (const PhasePoint& p : found) out.push_back(classify(p, mp));
  sort_points(out);
  return out;
}

std::vector<FixedPoint> fixed_points(const Params& mp) {
  if (mp.active_axes() <= 1) return fixed_points_closed_form(mp);
  return fixed_points_numeric(mp);
}

std::vector<BifurcationRow> bifurcation_scan(Axis axis, const std::vector<double>& values) {
  std::vector<BifurcationRow> rows;
  for (double g : values) {
    if (!(std::abs(g) <= 2.0)) throw std::invalid_argument("bifurcation scan values must lie in [-2, 2]");
    const auto pts = fixed_points_closed_form(params_along(axis, g));
    BifurcationRow row{g, static_cast<int>(pts.size()), 0, 0};
    for (const auto& fp : pts) {
      if (fp.kind == Kind::center) ++row.centers;
      if (fp.kind == Kind::saddle) ++row.saddles;
    }
    rows.push_back(row);
  }
  return rows;
}

double locate_bifurcation(Axis axis, double lo, double hi, double tol, Counting counting) {
  auto count = [&](double g) {
    const Params mp = params_along(axis, g);
    return counting == Counting::numeric ? fixed_points_numeric(mp).size() : fixed_points_closed_form(mp).size();
  };
  const std::size_t below = count(lo);
  if (below == count(hi)) throw std::invalid_argument("fixed-point count does not change on the bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) == below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<PortraitSample> sample_portrait(const Params& mp, int n_z, int n_phi) {
  if (n_z < 2 || n_phi < 2) throw std::invalid_argument("portrait grid needs at least 2x2 samples");
  std::vector<PortraitSample> out;
  out.reserve(static_cast<std::size_t>(n_z) * n_phi);
  const double z0 = -1.0 + kChartEdge;
  const double z1 = 1.0 - kChartEdge;
  for (int i = 0; i < n_z; ++i) {
    const double z = z0 + (z1 - z0) * i / (n_z - 1);
    for (int k = 0; k < n_phi; ++k) {
      const PhasePoint p{z, -kPi + 2.0 * kPi * k / n_phi};
      out.push_back({p, velocity_field(p, mp), classical_energy(p, mp)});
    }
  }
  return out;
}

}  // namespace tact::meanfield
