#include "tact/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "tact/parallel.hpp"

namespace tact {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kEigenFloor = 1e-12;

}  // namespace

void NoiseSpec::validate() const {
  for (double s : sigma)
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("noise standard deviations must be finite and >= 0");
  if (m < 1) throw std::invalid_argument("ensemble size M must be >= 1");
}

GammaVector sample_gamma(const NoiseSpec& spec, std::size_t index) {
  std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index + 1)));
  std::normal_distribution<double> normal(0.0, 1.0);
  // all three components are always drawn so streams stay aligned across specs
  const double a = normal(rng);
  const double b = normal(rng);
  const double c = normal(rng);
  return {spec.sigma[0] == 0.0 ? 0.0 : spec.sigma[0] * a, spec.sigma[1] == 0.0 ? 0.0 : spec.sigma[1] * b,
          spec.sigma[2] == 0.0 ? 0.0 : spec.sigma[2] * c};
}

std::vector<GammaVector> sample_gammas(const NoiseSpec& spec) {
  spec.validate();
  std::vector<GammaVector> out(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) out[i] = sample_gamma(spec, i);
  return out;
}

DensityMatrix::DensityMatrix(const CMatrix& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw std::invalid_argument("density matrix must be square and nonempty");
  matrix_ = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_);
  if (es.info() != Eigen::Success) throw std::runtime_error("density matrix diagonalization failed");
  const Eigen::Index d = matrix_.rows();
  probabilities_.resize(d);
  eigenvectors_.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    probabilities_(i) = std::max(es.eigenvalues()(d - 1 - i), 0.0);
    eigenvectors_.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  const double total = probabilities_.sum();
  if (!(total > 0.0)) throw std::invalid_argument("density matrix has no positive weight");
  probabilities_ /= total;
  for (Eigen::Index i = 0; i < d; ++i)
    if (probabilities_(i) < kEigenFloor) probabilities_(i) = 0.0;
  probabilities_ /= probabilities_.sum();
  matrix_ /= matrix_.trace().real();
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const StateVector u = psi / psi.norm();
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix assemble_density(std::span<const StateVector> states) {
  if (states.empty()) throw std::invalid_argument("cannot assemble a density matrix from zero states");
  const Eigen::Index d = states.front().size();
  CMatrix block(d, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != d) throw std::invalid_argument("state dimension mismatch in ensemble");
    block.col(static_cast<Eigen::Index>(i)) = states[i];
  }
  CMatrix rho = CMatrix::Zero(d, d);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(block, 1.0 / double(states.size()));
  rho.triangularView<Eigen::StrictlyUpper>() = rho.adjoint();
  return DensityMatrix(rho);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double p : rho.probabilities())
    if (p > 0.0) s -= p * std::log(p);
  return std::max(s, 0.0);
}

EnsembleEvolution::EnsembleEvolution(const SimConfig& cfg, const NoiseSpec& noise, const Schedule& sched)
    : cfg_(cfg), sched_(sched), ops_(spin_operators(cfg)) {
  noise.validate();
  sched_.validate();
  pulse_ = sched_.pulse ? pulse_operator(ops_, sched_.pulse_angle) : CMatrix::Identity(cfg.dim(), cfg.dim());
  reference_ = make_member(GammaVector{});
  members_.resize(noise.m);
  parallel_for(noise.m, [&](std::size_t i) { members_[i] = make_member(sample_gamma(noise, i)); });
}

EnsembleEvolution::Member EnsembleEvolution::make_member(const GammaVector& g) const {
  const Hamiltonian h = build_noisy(cfg_, ops_, g);
  Member m;
  m.gamma = g;
  m.energies = h.energies();
  m.modes = h.modes();
  m.before = h.modes().adjoint() * coherent_state_x(cfg_);
  if (sched_.pulse) {
    const StateVector pre = h.modes() * h.evolve_modal(m.before, sched_.pulse_time);
    m.after = h.modes().adjoint() * (pulse_ * pre);
  }
  return m;
}

StateVector EnsembleEvolution::member_state(const Member& m, double t) const {
  const bool after = sched_.after_pulse(t);
  const StateVector& c = after ? m.after : m.before;
  const double dt = after ? t - sched_.pulse_time : t;
  StateVector phased(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) phased(k) = c(k) * std::polar(1.0, -m.energies(k) * dt);
  return m.modes * phased;
}

StateVector EnsembleEvolution::state(std::size_t realization, std::size_t time_index) const {
  return member_state(members_.at(realization), sched_.times.at(time_index));
}

StateVector EnsembleEvolution::reference(std::size_t time_index) const {
  return member_state(reference_, sched_.times.at(time_index));
}

DensityMatrix EnsembleEvolution::density(std::size_t time_index) const {
  const double t = sched_.times.at(time_index);
  const Eigen::Index d = cfg_.dim();
  CMatrix block(d, static_cast<Eigen::Index>(members_.size()));
  for (std::size_t i = 0; i < members_.size(); ++i) block.col(static_cast<Eigen::Index>(i)) = member_state(members_[i], t);
  CMatrix rho = CMatrix::Zero(d, d);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(block, 1.0 / double(members_.size()));
  rho.triangularView<Eigen::StrictlyUpper>() = rho.adjoint();
  return DensityMatrix(rho);
}

double EnsembleEvolution::mean_fidelity(std::size_t time_index) const {
  const double t = sched_.times.at(time_index);
  const StateVector ref = member_state(reference_, t);
  double acc = 0.0;
  for (const Member& m : members_) acc += std::norm(ref.dot(member_state(m, t)));
  return acc / double(members_.size());
}

ConvergenceReport converged_m(const NoiseSpec& spec, const SimConfig& cfg, const Schedule& sched,
                              std::span<const double> probe_times, double tolerance, std::size_t m_max) {
  spec.validate();
  sched.validate();
  if (probe_times.empty()) throw std::invalid_argument("at least one probe time is required");
  Schedule probe = sched;
  probe.times.assign(probe_times.begin(), probe_times.end());
  std::sort(probe.times.begin(), probe.times.end());
  probe.times.erase(std::unique(probe.times.begin(), probe.times.end()), probe.times.end());
  if (probe.times.front() < sched.times.front() || probe.times.back() > sched.times.back())
    throw std::out_of_range("probe times must lie within the schedule");
  // keep the start of the run on the grid so a pulse before the first probe stays valid
  std::size_t offset = 0;
  if (probe.times.front() > sched.times.front()) {
    probe.times.insert(probe.times.begin(), sched.times.front());
    offset = 1;
  }

  ConvergenceReport report;
  auto entropies = [&](std::size_t m) {
    NoiseSpec s = spec;
    s.m = m;
    const EnsembleEvolution ens(cfg, s, probe);
    std::vector<double> e(probe.times.size() - offset);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = von_neumann_entropy(ens.density(k + offset));
    return e;
  };
  for (std::size_t m = 1; m <= m_max; m *= 2) {
    report.sizes.push_back(m);
    report.entropy.push_back(entropies(m));
    const std::size_t n = report.entropy.size();
    if (n < 2) continue;
    const auto& prev = report.entropy[n - 2];
    const auto& cur = report.entropy[n - 1];
    bool stable = true;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      const double diff = std::abs(cur[k] - prev[k]);
      if (diff > 1e-12 && diff > tolerance * std::max(std::abs(cur[k]), std::abs(prev[k]))) stable = false;
    }
    if (stable) {
      report.m = report.sizes[n - 2];
      report.converged = true;
      return report;
    }
  }
  throw std::runtime_error("ensemble entropy did not converge below M_max = " + std::to_string(m_max));
}

}  // namespace tact
