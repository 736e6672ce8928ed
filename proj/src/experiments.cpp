#include "tact/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "tact/parallel.hpp"

#ifndef TACT_VERSION
#define TACT_VERSION "unknown"
#endif

namespace tact::io {

namespace {

using Clock = std::chrono::steady_clock;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json base_manifest(const std::string& command, const ExperimentConfig& cfg, Clock::time_point start) {
  return {{"command", command},
          {"version", TACT_VERSION},
          {"config", cfg.to_json()},
          {"seed", cfg.noise.seed},
          {"workers", worker_count()},
          {"finished_utc", utc_now()},
          {"wall_time_s", std::chrono::duration<double>(Clock::now() - start).count()}};
}

void warn_weak_noise(const ExperimentConfig& cfg, std::ostream& log) {
  const WeakNoiseVerdict v = validate_weak_noise(cfg.noise, cfg.sim);
  for (const auto& c : v.checks)
    if (!c.pass)
      log << "warning: weak-noise condition " << c.name << " violated (sigma/chi = " << c.value
          << ", limit " << c.limit << ")\n";
}

std::string states_dump(const EnsembleEvolution& ens, std::size_t time_index) {
  std::string out = "# n=" + std::to_string(ens.config().n) + " chi=" + number(ens.config().chi) +
                    " m=" + std::to_string(ens.realizations()) +
                    " t=" + number(ens.schedule().times[time_index]) +
                    " grid=" + std::to_string(ens.time_count()) + "\n# one realization per line: re,im pairs over k = 0..N\n";
  for (std::size_t r = 0; r < ens.realizations(); ++r) {
    const StateVector s = ens.state(r, time_index);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (k) out += ',';
      out += number(s(k).real()) + ',' + number(s(k).imag());
    }
    out += '\n';
  }
  return out;
}

std::string snapshot_tag(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

json write_snapshots(const EnsembleEvolution& ens, const ExperimentConfig& cfg, OutputSet& out) {
  json list = json::array();
  if (cfg.snapshots.empty()) return list;
  const MultipoleBasis basis(cfg.sim.n);
  const auto& times = ens.schedule().times;
  for (std::size_t s = 0; s < cfg.snapshots.size(); ++s) {
    const double t = cfg.snapshots[s] / cfg.sim.chi;
    const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * std::max(1.0, t));
    const auto idx = static_cast<std::size_t>(it - times.begin());
    const Snapshot snap = phase_space_snapshot(ens.density(idx), cfg.sphere_theta, cfg.sphere_phi, basis);
    const std::string tag = snapshot_tag(s);
    const double chi_t = cfg.sim.chi * times[idx];
    out.write("husimi_" + tag + format_extension(cfg.format), grid_text(snap.husimi, cfg.sim.n, "husimi", chi_t, cfg.format));
    out.write("wigner_" + tag + format_extension(cfg.format), grid_text(snap.wigner, cfg.sim.n, "wigner", chi_t, cfg.format));
    json maxima = json::array();
    const auto peaks = local_maxima(snap.husimi);
    for (std::size_t k = 0; k < std::min<std::size_t>(4, peaks.size()); ++k)
      maxima.push_back({{"theta", peaks[k].theta}, {"phi", peaks[k].phi}, {"value", peaks[k].value}});
    list.push_back({{"chi_t", chi_t}, {"wigner_negativity", snap.negativity}, {"husimi_maxima", maxima}});
  }
  return list;
}

json plateau_json(const PlateauStats& p) {
  return {{"mean_fq_over_n2", p.mean}, {"min_fq_over_n2", p.min}, {"slope_per_tau", p.slope},
          {"slope_stderr", p.slope_stderr}, {"samples", p.samples}};
}

}  // namespace

void ExperimentConfig::validate() const {
  sim.validate();
  noise.validate();
  require(grid >= 2, "grid needs at least 2 points");
  require(std::isfinite(t_max) && t_max >= 0.0, "t-max must be a non-negative finite chi t");
  require(std::isfinite(pulse_offset_time) && pulse_offset_time > -1.0, "pulse-offset-time must exceed -1");
  require(std::isfinite(pulse_offset_angle), "pulse-offset-angle must be finite");
  require(sphere_theta >= 2 && sphere_phi >= 2, "sphere grid needs at least 2 samples per axis");
  for (double s : snapshots) require(std::isfinite(s) && s >= 0.0, "snapshot times must be non-negative");
  require(!out_dir.empty(), "out-dir must not be empty");
  const double span = t_max > 0.0 ? t_max / sim.chi : 60.0 * optimal_pulse_time(sim);
  for (double t : snapshots)
    require(t / sim.chi <= span * (1 + 1e-12), "snapshot time beyond the end of the grid");
  schedule().validate();
}

Schedule ExperimentConfig::schedule() const {
  const double tau = optimal_pulse_time(sim);
  const double span = t_max > 0.0 ? t_max / sim.chi : 60.0 * tau;
  Schedule s = Schedule::uniform(span, grid, tau * (1.0 + pulse_offset_time), pulse);
  s.pulse_angle = kPi / 4.0 * (1.0 + pulse_offset_angle);
  for (double chi_t : snapshots) {
    const double t = chi_t / sim.chi;
    const auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
    if (it == s.times.end() || std::abs(*it - t) > 1e-12 * std::max(1.0, t)) s.times.insert(it, t);
  }
  return s;
}

json ExperimentConfig::to_json() const {
  return {{"n", sim.n},
          {"chi", sim.chi},
          {"sigma", {noise.sigma[0], noise.sigma[1], noise.sigma[2]}},
          {"m", noise.m},
          {"seed", noise.seed},
          {"grid", grid},
          {"t_max", t_max},
          {"pulse", pulse},
          {"pulse_offset_time", pulse_offset_time},
          {"pulse_offset_angle", pulse_offset_angle},
          {"snapshots", snapshots},
          {"sphere_grid", {sphere_theta, sphere_phi}},
          {"dump_states", dump_states},
          {"format", format == Format::csv ? "csv" : "json"}};
}

std::vector<SeriesRow> qfi_series(const EnsembleEvolution& ens) {
  const Hamiltonian h = build_tact(ens.config(), ens.ops());
  std::vector<SeriesRow> rows(ens.time_count());
  parallel_for(rows.size(), [&](std::size_t i) {
    const DensityMatrix rho = ens.density(i);
    const QfiResult q = qfi(rho, ens.ops());
    SeriesRow& r = rows[i];
    r.t = ens.schedule().times[i];
    r.f_q = q.f_q;
    r.n_opt = q.n_opt;
    r.fidelity = fidelity(rho, ens.reference(i));
    r.entropy = von_neumann_entropy(rho);
    r.energy = (rho.matrix() * h.matrix()).trace().real();
  });
  return rows;
}

PlateauStats plateau(const std::vector<SeriesRow>& rows, int n, double tau, double from, double to) {
  PlateauStats p;
  p.min = std::numeric_limits<double>::infinity();
  const double n2 = double(n) * n;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.t < from || r.t > to) continue;
    const double x = r.t / tau, y = r.f_q / n2;
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    p.min = std::min(p.min, y);
  }
  p.samples = pts.size();
  if (pts.empty()) throw std::invalid_argument("no grid points inside the plateau window");
  const double k = double(pts.size());
  p.mean = sy / k;
  if (pts.size() > 2) {
    const double sxx_c = sxx - sx * sx / k;
    p.slope = (sxy - sx * sy / k) / sxx_c;
    const double icept = (sy - p.slope * sx) / k;
    double ss = 0.0;
    for (const auto& [x, y] : pts) ss += std::pow(y - icept - p.slope * x, 2);
    p.slope_stderr = std::sqrt(ss / (k - 2) / sxx_c);
  }
  return p;
}

Schedule decay_schedule(const SimConfig& cfg, int points, double first, double last) {
  require(points >= 2 && first > 0.0 && last > first, "invalid decay grid");
  const double tau = optimal_pulse_time(cfg);
  Schedule s;
  s.pulse_time = tau;
  s.times.push_back(tau);
  for (int k = 0; k < points; ++k) s.times.push_back(tau + first * std::pow(last / first, double(k) / (points - 1)));
  s.validate();
  return s;
}

std::optional<double> measure_half_decay(int n, double sigma, int axis, std::size_t m, std::uint64_t seed, int points) {
  require(axis == 1 || axis == 2, "half-decay sweeps use noise along y (1) or z (2)");
  const SimConfig cfg{n, 1.0};
  NoiseSpec spec;
  spec.sigma[static_cast<std::size_t>(axis)] = sigma;
  spec.m = m;
  spec.seed = seed;
  const Schedule sched = decay_schedule(cfg, points, 1e-3, 10.0);
  const EnsembleEvolution ens(cfg, spec, sched);
  std::vector<double> series(sched.times.size());
  parallel_for(series.size(), [&](std::size_t i) { series[i] = qfi(ens.density(i), ens.ops()).f_q; });
  return half_decay_time(sched.times, series);
}

std::vector<ParityRow> parity_comparison(const EnsembleEvolution& ens, bool classical) {
  const ParityOps par = parity_operators(ens.ops());
  std::vector<ParityRow> rows(ens.time_count());
  parallel_for(rows.size(), [&](std::size_t i) {
    const DensityMatrix rho = ens.density(i);
    const Direction n = best_transverse_direction(rho, ens.ops());
    ParityRow& r = rows[i];
    r.t = ens.schedule().times[i];
    r.f_q = qfi(rho, ens.ops()).f_q;
    r.f_parity = parity_fisher_bound(rho, par, n, ens.ops());
    r.n = n.vec();
    if (classical) r.f_classical = classical_fisher(rho, par.pi_op, n, ens.ops());
  });
  return rows;
}

Snapshot phase_space_snapshot(const DensityMatrix& rho, int n_theta, int n_phi, const MultipoleBasis& basis) {
  Snapshot s;
  const SphereGrid grid = SphereGrid::regular(n_theta, n_phi);
  s.husimi = husimi(rho, grid);
  s.wigner = wigner_su2(rho, grid, basis);
  s.negativity = wigner_negativity(s.wigner);
  return s;
}

std::vector<std::pair<std::string, meanfield::Params>> default_portraits() {
  return {{"a", {0.0, 0.0, 0.0}}, {"b", {0.4, 0.0, 0.0}}, {"c", {1.0, 0.0, 0.0}}, {"d", {0.0, 0.4, 0.0}}, {"e", {0.0, 0.0, 0.4}}};
}

json cmd_portrait(const ExperimentConfig& cfg, const PortraitOptions& opt, std::ostream& log) {
  require(opt.n_z >= 2 && opt.n_phi >= 2, "portrait grid needs at least 2 samples per axis");
  std::vector<std::pair<std::string, meanfield::Params>> panels;
  if (opt.custom) {
    const auto& p = *opt.custom;
    require(std::isfinite(p.gx) && std::isfinite(p.gy) && std::isfinite(p.gz), "detunings must be finite");
    panels.push_back({"custom", p});
  } else {
    panels = default_portraits();
  }
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  json summary = json::array();
  for (const auto& [label, mp] : panels) {
    Table field{{"z", "phi", "dphi", "dz", "energy"}, {}};
    for (const auto& s : meanfield::sample_portrait(mp, opt.n_z, opt.n_phi))
      field.rows.push_back({number(s.point.z), number(s.point.phi), number(s.velocity.dphi), number(s.velocity.dz),
                            number(s.energy)});
    Table fixed{{"z", "phi", "kind", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"}, {}};
    const auto pts = meanfield::fixed_points(mp);
    for (const auto& fp : pts)
      fixed.rows.push_back({number(fp.point.z), number(fp.point.phi), meanfield::kind_name(fp.kind),
                            number(fp.eigenvalues[0].real()), number(fp.eigenvalues[0].imag()),
                            number(fp.eigenvalues[1].real()), number(fp.eigenvalues[1].imag())});
    out.write("portrait_" + label + format_extension(cfg.format), field.text(cfg.format));
    out.write("fixed_points_" + label + format_extension(cfg.format), fixed.text(cfg.format));
    summary.push_back({{"panel", label}, {"gamma_tilde", {mp.gx, mp.gy, mp.gz}}, {"fixed_points", pts.size()}});
    log << "panel " << label << ": " << pts.size() << " fixed points\n";
  }
  json manifest = base_manifest("portrait", cfg, start);
  manifest["summary"] = summary;
  out.commit(manifest);
  return manifest;
}

json cmd_evolve(const ExperimentConfig& base, std::ostream& log) {
  ExperimentConfig cfg = base;
  cfg.pulse = false;
  cfg.validate();
  warn_weak_noise(cfg, log);
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  NoiseSpec noise = cfg.noise;
  if (noise.noiseless()) noise.m = 1;
  const EnsembleEvolution ens(cfg.sim, noise, cfg.schedule());
  const auto rows = qfi_series(ens);
  out.write(std::string("series") + format_extension(cfg.format), series_text(rows, cfg.sim.chi, cfg.format));
  if (cfg.dump_states) out.write("states.txt", states_dump(ens, ens.time_count() - 1));
  json manifest = base_manifest("evolve", cfg, start);
  manifest["snapshots"] = write_snapshots(ens, cfg, out);
  log << "evolve: " << rows.size() << " time points, M = " << ens.realizations() << "\n";
  out.commit(manifest);
  return manifest;
}

json cmd_storage(const ExperimentConfig& cfg, std::ostream& log) {
  require(cfg.pulse, "storage runs need the pulse");
  cfg.validate();
  warn_weak_noise(cfg, log);
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  NoiseSpec noise = cfg.noise;
  if (noise.noiseless()) noise.m = 1;
  const EnsembleEvolution ens(cfg.sim, noise, cfg.schedule());
  const auto rows = qfi_series(ens);
  out.write(std::string("series") + format_extension(cfg.format), series_text(rows, cfg.sim.chi, cfg.format));
  if (cfg.dump_states) out.write("states.txt", states_dump(ens, ens.time_count() - 1));
  const double tau = optimal_pulse_time(cfg.sim);
  json manifest = base_manifest("storage", cfg, start);
  const double t_end = ens.schedule().times.back();
  if (t_end >= 2.0 * tau) {
    const PlateauStats p = plateau(rows, cfg.sim.n, tau, 2.0 * tau, std::min(60.0 * tau, t_end));
    manifest["plateau"] = plateau_json(p);
    log << "plateau F_Q/N^2: mean " << p.mean << ", min " << p.min << "\n";
  }
  manifest["snapshots"] = write_snapshots(ens, cfg, out);
  out.commit(manifest);
  return manifest;
}

json cmd_decay_fit(const ExperimentConfig& cfg, const DecayOptions& opt, std::ostream& log) {
  cfg.noise.validate();
  require(opt.points >= 2, "decay grid needs at least 2 points");
  for (int n : opt.n_values) require(n >= 1, "particle numbers must be positive");
  for (double s : opt.sigmas) require(std::isfinite(s) && s > 0.0, "sweep sigmas must be positive");
  for (int a : opt.axes) require(a == 1 || a == 2, "sweep axes must be y or z");
  require(opt.n_values.size() * opt.sigmas.size() * opt.axes.size() >= 4, "a fit needs at least 4 sweep points");
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  Table table{{"axis", "n", "sigma", "n_sigma", "tau_half"}, {}};
  std::vector<DecayPoint> points;
  json flagged = json::array();
  for (int axis : opt.axes)
    for (int n : opt.n_values)
      for (double s : opt.sigmas) {
        const auto th = measure_half_decay(n, s * cfg.sim.chi, axis, cfg.noise.m, cfg.noise.seed, opt.points);
        const char* name = axis == 1 ? "y" : "z";
        if (!th) {
          flagged.push_back({{"axis", name}, {"n", n}, {"sigma", s}});
          log << "warning: no half decay within the grid for axis " << name << ", N = " << n << ", sigma = " << s << "\n";
          continue;
        }
        // chi t_1/2 against N sigma / chi
        points.push_back({n, s, cfg.sim.chi * *th});
        table.rows.push_back({name, std::to_string(n), number(s), number(n * s), number(cfg.sim.chi * *th)});
      }
  const DecayModel fit = half_decay_fit(points);
  out.write(std::string("decay_points") + format_extension(cfg.format), table.text(cfg.format));
  json report = {{"amplitude", fit.amplitude}, {"exponent", fit.exponent}, {"exponent_stderr", fit.exponent_stderr},
                 {"residuals", fit.residuals}, {"points", points.size()}, {"non_decaying", flagged}};
  out.write("decay_fit.json", report.dump(2) + "\n");
  log << "tau_1/2 = " << fit.amplitude << " (N sigma)^" << fit.exponent << "\n";
  json manifest = base_manifest("decay-fit", cfg, start);
  manifest["fit"] = report;
  out.commit(manifest);
  return manifest;
}

json cmd_parity(const ExperimentConfig& cfg, const ParityOptions& opt, std::ostream& log) {
  cfg.validate();
  for (double s : opt.sigma_x) require(std::isfinite(s) && s >= 0.0, "sigma-x values must be non-negative");
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  Table table{{"chi_t", "sigma_x", "f_q", "f_parity", "n_y", "n_z"}, {}};
  if (opt.classical) table.columns.push_back("f_classical");
  json summary = json::array();
  for (double s : opt.sigma_x) {
    NoiseSpec noise = cfg.noise;
    noise.sigma = {s * cfg.sim.chi, 0.0, 0.0};
    if (s == 0.0) noise.m = 1;
    const EnsembleEvolution ens(cfg.sim, noise, cfg.schedule());
    const auto rows = parity_comparison(ens, opt.classical);
    double worst = 0.0;
    bool bounded = true;
    for (const auto& r : rows) {
      std::vector<std::string> line{number(cfg.sim.chi * r.t), number(s), number(r.f_q), number(r.f_parity),
                                    number(r.n.y()), number(r.n.z())};
      if (opt.classical) line.push_back(number(r.f_classical));
      table.rows.push_back(line);
      if (r.f_parity > r.f_q * (1 + 1e-8) + 1e-8) bounded = false;
      if (r.f_q > 0) worst = std::max(worst, (r.f_q - r.f_parity) / r.f_q);
    }
    summary.push_back({{"sigma_x", s}, {"bound_holds", bounded}, {"max_relative_gap", worst}});
    log << "sigma_x = " << s << ": max relative gap " << worst << (bounded ? "" : " (bound violated)") << "\n";
  }
  out.write(std::string("parity") + format_extension(cfg.format), table.text(cfg.format));
  json manifest = base_manifest("parity", cfg, start);
  manifest["summary"] = summary;
  out.commit(manifest);
  return manifest;
}

json cmd_phasespace(const ExperimentConfig& base, std::ostream& log) {
  ExperimentConfig cfg = base;
  if (cfg.snapshots.empty()) cfg.snapshots = {optimal_pulse_time(cfg.sim) * cfg.sim.chi};
  cfg.validate();
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  NoiseSpec noise = cfg.noise;
  if (noise.noiseless()) noise.m = 1;
  // only the snapshot times are needed
  Schedule sched = cfg.schedule();
  Schedule sparse = sched;
  sparse.times.clear();
  sparse.times.push_back(sched.times.front());
  for (double chi_t : cfg.snapshots) sparse.times.push_back(chi_t / cfg.sim.chi);
  std::sort(sparse.times.begin(), sparse.times.end());
  sparse.times.erase(std::unique(sparse.times.begin(), sparse.times.end()), sparse.times.end());
  if (sparse.pulse && sparse.pulse_time > sparse.times.back()) sparse.times.push_back(sparse.pulse_time);
  const EnsembleEvolution ens(cfg.sim, noise, sparse);
  json manifest = base_manifest("phasespace", cfg, start);
  manifest["snapshots"] = write_snapshots(ens, cfg, out);
  log << "phasespace: " << cfg.snapshots.size() << " snapshot(s)\n";
  out.commit(manifest);
  return manifest;
}

json cmd_validate_noise(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.sim.validate();
  cfg.noise.validate();
  const auto start = Clock::now();
  OutputSet out(cfg.out_dir);
  const WeakNoiseVerdict v = validate_weak_noise(cfg.noise, cfg.sim);
  Table table{{"condition", "sigma_over_chi", "bound", "limit", "margin", "pass"}, {}};
  for (const auto& c : v.checks) {
    table.rows.push_back({c.name, number(c.value), number(c.bound), number(c.limit), number(c.margin), c.pass ? "yes" : "no"});
    log << c.name << ": " << (c.pass ? "pass" : "FAIL") << " (margin " << c.margin << ")\n";
  }
  out.write(std::string("noise_check") + format_extension(cfg.format), table.text(cfg.format));
  json manifest = base_manifest("validate-noise", cfg, start);
  manifest["pass"] = v.pass();
  out.commit(manifest);
  return manifest;
}

}  // namespace tact::io
