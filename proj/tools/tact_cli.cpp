// Command-line runner: portrait | evolve | storage | decay-fit | parity | phasespace | validate-noise

#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "tact/experiments.hpp"

using namespace tact;
using namespace tact::io;

int main(int argc, char** argv) {
  CLI::App app{"Two-axis countertwisting spin simulator: QFI, storage pulse, noise ensembles, phase space"};
  app.set_config("--config", "", "INI file; top-level keys set common options, [command] sections the rest");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::string format = "csv";
  app.add_option("--n", cfg.sim.n, "Particle number N")->capture_default_str();
  app.add_option("--chi", cfg.sim.chi, "Nonlinearity chi; times are exported as chi t")->capture_default_str();
  app.add_option("--sigma-x", cfg.noise.sigma[0], "Noise standard deviation along X")->capture_default_str();
  app.add_option("--sigma-y", cfg.noise.sigma[1], "Noise standard deviation along Y")->capture_default_str();
  app.add_option("--sigma-z", cfg.noise.sigma[2], "Noise standard deviation along Z")->capture_default_str();
  app.add_option("--m", cfg.noise.m, "Ensemble size M")->capture_default_str();
  app.add_option("--seed", cfg.noise.seed, "RNG seed")->capture_default_str();
  app.add_option("--t-max", cfg.t_max, "End of the time grid in chi t (0: 60 tau)")->capture_default_str();
  app.add_option("--grid", cfg.grid, "Number of grid points")->capture_default_str();
  app.add_option("--pulse-offset-time", cfg.pulse_offset_time, "Fractional shift of the pulse time")->capture_default_str();
  app.add_option("--pulse-offset-angle", cfg.pulse_offset_angle, "Fractional shift of the pulse angle")->capture_default_str();
  app.add_option("--snapshot", cfg.snapshots, "Phase-space snapshot times in chi t (repeatable)");
  app.add_option("--sphere-grid", [&](const CLI::results_t& r) {
        if (r.size() != 2) return false;
        cfg.sphere_theta = std::stoi(r[0]);
        cfg.sphere_phi = std::stoi(r[1]);
        return true;
      }, "Husimi/Wigner grid size: n_theta n_phi")->expected(2);
  app.add_flag("--dump-states", cfg.dump_states, "Also write the final ensemble state vectors");
  app.add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", format, "Series and grid format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* portrait = app.add_subcommand("portrait", "Mean-field phase portraits and fixed-point tables");
  PortraitOptions popt;
  double gx = 0, gy = 0, gz = 0;
  auto* ogx = portrait->add_option("--gamma-x", gx, "Scaled detuning gamma_x/(N chi); any gamma flag selects a single custom panel");
  auto* ogy = portrait->add_option("--gamma-y", gy, "Scaled detuning gamma_y/(N chi)");
  auto* ogz = portrait->add_option("--gamma-z", gz, "Scaled detuning gamma_z/(N chi)");
  portrait->add_option("--n-z", popt.n_z, "Velocity samples along z")->capture_default_str();
  portrait->add_option("--n-phi", popt.n_phi, "Velocity samples along phi")->capture_default_str();

  auto* evolve = app.add_subcommand("evolve", "Free TACT evolution (no pulse): QFI, fidelity, entropy series");
  auto* storage = app.add_subcommand("storage", "Storage scheme with the pi/4 pulse at tau");

  auto* decay = app.add_subcommand("decay-fit", "Half-decay sweep over N and sigma with a power-law fit");
  DecayOptions dopt;
  std::vector<std::string> axes{"y", "z"};
  decay->add_option("--n-list", dopt.n_values, "Particle numbers")->capture_default_str();
  decay->add_option("--sigma-list", dopt.sigmas, "Noise strengths in units of chi")->capture_default_str();
  decay->add_option("--axes", axes, "Noise axes")->check(CLI::IsMember({"y", "z"}))->capture_default_str();
  decay->add_option("--points", dopt.points, "Post-pulse grid points")->capture_default_str();

  auto* parity = app.add_subcommand("parity", "QFI against the parity-measurement Fisher information");
  ParityOptions paropt;
  parity->add_option("--sigma-x-list", paropt.sigma_x, "X-noise strengths in units of chi")->capture_default_str();
  parity->add_flag("--classical", paropt.classical, "Also evaluate F(Pi, n) by finite differences");

  auto* phasespace = app.add_subcommand("phasespace", "Husimi and Wigner snapshots (default: at tau)");
  auto* validate = app.add_subcommand("validate-noise", "Check the weak-noise conditions");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.format = parse_format(format);
    if (portrait->parsed()) {
      if (ogx->count() || ogy->count() || ogz->count()) popt.custom = meanfield::Params{gx, gy, gz};
      cmd_portrait(cfg, popt, std::cerr);
    } else if (evolve->parsed()) {
      cmd_evolve(cfg, std::cerr);
    } else if (storage->parsed()) {
      cmd_storage(cfg, std::cerr);
    } else if (decay->parsed()) {
      dopt.axes.clear();
      for (const auto& a : axes) dopt.axes.push_back(a == "y" ? 1 : 2);
      cmd_decay_fit(cfg, dopt, std::cerr);
    } else if (parity->parsed()) {
      cmd_parity(cfg, paropt, std::cerr);
    } else if (phasespace->parsed()) {
      cmd_phasespace(cfg, std::cerr);
    } else if (validate->parsed()) {
      cmd_validate_noise(cfg, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
