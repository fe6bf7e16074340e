#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "hqsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic-resonator qubit coupling simulator"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  hqsim::cli::GlobalOptions opts;
  std::string config, prefix;
  app.add_option("--config", config, "Scenario file (YAML)")->check(CLI::ExistingFile);
  app.add_option("--out-prefix", prefix, "Output path prefix (overrides the scenario)");
  app.add_option("--threads", opts.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "Recorded in the run manifest");
  app.add_flag("--validate", opts.validate_only, "Validate the scenario and exit");
  app.set_version_flag("--version", HQSIM_VERSION);

  const std::map<std::string, std::string> help{
      {"permittivity", "Tabulate eps_par and eps_perp over frequency"},
      {"bands", "List the hyperbolic bands of the material"},
      {"fieldmap", "Dipole field intensity in the x-z plane"},
      {"foci", "Focal spacing and widths in a cylindrical waveguide"},
      {"resonance", "Pair-response map over d/R and frequency with the resonance locus"},
      {"coupling-sweep", "J and Gamma along the resonance as R varies"},
      {"design-window", "Loss length, critical spacer and feasibility verdict"},
      {"evolve", "Integrate the master equation through a control schedule"},
      {"gate", "Average fidelity of the exchange iSWAP gate"}};
  for (const auto& name : hqsim::cli::subcommands()) app.add_subcommand(name, help.at(name));

  CLI11_PARSE(app, argc, argv);
  if (!config.empty()) opts.config = config;
  if (!prefix.empty()) opts.out_prefix = prefix;
  const std::string sub = app.get_subcommands().front()->get_name();
  return hqsim::cli::run(sub, opts, std::cout, std::cerr);
}
