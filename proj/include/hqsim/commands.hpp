#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hqsim/scenario.hpp"

namespace hqsim::cli {

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> out_prefix;
  unsigned threads = 1;
  unsigned long long seed = 0;
  bool validate_only = false;
};

const std::vector<std::string>& subcommands();

// Returns the process exit code; errors are reported on `err`.
int run(const std::string& subcommand, const GlobalOptions& options, std::ostream& out, std::ostream& err);

// Individual commands; they write CSVs plus a manifest under the output prefix
// and return the list of files written (manifest last).
std::vector<std::filesystem::path> cmd_permittivity(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_bands(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_fieldmap(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_foci(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_resonance_map(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_coupling_sweep(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_design_window(const Scenario& s, const GlobalOptions& o, std::ostream& out);
std::vector<std::filesystem::path> cmd_evolve(const Scenario& s, const GlobalOptions& o, std::ostream& out);
// Sets `passed` to whether the fidelity reaches the scenario threshold.
std::vector<std::filesystem::path> cmd_gate(const Scenario& s, const GlobalOptions& o, std::ostream& out, bool& passed);

}  // namespace hqsim::cli
