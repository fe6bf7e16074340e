#include "hqsim/commands.hpp"

#include <cmath>
#include <iomanip>

#include "hqsim/errors.hpp"
#include "hqsim/io.hpp"
#include "hqsim/numerics.hpp"
#include "hqsim/units.hpp"

namespace hqsim::cli {

namespace {

using io::CsvWriter;
using io::format_number;
namespace fs = std::filesystem;

std::string prefix_of(const Scenario& s, const GlobalOptions& o) { return o.out_prefix ? *o.out_prefix : s.out_prefix; }

fs::path output_path(const Scenario& s, const GlobalOptions& o, const std::string& name) {
  return fs::path(prefix_of(s, o) + "_" + name);
}

class Run {
 public:
  Run(const Scenario& s, const GlobalOptions& o, std::string subcommand) : s_(s), o_(o) {
    manifest_.version = HQSIM_VERSION;
    manifest_.subcommand = std::move(subcommand);
    manifest_.seed = o.seed;
    manifest_.threads = o.threads;
    manifest_.timestamp = io::utc_timestamp();
    manifest_.input_digest =
        io::sha256_hex(manifest_.subcommand + "\n" + std::to_string(o.seed) + "\n" + s.text + "\n" + s.material_text);
  }

  void emit(const CsvWriter& csv) {
    csv.write();
    manifest_.outputs.push_back({csv.path().string(), csv.columns()});
    files_.push_back(csv.path());
  }

  std::vector<fs::path> finish() {
    const fs::path mpath = output_path(s_, o_, manifest_.subcommand + "_manifest.json");
    manifest_.write(mpath);
    files_.push_back(mpath);
    return files_;
  }

 private:
  const Scenario& s_;
  const GlobalOptions& o_;
  io::RunManifest manifest_;
  std::vector<fs::path> files_;
};

void write_trajectory(Run& run, const fs::path& path, const Trajectory& traj) {
  const std::size_t n = traj.front().state.qubits();
  const std::size_t d = std::size_t{1} << n;
  std::vector<std::string> cols{"t_ps"};
  for (std::size_t b = 0; b < d; ++b) cols.push_back("p_" + basis_label(n, b));
  cols.push_back("purity");
  cols.push_back("trace_error");
  CsvWriter csv(path, cols);
  for (const auto& pt : traj) {
    std::vector<double> row{pt.t};
    for (std::size_t b = 0; b < d; ++b)
      row.push_back(pt.state.rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real());
    row.push_back(pt.state.purity());
    row.push_back(std::abs(pt.state.trace() - 1.0));
    csv.row(row);
  }
  run.emit(csv);
}

std::vector<QubitSpec> gate_qubits(const Scenario& s, double omega) {
  std::vector<QubitSpec> q = s.qubits;
  if (q.empty()) q.resize(2);
  for (auto& spec : q)
    if (spec.omega_eg == 0.0) spec.omega_eg = units::cm1_to_meV(omega);
  return q;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"permittivity",   "bands",         "fieldmap", "foci", "resonance",
                                              "coupling-sweep", "design-window", "evolve",   "gate"};
  return names;
}

std::vector<fs::path> cmd_permittivity(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "permittivity");
  CsvWriter csv(output_path(s, o, "permittivity.csv"),
                {"omega_cm1", "re_eps_par", "im_eps_par", "re_eps_perp", "im_eps_perp"});
  const LinearRange range{s.permittivity.omega_min, s.permittivity.omega_max, s.permittivity.grid};
  for (double w : range.values()) {
    const auto e = permittivity_at(s.material, w);
    csv.row({w, e.eps_parallel.real(), e.eps_parallel.imag(), e.eps_perp.real(), e.eps_perp.imag()});
  }
  run.emit(csv);
  out << "wrote " << csv.path().string() << "\n";
  return run.finish();
}

std::vector<fs::path> cmd_bands(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "bands");
  CsvWriter csv(output_path(s, o, "bands.csv"), {"omega_low_cm1", "omega_high_cm1", "type", "center_meV"});
  for (const auto& b : hyperbolic_bands(s.material, s.bands.omega_min, s.bands.omega_max, s.bands.grid)) {
    csv.row_text({format_number(b.omega_low), format_number(b.omega_high), to_string(b.band_type),
                  format_number(units::cm1_to_meV(b.center()))});
    out << to_string(b.band_type) << " band [" << b.omega_low << ", " << b.omega_high << "] cm^-1, center "
        << units::cm1_to_meV(b.center()) << " meV\n";
  }
  run.emit(csv);
  return run.finish();
}

std::vector<fs::path> cmd_fieldmap(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "fieldmap");
  const double omega = s.fieldmap.omega ? *s.fieldmap.omega : scenario_omega(s);
  const auto eps = permittivity_at(s.material, omega);
  const auto map = field_map(eps, s.fieldmap.source, s.fieldmap.grid, o.threads);
  const auto& g = map.grid;
  std::vector<std::pair<std::string, std::string>> meta{
      {"omega_cm1", format_number(omega)},
      {"n_rho", std::to_string(g.n_rho)},
      {"n_z", std::to_string(g.n_z)},
      {"rho_range_nm", format_number(g.rho_min) + " " + format_number(g.rho_max)},
      {"z_range_nm", format_number(g.z_min) + " " + format_number(g.z_max)},
      {"moment_enm", format_number(s.fieldmap.source.moment[0]) + " " + format_number(s.fieldmap.source.moment[1]) +
                         " " + format_number(s.fieldmap.source.moment[2])},
      {"intensity_units", "(e/nm^2)^2, nan on the lossless resonance cone"}};
  if (is_hyperbolic(eps)) meta.emplace_back("emission_angle_rad", format_number(emission_angle(eps)));
  CsvWriter csv(output_path(s, o, "fieldmap.csv"), {"rho_nm", "z_nm", "intensity"}, meta);
  for (std::size_t j = 0; j < g.n_z; ++j)
    for (std::size_t i = 0; i < g.n_rho; ++i) csv.row({g.rho(i), g.z(j), map.at(i, j)});
  run.emit(csv);
  out << "wrote " << csv.path().string() << "\n";
  return run.finish();
}

std::vector<fs::path> cmd_foci(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "foci");
  const double omega = scenario_omega(s);
  const auto f = waveguide_foci(permittivity_at(s.material, omega), s.geometry.R, s.foci.a0, s.foci.m_max, s.foci.m);
  CsvWriter csv(output_path(s, o, "foci.csv"), {"m", "delta_z_nm", "width_nm"},
                {{"omega_cm1", format_number(omega)},
                 {"R_nm", format_number(s.geometry.R)},
                 {"a0_nm", format_number(s.foci.a0)}});
  for (std::size_t m = 1; m <= f.widths.size(); ++m) csv.row({static_cast<double>(m), f.delta_z, f.widths[m - 1]});
  run.emit(csv);
  out << "focal spacing " << f.delta_z << " nm at " << omega << " cm^-1\n";
  return run.finish();
}

std::vector<fs::path> cmd_resonance_map(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "resonance");
  const auto map = resonance_map(s.material, s.geometry, s.resonance, o.threads);
  const auto& sp = map.spec;
  CsvWriter grid(output_path(s, o, "resonance_map.csv"), {"d_over_R", "omega_cm1", "log10_abs_response_meV"},
                 {{"R_nm", format_number(s.geometry.R)},
                  {"h_nm", format_number(s.geometry.h)},
                  {"p_enm", format_number(sp.p)},
                  {"n_d_over_R", std::to_string(sp.n_d_over_R)},
                  {"n_omega", std::to_string(sp.n_omega)},
                  {"loss_scale", format_number(s.material.loss_scale)}});
  for (std::size_t j = 0; j < sp.n_omega; ++j)
    for (std::size_t i = 0; i < sp.n_d_over_R; ++i) grid.row({sp.d_over_R(i), sp.omega(j), map.at(i, j)});
  run.emit(grid);
  CsvWriter locus(output_path(s, o, "resonance_locus.csv"), {"d_over_R", "omega_cm1"});
  for (std::size_t i = 0; i < sp.n_d_over_R; ++i) locus.row({sp.d_over_R(i), map.locus[i]});
  run.emit(locus);
  out << "wrote " << grid.path().string() << " and " << locus.path().string() << "\n";
  return run.finish();
}

std::vector<fs::path> cmd_coupling_sweep(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "coupling-sweep");
  const auto radii = s.sweep.R.values();
  if (radii.empty() || s.sweep.orders.empty()) throw ConfigError("coupling sweep: empty sweep range");
  const double omega = scenario_omega(s);

  struct Cell {
    int m;
    double R;
    std::vector<double> values;
  };
  std::vector<Cell> cells;
  for (int m : s.sweep.orders)
    for (double R : radii) cells.push_back({m, R, {}});

  parallel_for(cells.size(), o.threads, [&](std::size_t k) {
    Cell& c = cells[k];
    ResonatorGeometry g = s.geometry;
    g.R = c.R;
    g.d = hsr_aspect(s.material, omega, c.m) * c.R;
    const auto closed = coupling_J12_hsr(s.material, g, omega, s.p, c.m);
    const auto series = pair_response(s.material, g, omega, s.p, s.p, Placement::OppositeSides);
    const double gamma = pair_response(s.material, g, omega, s.p, s.p, Placement::Self).Gamma;
    c.values = {g.R,
                g.d,
                g.h,
                omega,
                series.J,
                gamma,
                series.J / gamma,
                closed.spacer_form,
                closed.bounce_form,
                series.Gamma,
                gamma_self(s.material, g, omega, s.p)};
  });

  CsvWriter csv(output_path(s, o, "coupling_sweep.csv"),
                {"R_nm", "d_nm", "h_nm", "omega_cm1", "J_meV", "Gamma_meV", "J_over_Gamma", "J_spacer_meV",
                 "J_bounce_meV", "Gamma12_meV", "Gamma11_closed_meV", "order", "above_kT_room"},
                {{"J_meV", "pair series, opposite sides"},
                 {"Gamma_meV", "pair series, self placement"},
                 {"Gamma11_closed_meV", "closed-form self decay"},
                 {"kT_room_meV", format_number(units::kRoomTemperatureMeV)}});
  for (const auto& c : cells) {
    std::vector<std::string> row;
    for (double v : c.values) row.push_back(format_number(v));
    row.push_back(std::to_string(c.m));
    row.push_back(c.values[4] > units::kRoomTemperatureMeV ? "true" : "false");
    csv.row_text(row);
  }
  run.emit(csv);
  out << "wrote " << csv.path().string() << " (" << cells.size() << " rows)\n";
  return run.finish();
}

std::vector<fs::path> cmd_design_window(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "design-window");
  const double omega = scenario_omega(s);
  const auto w = design_window(s.material, s.geometry, omega, s.design.r_eg, s.design.margin);
  out << std::setprecision(6) << "omega = " << omega << " cm^-1\n"
      << "h*    = " << w.h_star << " nm\n"
      << "h_c   = " << w.h_c << " nm\n"
      << "ratio = " << w.ratio << "\n"
      << "h     = " << w.h << " nm, margin " << w.margin << "\n"
      << "verdict: " << (w.feasible ? "feasible" : "infeasible") << "\n";
  CsvWriter csv(output_path(s, o, "design_window.csv"),
                {"omega_cm1", "h_star_nm", "h_c_nm", "ratio", "h_nm", "margin", "feasible"});
  csv.row_text({format_number(omega), format_number(w.h_star), format_number(w.h_c), format_number(w.ratio),
                format_number(w.h), format_number(w.margin), w.feasible ? "true" : "false"});
  run.emit(csv);
  return run.finish();
}

std::vector<fs::path> cmd_evolve(const Scenario& s, const GlobalOptions& o, std::ostream& out) {
  Run run(s, o, "evolve");
  if (s.evolve.schedule.segments.empty()) throw ConfigError("evolve: scenario has no schedule");
  const double omega = s.evolve.couplings ? 0.0 : scenario_omega(s);
  const auto qubits = gate_qubits(s, omega);
  const CouplingMatrix c = s.evolve.couplings ? *s.evolve.couplings : geometry_couplings(s, omega);
  const auto rho0 = DensityMatrix::from_label(s.evolve.initial);
  IntegratorOptions opts;
  opts.tol = s.evolve.tol;
  const auto traj = evolve(rho0, qubits, c, s.evolve.schedule, opts);
  write_trajectory(run, output_path(s, o, "trajectory.csv"), traj);
  out << "evolved " << traj.size() - 1 << " steps to t = " << traj.back().t << " ps\n";
  return run.finish();
}

std::vector<fs::path> cmd_gate(const Scenario& s, const GlobalOptions& o, std::ostream& out, bool& passed) {
  Run run(s, o, "gate");
  const double omega = scenario_omega(s);
  const auto qubits = gate_qubits(s, omega);
  CouplingMatrix c = CouplingMatrix::zeros(2);
  if (!s.gate.J || !s.gate.Gamma_self) {
    Scenario sq = s;
    sq.qubits = qubits;
    c = geometry_couplings(sq, omega);
  }
  if (s.gate.J) c.J(0, 1) = c.J(1, 0) = *s.gate.J;
  if (s.gate.Gamma_self) c.Gamma(0, 0) = c.Gamma(1, 1) = *s.gate.Gamma_self;
  if (s.gate.Gamma_cross) c.Gamma(0, 1) = c.Gamma(1, 0) = *s.gate.Gamma_cross;
  c.validate();

  IntegratorOptions opts;
  opts.tol = s.gate.tol;
  const auto g = iswap_gate(qubits, c, s.gate.gamma_on, opts, o.threads);
  passed = g.avg_fidelity >= s.gate.threshold;

  CsvWriter summary(
      output_path(s, o, "gate_summary.csv"),
      {"omega_cm1", "J_meV", "Gamma11_meV", "Gamma22_meV", "Gamma12_meV", "t_gate_ps", "F_avg", "threshold", "passed"});
  summary.row_text({format_number(omega), format_number(c.J(0, 1)), format_number(c.Gamma(0, 0)),
                    format_number(c.Gamma(1, 1)), format_number(c.Gamma(0, 1)), format_number(g.gate_time),
                    format_number(g.avg_fidelity), format_number(s.gate.threshold), passed ? "true" : "false"});
  run.emit(summary);
  write_trajectory(run, output_path(s, o, "gate_trajectory.csv"), g.sample_trajectory);

  CsvWriter process(output_path(s, o, "gate_process.csv"), {"row", "col", "re", "im"});
  for (Eigen::Index r = 0; r < g.process.rows(); ++r)
    for (Eigen::Index k = 0; k < g.process.cols(); ++k)
      process.row({static_cast<double>(r), static_cast<double>(k), g.process(r, k).real(), g.process(r, k).imag()});
  run.emit(process);

  out << std::setprecision(9) << "J = " << c.J(0, 1) << " meV, Gamma11 = " << c.Gamma(0, 0)
      << " meV, Gamma12 = " << c.Gamma(0, 1) << " meV\n"
      << "t_gate = " << g.gate_time << " ps\n"
      << "F_avg = " << g.avg_fidelity << " (threshold " << s.gate.threshold << ", " << (passed ? "pass" : "fail")
      << ")\n";
  for (const auto& note : c.notes) out << "note: " << note << "\n";
  return run.finish();
}

int run(const std::string& subcommand, const GlobalOptions& options, std::ostream& out, std::ostream& err) {
  try {
    set_default_threads(options.threads);
    const Scenario s = options.config ? load_scenario(*options.config) : default_scenario();
    if (options.validate_only) {
      out << "scenario valid: " << s.source.string() << " (material " << s.material.name << ", loss_scale "
          << s.material.loss_scale << ")\n";
      return 0;
    }
    if (subcommand == "permittivity")
      cmd_permittivity(s, options, out);
    else if (subcommand == "bands")
      cmd_bands(s, options, out);
    else if (subcommand == "fieldmap")
      cmd_fieldmap(s, options, out);
    else if (subcommand == "foci")
      cmd_foci(s, options, out);
    else if (subcommand == "resonance")
      cmd_resonance_map(s, options, out);
    else if (subcommand == "coupling-sweep")
      cmd_coupling_sweep(s, options, out);
    else if (subcommand == "design-window")
      cmd_design_window(s, options, out);
    else if (subcommand == "evolve")
      cmd_evolve(s, options, out);
    else if (subcommand == "gate") {
      bool passed = false;
      cmd_gate(s, options, out, passed);
      return passed ? 0 : 3;
    } else {
      err << "unknown subcommand '" << subcommand << "'\n";
      return 2;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hqsim::cli
