#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hqsim/commands.hpp"
#include "hqsim/errors.hpp"
#include "hqsim/io.hpp"
#include "hqsim/scenario.hpp"

using namespace hqsim;
namespace fs = std::filesystem;

namespace {

struct Csv {
  std::vector<std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw std::out_of_range("no column " + name);
  }
  double num(std::size_t r, const std::string& name) const { return std::stod(rows[r][col(name)]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  Csv c;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0)
      c.meta.push_back(line);
    else if (c.header.empty())
      c.header = split(line);
    else
      c.rows.push_back(split(line));
  }
  return c;
}

class Workdir {
 public:
  Workdir() : root_(fs::temp_directory_path() / ("hqsim_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  ~Workdir() { fs::remove_all(root_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = root_ / name;
    std::ofstream(p) << text;
    return p;
  }
  std::string prefix(const std::string& name) const { return (root_ / name).string(); }

 private:
  fs::path root_;
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cmd(const std::string& sub, const fs::path& config, const std::string& prefix, unsigned threads = 1) {
  cli::GlobalOptions o;
  o.config = config;
  o.out_prefix = prefix;
  o.threads = threads;
  std::ostringstream out, err;
  const int code = cli::run(sub, o, out, err);
  return {code, out.str(), err.str()};
}

const char* kVacuum = R"(schema_version: 1
name: vacuum
axis_parallel: {eps_inf: 1.0}
axis_perp: {eps_inf: 1.0}
)";

std::string slurp(const fs::path& p) { return io::read_file(p); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("scenario parsing") {
    SUBCASE("defaults") {
      const auto s = default_scenario();
      CHECK(s.frequency_mode == FrequencyMode::Tracking);
      CHECK(s.omega == 1490.0);
      CHECK(s.geometry.d == doctest::Approx(hsr_aspect(s.material, 1490.0, 1) * s.geometry.R));
      CHECK(s.material.name == "hBN-natural");
    }
    SUBCASE("unknown keys are reported with their line") {
      try {
        parse_scenario("schema_version: 1\ngeometry:\n  R_nm: 80\n  radius: 3\n", "x.yaml");
        FAIL("expected ConfigError");
      } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x.yaml:4") != std::string::npos);
        CHECK(std::string(e.what()).find("radius") != std::string::npos);
      }
      CHECK_THROWS_AS(parse_scenario("schema_version: 2\n", "x.yaml"), ConfigError);
      CHECK_THROWS_AS(parse_scenario("schema_version: 1\nmaterial: {loss_scale: -1}\n", "x.yaml"), ConfigError);
    }
    SUBCASE("tracking mode derives d and refuses an explicit one") {
      CHECK_THROWS_AS(parse_scenario("schema_version: 1\ngeometry: {d_nm: 40}\n", "x.yaml"), ConfigError);
      const auto s = parse_scenario(
          "schema_version: 1\nfrequency: {mode: fixed, omega_cm1: 1450}\ngeometry: {d_nm: 40}\n", "x.yaml");
      CHECK(s.geometry.d == 40.0);
      CHECK(scenario_omega(s) == 1450.0);
    }
    SUBCASE("resonance mode solves for omega") {
      const auto s =
          parse_scenario("schema_version: 1\nfrequency: {mode: resonance}\ngeometry: {d_nm: 50}\n", "x.yaml");
      CHECK(scenario_omega(s) == doctest::Approx(1376.2461119160048).epsilon(1e-9));
    }
    SUBCASE("loss scale composes with the file") {
      const auto s = parse_scenario("schema_version: 1\nmaterial: {loss_scale: 0.5}\n", "x.yaml");
      CHECK(s.material.loss_scale == doctest::Approx(0.5));
    }
  }

  TEST_CASE("subcommands") {
    Workdir w;
    const auto vac = w.write("vacuum.yaml", kVacuum);

    SUBCASE("permittivity of vacuum and the hBN sign change") {
      const auto cfg = w.write("v.yaml", "schema_version: 1\nmaterial: {file: " + vac.string() +
                                             "}\npermittivity: {grid: 11}\nfrequency: {mode: fixed}\n");
      REQUIRE(run_cmd("permittivity", cfg, w.prefix("v")).code == 0);
      const auto c = read_csv(w.prefix("v") + "_permittivity.csv");
      REQUIRE(c.rows.size() == 11);
      for (std::size_t r = 0; r < c.rows.size(); ++r) {
        CHECK(c.num(r, "re_eps_par") == 1.0);
        CHECK(c.num(r, "re_eps_perp") == 1.0);
        CHECK(c.num(r, "im_eps_perp") == 0.0);
      }

      const auto h =
          w.write("h.yaml", "schema_version: 1\npermittivity: {omega_min: 1300, omega_max: 1700, grid: 401}\n");
      REQUIRE(run_cmd("permittivity", h, w.prefix("h")).code == 0);
      const auto hc = read_csv(w.prefix("h") + "_permittivity.csv");
      int changes = 0;
      for (std::size_t r = 1; r < hc.rows.size(); ++r)
        if ((hc.num(r, "re_eps_perp") < 0.0) != (hc.num(r - 1, "re_eps_perp") < 0.0)) ++changes;
      CHECK(changes == 2);
    }
    SUBCASE("grid of one point") {
      const auto cfg =
          w.write("g.yaml", "schema_version: 1\npermittivity: {omega_min: 1500, omega_max: 1500, grid: 1}\n");
      REQUIRE(run_cmd("permittivity", cfg, w.prefix("g")).code == 0);
      CHECK(read_csv(w.prefix("g") + "_permittivity.csv").rows.size() == 1);
    }
    SUBCASE("bands") {
      const auto cfg = w.write("b.yaml", "schema_version: 1\n");
      const auto r = run_cmd("bands", cfg, w.prefix("b"));
      REQUIRE(r.code == 0);
      const auto c = read_csv(w.prefix("b") + "_bands.csv");
      REQUIRE(c.rows.size() == 2);
      CHECK(c.rows[0][c.col("type")] == "TypeI");
      CHECK(c.rows[1][c.col("type")] == "TypeII");
    }
    SUBCASE("coupling sweep over two orders") {
      const auto cfg = w.write("s.yaml",
                               "schema_version: 1\nmaterial: {loss_scale: 0.3333333333333333}\n"
                               "sweep: {R_nm: {start: 40, stop: 200, count: 9}, orders: [1, 2]}\n");
      REQUIRE(run_cmd("coupling-sweep", cfg, w.prefix("s"), 2).code == 0);
      const auto c = read_csv(w.prefix("s") + "_coupling_sweep.csv");
      REQUIRE(c.rows.size() == 18);
      for (std::size_t r = 0; r < 18; ++r) {
        const int m = std::stoi(c.rows[r][c.col("order")]);
        CHECK(m == (r < 9 ? 1 : 2));
        CHECK(c.num(r, "d_nm") / c.num(r, "R_nm") == doctest::Approx(m * c.num(0, "d_nm") / c.num(0, "R_nm")));
        CHECK(c.num(r, "Gamma_meV") > 0.0);
        const bool above = c.num(r, "J_meV") > 22.0;
        CHECK(c.rows[r][c.col("above_kT_room")] == (above ? "true" : "false"));
      }
      // Closed-form coupling falls with R for fixed order.
      for (std::size_t r = 1; r < 9; ++r) CHECK(c.num(r, "J_bounce_meV") < c.num(r - 1, "J_bounce_meV"));
    }
    SUBCASE("empty sweep is a configuration error") {
      const auto cfg = w.write("e.yaml", "schema_version: 1\nsweep: {R_nm: {start: 40, stop: 200, count: 0}}\n");
      const auto r = run_cmd("coupling-sweep", cfg, w.prefix("e"));
      CHECK(r.code == 2);
      CHECK(r.err.find("empty") != std::string::npos);
    }
    SUBCASE("resonance map 1x1") {
      const auto cfg = w.write("r.yaml",
                               "schema_version: 1\nresonance: {n_d_over_R: 1, n_omega: 1, d_over_R_min: 2,"
                               " omega_min: 1490}\n");
      REQUIRE(run_cmd("resonance", cfg, w.prefix("r")).code == 0);
      const auto c = read_csv(w.prefix("r") + "_resonance_map.csv");
      REQUIRE(c.rows.size() == 1);
      CHECK(std::isfinite(c.num(0, "log10_abs_response_meV")));
      CHECK(read_csv(w.prefix("r") + "_resonance_locus.csv").rows.size() == 1);
    }
    SUBCASE("lossless gate reaches unit fidelity") {
      const auto cfg =
          w.write("gate.yaml", "schema_version: 1\ngate: {J_meV: 45, Gamma_self_meV: 0, Gamma_cross_meV: 0}\n");
      const auto r = run_cmd("gate", cfg, w.prefix("gate"));
      REQUIRE(r.code == 0);
      const auto c = read_csv(w.prefix("gate") + "_gate_summary.csv");
      CHECK(c.num(0, "F_avg") == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(c.rows[0][c.col("passed")] == "true");
      CHECK(read_csv(w.prefix("gate") + "_gate_process.csv").rows.size() == 256);
    }
    SUBCASE("unreachable threshold gives exit code 3") {
      const auto cfg = w.write("gx.yaml", "schema_version: 1\ngate: {J_meV: 45, Gamma_self_meV: 0, threshold: 1.01}\n");
      CHECK(run_cmd("gate", cfg, w.prefix("gx")).code == 3);
    }
    SUBCASE("design window verdict") {
      const auto cfg = w.write("dw.yaml",
                               "schema_version: 1\nmaterial: {loss_scale: 0.3333333333333333}\n"
                               "frequency: {mode: fixed, omega_cm1: 1490}\ngeometry: {d_nm: 50, h_nm: 5}\n");
      const auto r = run_cmd("design-window", cfg, w.prefix("dw"));
      REQUIRE(r.code == 0);
      CHECK(r.out.find("verdict: feasible") != std::string::npos);
      const auto c = read_csv(w.prefix("dw") + "_design_window.csv");
      CHECK(c.num(0, "ratio") > 33.0);
    }
    SUBCASE("evolve with explicit couplings") {
      const auto cfg = w.write("ev.yaml", R"(schema_version: 1
qubits:
  - {omega_eg_meV: 180}
  - {omega_eg_meV: 180}
evolve:
  initial: eg
  couplings:
    J_meV: [[0, 30], [30, 0]]
    Gamma_meV: [[0.3, 0.1], [0.1, 0.3]]
  schedule:
    - {duration_ps: 0.02, theta: [1, 1]}
    - {duration_ps: 0.01, theta: [0, 0]}
)");
      REQUIRE(run_cmd("evolve", cfg, w.prefix("ev")).code == 0);
      const auto c = read_csv(w.prefix("ev") + "_trajectory.csv");
      REQUIRE(c.rows.size() > 2);
      CHECK(c.num(c.rows.size() - 1, "t_ps") == doctest::Approx(0.03));
      for (std::size_t r = 0; r < c.rows.size(); ++r) CHECK(c.num(r, "trace_error") < 1e-8);
    }
    SUBCASE("fieldmap and foci") {
      const auto cfg = w.write("fm.yaml", "schema_version: 1\nfieldmap: {n_rho: 17, n_z: 9, z_min: 10, z_max: 90}\n");
      REQUIRE(run_cmd("fieldmap", cfg, w.prefix("fm")).code == 0);
      CHECK(read_csv(w.prefix("fm") + "_fieldmap.csv").rows.size() == 17 * 9);
      REQUIRE(run_cmd("foci", cfg, w.prefix("fo")).code == 0);
      const auto f = read_csv(w.prefix("fo") + "_foci.csv");
      CHECK(f.rows.size() == 8);
    }
    SUBCASE("unknown subcommand and missing file") {
      CHECK(run_cmd("nonsense", w.write("n.yaml", "schema_version: 1\n"), w.prefix("n")).code == 2);
      CHECK(
          run_cmd("bands", w.write("m.yaml", "schema_version: 1\nmaterial: {file: nope.yaml}\n"), w.prefix("m")).code ==
          2);
    }
  }

  TEST_CASE("determinism and manifest") {
    Workdir w;
    const auto cfg = w.write("d.yaml",
                             "schema_version: 1\nresonance: {n_d_over_R: 12, n_omega: 10}\n"
                             "sweep: {R_nm: {start: 40, stop: 120, count: 5}}\n");
    REQUIRE(run_cmd("resonance", cfg, w.prefix("a"), 1).code == 0);
    REQUIRE(run_cmd("resonance", cfg, w.prefix("b"), 4).code == 0);
    CHECK(slurp(w.prefix("a") + "_resonance_map.csv") == slurp(w.prefix("b") + "_resonance_map.csv"));
    REQUIRE(run_cmd("coupling-sweep", cfg, w.prefix("a"), 1).code == 0);
    REQUIRE(run_cmd("coupling-sweep", cfg, w.prefix("b"), 3).code == 0);
    CHECK(slurp(w.prefix("a") + "_coupling_sweep.csv") == slurp(w.prefix("b") + "_coupling_sweep.csv"));

    const auto ma = io::RunManifest::from_json(slurp(w.prefix("a") + "_coupling-sweep_manifest.json"));
    const auto mb = io::RunManifest::from_json(slurp(w.prefix("b") + "_coupling-sweep_manifest.json"));
    CHECK(ma.subcommand == "coupling-sweep");
    CHECK(ma.input_digest.size() == 64);
    CHECK(ma.input_digest == mb.input_digest);
    CHECK(ma.threads == 1);
    CHECK(mb.threads == 3);
    REQUIRE(ma.outputs.size() == 1);
    CHECK(ma.outputs[0].columns.front() == "R_nm");
    CHECK(io::RunManifest::from_json(ma.to_json()).to_json() == ma.to_json());
  }

  TEST_CASE("validate flag") {
    Workdir w;
    cli::GlobalOptions o;
    o.validate_only = true;
    o.config = w.write("ok.yaml", "schema_version: 1\n");
    std::ostringstream out, err;
    CHECK(cli::run("gate", o, out, err) == 0);
    CHECK(out.str().find("scenario valid") != std::string::npos);
    o.config = w.write("bad.yaml", "schema_version: 1\nextra: 1\n");
    CHECK(cli::run("gate", o, out, err) == 2);
    CHECK(err.str().find("bad.yaml:2") != std::string::npos);
  }

}  // TEST_SUITE
