#include "hqsim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "hqsim/errors.hpp"
#include "hqsim/io.hpp"
#include "hqsim/units.hpp"

namespace hqsim {

std::vector<double> LinearRange::values() const {
  std::vector<double> v;
  for (std::size_t k = 0; k < count; ++k)
    v.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1));
  return v;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (node.IsDefined() && node.Mark().line >= 0) msg << ":" << node.Mark().line + 1;
    msg << ": " << what;
    throw ConfigError(msg.str());
  }

  void allow(const YAML::Node& map, std::initializer_list<const char*> keys) const {
    if (!map) return;
    if (!map.IsMap()) fail(map, "expected a mapping");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "'");
    }
  }

  template <typename T>
  void get(const YAML::Node& map, const char* key, T& out) const {
    if (!map) return;
    const YAML::Node node = map[key];
    if (!node) return;
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, std::string("invalid value for '") + key + "'");
    }
  }

  template <typename T>
  void get_opt(const YAML::Node& map, const char* key, std::optional<T>& out) const {
    if (!map || !map[key]) return;
    T v{};
    get(map, key, v);
    out = v;
  }

  Eigen::MatrixXd matrix(const YAML::Node& node) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, "expected a non-empty list of rows");
    const auto n = static_cast<Eigen::Index>(node.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const YAML::Node row = node[static_cast<std::size_t>(i)];
      if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) fail(row, "matrix must be square");
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)].as<double>();
    }
    return m;
  }

 private:
  std::string source_;
};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& source) {
  const Reader rd(source.string());
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source.string() << ":" << e.mark.line + 1 << ": " << e.msg;
    throw ConfigError(msg.str());
  }
  Scenario s;
  s.source = source;
  s.text = text;
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  rd.allow(root, {"schema_version", "material", "geometry", "frequency", "dipole_enm", "qubits", "permittivity",
                  "bands", "fieldmap", "foci", "resonance", "sweep", "design", "gate", "evolve", "output"});
  int version = 1;
  rd.get(root, "schema_version", version);
  if (version != 1) rd.fail(root["schema_version"], "unsupported schema_version (expected 1)");

  const auto base = source.has_parent_path() ? source.parent_path() : std::filesystem::path(".");

  const YAML::Node mat = root["material"];
  rd.allow(mat, {"file", "loss_scale"});
  s.material_file = default_material_path();
  if (mat && mat["file"]) {
    std::filesystem::path p = mat["file"].as<std::string>();
    s.material_file = p.is_absolute() ? p : base / p;
    if (!std::filesystem::exists(s.material_file))
      rd.fail(mat["file"], "material file not found: " + s.material_file.string());
  }
  rd.get(mat, "loss_scale", s.loss_scale);
  if (!(s.loss_scale > 0.0)) rd.fail(mat["loss_scale"], "loss_scale must be positive");
  s.material_text = io::read_file(s.material_file);
  s.material = loss_scaled(parse_material(s.material_text, s.material_file.string()), s.loss_scale);

  const YAML::Node geo = root["geometry"];
  rd.allow(geo, {"R_nm", "d_nm", "h_nm", "eps_spacer_re", "eps_spacer_im", "eccentricity"});
  double er = s.geometry.eps_spacer.real(), ei = s.geometry.eps_spacer.imag();
  rd.get(geo, "R_nm", s.geometry.R);
  rd.get(geo, "d_nm", s.geometry.d);
  rd.get(geo, "h_nm", s.geometry.h);
  rd.get(geo, "eps_spacer_re", er);
  rd.get(geo, "eps_spacer_im", ei);
  rd.get(geo, "eccentricity", s.geometry.eccentricity);
  s.geometry.eps_spacer = {er, ei};
  try {
    s.geometry.validate();
  } catch (const DomainError& e) {
    rd.fail(geo, e.what());
  }

  const YAML::Node freq = root["frequency"];
  rd.allow(freq, {"band", "mode", "omega_cm1", "order"});
  rd.get(freq, "band", s.band);
  if (s.band != "upper" && s.band != "lower") rd.fail(freq["band"], "band must be 'upper' or 'lower'");
  std::string mode = "tracking";
  rd.get(freq, "mode", mode);
  if (mode == "tracking")
    s.frequency_mode = FrequencyMode::Tracking;
  else if (mode == "fixed")
    s.frequency_mode = FrequencyMode::Fixed;
  else if (mode == "resonance")
    s.frequency_mode = FrequencyMode::Resonance;
  else if (mode == "band_center")
    s.frequency_mode = FrequencyMode::BandCenter;
  else
    rd.fail(freq["mode"], "mode must be tracking, fixed, resonance or band_center");
  rd.get(freq, "omega_cm1", s.omega);
  rd.get(freq, "order", s.order);
  if (!(s.omega > 0.0)) rd.fail(freq["omega_cm1"], "omega_cm1 must be positive");
  if (s.order < 1) rd.fail(freq["order"], "order must be >= 1");
  if (s.frequency_mode == FrequencyMode::Tracking) {
    if (geo && geo["d_nm"]) rd.fail(geo["d_nm"], "d_nm is derived in tracking mode; use mode: fixed to set it");
    try {
      s.geometry.d = hsr_aspect(s.material, s.omega, s.order) * s.geometry.R;
    } catch (const DomainError& e) {
      rd.fail(freq, e.what());
    }
  }
  rd.get(root, "dipole_enm", s.p);

  if (const YAML::Node qs = root["qubits"]) {
    if (!qs.IsSequence()) rd.fail(qs, "'qubits' must be a list");
    for (const auto& qn : qs) {
      rd.allow(qn, {"omega_eg_meV", "p_enm", "gamma_background_meV", "coherence_time_ps", "theta", "detuning_meV"});
      QubitSpec q;
      rd.get(qn, "omega_eg_meV", q.omega_eg);
      rd.get(qn, "p_enm", q.p);
      rd.get(qn, "gamma_background_meV", q.gamma_background);
      if (qn["coherence_time_ps"]) q.gamma_background = gamma_from_coherence_time(qn["coherence_time_ps"].as<double>());
      rd.get(qn, "theta", q.theta);
      rd.get(qn, "detuning_meV", q.detuning);
      if (q.gamma_background < 0.0 || q.p < 0.0) rd.fail(qn, "qubit requires p >= 0 and gamma_background >= 0");
      s.qubits.push_back(q);
    }
  }

  const YAML::Node perm = root["permittivity"];
  rd.allow(perm, {"omega_min", "omega_max", "grid"});
  rd.get(perm, "omega_min", s.permittivity.omega_min);
  rd.get(perm, "omega_max", s.permittivity.omega_max);
  rd.get(perm, "grid", s.permittivity.grid);
  if (s.permittivity.grid < 1 || !(s.permittivity.omega_min > 0.0) ||
      s.permittivity.omega_max < s.permittivity.omega_min)
    rd.fail(perm, "permittivity range must be positive with grid >= 1");

  const YAML::Node bands = root["bands"];
  rd.allow(bands, {"omega_min", "omega_max", "grid"});
  rd.get(bands, "omega_min", s.bands.omega_min);
  rd.get(bands, "omega_max", s.bands.omega_max);
  rd.get(bands, "grid", s.bands.grid);

  const YAML::Node fm = root["fieldmap"];
  rd.allow(fm, {"omega_cm1", "rho_min", "rho_max", "z_min", "z_max", "n_rho", "n_z", "moment"});
  rd.get_opt(fm, "omega_cm1", s.fieldmap.omega);
  rd.get(fm, "rho_min", s.fieldmap.grid.rho_min);
  rd.get(fm, "rho_max", s.fieldmap.grid.rho_max);
  rd.get(fm, "z_min", s.fieldmap.grid.z_min);
  rd.get(fm, "z_max", s.fieldmap.grid.z_max);
  rd.get(fm, "n_rho", s.fieldmap.grid.n_rho);
  rd.get(fm, "n_z", s.fieldmap.grid.n_z);
  if (fm && fm["moment"]) {
    const auto v = fm["moment"].as<std::vector<double>>();
    if (v.size() != 3) rd.fail(fm["moment"], "moment must have three components");
    s.fieldmap.source.moment = {v[0], v[1], v[2]};
  }

  const YAML::Node foci = root["foci"];
  rd.allow(foci, {"a0_nm", "m_max", "m"});
  rd.get(foci, "a0_nm", s.foci.a0);
  rd.get(foci, "m_max", s.foci.m_max);
  rd.get(foci, "m", s.foci.m);

  const YAML::Node rm = root["resonance"];
  rd.allow(rm, {"d_over_R_min", "d_over_R_max", "omega_min", "omega_max", "n_d_over_R", "n_omega"});
  rd.get(rm, "d_over_R_min", s.resonance.d_over_R_min);
  rd.get(rm, "d_over_R_max", s.resonance.d_over_R_max);
  rd.get(rm, "omega_min", s.resonance.omega_min);
  rd.get(rm, "omega_max", s.resonance.omega_max);
  rd.get(rm, "n_d_over_R", s.resonance.n_d_over_R);
  rd.get(rm, "n_omega", s.resonance.n_omega);
  s.resonance.p = s.p;

  const YAML::Node sw = root["sweep"];
  rd.allow(sw, {"R_nm", "orders"});
  if (sw && sw["R_nm"]) {
    const YAML::Node r = sw["R_nm"];
    rd.allow(r, {"start", "stop", "count"});
    rd.get(r, "start", s.sweep.R.start);
    rd.get(r, "stop", s.sweep.R.stop);
    rd.get(r, "count", s.sweep.R.count);
  }
  rd.get(sw, "orders", s.sweep.orders);

  const YAML::Node dw = root["design"];
  rd.allow(dw, {"r_eg_nm", "margin"});
  rd.get(dw, "r_eg_nm", s.design.r_eg);
  rd.get(dw, "margin", s.design.margin);

  const YAML::Node gate = root["gate"];
  rd.allow(gate, {"threshold", "gamma_on", "J_meV", "Gamma_self_meV", "Gamma_cross_meV", "tol"});
  rd.get(gate, "threshold", s.gate.threshold);
  rd.get(gate, "gamma_on", s.gate.gamma_on);
  rd.get_opt(gate, "J_meV", s.gate.J);
  rd.get_opt(gate, "Gamma_self_meV", s.gate.Gamma_self);
  rd.get_opt(gate, "Gamma_cross_meV", s.gate.Gamma_cross);
  rd.get(gate, "tol", s.gate.tol);

  const YAML::Node ev = root["evolve"];
  rd.allow(ev, {"initial", "tol", "couplings", "schedule"});
  rd.get(ev, "initial", s.evolve.initial);
  rd.get(ev, "tol", s.evolve.tol);
  if (ev && ev["couplings"]) {
    const YAML::Node c = ev["couplings"];
    rd.allow(c, {"J_meV", "Gamma_meV"});
    if (!c["J_meV"] || !c["Gamma_meV"]) rd.fail(c, "couplings require J_meV and Gamma_meV matrices");
    CouplingMatrix cm;
    cm.J = rd.matrix(c["J_meV"]);
    cm.Gamma = rd.matrix(c["Gamma_meV"]);
    cm.provenance = "scenario";
    try {
      cm.validate();
    } catch (const DomainError& e) {
      rd.fail(c, e.what());
    }
    s.evolve.couplings = cm;
  }
  if (ev && ev["schedule"]) {
    for (const auto& seg_node : ev["schedule"]) {
      rd.allow(seg_node, {"duration_ps", "theta", "drive_re_meV", "drive_im_meV", "detunings_meV"});
      ControlSegment seg;
      rd.get(seg_node, "duration_ps", seg.duration);
      if (!(seg.duration > 0.0)) rd.fail(seg_node, "segment duration must be positive");
      if (seg_node["theta"])
        for (const auto& v : seg_node["theta"]) seg.theta.push_back(v.as<int>() != 0);
      std::vector<double> re, im;
      rd.get(seg_node, "drive_re_meV", re);
      rd.get(seg_node, "drive_im_meV", im);
      if (!im.empty() && im.size() != re.size()) rd.fail(seg_node, "drive_re_meV and drive_im_meV differ in length");
      for (std::size_t k = 0; k < re.size(); ++k) seg.drive.emplace_back(re[k], im.empty() ? 0.0 : im[k]);
      rd.get(seg_node, "detunings_meV", seg.detunings);
      s.evolve.schedule.segments.push_back(seg);
    }
  }

  const YAML::Node out = root["output"];
  rd.allow(out, {"prefix"});
  rd.get(out, "prefix", s.out_prefix);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(io::read_file(path), path); }

Scenario default_scenario() { return parse_scenario("schema_version: 1\n", "defaults.yaml"); }

const HyperbolicBand& scenario_band(const Scenario& s, std::vector<HyperbolicBand>& storage) {
  storage = hyperbolic_bands(s.material, s.bands.omega_min, s.bands.omega_max, s.bands.grid);
  if (storage.empty()) throw DomainError("material has no hyperbolic band in the scanned range");
  auto it =
      s.band == "upper"
          ? std::max_element(storage.begin(), storage.end(), [](auto& a, auto& b) { return a.center() < b.center(); })
          : std::min_element(storage.begin(), storage.end(), [](auto& a, auto& b) { return a.center() < b.center(); });
  return *it;
}

double scenario_omega(const Scenario& s) {
  if (s.frequency_mode == FrequencyMode::Fixed || s.frequency_mode == FrequencyMode::Tracking) return s.omega;
  std::vector<HyperbolicBand> storage;
  const auto& band = scenario_band(s, storage);
  if (s.frequency_mode == FrequencyMode::BandCenter) return band.center();
  return hsr_frequency(s.material, s.geometry.R, s.geometry.d, s.order, band);
}

CouplingMatrix geometry_couplings(const Scenario& s, double omega) {
  if (s.qubits.size() != 2) throw DomainError("geometry couplings need exactly two qubits");
  const double p1 = s.qubits[0].p, p2 = s.qubits[1].p;
  const auto pair = pair_response(s.material, s.geometry, omega, p1, p2, Placement::OppositeSides);
  CouplingMatrix c = CouplingMatrix::zeros(2);
  c.J(0, 1) = c.J(1, 0) = pair.J;
  c.Gamma(0, 1) = c.Gamma(1, 0) = pair.Gamma;
  c.Gamma(0, 0) = pair_response(s.material, s.geometry, omega, p1, p1, Placement::Self).Gamma;
  c.Gamma(1, 1) = pair_response(s.material, s.geometry, omega, p2, p2, Placement::Self).Gamma;
  c.provenance = "pair series, opposite sides (J, Gamma_12) and self placement (Gamma_ii)";
  const double cross = std::abs(c.Gamma(0, 1)) / std::sqrt(c.Gamma(0, 0) * c.Gamma(1, 1));
  if (cross > 1.0 + 1e-12) throw DomainError("geometry couplings: |Gamma_12| exceeds sqrt(Gamma_11 Gamma_22)");
  if (cross > 0.1) {
    std::ostringstream msg;
    msg << "|Gamma_12| / sqrt(Gamma_11 Gamma_22) = " << cross << " is not small";
    c.notes.push_back(msg.str());
  }
  c.validate();
  return c;
}

}  // namespace hqsim
