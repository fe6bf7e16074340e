#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hqsim/errors.hpp"
#include "hqsim/material.hpp"

namespace hqsim {

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void fail(const std::string& source, const YAML::Node& node, const std::string& what) {
  std::ostringstream msg;
  msg << source;
  if (node.IsDefined() && node.Mark().line >= 0) msg << ":" << node.Mark().line + 1;
  msg << ": " << what;
  throw ConfigError(msg.str());
}

double required_number(const std::string& source, const YAML::Node& parent, const char* key) {
  const YAML::Node node = parent[key];
  if (!node) fail(source, parent, std::string("missing key '") + key + "'");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(source, node, std::string("'") + key + "' must be a number");
  }
}

LorentzAxis parse_axis(const std::string& source, const YAML::Node& node, const char* key) {
  if (!node || !node.IsMap()) fail(source, node, std::string("missing mapping '") + key + "'");
  LorentzAxis axis;
  axis.eps_inf = required_number(source, node, "eps_inf");
  if (!(axis.eps_inf > 0.0)) fail(source, node["eps_inf"], "eps_inf must be positive");
  const YAML::Node list = node["oscillators"];
  if (list) {
    if (!list.IsSequence()) fail(source, list, "'oscillators' must be a list");
    for (const auto& item : list) {
      LorentzOscillator osc;
      osc.omega_to = required_number(source, item, "omega_TO");
      osc.omega_lo = required_number(source, item, "omega_LO");
      osc.damping = required_number(source, item, "damping");
      if (!(osc.omega_to > 0.0) || !(osc.omega_lo > osc.omega_to))
        fail(source, item, "oscillator requires omega_LO > omega_TO > 0");
      if (!(osc.damping >= 0.0)) fail(source, item, "oscillator damping must be >= 0");
      axis.oscillators.push_back(osc);
    }
  }
  return axis;
}

void check_expected_bands(const std::string& source, const YAML::Node& list, const MaterialModel& model) {
  if (!list) return;
  if (!list.IsSequence()) fail(source, list, "'expected_bands' must be a list");
  for (const auto& item : list) {
    const double lo = required_number(source, item, "omega_low");
    const double hi = required_number(source, item, "omega_high");
    const double tol = required_number(source, item, "tolerance");
    const auto bands = hyperbolic_bands(model, std::max(1.0, lo - 10.0 * tol), hi + 10.0 * tol);
    bool matched = false;
    for (const auto& b : bands) {
      if (std::abs(b.omega_low - lo) > tol || std::abs(b.omega_high - hi) > tol) continue;
      if (item["type"] && item["type"].as<std::string>() != to_string(b.band_type)) continue;
      matched = true;
    }
    if (!matched) {
      std::ostringstream msg;
      msg << "no hyperbolic band within " << tol << " cm^-1 of [" << lo << ", " << hi << "]";
      if (!bands.empty()) {
        msg << "; found";
        for (const auto& b : bands) msg << " [" << b.omega_low << ", " << b.omega_high << "]";
      }
      fail(source, item, msg.str());
    }
  }
}

}  // namespace

MaterialModel parse_material(std::string_view text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source_name << ":" << e.mark.line + 1 << ": " << e.msg;
    throw ConfigError(msg.str());
  }
  if (!root.IsMap()) throw ConfigError(source_name + ": top level must be a mapping");

  const YAML::Node version = root["schema_version"];
  if (!version) fail(source_name, root, "missing key 'schema_version'");
  if (version.as<int>() != kSchemaVersion) fail(source_name, version, "unsupported schema_version (expected 1)");

  MaterialModel model;
  if (root["name"]) model.name = root["name"].as<std::string>();
  if (root["loss_scale"]) {
    model.loss_scale = root["loss_scale"].as<double>();
    if (!(model.loss_scale > 0.0)) fail(source_name, root["loss_scale"], "loss_scale must be positive");
  }
  model.axis_parallel = parse_axis(source_name, root["axis_parallel"], "axis_parallel");
  model.axis_perp = parse_axis(source_name, root["axis_perp"], "axis_perp");
  check_expected_bands(source_name, root["expected_bands"], model);
  return model;
}

MaterialModel load_material(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open material file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_material(buf.str(), path.string());
}

std::filesystem::path default_material_path() {
  return std::filesystem::path(HQSIM_DATA_DIR) / "materials" / "hbn.yaml";
}

MaterialModel hbn_default() {
  static const MaterialModel model = load_material(default_material_path());
  return model;
}

}  // namespace hqsim
