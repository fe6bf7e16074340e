#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hqsim/dynamics.hpp"
#include "hqsim/material.hpp"
#include "hqsim/optics.hpp"
#include "hqsim/resonance.hpp"

namespace hqsim {

struct LinearRange {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;

  std::vector<double> values() const;
};

// Tracking: omega is given and d is set from the resonance condition for `order`.
enum class FrequencyMode { Tracking, Fixed, Resonance, BandCenter };

struct Scenario {
  std::filesystem::path source;
  std::string text;  // raw scenario bytes, part of the input digest
  std::filesystem::path material_file;
  std::string material_text;
  MaterialModel material;  // loss_scale already applied
  double loss_scale = 1.0;

  ResonatorGeometry geometry;
  std::string band = "upper";
  FrequencyMode frequency_mode = FrequencyMode::Tracking;
  double omega = 1490.0;  // cm^-1, used in Tracking and Fixed modes
  int order = 1;
  double p = 1.0;  // e*nm, emitter dipole for the coupling calculations
  std::vector<QubitSpec> qubits;

  struct {
    double omega_min = 600.0, omega_max = 1800.0;
    std::size_t grid = 1201;
  } permittivity;

  struct {
    double omega_min = 600.0, omega_max = 1800.0;
    std::size_t grid = 4096;
  } bands;

  struct {
    std::optional<double> omega;
    FieldGrid grid{0.0, 200.0, -200.0, 200.0, 129, 129};
    DipoleSource source;
  } fieldmap;

  struct {
    double a0 = 0.3;
    std::size_t m_max = 8;
    int m = 1;
  } foci;

  ResonanceMapSpec resonance;

  struct {
    LinearRange R{20.0, 200.0, 19};
    std::vector<int> orders{1, 2};
  } sweep;

  struct {
    double r_eg = 2.0;
    double margin = 10.0;
  } design;

  struct {
    double threshold = 0.97;
    bool gamma_on = true;
    std::optional<double> J;
    std::optional<double> Gamma_self;
    std::optional<double> Gamma_cross;
    double tol = 1e-10;
  } gate;

  struct {
    std::string initial = "eg";
    double tol = 1e-10;
    std::optional<CouplingMatrix> couplings;
    ControlSchedule schedule;
  } evolve;

  std::string out_prefix = "out/run";
};

Scenario parse_scenario(const std::string& text, const std::filesystem::path& source);
Scenario load_scenario(const std::filesystem::path& path);
// Scenario built entirely from defaults (hBN material file, upper band).
Scenario default_scenario();

const HyperbolicBand& scenario_band(const Scenario& s, std::vector<HyperbolicBand>& storage);
double scenario_omega(const Scenario& s);

// Two-qubit couplings from the resonator: J and Gamma_12 from the pair series,
// Gamma_ii from the closed-form self decay.
CouplingMatrix geometry_couplings(const Scenario& s, double omega);

}  // namespace hqsim
