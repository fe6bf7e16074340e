#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hqsim {

using cplx = std::complex<double>;

struct LorentzOscillator {
  double omega_to = 0.0;  // cm^-1
  double omega_lo = 0.0;  // cm^-1
  double damping = 0.0;   // cm^-1
};

struct LorentzAxis {
  double eps_inf = 1.0;
  std::vector<LorentzOscillator> oscillators;

  // Accepts complex frequency so the analytic structure can be probed.
  cplx evaluate(cplx omega, double loss_scale) const;
  void validate() const;
};

struct MaterialModel {
  std::string name = "unnamed";
  LorentzAxis axis_parallel;  // symmetry axis
  LorentzAxis axis_perp;
  double loss_scale = 1.0;

  void validate() const;
};

struct UniaxialPermittivity {
  double omega = 0.0;  // cm^-1
  cplx eps_parallel{1.0, 0.0};
  cplx eps_perp{1.0, 0.0};
};

enum class BandType { TypeI, TypeII };

struct HyperbolicBand {
  double omega_low = 0.0;
  double omega_high = 0.0;
  BandType band_type = BandType::TypeII;

  double center() const { return 0.5 * (omega_low + omega_high); }
  bool contains(double omega) const { return omega > omega_low && omega < omega_high; }
};

const char* to_string(BandType t);

UniaxialPermittivity permittivity_at(const MaterialModel& model, double omega);

std::vector<HyperbolicBand> hyperbolic_bands(const MaterialModel& model, double omega_min, double omega_max,
                                             std::size_t grid_points = 4096);

MaterialModel loss_scaled(const MaterialModel& model, double factor);

bool is_hyperbolic(const UniaxialPermittivity& eps);

// Returns the band of `bands` containing omega, or throws DomainError.
const HyperbolicBand& band_containing(const std::vector<HyperbolicBand>& bands, double omega);

// Material parameter files (YAML). Violations are reported with the file
// name and line of the offending node.
MaterialModel parse_material(std::string_view text, const std::string& source_name);
MaterialModel load_material(const std::filesystem::path& path);

std::filesystem::path default_material_path();
MaterialModel hbn_default();

}  // namespace hqsim
