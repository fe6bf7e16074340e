#include "hqsim/material.hpp"

#include <cmath>
#include <sstream>

#include "hqsim/errors.hpp"

namespace hqsim {

cplx LorentzAxis::evaluate(cplx omega, double loss_scale) const {
  cplx sum{0.0, 0.0};
  const cplx i{0.0, 1.0};
  for (const auto& osc : oscillators) {
    const double strength = osc.omega_lo * osc.omega_lo - osc.omega_to * osc.omega_to;
    const cplx denom = osc.omega_to * osc.omega_to - omega * omega - i * omega * loss_scale * osc.damping;
    sum += strength / denom;
  }
  return eps_inf * (1.0 + sum);
}

void LorentzAxis::validate() const {
  if (!(eps_inf > 0.0)) throw DomainError("eps_inf must be positive");
  for (const auto& osc : oscillators) {
    if (!(osc.omega_to > 0.0) || !(osc.omega_lo > osc.omega_to))
      throw DomainError("oscillator requires omega_LO > omega_TO > 0");
    if (!(osc.damping >= 0.0)) throw DomainError("oscillator damping must be >= 0");
  }
}

void MaterialModel::validate() const {
  axis_parallel.validate();
  axis_perp.validate();
  if (!(loss_scale > 0.0)) throw DomainError("loss_scale must be positive");
}

const char* to_string(BandType t) { return t == BandType::TypeI ? "TypeI" : "TypeII"; }

UniaxialPermittivity permittivity_at(const MaterialModel& model, double omega) {
  if (!(omega > 0.0)) throw DomainError("permittivity_at: omega must be positive");
  return {omega, model.axis_parallel.evaluate(omega, model.loss_scale),
          model.axis_perp.evaluate(omega, model.loss_scale)};
}

bool is_hyperbolic(const UniaxialPermittivity& eps) { return eps.eps_parallel.real() * eps.eps_perp.real() < 0.0; }

namespace {

double product_re(const MaterialModel& model, double omega) {
  const auto e = permittivity_at(model, omega);
  return (e.eps_parallel * e.eps_perp).real();
}

// Bisection on Re[eps_par * eps_perp]; `inside` is a point where the product is negative.
double refine_edge(const MaterialModel& model, double outside, double inside) {
  for (int it = 0; it < 200; ++it) {
    if (std::abs(inside - outside) <= 1e-9 * std::abs(inside)) break;
    const double mid = 0.5 * (outside + inside);
    if (product_re(model, mid) < 0.0)
      inside = mid;
    else
      outside = mid;
  }
  return 0.5 * (outside + inside);
}

}  // namespace

std::vector<HyperbolicBand> hyperbolic_bands(const MaterialModel& model, double omega_min, double omega_max,
                                             std::size_t grid_points) {
  if (grid_points < 2) throw DomainError("hyperbolic_bands: grid_points must be >= 2");
  if (!(omega_min > 0.0) || !(omega_max > omega_min))
    throw DomainError("hyperbolic_bands: omega range must be positive and increasing");

  const double step = (omega_max - omega_min) / static_cast<double>(grid_points - 1);
  auto grid = [&](std::size_t k) { return omega_min + step * static_cast<double>(k); };

  std::vector<HyperbolicBand> bands;
  std::size_t k = 0;
  while (k < grid_points) {
    if (product_re(model, grid(k)) >= 0.0) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k + 1 < grid_points && product_re(model, grid(k + 1)) < 0.0) ++k;
    const std::size_t last = k;
    ++k;

    HyperbolicBand band;
    band.omega_low = first == 0 ? grid(0) : refine_edge(model, grid(first - 1), grid(first));
    band.omega_high = last + 1 == grid_points ? grid(last) : refine_edge(model, grid(last + 1), grid(last));
    const auto mid = permittivity_at(model, 0.5 * (grid(first) + grid(last)));
    band.band_type = mid.eps_parallel.real() < 0.0 ? BandType::TypeI : BandType::TypeII;
    bands.push_back(band);
  }
  return bands;
}

MaterialModel loss_scaled(const MaterialModel& model, double factor) {
  if (!(factor > 0.0)) throw DomainError("loss_scaled: factor must be positive");
  MaterialModel out = model;
  out.loss_scale = model.loss_scale * factor;
  return out;
}

const HyperbolicBand& band_containing(const std::vector<HyperbolicBand>& bands, double omega) {
  for (const auto& b : bands)
    if (omega >= b.omega_low && omega <= b.omega_high) return b;
  std::ostringstream msg;
  msg << "omega = " << omega << " cm^-1 is not inside a hyperbolic band";
  throw DomainError(msg.str());
}

}  // namespace hqsim
