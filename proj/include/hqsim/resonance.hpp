#pragma once

#include <cstddef>
#include <vector>

#include "hqsim/material.hpp"
#include "hqsim/optics.hpp"

namespace hqsim {

struct ResonatorGeometry {
  double R = 100.0;  // nm
  double d = 50.0;   // nm
  double h = 5.0;    // nm
  cplx eps_spacer{11.7, 0.0};
  double eccentricity = 0.0;

  void validate() const;
};

enum class Placement { OppositeSides, Self };

// Which algebraic form of the Bessel-zero series to sum.
enum class SeriesForm { Geometric, Direct };

struct SeriesOptions {
  SeriesForm form = SeriesForm::Geometric;
  bool adaptive = true;  // grow n_terms until the tail bound meets rel_tol
  double rel_tol = 1e-10;
  std::size_t max_terms = 1u << 20;
  bool require_hyperbolic = true;  // reject omega outside a hyperbolic band
};

struct PairResponse {
  double J = 0.0;      // meV
  double Gamma = 0.0;  // meV
  std::size_t n_terms = 0;
  double truncation_estimate = 0.0;  // meV, bound on |J + i Gamma| of the omitted tail
};

struct HsrCoupling {
  double spacer_form = 0.0;  // 8 p^2 / (h*^3 + 2 h^3), meV
  double bounce_form = 0.0;  // 4 p^2 / (h^3 + 32 (|Im q / Re q| R)^3), meV
  double ratio = 0.0;        // spacer_form / bounce_form
  double h_star = 0.0;
};

struct JcCoupling {
  double g = 0.0;          // hbar g, meV
  bool vanishing = false;  // prefactor (1 - cos(pi m / 2)) / 2 is zero
};

enum class GammaMethod { ClosedForm, Quadrature, LossTangentForm };

struct DesignWindow {
  double h_star = 0.0;  // nm
  double h_c = 0.0;     // nm
  double ratio = 0.0;   // h_c / h_star, +inf when lossless
  double margin = 10.0;
  double h = 0.0;
  bool feasible = false;
};

struct ResonanceMapSpec {
  double d_over_R_min = 1.0, d_over_R_max = 5.0;
  double omega_min = 1340.0, omega_max = 1660.0;
  std::size_t n_d_over_R = 64, n_omega = 64;
  double p = 1.0;  // e*nm, both emitters

  double d_over_R(std::size_t i) const;
  double omega(std::size_t j) const;
};

// values[j * n_d_over_R + i] = log10 |J + i Gamma| in meV at (d_over_R(i), omega(j)).
// locus[i] = m = 1 resonance frequency for column i, NaN when none exists.
struct ResonanceMap {
  ResonanceMapSpec spec;
  std::vector<double> values;
  std::vector<double> locus;

  double at(std::size_t i_dR, std::size_t j_omega) const { return values[j_omega * spec.n_d_over_R + i_dR]; }
};

// Principal root sqrt(-eps_perp / eps_par), Re >= 0.
cplx anisotropy_root(const UniaxialPermittivity& eps);
// Root of -eps_perp / eps_par with Im >= 0 (fields decay along the bounce path).
cplx decaying_root(const UniaxialPermittivity& eps);

double hsr_frequency(const MaterialModel& model, double R, double d, int m, const HyperbolicBand& band);

double hsr_aspect(const MaterialModel& model, double omega, int m);

JcCoupling jc_coupling_g(double p, double omega, double d, double h, int m);

// Both emitters oriented along the symmetry axis; p1, p2 in e*nm.
PairResponse pair_response(const MaterialModel& model, const ResonatorGeometry& geom, double omega, double p1,
                           double p2, Placement placement, std::size_t n_terms = 1, const SeriesOptions& options = {});

// Axial component of a dipole moment; other orientations are not modeled.
double axial_moment(const Vec3& moment);

// Bounce reflection coefficient of the slab faces; |r| <= 1 for passive media.
cplx effective_reflection(const MaterialModel& model, const ResonatorGeometry& geom, double omega);

HsrCoupling coupling_J12_hsr(const MaterialModel& model, const ResonatorGeometry& geom, double omega_r, double p,
                             int order);

double elliptic_correction(double J, double e_h);

double gamma_self(const MaterialModel& model, const ResonatorGeometry& geom, double omega, double p,
                  GammaMethod method = GammaMethod::ClosedForm);

double bulk_axis_J12(const UniaxialPermittivity& eps, double p, double R);

// h_c = 40 (e^2 r_eg^2 / hbar omega)^{1/3}.
double critical_spacer(double omega, double r_eg);

DesignWindow design_window(const MaterialModel& model, const ResonatorGeometry& geom, double omega, double r_eg,
                           double margin = 10.0);

ResonanceMap resonance_map(const MaterialModel& model, const ResonatorGeometry& geom, const ResonanceMapSpec& spec,
                           unsigned threads = 0);

}  // namespace hqsim
