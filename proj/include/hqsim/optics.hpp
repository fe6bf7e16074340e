#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

#include "hqsim/material.hpp"

namespace hqsim {

using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

// Cartesian frame with z along the crystal symmetry axis.
struct DipoleSource {
  Vec3 moment{0.0, 0.0, 1.0};    // e*nm
  Vec3 position{0.0, 0.0, 0.0};  // nm
};

// e_field in Gaussian units of e/nm^2; multiply p.E by units::kCoulombMeVnm for meV.
struct FieldSample {
  Vec3 position{};
  CVec3 e_field{};
  double intensity = 0.0;
};

struct FocalStructure {
  double delta_z = 0.0;        // nm
  std::vector<double> widths;  // nm, widths[m-1] for order m
  double a0 = 0.3;             // nm
};

struct FieldGrid {
  double rho_min = 0.0, rho_max = 1.0;
  double z_min = -1.0, z_max = 1.0;
  std::size_t n_rho = 64, n_z = 64;

  double rho(std::size_t i) const;
  double z(std::size_t j) const;
};

// intensity[j * n_rho + i] at (rho(i), z(j)); NaN marks points on the lossless cone.
struct FieldMap {
  FieldGrid grid;
  std::vector<double> intensity;

  double at(std::size_t i_rho, std::size_t j_z) const { return intensity[j_z * grid.n_rho + i_rho]; }
};

cplx tm_kperp(const UniaxialPermittivity& eps, double k_parallel, double omega);

double emission_angle(const UniaxialPermittivity& eps);

// Scalar potential of the point dipole, phi = -C p . grad(u^{-1/2}).
cplx dipole_potential(const UniaxialPermittivity& eps, const DipoleSource& src, const Vec3& r);

FieldSample dipole_field(const UniaxialPermittivity& eps, const DipoleSource& src, const Vec3& r);

FocalStructure waveguide_foci(const UniaxialPermittivity& eps, double R, double a0, std::size_t m_max, int m = 1);

// Samples the x-z plane through the source: r = src.position + (rho, 0, z).
FieldMap field_map(const UniaxialPermittivity& eps, const DipoleSource& src, const FieldGrid& grid,
                   unsigned threads = 0);

}  // namespace hqsim
