#include "hqsim/optics.hpp"

#include <cmath>
#include <limits>

#include "hqsim/errors.hpp"
#include "hqsim/numerics.hpp"
#include "hqsim/units.hpp"

namespace hqsim {

double FieldGrid::rho(std::size_t i) const {
  return n_rho == 1 ? rho_min : rho_min + (rho_max - rho_min) * static_cast<double>(i) / static_cast<double>(n_rho - 1);
}

double FieldGrid::z(std::size_t j) const {
  return n_z == 1 ? z_min : z_min + (z_max - z_min) * static_cast<double>(j) / static_cast<double>(n_z - 1);
}

cplx tm_kperp(const UniaxialPermittivity& eps, double k_parallel, double omega) {
  if (!(omega > 0.0)) throw DomainError("tm_kperp: omega must be positive");
  if (eps.eps_perp == 0.0) throw SingularityError("tm_kperp: eps_perp = 0");
  const double k0 = units::vacuum_k0(omega);
  const cplx k2 = eps.eps_parallel * (k0 * k0 - k_parallel * k_parallel / eps.eps_perp);
  cplx k = std::sqrt(k2);
  if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0)) k = -k;
  return k;
}

double emission_angle(const UniaxialPermittivity& eps) {
  const double a = eps.eps_parallel.real();
  const double b = eps.eps_perp.real();
  if (!(a * b < 0.0)) throw DomainError("emission_angle: permittivity is not hyperbolic");
  return std::atan(std::sqrt(-a / b));
}

namespace {

struct ConeGeometry {
  cplx s;       // eps_perp / eps_par, weight of z^2
  cplx prefac;  // 1 / (eps_par sqrt(eps_par / eps_perp))
};

ConeGeometry cone_geometry(const UniaxialPermittivity& eps) {
  if (eps.eps_parallel == 0.0) throw DomainError("dipole_field: eps_parallel = 0");
  if (eps.eps_perp == 0.0) throw SingularityError("dipole_field: eps_perp = 0");
  return {eps.eps_perp / eps.eps_parallel, 1.0 / (eps.eps_parallel * std::sqrt(eps.eps_parallel / eps.eps_perp))};
}

Vec3 offset(const DipoleSource& src, const Vec3& r) {
  const Vec3 x{r[0] - src.position[0], r[1] - src.position[1], r[2] - src.position[2]};
  if (x[0] == 0.0 && x[1] == 0.0 && x[2] == 0.0)
    throw DomainError("dipole_field: evaluation point coincides with the source");
  return x;
}

cplx quadratic_form(const ConeGeometry& g, const Vec3& x) {
  const cplx u = x[0] * x[0] + x[1] * x[1] + g.s * x[2] * x[2];
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  if (std::abs(u) <= 1e-14 * r2) throw SingularityError("dipole_field: point lies on the resonance cone");
  return u;
}

}  // namespace

cplx dipole_potential(const UniaxialPermittivity& eps, const DipoleSource& src, const Vec3& r) {
  const auto g = cone_geometry(eps);
  const Vec3 x = offset(src, r);
  const cplx u = quadratic_form(g, x);
  const cplx w[3] = {1.0, 1.0, g.s};
  const cplx u32 = std::pow(u, -1.5);
  cplx p_dot_grad{0.0, 0.0};
  for (int a = 0; a < 3; ++a) p_dot_grad += src.moment[a] * (-w[a] * x[a] * u32);
  return -g.prefac * p_dot_grad;
}

FieldSample dipole_field(const UniaxialPermittivity& eps, const DipoleSource& src, const Vec3& r) {
  const auto g = cone_geometry(eps);
  const Vec3 x = offset(src, r);
  const cplx u = quadratic_form(g, x);
  const cplx w[3] = {1.0, 1.0, g.s};
  // f = u^{-1/2}; d_b d_a f = -w_a delta_ab u^{-3/2} + 3 w_a x_a w_b x_b u^{-5/2}.
  const cplx u32 = std::pow(u, -1.5);
  const cplx u52 = u32 / u;
  cplx px{0.0, 0.0};
  for (int a = 0; a < 3; ++a) px += src.moment[a] * w[a] * x[a];

  FieldSample out;
  out.position = r;
  for (int b = 0; b < 3; ++b) {
    const cplx grad_b = -src.moment[b] * w[b] * u32 + 3.0 * px * w[b] * x[b] * u52;
    out.e_field[b] = g.prefac * grad_b;
    out.intensity += std::norm(out.e_field[b]);
  }
  return out;
}

FocalStructure waveguide_foci(const UniaxialPermittivity& eps, double R, double a0, std::size_t m_max, int m) {
  if (!(R > 0.0)) throw DomainError("waveguide_foci: R must be positive");
  if (!is_hyperbolic(eps)) throw DomainError("waveguide_foci: permittivity is not hyperbolic");
  const cplx ratio = -eps.eps_perp / eps.eps_parallel;
  const cplx q = std::sqrt(ratio);
  if (!(q.real() > 0.0)) throw DomainError("waveguide_foci: Re sqrt(-eps_perp/eps_par) must be positive");

  FocalStructure out;
  out.a0 = a0;
  out.delta_z = 2.0 * m * R / q.real();
  const double scale = std::pow(std::abs(eps.eps_perp / eps.eps_parallel), 0.75);
  for (std::size_t k = 1; k <= m_max; ++k) {
    const double width = 2.0 * static_cast<double>(k) * std::abs(q.imag()) / scale * R;
    out.widths.push_back(std::max(a0, width));
  }
  return out;
}

FieldMap field_map(const UniaxialPermittivity& eps, const DipoleSource& src, const FieldGrid& grid, unsigned threads) {
  if (grid.n_rho == 0 || grid.n_z == 0) throw DomainError("field_map: empty grid");
  FieldMap out;
  out.grid = grid;
  out.intensity.assign(grid.n_rho * grid.n_z, 0.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  parallel_for(grid.n_z, threads == 0 ? default_threads() : threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < grid.n_rho; ++i) {
      const Vec3 r{src.position[0] + grid.rho(i), src.position[1], src.position[2] + grid.z(j)};
      if (r == src.position) throw DomainError("field_map: grid contains the source point");
      try {
        out.intensity[j * grid.n_rho + i] = dipole_field(eps, src, r).intensity;
      } catch (const SingularityError&) {
        out.intensity[j * grid.n_rho + i] = nan;
      }
    }
  });
  return out;
}

}  // namespace hqsim
