#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hqsim/errors.hpp"
#include "hqsim/optics.hpp"
#include "hqsim/units.hpp"

using namespace hqsim;

namespace {

UniaxialPermittivity make_eps(cplx par, cplx perp, double omega = 1000.0) { return {omega, par, perp}; }

double eq1_residual(const UniaxialPermittivity& e, double kpar, cplx kperp) {
  const double k0 = units::vacuum_k0(e.omega);
  const cplx rhs = e.eps_perp * e.eps_parallel * k0 * k0;
  return std::abs(e.eps_parallel * kpar * kpar + e.eps_perp * kperp * kperp - rhs) / std::abs(rhs);
}

double magnitude(const CVec3& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2])); }

// z of the intensity maximum in column i, restricted to z > 0.
double column_peak(const FieldMap& map, std::size_t i) {
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t j = 0; j < map.grid.n_z; ++j) {
    if (map.grid.z(j) <= 0.0) continue;
    const double v = map.at(i, j);
    if (!std::isnan(v) && v > best_val) {
      best_val = v;
      best = j;
    }
  }
  return map.grid.z(best);
}

double ridge_angle(const FieldMap& map) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < map.grid.n_rho; ++i) {
    const double rho = map.grid.rho(i);
    num += rho * column_peak(map, i);
    den += rho * rho;
  }
  return std::atan(num / den);
}

}  // namespace

TEST_SUITE("optics") {
  TEST_CASE("tm_kperp isotropic limit") {
    const auto e = make_eps(2.5, 2.5);
    const cplx k = tm_kperp(e, 0.0, e.omega);
    CHECK(k.real() == doctest::Approx(std::sqrt(2.5) * units::vacuum_k0(e.omega)).epsilon(1e-14));
    CHECK(k.imag() == doctest::Approx(0.0));
  }

  TEST_CASE("tm_kperp hyperboloid asymptote") {
    const auto e = make_eps(-3.0, 1.2);
    const double kpar = 1e6 * units::vacuum_k0(e.omega);
    const cplx k = tm_kperp(e, kpar, e.omega);
    CHECK(k.real() / kpar == doctest::Approx(std::sqrt(2.5)).epsilon(1e-9));
    CHECK(std::abs(k.imag()) < 1e-9 * k.real());
  }

  TEST_CASE("tm_kperp satisfies the dispersion relation") {
    const auto e = make_eps(-3.0, 1.2);
    const double kpar = 10.0 * units::vacuum_k0(e.omega);
    const cplx k = tm_kperp(e, kpar, e.omega);
    CHECK(eq1_residual(e, kpar, k) < 1e-12);
    CHECK(k.imag() >= 0.0);
  }

  TEST_CASE("tm_kperp errors") {
    CHECK_THROWS_AS(tm_kperp(make_eps(1.0, 0.0), 1.0, 1000.0), SingularityError);
    CHECK_THROWS_AS(tm_kperp(make_eps(1.0, 1.0), 1.0, 0.0), DomainError);
  }

  TEST_CASE("property: dispersion residual and decaying branch") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0), loss(0.0, 2.0), kk(0.0, 50.0);
    for (int n = 0; n < 500; ++n) {
      const auto e = make_eps({u(rng), loss(rng)}, {u(rng), loss(rng)}, 500.0 + 100.0 * std::abs(u(rng)));
      if (std::abs(e.eps_perp) < 1e-3) continue;
      const double kpar = kk(rng) * units::vacuum_k0(e.omega);
      const cplx k = tm_kperp(e, kpar, e.omega);
      CHECK(eq1_residual(e, kpar, k) < 1e-10);
      CHECK(k.imag() >= 0.0);
    }
  }

  TEST_CASE("emission_angle") {
    CHECK(emission_angle(make_eps(-2.0, 2.0)) == doctest::Approx(std::numbers::pi / 4));
    CHECK(emission_angle(make_eps(-1e-10, 2.0)) < 1e-4);
    CHECK(emission_angle(make_eps(-3.0, 1.2)) == doctest::Approx(1.0068536854342678).epsilon(1e-14));
    CHECK_THROWS_AS(emission_angle(make_eps(2.0, 2.0)), DomainError);
  }

  TEST_CASE("dipole_field isotropic limit is the vacuum static dipole") {
    const auto e = make_eps(1.0, 1.0);
    DipoleSource src;
    const auto f = dipole_field(e, src, {0.0, 0.0, 10.0});
    CHECK(f.e_field[2].real() == doctest::Approx(2.0 / 1000.0).epsilon(1e-14));
    CHECK(std::abs(f.e_field[0]) == doctest::Approx(0.0));
    CHECK(f.intensity == doctest::Approx(4e-6).epsilon(1e-12));
  }

  TEST_CASE("dipole_field is linear in p") {
    const auto e = permittivity_at(hbn_default(), 1500.0);
    DipoleSource a{{0.3, 0.1, 1.0}, {1.0, 2.0, 3.0}};
    DipoleSource b = a;
    for (auto& c : b.moment) c *= 2.0;
    for (const Vec3& r : {Vec3{10.0, 0.0, 5.0}, Vec3{-4.0, 7.0, 30.0}, Vec3{2.0, -3.0, -8.0}}) {
      const auto fa = dipole_field(e, a, r), fb = dipole_field(e, b, r);
      for (int k = 0; k < 3; ++k)
        CHECK(std::abs(fb.e_field[k] - 2.0 * fa.e_field[k]) <= 1e-12 * std::abs(fb.e_field[k]) + 1e-300);
    }
  }

  TEST_CASE("hyperbolic dipole field is concentrated on the cone") {
    const auto e = permittivity_at(hbn_default(), 1500.0);
    const double theta = emission_angle(e);
    const double off = theta - 20.0 * std::numbers::pi / 180.0;
    DipoleSource src;
    const double r = 50.0;
    const auto on = dipole_field(e, src, {r * std::cos(theta), 0.0, r * std::sin(theta)});
    const auto away = dipole_field(e, src, {r * std::cos(off), 0.0, r * std::sin(off)});
    CHECK(magnitude(on.e_field) > 10.0 * magnitude(away.e_field));
  }

  TEST_CASE("property: reflection symmetry for an axial dipole") {
    const auto e = permittivity_at(hbn_default(), 1450.0);
    DipoleSource src;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(1.0, 80.0);
    for (int n = 0; n < 100; ++n) {
      const double rho = u(rng), z = u(rng);
      const auto up = dipole_field(e, src, {rho, 0.0, z});
      const auto down = dipole_field(e, src, {rho, 0.0, -z});
      CHECK(std::abs(up.e_field[2] - down.e_field[2]) <= 1e-12 * std::abs(up.e_field[2]));
      CHECK(std::abs(up.e_field[0] + down.e_field[0]) <= 1e-12 * std::abs(up.e_field[0]));
    }
  }

  TEST_CASE("property: analytic gradient matches finite differences of the potential") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (double omega : {900.0, 1450.0, 1550.0}) {
      const auto e = permittivity_at(hbn_default(), omega);
      const DipoleSource src{{0.2, -0.4, 1.0}, {0.5, 0.5, 0.5}};
      int checked = 0;
      while (checked < 40) {
        const Vec3 r{u(rng), u(rng), u(rng)};
        const auto f = dipole_field(e, src, r);
        const double scale = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        const double h = 2e-4 * scale;
        bool ok = true;
        CVec3 fd{};
        for (int a = 0; a < 3; ++a) {
          auto phi = [&](double s) {
            Vec3 p = r;
            p[a] += s * h;
            return dipole_potential(e, src, p);
          };
          fd[a] = -(phi(-2.0) - 8.0 * phi(-1.0) + 8.0 * phi(1.0) - phi(2.0)) / (12.0 * h);
        }
        // Skip points so close to the cone that the step straddles the resonance.
        if (magnitude(f.e_field) * scale * scale * scale > 1e3) ok = false;
        if (!ok) continue;
        for (int a = 0; a < 3; ++a) CHECK(std::abs(fd[a] - f.e_field[a]) <= 1e-6 * magnitude(f.e_field));
        ++checked;
      }
    }
  }

  TEST_CASE("dipole_field errors") {
    const auto lossless = make_eps(-3.0, 1.2);
    DipoleSource src;
    const double rho = 10.0;
    CHECK_THROWS_AS(dipole_field(lossless, src, {rho, 0.0, rho * std::sqrt(2.5)}), SingularityError);
    CHECK_THROWS_AS(dipole_field(lossless, src, src.position), DomainError);
    CHECK_THROWS_AS(dipole_field(make_eps(0.0, 1.0), src, {1.0, 0.0, 0.0}), DomainError);
  }

  TEST_CASE("waveguide_foci") {
    SUBCASE("unit anisotropy ratio gives 2R spacing") {
      const auto f = waveguide_foci(make_eps(2.0, -2.0), 100.0, 0.3, 3);
      CHECK(f.delta_z == doctest::Approx(200.0));
    }
    SUBCASE("lossless widths collapse to the atomic cutoff") {
      const auto f = waveguide_foci(make_eps(2.0, -3.0), 100.0, 0.3, 5);
      for (double w : f.widths) CHECK(w == doctest::Approx(0.3));
    }
    SUBCASE("hBN widths grow linearly once above a0") {
      const auto e = permittivity_at(hbn_default(), 1490.0);
      const auto f = waveguide_foci(e, 100.0, 0.3, 6);
      REQUIRE(f.widths[0] > 0.3);
      for (std::size_t m = 1; m < f.widths.size(); ++m)
        CHECK(f.widths[m] == doctest::Approx(f.widths[0] * static_cast<double>(m + 1)).epsilon(1e-12));
    }
    SUBCASE("explicit order scales the spacing") {
      const auto e = permittivity_at(hbn_default(), 1490.0);
      CHECK(waveguide_foci(e, 100.0, 0.3, 1, 2).delta_z ==
            doctest::Approx(2.0 * waveguide_foci(e, 100.0, 0.3, 1).delta_z));
    }
    SUBCASE("non-hyperbolic input is rejected") {
      CHECK_THROWS_AS(waveguide_foci(make_eps(2.0, 2.0), 100.0, 0.3, 3), DomainError);
    }
  }

  TEST_CASE("field_map isotropic: on-axis maximum at fixed radius") {
    const auto e = make_eps(1.0, 1.0);
    DipoleSource src;
    const double r = 20.0;
    const double axis = dipole_field(e, src, {0.0, 0.0, r}).intensity;
    for (double ang = 0.05; ang < std::numbers::pi / 2; ang += 0.05)
      CHECK(dipole_field(e, src, {r * std::sin(ang), 0.0, r * std::cos(ang)}).intensity < axis);
  }

  TEST_CASE("field_map ridge follows the emission angle") {
    const auto e = permittivity_at(hbn_default(), 1500.0);
    DipoleSource src;
    FieldGrid grid{5.0, 100.0, -150.0, 150.0, 48, 121};
    const auto map = field_map(e, src, grid, 2);
    const double theta = emission_angle(e);
    const double dz = (grid.z_max - grid.z_min) / static_cast<double>(grid.n_z - 1);
    for (std::size_t i = 0; i < grid.n_rho; ++i) {
      const double expected = grid.rho(i) * std::tan(theta);
      if (expected > grid.z_max) continue;
      CHECK(std::abs(column_peak(map, i) - expected) <= dz);
    }

    SUBCASE("doubling the resolution moves the ridge angle by less than half a cell") {
      FieldGrid fine = grid;
      fine.n_rho = 2 * grid.n_rho - 1;
      fine.n_z = 2 * grid.n_z - 1;
      const auto map2 = field_map(e, src, fine, 2);
      const double half_cell = 0.5 * dz / grid.rho_max;
      CHECK(std::abs(ridge_angle(map2) - ridge_angle(map)) < half_cell);
    }
  }

  TEST_CASE("field_map masks the lossless cone with NaN") {
    const auto e = make_eps(-1.0, 1.0);
    DipoleSource src;
    FieldGrid grid{1.0, 4.0, 1.0, 4.0, 4, 4};
    const auto map = field_map(e, src, grid);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j)
          CHECK(std::isnan(map.at(i, j)));
        else
          CHECK(map.at(i, j) > 0.0);
      }
    }
  }

  TEST_CASE("field_map rejects a grid containing the source") {
    FieldGrid grid{0.0, 1.0, -1.0, 1.0, 2, 3};
    CHECK_THROWS_AS(field_map(make_eps(1.0, 1.0), DipoleSource{}, grid), DomainError);
  }

}  // TEST_SUITE
