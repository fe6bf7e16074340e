#include "hqsim/resonance.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "hqsim/errors.hpp"
#include "hqsim/numerics.hpp"
#include "hqsim/units.hpp"

namespace hqsim {

namespace {

constexpr double kPi = units::pi;
constexpr double kE2 = units::kCoulombMeVnm;
// Lower bound on the spacing of consecutive J0 zeros (x2 - x1).
constexpr double kMinZeroSpacing = 3.11;

const cplx I{0.0, 1.0};

}  // namespace

void ResonatorGeometry::validate() const {
  if (!(R > 0.0)) throw DomainError("geometry: R must be positive");
  if (!(d > 0.0)) throw DomainError("geometry: d must be positive");
  if (!(h >= 0.0)) throw DomainError("geometry: h must be non-negative");
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) throw DomainError("geometry: eccentricity must be in [0, 1)");
  if (eps_spacer == 0.0) throw DomainError("geometry: spacer permittivity must be non-zero");
}

double ResonanceMapSpec::d_over_R(std::size_t i) const {
  if (n_d_over_R == 1) return d_over_R_min;
  return d_over_R_min + (d_over_R_max - d_over_R_min) * static_cast<double>(i) / static_cast<double>(n_d_over_R - 1);
}

double ResonanceMapSpec::omega(std::size_t j) const {
  if (n_omega == 1) return omega_min;
  return omega_min + (omega_max - omega_min) * static_cast<double>(j) / static_cast<double>(n_omega - 1);
}

cplx anisotropy_root(const UniaxialPermittivity& eps) {
  if (eps.eps_parallel == 0.0) throw DomainError("eps_parallel = 0");
  return std::sqrt(-eps.eps_perp / eps.eps_parallel);
}

cplx decaying_root(const UniaxialPermittivity& eps) {
  cplx q = anisotropy_root(eps);
  if (q.imag() < 0.0) q = -q;
  return q;
}

// ---------------------------------------------------------------------------
// Resonance condition

double hsr_frequency(const MaterialModel& model, double R, double d, int m, const HyperbolicBand& band) {
  if (!(R > 0.0) || !(d > 0.0)) throw DomainError("hsr_frequency: R and d must be positive");
  if (m < 1) throw DomainError("hsr_frequency: order m must be >= 1");
  const double target = 4.0 * R * m / d;
  auto f = [&](double w) { return anisotropy_root(permittivity_at(model, w)).real() - target; };

  // Damping makes Re q non-monotone near the TO edge, so scan for every bracket.
  constexpr int kScan = 2048;
  const double lo = band.omega_low, hi = band.omega_high;
  const double margin = 1e-9 * (hi - lo);
  std::vector<double> grid(kScan + 1), vals(kScan + 1);
  double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
  for (int k = 0; k <= kScan; ++k) {
    grid[k] = lo + margin + (hi - lo - 2.0 * margin) * k / kScan;
    vals[k] = f(grid[k]);
    qmin = std::min(qmin, vals[k] + target);
    qmax = std::max(qmax, vals[k] + target);
  }

  double best = std::numeric_limits<double>::quiet_NaN();
  double best_loss = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    double a = grid[k], b = grid[k + 1];
    double root;
    if (vals[k] == 0.0) {
      root = a;
    } else if (vals[k] * vals[k + 1] < 0.0) {
      boost::uintmax_t iters = 200;
      auto tol = [](double x, double y) { return std::abs(x - y) <= 4e-16 * std::abs(x); };
      const auto br = boost::math::tools::toms748_solve(f, a, b, vals[k], vals[k + 1], tol, iters);
      root = 0.5 * (br.first + br.second);
    } else {
      continue;
    }
    const cplx q = anisotropy_root(permittivity_at(model, root));
    const double loss = std::abs(q.imag() / q.real());
    if (loss < best_loss) {
      best_loss = loss;
      best = root;
    }
  }
  if (std::isnan(best)) {
    std::ostringstream msg;
    msg << "no super-resonance in [" << lo << ", " << hi << "] cm^-1 for 4Rm/d = " << target
        << "; attainable Re sqrt(-eps_perp/eps_par) range is [" << qmin << ", " << qmax << "]";
    throw NoResonanceError(msg.str(), qmin, qmax);
  }
  return best;
}

double hsr_aspect(const MaterialModel& model, double omega, int m) {
  const auto eps = permittivity_at(model, omega);
  if (!is_hyperbolic(eps)) throw DomainError("hsr_aspect: omega is outside the hyperbolic bands");
  return 4.0 * m / anisotropy_root(eps).real();
}

JcCoupling jc_coupling_g(double p, double omega, double d, double h, int m) {
  if (!(d > 0.0) || !(h > 0.0)) throw DomainError("jc_coupling_g: d and h must be positive");
  if (!(omega > 0.0)) throw DomainError("jc_coupling_g: omega must be positive");
  JcCoupling out;
  if (m % 4 == 0) {
    out.vanishing = true;
    return out;
  }
  const double pref = 0.5 * (1.0 - std::cos(kPi * m / 2.0));
  const double hw = units::cm1_to_meV(omega);
  out.g = pref * std::sqrt(p * p * kE2 * hw / (3.0 * d * h * h));
  return out;
}

// ---------------------------------------------------------------------------
// Bessel-zero series

double axial_moment(const Vec3& moment) {
  if (moment[0] != 0.0 || moment[1] != 0.0)
    throw NotImplementedError("only dipoles along the symmetry axis are modeled");
  return moment[2];
}

namespace {

struct SlabFaces {
  cplx q;      // decaying root
  cplx eta;    // eps_par q / eps_spacer
  cplx r_eff;  // ((1 + i eta) / (1 - i eta))^2
  cplx P;      // 1 / (1 + (i/2)(1/eta - eta))
};

SlabFaces slab_faces(const UniaxialPermittivity& eps, cplx eps_spacer) {
  SlabFaces s;
  s.q = decaying_root(eps);
  s.eta = eps.eps_parallel * s.q / eps_spacer;
  s.r_eff = std::pow((1.0 + I * s.eta) / (1.0 - I * s.eta), 2);
  s.P = 1.0 / (1.0 + 0.5 * I * (1.0 / s.eta - s.eta));
  return s;
}

// Per-term resonant factor; E = exp(2 i psi), with Im psi >= 0 so |E| <= 1.
cplx term_factor(const SlabFaces& s, cplx psi, Placement placement, SeriesForm form) {
  const cplx e1 = std::exp(I * psi);
  const cplx E = e1 * e1;
  const cplx& eta = s.eta;
  if (placement == Placement::OppositeSides) {
    if (form == SeriesForm::Geometric) return 2.0 * s.P * e1 / (1.0 - s.r_eff * E);
    // 1 / D with D = cos psi + (1/2)(1/eta - eta) sin psi, scaled by 2 exp(i psi).
    const cplx D2 = (1.0 + E) - 0.5 * I * (1.0 / eta - eta) * (E - 1.0);
    return 2.0 * e1 / D2;
  }
  if (form == SeriesForm::Geometric) return -((1.0 + I * eta) / (1.0 - I * eta)) * (E - 1.0) / (1.0 - s.r_eff * E);
  // (1 + eta^2) sin psi / (2 eta cos psi + (1 - eta^2) sin psi), scaled by 2 exp(i psi).
  const cplx num = -I * (1.0 + eta * eta) * (E - 1.0);
  const cplx den = 2.0 * eta * (E + 1.0) - I * (1.0 - eta * eta) * (E - 1.0);
  return num / den;
}

// Upper bound on |term_factor| for every term beyond zero x, or NaN if none is available.
// For opposite sides the exp(-Im psi) decay is left to tail_sum_bound.
double factor_bound(const SlabFaces& s, double im_rate, double x, Placement placement) {
  const double decay = std::exp(-2.0 * im_rate * x);
  const double rr = std::abs(s.r_eff) * decay;
  if (rr >= 1.0 - 1e-12) return std::numeric_limits<double>::quiet_NaN();
  if (placement == Placement::OppositeSides) return 2.0 * std::abs(s.P) / (1.0 - rr);
  return std::sqrt(std::abs(s.r_eff)) * (1.0 + decay) / (1.0 - rr);
}

// Bound on sum_{k > N} x_k^2 exp(-c x_k) given x_N.
double tail_sum_bound(double xN, double c) {
  const double integral = std::exp(-c * xN) * (xN * xN / c + 2.0 * xN / (c * c) + 2.0 / (c * c * c));
  double bound = integral / kMinZeroSpacing;
  if (xN < 2.0 / c) {
    const double xp = 2.0 / c;
    bound += xp * xp * std::exp(-c * xp);
  }
  return bound;
}

}  // namespace

cplx effective_reflection(const MaterialModel& model, const ResonatorGeometry& geom, double omega) {
  return slab_faces(permittivity_at(model, omega), geom.eps_spacer).r_eff;
}

PairResponse pair_response(const MaterialModel& model, const ResonatorGeometry& geom, double omega, double p1,
                           double p2, Placement placement, std::size_t n_terms, const SeriesOptions& options) {
  geom.validate();
  if (n_terms < 1) throw DomainError("pair_response: n_terms must be >= 1");
  const auto eps = permittivity_at(model, omega);
  if (options.require_hyperbolic && !is_hyperbolic(eps))
    throw DomainError("pair_response: omega is outside the hyperbolic bands");
  if (placement == Placement::Self && geom.h == 0.0)
    throw DivergenceError("pair_response: self response diverges for a point emitter at h = 0");

  const SlabFaces s = slab_faces(eps, geom.eps_spacer);
  const double a = geom.h / geom.R;
  const double b = s.q.imag() * geom.d / geom.R;  // Im psi per unit x
  const double c = a + (placement == Placement::OppositeSides ? b : 0.0);
  if (options.adaptive && !(c > 0.0))
    throw DivergenceError("pair_response: series does not converge (h = 0 and no absorption)");
  const double pref = 2.0 * kPi * kE2 * (p1 * p2) / (geom.R * geom.R * geom.R);

  cplx sum{0.0, 0.0};
  double max_factor = 0.0;
  std::size_t n = 0;
  double estimate = std::numeric_limits<double>::infinity();
  auto zeros = bessel_j0_zeros(std::max<std::size_t>(n_terms, 256));
  const std::size_t limit = options.adaptive ? options.max_terms : n_terms;

  auto tail_estimate = [&](double xN) {
    if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
    double m = factor_bound(s, b, xN, placement);
    if (std::isnan(m)) m = 2.0 * max_factor;
    return std::abs(pref) * m * tail_sum_bound(xN, c);
  };

  while (n < limit) {
    if (n >= zeros->size()) zeros = bessel_j0_zeros(2 * zeros->size());
    const double x = (*zeros)[n];
    const cplx psi = s.q * x * geom.d / geom.R;  // bounce phase; the trig arguments scale with d/R
    const cplx f = term_factor(s, psi, placement, options.form);
    max_factor = std::max(max_factor, std::abs(f));
    sum += x * x * std::exp(-a * x) * f;
    ++n;
    if (n >= n_terms && options.adaptive) {
      estimate = tail_estimate(x);
      if (estimate <= options.rel_tol * std::abs(pref * sum) || pref == 0.0) break;
    }
  }
  if (!options.adaptive) estimate = tail_estimate((*zeros)[n - 1]);
  if (options.adaptive && n >= limit && estimate > options.rel_tol * std::abs(pref * sum))
    throw ConvergenceError("pair_response: series did not converge within max_terms");

  const cplx response = -pref * sum;
  PairResponse out;
  out.J = response.real();
  out.Gamma = response.imag();
  out.n_terms = n;
  out.truncation_estimate = pref == 0.0 ? 0.0 : estimate;
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms

HsrCoupling coupling_J12_hsr(const MaterialModel& model, const ResonatorGeometry& geom, double omega_r, double p,
                             int order) {
  geom.validate();
  if (order < 1) throw DomainError("coupling_J12_hsr: order must be >= 1");
  const auto eps = permittivity_at(model, omega_r);
  if (!is_hyperbolic(eps)) throw DomainError("coupling_J12_hsr: omega_r is outside the hyperbolic bands");
  const cplx q = anisotropy_root(eps);
  const double target = 4.0 * geom.R * order / geom.d;
  if (std::abs(q.real() - target) > 1e-6 * target)
    throw DomainError("coupling_J12_hsr: geometry does not satisfy the resonance condition at omega_r");

  HsrCoupling out;
  const double h = geom.h;
  out.h_star = geom.d * std::abs(q.imag());
  out.spacer_form = 8.0 * p * p * kE2 / (std::pow(out.h_star, 3) + 2.0 * h * h * h);
  const double lr = std::abs(q.imag() / q.real()) * geom.R;
  out.bounce_form = 4.0 * p * p * kE2 / (h * h * h + 32.0 * lr * lr * lr);
  out.ratio = out.spacer_form / out.bounce_form;
  return out;
}

double elliptic_correction(double J, double e_h) {
  if (e_h == 0.0) throw DivergenceError("elliptic_correction: prefactor diverges for a circular cross-section");
  if (!(e_h > 0.0 && e_h < 1.0)) throw DomainError("elliptic_correction: eccentricity must be in (0, 1)");
  return (1.0 - e_h * e_h) / (2.0 * e_h) * J;
}

double gamma_self(const MaterialModel& model, const ResonatorGeometry& geom, double omega, double p,
                  GammaMethod method) {
  geom.validate();
  if (geom.h == 0.0) throw DivergenceError("gamma_self: decay rate diverges for a point emitter at h = 0");
  const auto eps = permittivity_at(model, omega);
  const double h = geom.h;
  const double base = p * p * kE2 / (h * h * h);
  const cplx q = decaying_root(eps);
  const double im_q = q.imag();

  if (method == GammaMethod::LossTangentForm) {
    const double h_star = geom.d * im_q;
    const cplx ratio = eps.eps_perp / eps.eps_parallel;
    const double strength = std::abs((ratio * ratio * (1.0 - ratio)).real());
    return base * 3.0 * h_star / std::sqrt(h * h + 9.0 * h_star * h_star) * strength;
  }

  const cplx K = geom.eps_spacer * (eps.eps_perp - eps.eps_parallel) * q / (eps.eps_parallel * eps.eps_parallel);
  const double strength = std::abs(K.real());
  if (im_q == 0.0) return 0.0;

  if (method == GammaMethod::ClosedForm) {
    const double t = h / (3.0 * geom.d * im_q);
    return base * strength / std::sqrt(1.0 + t * t);
  }

  const double kappa = im_q * geom.d / h;
  auto integrand = [kappa](double t) { return t * t * std::exp(-t) * std::tanh(kappa * t); };
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-10, &err);
  return 0.5 * base * strength * integral;
}

double bulk_axis_J12(const UniaxialPermittivity& eps, double p, double R) {
  if (!(R > 0.0)) throw DomainError("bulk_axis_J12: R must be positive");
  if (!is_hyperbolic(eps)) throw DomainError("bulk_axis_J12: permittivity is not hyperbolic");
  const cplx prod = eps.eps_parallel * eps.eps_perp;
  if (std::abs(1.0 - prod) < 1e-12) throw SingularityError("bulk_axis_J12: eps_par eps_perp = 1 is a pole");
  cplx w = std::sqrt(-eps.eps_parallel / eps.eps_perp);
  if (w.imag() < 0.0) w = -w;
  if (!(w.imag() > 0.0)) throw DomainError("bulk_axis_J12: requires Im sqrt(-eps_par/eps_perp) > 0");
  const double strength = ((1.0 / eps.eps_perp) * (1.0 + prod) / (1.0 - prod)).real();
  return p * p * kE2 / (8.0 * R * R * R) * strength / std::pow(w.imag(), 3);
}

double critical_spacer(double omega, double r_eg) {
  if (!(r_eg > 0.0)) throw DomainError("critical_spacer: r_eg must be positive");
  return 40.0 * std::cbrt(kE2 * r_eg * r_eg / units::cm1_to_meV(omega));
}

DesignWindow design_window(const MaterialModel& model, const ResonatorGeometry& geom, double omega, double r_eg,
                           double margin) {
  geom.validate();
  const auto eps = permittivity_at(model, omega);
  if (!is_hyperbolic(eps)) throw DomainError("design_window: omega is outside the hyperbolic bands");
  DesignWindow out;
  out.margin = margin;
  out.h = geom.h;
  out.h_star = geom.d * std::abs(anisotropy_root(eps).imag());
  out.h_c = critical_spacer(omega, r_eg);
  out.ratio = out.h_star > 0.0 ? out.h_c / out.h_star : std::numeric_limits<double>::infinity();
  out.feasible = geom.h >= margin * out.h_star && geom.h <= out.h_c;
  return out;
}

// ---------------------------------------------------------------------------
// Resonance map

ResonanceMap resonance_map(const MaterialModel& model, const ResonatorGeometry& geom, const ResonanceMapSpec& spec,
                           unsigned threads) {
  geom.validate();
  if (spec.n_d_over_R == 0 || spec.n_omega == 0) throw DomainError("resonance_map: empty grid");
  if (!(spec.omega_min > 0.0) || spec.omega_max < spec.omega_min || !(spec.d_over_R_min > 0.0) ||
      spec.d_over_R_max < spec.d_over_R_min)
    throw DomainError("resonance_map: invalid ranges");

  const double span = std::max(spec.omega_max - spec.omega_min, 1.0);
  const auto bands = hyperbolic_bands(model, std::max(1.0, spec.omega_min - span), spec.omega_max + span);
  const HyperbolicBand* band = nullptr;
  double best_overlap = 0.0;
  for (const auto& b : bands) {
    const double overlap = std::min(b.omega_high, spec.omega_max) - std::max(b.omega_low, spec.omega_min);
    if (overlap > best_overlap || (band == nullptr && overlap >= 0.0)) {
      best_overlap = overlap;
      band = &b;
    }
  }
  if (band == nullptr) throw DomainError("resonance_map: omega range does not overlap a hyperbolic band");

  ResonanceMap out;
  out.spec = spec;
  out.values.assign(spec.n_d_over_R * spec.n_omega, 0.0);
  out.locus.assign(spec.n_d_over_R, std::numeric_limits<double>::quiet_NaN());

  SeriesOptions opts;
  opts.require_hyperbolic = false;
  const unsigned workers = threads == 0 ? default_threads() : threads;
  parallel_for(spec.n_d_over_R * spec.n_omega, workers, [&](std::size_t cell) {
    const std::size_t i = cell % spec.n_d_over_R;
    const std::size_t j = cell / spec.n_d_over_R;
    ResonatorGeometry g = geom;
    g.d = spec.d_over_R(i) * geom.R;
    const auto r = pair_response(model, g, spec.omega(j), spec.p, spec.p, Placement::OppositeSides, 1, opts);
    out.values[cell] = std::log10(std::hypot(r.J, r.Gamma));
  });
  for (std::size_t i = 0; i < spec.n_d_over_R; ++i) {
    try {
      out.locus[i] = hsr_frequency(model, geom.R, spec.d_over_R(i) * geom.R, 1, *band);
    } catch (const NoResonanceError&) {
    }
  }
  return out;
}

}  // namespace hqsim
