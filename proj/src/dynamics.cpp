#include "hqsim/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqsim/errors.hpp"
#include "hqsim/units.hpp"

namespace hqsim {

namespace {

using cd = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cd>;
constexpr std::size_t kMaxQubits = 12;
constexpr double kHbar = units::kHbarMeVps;

std::size_t dim_of(std::size_t n) { return std::size_t{1} << n; }

// |g><e| on qubit k.
SparseOp lowering(std::size_t n, std::size_t k) {
  const std::size_t d = dim_of(n), bit = std::size_t{1} << k;
  SparseOp op(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<Eigen::Triplet<cd>> entries;
  for (std::size_t b = 0; b < d; ++b)
    if (b & bit) entries.emplace_back(static_cast<int>(b & ~bit), static_cast<int>(b), 1.0);
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

void check_sizes(const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings, const ControlSegment& seg) {
  const std::size_t n = qubits.size();
  if (n == 0 || n > kMaxQubits) throw DomainError("qubit count must be in [1, 12]");
  if (couplings.size() != n || static_cast<std::size_t>(couplings.Gamma.rows()) != n ||
      static_cast<std::size_t>(couplings.J.cols()) != n || static_cast<std::size_t>(couplings.Gamma.cols()) != n)
    throw DomainError("coupling matrix dimension does not match qubit count");
  if ((!seg.theta.empty() && seg.theta.size() != n) || (!seg.drive.empty() && seg.drive.size() != n) ||
      (!seg.detunings.empty() && seg.detunings.size() != n))
    throw DomainError("control segment dimension does not match qubit count");
}

bool theta_of(const std::vector<QubitSpec>& qubits, const ControlSegment& seg, std::size_t j) {
  return seg.theta.empty() ? qubits[j].theta : static_cast<bool>(seg.theta[j]);
}

cd drive_of(const ControlSegment& seg, std::size_t j) { return seg.drive.empty() ? cd{} : seg.drive[j]; }

double detuning_of(const std::vector<QubitSpec>& qubits, const ControlSegment& seg, std::size_t j) {
  return seg.detunings.empty() ? qubits[j].detuning : seg.detunings[j];
}

// Everything about one segment that stays fixed while integrating it.
class Generator {
 public:
  Generator(const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings, const ControlSegment& seg)
      : qubits_(qubits), couplings_(couplings), seg_(seg) {
    check_sizes(qubits, couplings, seg);
    const std::size_t n = qubits.size();
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    for (std::size_t k = 0; k < n; ++k) lower_.push_back(lowering(n, k));

    driven_ = false;
    for (std::size_t j = 0; j < n; ++j) driven_ = driven_ || drive_of(seg, j) != cd{};
    ControlSegment undriven = seg;
    undriven.drive.clear();
    h_static_ = build_hamiltonian(qubits, couplings, undriven, 0.0);

    anti_ = Operator::Zero(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double c = (theta_of(qubits, seg, i) && theta_of(qubits, seg, j)) ? couplings.Gamma(i, j) : 0.0;
        if (i == j && !theta_of(qubits, seg, j)) c += qubits[j].gamma_background;
        if (c == 0.0) continue;
        rates_.push_back({i, j, c});
        anti_ += c * Operator(SparseOp(lower_[i].adjoint()) * lower_[j]);
      }
    }
  }

  Operator hamiltonian(double t) const {
    if (!driven_) return h_static_;
    Operator H = h_static_;
    add_drive(H, t);
    return H;
  }

  Operator rhs(const Operator& rho, double t) const { return apply(rho, hamiltonian(t)); }

  Operator apply(const Operator& rho, const Operator& H) const {
    const cd i{0.0, 1.0};
    Operator out = (i / kHbar) * (rho * H - H * rho);
    if (rates_.empty()) return out;
    out -= (anti_ * rho + rho * anti_) / kHbar;
    for (const auto& r : rates_) {
      const Operator left = lower_[r.i] * rho;
      out += (2.0 * r.c / kHbar) * Operator((lower_[r.j] * left.adjoint()).adjoint());
    }
    return out;
  }

  // Rough generator norm in ps^-1 for initial step selection.
  double scale() const {
    double s = h_static_.cwiseAbs().rowwise().sum().maxCoeff();
    for (std::size_t j = 0; j < qubits_.size(); ++j) s += 2.0 * std::abs(drive_of(seg_, j));
    for (const auto& r : rates_) s += 2.0 * std::abs(r.c);
    return s / kHbar;
  }

 private:
  struct Rate {
    std::size_t i, j;
    double c;
  };

  void add_drive(Operator& H, double t) const {
    for (std::size_t j = 0; j < qubits_.size(); ++j) {
      const cd amp = drive_of(seg_, j) * std::exp(cd{0.0, -detuning_of(qubits_, seg_, j) * t / kHbar});
      if (amp == cd{}) continue;
      const Operator up = Operator(SparseOp(lower_[j].adjoint()));
      H += amp * up + std::conj(amp) * up.adjoint();
    }
  }

  const std::vector<QubitSpec>& qubits_;
  const CouplingMatrix& couplings_;
  const ControlSegment& seg_;
  std::vector<SparseOp> lower_;
  std::vector<Rate> rates_;
  Operator h_static_;
  Operator anti_;
  bool driven_ = false;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct StepResult {
  Operator y;
  Operator k7;
  double error;
};

StepResult dp45_step(const Generator& g, double t, const Operator& y, const Operator& k1, double h) {
  const Operator k2 = g.rhs(y + h * a21 * k1, t + c2 * h);
  const Operator k3 = g.rhs(y + h * (a31 * k1 + a32 * k2), t + c3 * h);
  const Operator k4 = g.rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h);
  const Operator k5 = g.rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h);
  const Operator k6 = g.rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
  StepResult out;
  out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  out.k7 = g.rhs(out.y, t + h);
  const Operator err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k7);
  out.error = err.cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CouplingMatrix CouplingMatrix::zeros(std::size_t n) {
  CouplingMatrix c;
  c.J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  c.Gamma = c.J;
  return c;
}

void CouplingMatrix::validate() {
  if (J.rows() != J.cols() || Gamma.rows() != Gamma.cols() || J.rows() != Gamma.rows())
    throw DomainError("coupling matrices must be square and of equal size");
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("J must be symmetric");
  if ((Gamma - Gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("Gamma must be symmetric");
  if (Gamma.rows() == 0) return;
  if (Gamma.diagonal().minCoeff() < 0.0) throw DomainError("Gamma_ii must be non-negative");
  for (Eigen::Index i = 0; i < Gamma.rows(); ++i)
    for (Eigen::Index j = i + 1; j < Gamma.cols(); ++j)
      if (Gamma(i, j) < 0.0) {
        std::ostringstream msg;
        msg << "Gamma(" << i << "," << j << ") = " << Gamma(i, j) << " is negative";
        notes.push_back(msg.str());
      }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gamma);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return;
  if (lmin <= -1e-10) {
    std::ostringstream msg;
    msg << "Gamma is not positive semidefinite (min eigenvalue " << lmin << " meV)";
    throw DomainError(msg.str());
  }
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  Gamma = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  Gamma = 0.5 * (Gamma + Gamma.transpose()).eval();
  notes.push_back("Gamma projected onto the positive semidefinite cone");
}

DensityMatrix DensityMatrix::basis_state(std::size_t qubits, std::size_t index) {
  if (qubits == 0 || qubits > kMaxQubits) throw DomainError("qubit count must be in [1, 12]");
  const auto d = static_cast<Eigen::Index>(dim_of(qubits));
  if (static_cast<Eigen::Index>(index) >= d) throw DomainError("basis index out of range");
  DensityMatrix s;
  s.rho = Operator::Zero(d, d);
  s.rho(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

DensityMatrix DensityMatrix::from_label(const std::string& label) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (label[k] == 'e')
      index |= std::size_t{1} << k;
    else if (label[k] != 'g')
      throw DomainError("state label must consist of 'g' and 'e'");
  }
  return basis_state(label.size(), index);
}

std::size_t DensityMatrix::qubits() const {
  std::size_t n = 0;
  while (dim_of(n) < static_cast<std::size_t>(rho.rows())) ++n;
  return n;
}

double DensityMatrix::purity() const { return (rho * rho).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  const auto d = static_cast<std::size_t>(rho.rows());
  if (rho.rows() != rho.cols() || d == 0 || (d & (d - 1)) != 0)
    throw DomainError("density matrix must be square with power-of-two dimension");
  if (std::abs(trace() - 1.0) > 1e-10) throw DomainError("density matrix trace differs from 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("density matrix is not Hermitian");
  if (min_eigenvalue() < -1e-8) throw DomainError("density matrix has a negative eigenvalue");
}

double ControlSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

std::string basis_label(std::size_t qubits, std::size_t index) {
  std::string s(qubits, 'g');
  for (std::size_t k = 0; k < qubits; ++k)
    if (index & (std::size_t{1} << k)) s[k] = 'e';
  return s;
}

Operator build_hamiltonian(const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings,
                           const ControlSegment& segment, double t) {
  check_sizes(qubits, couplings, segment);
  const std::size_t n = qubits.size();
  const std::size_t d = dim_of(n);
  Operator H = Operator::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t b = 0; b < d; ++b) {
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e += 0.5 * qubits[j].omega_eg * ((b >> j & 1) ? 1.0 : -1.0);
    H(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = e;
  }
  // -sum_{i != j} J_ij sigma_eg^i sigma_ge^j: moves an excitation from j to i.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !theta_of(qubits, segment, i) || !theta_of(qubits, segment, j)) continue;
      const double J = couplings.J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (J == 0.0) continue;
      const std::size_t bi = std::size_t{1} << i, bj = std::size_t{1} << j;
      for (std::size_t b = 0; b < d; ++b)
        if ((b & bj) && !(b & bi)) H(static_cast<Eigen::Index>((b & ~bj) | bi), static_cast<Eigen::Index>(b)) -= J;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const cd amp = drive_of(segment, j) * std::exp(cd{0.0, -detuning_of(qubits, segment, j) * t / kHbar});
    if (amp == cd{}) continue;
    const std::size_t bj = std::size_t{1} << j;
    for (std::size_t b = 0; b < d; ++b) {
      if (b & bj) continue;
      H(static_cast<Eigen::Index>(b | bj), static_cast<Eigen::Index>(b)) += amp;
      H(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b | bj)) += std::conj(amp);
    }
  }
  return H;
}

Operator lindblad_rhs(const Operator& rho, const Operator& H, const std::vector<QubitSpec>& qubits,
                      const CouplingMatrix& couplings, const ControlSegment& segment) {
  const Generator g(qubits, couplings, segment);
  if (rho.rows() != H.rows() || rho.cols() != H.cols() || H.rows() != static_cast<Eigen::Index>(dim_of(qubits.size())))
    throw DomainError("lindblad_rhs: operator dimension mismatch");
  return g.apply(rho, H);
}

Trajectory evolve(const DensityMatrix& rho0, const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings,
                  const ControlSchedule& schedule, const IntegratorOptions& options) {
  if (options.check_state) rho0.validate();
  if (rho0.rho.rows() != static_cast<Eigen::Index>(dim_of(qubits.size())))
    throw DomainError("evolve: state dimension does not match qubit count");
  if (!(options.tol > 0.0)) throw DomainError("evolve: tol must be positive");
  for (const auto& s : schedule.segments)
    if (!(s.duration > 0.0)) throw DomainError("evolve: segment durations must be positive");

  Trajectory traj;
  traj.push_back({0.0, rho0});
  const cd trace0 = rho0.trace();
  Operator y = rho0.rho;
  double t = 0.0;
  double h_prev = options.initial_step;

  for (const auto& seg : schedule.segments) {
    const Generator g(qubits, couplings, seg);
    const double t_end = t + seg.duration;
    double h = options.fixed_step ? *options.fixed_step : h_prev;
    if (!(h > 0.0)) h = std::min(seg.duration, 0.05 / std::max(g.scale(), 1e-30));
    Operator k1 = g.rhs(y, t);

    while (t < t_end) {
      const double remaining = t_end - t;
      bool last = h >= remaining * (1.0 - 1e-12);
      const double step = last ? remaining : h;
      StepResult res = dp45_step(g, t, y, k1, step);

      if (!options.fixed_step && res.error > options.tol) {
        h = step * std::max(0.2, 0.9 * std::pow(options.tol / res.error, 0.2));
        if (h < 1e-15 * std::max(std::abs(t_end), 1.0) || h < 1e-300) {
          std::ostringstream msg;
          msg << "evolve: step size underflow at t = " << t << " ps; reduce Gamma/hbar * dt or loosen tol";
          throw StiffnessError(msg.str());
        }
        continue;
      }

      t = last ? t_end : t + step;
      y = std::move(res.y);
      k1 = std::move(res.k7);
      if (options.check_state) {
        const double drift = std::abs(y.trace() - trace0);
        if (drift > 1e-8) {
          std::ostringstream msg;
          msg << "evolve: trace drift " << drift << " at t = " << t << " ps exceeds 1e-8";
          throw TraceDriftError(msg.str(), t, drift);
        }
      }
      if (options.record_steps || last) traj.push_back({t, DensityMatrix{y}});

      if (!options.fixed_step) {
        const double factor = res.error > 0.0 ? 0.9 * std::pow(options.tol / res.error, 0.2) : 5.0;
        const double grown = step * std::clamp(factor, 0.2, 5.0);
        if (!last)
          h = grown;
        else
          h_prev = std::max(h, grown);
      }
    }
    if (options.check_state) {
      const double lmin = DensityMatrix{y}.min_eigenvalue();
      if (lmin < -1e-8) {
        std::ostringstream msg;
        msg << "evolve: state lost positivity at t = " << t << " ps (min eigenvalue " << lmin << ")";
        throw std::runtime_error(msg.str());
      }
    }
  }
  return traj;
}

double gamma_from_coherence_time(double tau_ps) {
  if (!(tau_ps > 0.0)) throw DomainError("coherence time must be positive");
  return kHbar / (2.0 * tau_ps);
}

}  // namespace hqsim
