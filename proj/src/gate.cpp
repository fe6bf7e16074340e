#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqsim/dynamics.hpp"
#include "hqsim/errors.hpp"
#include "hqsim/numerics.hpp"
#include "hqsim/units.hpp"

namespace hqsim {

namespace {

using cd = std::complex<double>;

Operator vec(const Operator& X) { return Eigen::Map<const Eigen::VectorXcd>(X.data(), X.size()); }

Operator projector(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

}  // namespace

Operator iswap_unitary() {
  Operator U = Operator::Zero(4, 4);
  U(0, 0) = 1.0;
  U(3, 3) = 1.0;
  U(1, 2) = cd{0.0, 1.0};
  U(2, 1) = cd{0.0, 1.0};
  return U;
}

Operator unitary_superoperator(const Operator& U) {
  const Eigen::Index d = U.rows();
  Operator S(d * d, d * d);
  const Operator Uc = U.conjugate();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) S.block(a * d, b * d, d, d) = Uc(a, b) * U;
  return S;
}

double average_gate_fidelity(const Operator& process, const Operator& ideal) {
  const Eigen::Index d = ideal.rows();
  if (ideal.cols() != d || process.rows() != d * d || process.cols() != d * d)
    throw DomainError("average_gate_fidelity: dimension mismatch");
  double tp_violation = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      cd tr{0.0, 0.0};
      for (Eigen::Index c = 0; c < d; ++c) tr += process(c + d * c, a + d * b);
      tp_violation = std::max(tp_violation, std::abs(tr - (a == b ? 1.0 : 0.0)));
    }
  }
  if (tp_violation > 1e-6) {
    std::ostringstream msg;
    msg << "average_gate_fidelity: channel is not trace preserving (deviation " << tp_violation << ")";
    throw DomainError(msg.str());
  }
  const Operator SU = unitary_superoperator(ideal);
  const double dd = static_cast<double>(d);
  const double fe = (SU.adjoint() * process).trace().real() / (dd * dd);
  const double f = (dd * fe + 1.0) / (dd + 1.0);
  return std::clamp(f, 0.0, 1.0);
}

GateResult iswap_gate(const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings, bool gamma_on,
                      const IntegratorOptions& options, unsigned threads) {
  if (qubits.size() != 2) throw DomainError("iswap_gate: requires exactly two qubits");
  const double J = couplings.J(0, 1);
  if (!(J > 0.0)) throw DomainError("iswap_gate: requires J_12 > 0");

  std::vector<QubitSpec> q = qubits;
  CouplingMatrix c = couplings;
  if (!gamma_on) {
    c.Gamma.setZero();
    for (auto& s : q) s.gamma_background = 0.0;
  }

  GateResult out;
  out.gate_time = units::pi * units::kHbarMeVps / (2.0 * J);
  ControlSegment seg;
  seg.duration = out.gate_time;
  seg.theta = {true, true};
  ControlSchedule schedule{{seg}};

  // Hermitian inputs: |i><i|, and the |+> and |+i> projectors on each pair (i, j).
  const Eigen::Index d = 4;
  std::vector<Operator> inputs;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
    e(i) = 1.0;
    inputs.push_back(projector(e));
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(d), plus_i = Eigen::VectorXcd::Zero(d);
      plus(i) = plus(j) = plus_i(i) = 1.0 / std::sqrt(2.0);
      plus_i(j) = cd{0.0, 1.0 / std::sqrt(2.0)};
      inputs.push_back(projector(plus));
      inputs.push_back(projector(plus_i));
      pairs.emplace_back(i, j);
    }
  }

  IntegratorOptions opts = options;
  opts.record_steps = false;
  std::vector<Operator> outputs(inputs.size());
  parallel_for(inputs.size(), threads == 0 ? default_threads() : threads, [&](std::size_t k) {
    outputs[k] = evolve(DensityMatrix{inputs[k]}, q, c, schedule, opts).back().state.rho;
  });

  out.process = Operator::Zero(d * d, d * d);
  const cd i_unit{0.0, 1.0};
  for (Eigen::Index i = 0; i < d; ++i) out.process.col(i + d * i) = vec(outputs[static_cast<std::size_t>(i)]);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const Operator& Ep = outputs[static_cast<std::size_t>(d) + 2 * p];
    const Operator& Ey = outputs[static_cast<std::size_t>(d) + 2 * p + 1];
    const Operator diag = outputs[static_cast<std::size_t>(i)] + outputs[static_cast<std::size_t>(j)];
    out.process.col(i + d * j) = vec(Ep + i_unit * Ey - 0.5 * (1.0 + i_unit) * diag);
    out.process.col(j + d * i) = vec(Ep - i_unit * Ey - 0.5 * (1.0 - i_unit) * diag);
  }

  // Target in the lab frame: free precession for t_gate followed by the ideal iSWAP.
  Operator U_free = Operator::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    double e = 0.0;
    for (std::size_t k = 0; k < 2; ++k) e += 0.5 * q[k].omega_eg * ((b >> k & 1) ? 1.0 : -1.0);
    U_free(b, b) = std::exp(cd{0.0, -e * out.gate_time / units::kHbarMeVps});
  }
  out.ideal = U_free * iswap_unitary();
  out.avg_fidelity = average_gate_fidelity(out.process, out.ideal);

  IntegratorOptions sample = options;
  sample.record_steps = true;
  out.sample_trajectory = evolve(DensityMatrix::from_label("eg"), q, c, schedule, sample);
  return out;
}

}  // namespace hqsim
