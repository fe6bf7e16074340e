#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace hqsim {

using Operator = Eigen::MatrixXcd;

struct QubitSpec {
  double omega_eg = 0.0;          // meV
  double p = 1.0;                 // e*nm
  double gamma_background = 0.0;  // meV
  bool theta = false;
  double detuning = 0.0;  // meV
};

struct CouplingMatrix {
  Eigen::MatrixXd J;      // meV
  Eigen::MatrixXd Gamma;  // meV
  std::string provenance;
  std::vector<std::string> notes;

  static CouplingMatrix zeros(std::size_t n);
  std::size_t size() const { return static_cast<std::size_t>(J.rows()); }
  // Checks symmetry and Gamma_ii >= 0; projects Gamma onto the PSD cone when its
  // smallest eigenvalue lies in (-1e-10, 0) and throws below that.
  void validate();
};

// Basis index b encodes qubit k in bit k; bit value 1 is |e>.
struct DensityMatrix {
  Operator rho;

  static DensityMatrix basis_state(std::size_t qubits, std::size_t index);
  // Labels such as "eg": character k is qubit k.
  static DensityMatrix from_label(const std::string& label);
  std::size_t qubits() const;
  std::complex<double> trace() const { return rho.trace(); }
  double purity() const;
  double min_eigenvalue() const;
  void validate() const;
};

struct ControlSegment {
  double duration = 0.0;  // ps
  std::vector<bool> theta;
  std::vector<std::complex<double>> drive;  // p* . E, meV
  std::vector<double> detunings;            // meV
};

struct ControlSchedule {
  std::vector<ControlSegment> segments;
  double total_duration() const;
};

struct TrajectoryPoint {
  double t = 0.0;  // ps
  DensityMatrix state;
};

using Trajectory = std::vector<TrajectoryPoint>;

struct IntegratorOptions {
  double tol = 1e-10;
  std::optional<double> fixed_step;  // ps; disables error control
  bool record_steps = true;          // otherwise only segment boundaries are stored
  bool check_state = true;           // trace drift and positivity checks
  double initial_step = 0.0;         // ps, 0 = automatic
};

struct GateResult {
  Operator process;  // d^2 x d^2 superoperator, column-stacking convention
  Operator ideal;    // target unitary in the lab frame
  double avg_fidelity = 0.0;
  double gate_time = 0.0;  // ps
  Trajectory sample_trajectory;
};

std::string basis_label(std::size_t qubits, std::size_t index);

// Energy of the coherent terms; returns an operator in meV.
Operator build_hamiltonian(const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings,
                           const ControlSegment& segment, double t);

// d rho / dt in ps^-1.
Operator lindblad_rhs(const Operator& rho, const Operator& H, const std::vector<QubitSpec>& qubits,
                      const CouplingMatrix& couplings, const ControlSegment& segment);

Trajectory evolve(const DensityMatrix& rho0, const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings,
                  const ControlSchedule& schedule, const IntegratorOptions& options = {});

// Rate gamma = hbar / (2 tau) for coherence time tau (ps).
double gamma_from_coherence_time(double tau_ps);

Operator iswap_unitary();

GateResult iswap_gate(const std::vector<QubitSpec>& qubits, const CouplingMatrix& couplings, bool gamma_on,
                      const IntegratorOptions& options = {}, unsigned threads = 0);

double average_gate_fidelity(const Operator& process, const Operator& ideal);

// Superoperator of X -> U X U^dagger, column stacking.
Operator unitary_superoperator(const Operator& U);

}  // namespace hqsim
