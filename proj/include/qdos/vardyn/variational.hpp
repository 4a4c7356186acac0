#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdos/fdos/signal.hpp"
#include "qdos/noisemodel/channels.hpp"
#include "qdos/qcore/gates.hpp"
#include "qdos/qcore/pauli.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::vardyn {

using qcore::cplx;

// Hardware-efficient layers: R_X, R_Z, R_Y on every qubit, then R_ZZ on
// neighbouring pairs. theta = 0 is the identity.
struct Ansatz {
  int n_qubits = 2;
  int layers = 1;
  std::size_t n_params() const { return qcore::layered_parameter_count(n_qubits, layers); }
  qcore::RotationCircuit circuit(std::span<const double> theta) const;
};
Ansatz build_ansatz(int n_qubits, int layers);

enum class CompileMode { phase_sensitive, phase_free };

// Recompiles V U(theta_t) Psi|0> onto U(theta') Psi|0>.
//   chi = Psi^dag U(theta')^dag V U(theta_t) Psi |0>.
// phase_free: the compilation state is chi itself on n qubits.
// phase_sensitive: an ancilla (qubit n) in |+> controls the chi branch and
// is read out in the X basis, giving |0>(|0> + chi)/2 + |1>(|0> - chi)/2.
// H_comp = -sum_j Z_j over all qubits of the compilation state, so the floor
// is -(n+1) or -n and it is reached only when chi = |0> (phase_sensitive) or
// chi = e^{i phi}|0> (phase_free).
class CompilationObjective {
 public:
  CompilationObjective(CompileMode mode, Ansatz ansatz, qcore::RotationCircuit prep,
                       const qcore::RotationCircuit& step, std::vector<double> theta_t);

  CompileMode mode() const { return mode_; }
  const Ansatz& ansatz() const { return ansatz_; }
  const std::vector<double>& theta_t() const { return theta_t_; }
  int n_compile_qubits() const;
  double floor() const { return -static_cast<double>(n_compile_qubits()); }
  qcore::QubitHamiltonian hamiltonian() const;

  // V U(theta_t) Psi|0>.
  const qcore::StateVector& target() const { return target_; }
  qcore::StateVector chi(std::span<const double> theta) const;
  qcore::StateVector compilation_state(std::span<const double> theta) const;
  double energy(std::span<const double> theta) const;
  // |<psi| U(theta)^dag V U(theta_t) |psi>|^2 = |<0|chi>|^2.
  double step_fidelity(std::span<const double> theta) const;

 private:
  CompileMode mode_;
  Ansatz ansatz_;
  qcore::RotationCircuit prep_inv_;
  std::vector<double> theta_t_;
  qcore::StateVector target_;
};

// All Pauli strings of weight 1..max_weight on n qubits.
std::vector<qcore::PauliString> local_paulis(int n_qubits, int max_weight);

// Covariances f_{kj} = Re<P_k O_j> - <P_k><O_j>, pivot-major, for pivots P_k
// and observables O_j.
class CovarSet {
 public:
  CovarSet(std::vector<qcore::PauliString> pivots, std::vector<qcore::PauliString> observables);
  // Pivots Z_k on every qubit; observables all of weight <= max_weight, or
  // `random_count` of them drawn with keys (seed, step) when non-zero.
  static CovarSet for_objective(int n_qubits, int max_weight, std::size_t random_count = 0,
                                std::uint64_t seed = 0, std::uint64_t step = 0);

  const std::vector<qcore::PauliString>& pivots() const { return pivots_; }
  const std::vector<qcore::PauliString>& observables() const { return obs_; }
  std::size_t size() const { return pivots_.size() * obs_.size(); }

  // Expectations the covariances are built from: <O_j>, <P_k>, Re<P_k O_j>.
  Eigen::VectorXd raw(const qcore::StateVector& state) const;
  Eigen::VectorXd covariances(const Eigen::VectorXd& raw) const;
  // Chain rule from d(raw)/d(theta) columns to d(f)/d(theta).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& raw, const Eigen::MatrixXd& draw) const;

 private:
  std::vector<qcore::PauliString> pivots_, obs_, products_;
};

std::vector<double> covar_vector(const qcore::StateVector& state, const std::vector<qcore::PauliString>& observables,
                                 const std::vector<qcore::PauliString>& pivots);
// Pivots default to Z on every qubit.
std::vector<double> covar_vector(const qcore::StateVector& state, const std::vector<qcore::PauliString>& observables);

enum class Optimizer { covar, gradient };

struct StepOptions {
  Optimizer optimizer = Optimizer::covar;
  int max_iters = 100;
  double tol = 1e-10;         // on ||f||^2 (covar) or E - floor (both)
  double damping = 1e-3;      // initial Levenberg-Marquardt damping
  double learning_rate = 0.2; // gradient mode
  int max_weight = 3;
  std::size_t random_observables = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;
  double covar_norm2 = 0.0;
  double step_fidelity = 0.0;
  double damping = 0.0;
};

struct StepResult {
  std::vector<double> theta;
  std::vector<IterationRecord> history;  // accepted iterates, history[0] = start
  int iterations = 0;                    // Jacobian (or gradient) evaluations
  bool converged = false;
  std::string reason;
  const IterationRecord& final() const { return history.back(); }
};

// d/dtheta_i of a function of one rotation angle whose Fourier content is
// limited to frequencies 0, 1, 2 (rotations, controlled or not):
// g(s) = F(theta+s) - F(theta-s), F' = g(pi/4) + (1 - sqrt 2) g(pi/2) / 2.
inline constexpr double kShiftNear = 0.78539816339744830962;
inline constexpr double kShiftFar = 1.57079632679489661923;

StepResult recompile_step(const CompilationObjective& obj, std::vector<double> theta_start,
                          const StepOptions& opt, std::uint64_t step_index = 0);

struct ParamTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> thetas;  // thetas[0] = 0
  std::vector<double> energies;
  std::vector<double> covar_norm2;
  std::vector<double> step_fidelities;
  std::vector<int> iterations;
  // |<psi(t)|U(theta_t)|psi>|^2 against exact evolution, and the echo error
  // |<psi|U(theta_t)|psi> - <psi|e^{-iHt}|psi>|.
  std::vector<double> cumulative_fidelity;
  std::vector<double> echo_error;
  std::size_t n_steps() const { return thetas.size() - 1; }
};

struct TrajectoryOptions {
  CompileMode mode = CompileMode::phase_sensitive;
  int trotter_order = 2;
  StepOptions step;
};

ParamTrajectory recompile_trajectory(const qcore::QubitHamiltonian& h, const qcore::RotationCircuit& prep,
                                     double dt, std::size_t n_steps, const Ansatz& ansatz,
                                     const TrajectoryOptions& opt = {});

struct NoisyFidelity {
  double literal = 0.0;  // Tr[rho_ideal rho_actual] / d
  double overlap = 0.0;  // Tr[rho_ideal rho_actual]
};
NoisyFidelity noisy_fidelity(const qcore::DensityMatrix& ideal, const qcore::DensityMatrix& actual);

// U(theta) Psi|0><0|Psi^dag U(theta)^dag with pair channels after every
// two-qubit gate; noiseless when `noise` is null.
qcore::DensityMatrix ansatz_state(const Ansatz& ansatz, std::span<const double> theta,
                                  const qcore::RotationCircuit& prep,
                                  const noisemodel::PauliLindbladSpec* noise = nullptr);

// Echo <psi|U(theta)|psi> read from the ancilla of a Hadamard test with the
// ansatz controlled gate by gate; under `noise` each controlled gate is
// followed by its pair channels.
cplx variational_echo(const Ansatz& ansatz, std::span<const double> theta, const qcore::RotationCircuit& prep,
                      const noisemodel::PauliLindbladSpec* noise = nullptr);

// One trajectory per initial state. Time point k uses thetas[k] of every
// trajectory; grid.dt must equal the trajectory step and grid.n_points must
// not exceed n_steps + 1. Shots follow fdos::shot_average with N_psi equal to
// the number of trajectories.
fdos::FdosSignal variational_fdos(const Ansatz& ansatz, const std::vector<ParamTrajectory>& trajectories,
                                  const std::vector<qcore::RotationCircuit>& preps,
                                  const noisemodel::PauliLindbladSpec* noise, const fdos::ShotPlan& plan,
                                  const fdos::TimeGrid& grid, std::uint64_t seed, unsigned workers = 1);

}  // namespace qdos::vardyn
