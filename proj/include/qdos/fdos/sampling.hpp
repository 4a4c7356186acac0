#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdos/common/rng.hpp"
#include "qdos/evolve/trotter.hpp"
#include "qdos/fdos/engine.hpp"
#include "qdos/fdos/signal.hpp"
#include "qdos/qcore/gates.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::fdos {

enum class SamplerKind { bitflip, euler, haar, layered, hamming, dqc1_full, dqc1_subspace };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::haar;
  int param = 0;  // L for layered, M for hamming and dqc1-subspace
  std::uint64_t n_reuse = 1;
  std::uint64_t seed = 0;

  // "bitflip", "euler", "haar", "layered(8)", "hamming(6)", "dqc1-full", "dqc1-subspace(6)"
  std::string id() const;
  static SamplerSpec parse(const std::string& id);
  bool is_dqc1() const { return kind == SamplerKind::dqc1_full || kind == SamplerKind::dqc1_subspace; }
};

enum class Part { real, imag };

struct HadamardResult {
  double estimate = 0.0;  // 2 p0_hat - 1
  double p0_hat = 0.0;
  double p0 = 0.0;
};

// Probability of reading the ancilla in |0> for echo L.
double hadamard_p0(cplx echo, Part part);
// Analytic when `shots` is empty.
HadamardResult hadamard_test(const qcore::StateVector& initial, const EchoEngine& engine, double t,
                             Part part, std::optional<std::uint64_t> shots, Engine& rng);
// Gate-level version: ancilla on qubit n, controlled Trotter evolution, then
// H (real) or S^dagger H (imag). Returns the exact p0 of the circuit.
double hadamard_test_circuit_p0(const qcore::StateVector& initial, const evolve::TrotterPlan& plan,
                                double t, Part part);

// Circuit that prepares a layered-ansatz or Euler state from |0...0>.
qcore::RotationCircuit initial_state_circuit(const SamplerSpec& sampler, int n_qubits, Engine& rng);
qcore::StateVector draw_initial_state(const SamplerSpec& sampler, int n_qubits, Engine& rng);

qcore::StateVector dicke_state(int n_qubits, int M);

// Echo of every state the sampler can emit, averaged; bitflip and hamming only.
FdosSignal exhaustive_fdos(const EchoEngine& engine, const TimeGrid& grid, const SamplerSpec& sampler);

// Mean echo of the drawn states at time index k. Finite plans read state i
// with global shots [i N_r, (i+1) N_r): even shots on the real readout, odd
// shots on the imaginary one, binomial draws keyed by (seed, k, i, 1).
cplx shot_average(const std::vector<cplx>& echoes, const ShotPlan& plan, std::uint64_t seed, std::uint64_t k);

FdosSignal sample_fdos(const EchoEngine& engine, const TimeGrid& grid, const SamplerSpec& sampler,
                       const ShotPlan& plan, unsigned workers = 1);

// Trace-based DQC1 estimate: the ancilla statistics of the purified circuit
// are those of a Hadamard test on the maximally mixed (sub)space state.
// Shots are split evenly between the real and imaginary readouts.
FdosSignal dqc1_fdos(const EchoEngine& engine, const TimeGrid& grid, const ShotPlan& plan,
                     std::uint64_t seed);

struct CircuitOp {
  std::string name;  // h, x, cx, dicke, ctrl-trotter-step
  std::vector<int> qubits;
};

// Gate list of the 2n+1 qubit purified DQC1 circuit for one time point:
// ancilla = qubit 2n, system = qubits 0..n-1, purifying copy = n..2n-1.
struct Dqc1Circuit {
  int n_qubits = 0;
  std::vector<CircuitOp> ops;
  std::int64_t trotter_steps = 0;
  qcore::GateCost evolution_cost;
  std::size_t count(const std::string& name) const;
};
Dqc1Circuit dqc1_circuit(const evolve::TrotterPlan& plan, double t, Part part,
                         std::optional<int> M = std::nullopt);

// The 2n-qubit state sum_{b in S} |b>_copy |b>_system / sqrt(|S|).
qcore::StateVector purified_register(int n_qubits, std::optional<int> M = std::nullopt);

}  // namespace qdos::fdos
