#pragma once

#include <memory>
#include <vector>

#include "qdos/evolve/trotter.hpp"
#include "qdos/fdos/signal.hpp"
#include "qdos/noisemodel/channels.hpp"
#include "qdos/qcore/gates.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::noisemodel {

// Rotations and Kraus channels on a density matrix. A controlled circuit acts
// on n + 1 qubits with the ancilla on qubit n, and every rotation is
// controlled by it.
class NoisyCircuit {
 public:
  NoisyCircuit(int n_register, bool controlled);

  int n_register() const { return n_; }
  int n_joint() const { return controlled_ ? n_ + 1 : n_; }
  bool controlled() const { return controlled_; }
  int ancilla() const { return controlled_ ? n_ : -1; }

  // p acts on the register.
  void add_rotation(const qcore::PauliString& p, double angle);
  // Targets are joint-register qubits.
  void add_channel(std::shared_ptr<const qcore::KrausChannel> channel, std::vector<int> targets);
  void append(const NoisyCircuit& other);

  std::size_t n_rotations() const { return n_rot_; }
  std::size_t n_channels() const { return ops_.size() - n_rot_; }

  void apply(qcore::DensityMatrix& rho) const;

 private:
  struct Op {
    qcore::PauliString pauli;  // joint register
    double angle = 0.0;
    std::shared_ptr<const qcore::KrausChannel> channel;
    std::vector<int> targets;
  };
  int n_;
  bool controlled_;
  std::vector<Op> ops_;
  std::size_t n_rot_ = 0;
};

// N_gates for a controlled evolution of total time t_max: one noisy gate per
// controlled rotation.
std::size_t noisy_gate_count(const evolve::TrotterPlan& plan, double t_max);
DepolSpec depol_for_evolution(double xi, const evolve::TrotterPlan& plan, double t_max);

// After every controlled rotation: single-qubit depolarizing of strength
// lambda on the ancilla and on the lowest and highest qubit of the support.
NoisyCircuit attach_depolarizing(const qcore::RotationCircuit& step, const DepolSpec& spec);
NoisyCircuit attach_depolarizing(const evolve::TrotterPlan& plan, const DepolSpec& spec);

// After every rotation, the pair channels of its 2-qubit decomposition: one
// per consecutive pair of the sorted support, plus (controlled circuits) one
// between the ancilla and the highest target, which sits next to it.
NoisyCircuit attach_lindblad(const qcore::RotationCircuit& circuit, const PauliLindbladSpec& spec, bool controlled);
NoisyCircuit attach_lindblad(const evolve::TrotterPlan& plan, const PauliLindbladSpec& spec);

// Qubit pairs that attach_lindblad will look up.
std::vector<std::pair<int, int>> lindblad_pairs(const qcore::RotationCircuit& circuit, bool controlled);

// |+><+|_ancilla (x) rho_s on n + 1 qubits.
qcore::DensityMatrix plus_ancilla(const qcore::DensityMatrix& rho_s);
// <X> + i<Y> of the ancilla, i.e. Tr_S of the coherence, which equals the echo.
fdos::cplx ancilla_echo(const qcore::DensityMatrix& joint, int ancilla);

// G(t_k) = norm/sqrt(2 pi) * L_k where L_k is the ancilla echo after k
// applications of `step` to |+><+| (x) rho_s; grid.dt must be the step time.
fdos::FdosSignal noisy_fdos(const NoisyCircuit& step, const qcore::DensityMatrix& rho_s,
                            const fdos::TimeGrid& grid, double normalization);

// Straight-line fit of log|G_noisy/G_ideal| = a - t/tau over the points
// before the ratio first drops below `floor`, skipping points where
// |G_ideal| < ideal_min * |G_ideal(0)|.
struct EnvelopeFit {
  double tau = 0.0;
  double rate = 0.0;  // 1/tau
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_used = 0;
};
EnvelopeFit fit_envelope(const fdos::FdosSignal& noisy, const fdos::FdosSignal& ideal,
                         double floor = 0.05, double ideal_min = 0.05);

}  // namespace qdos::noisemodel
