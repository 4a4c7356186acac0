#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qdos/qcore/pauli.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::qcore {

// Rotation convention used everywhere: R_P(angle) = exp(-i * angle * P) for
// the bare Pauli product P. The PauliString coefficient must be real and is
// not folded in; callers pass the full angle.
void apply_pauli_rotation(StateVector& psi, const PauliString& p, double angle);
void apply_pauli_rotation(DensityMatrix& rho, const PauliString& p, double angle);

// |0><0|_a (x) 1 + |1><1|_a (x) R_P(angle). The ancilla must lie outside the
// support of p (p is given on the full joint register).
void apply_controlled_pauli_rotation(StateVector& psi, int ancilla, const PauliString& p,
                                     double angle);
void apply_controlled_pauli_rotation(DensityMatrix& rho, int ancilla, const PauliString& p,
                                     double angle);
// Rotation applied on the branch where the ancilla equals `value` (0 or 1).
void apply_conditioned_pauli_rotation(StateVector& psi, int ancilla, int value,
                                      const PauliString& p, double angle);

// Gate inventory after decomposing a (controlled) Pauli rotation into a
// basis-change layer, a CNOT parity ladder and one (controlled) Z rotation.
struct GateCost {
  int rotations = 0;            // Rz, controlled when the rotation is controlled
  int single_qubit = 0;         // basis changes
  int cnot = 0;
  int two_qubit_total() const { return cnot; }
  GateCost& operator+=(const GateCost& o) {
    rotations += o.rotations;
    single_qubit += o.single_qubit;
    cnot += o.cnot;
    return *this;
  }
};
GateCost pauli_rotation_cost(const PauliString& p);

const Eigen::Matrix2cd& hadamard_matrix();
// S^dagger followed by H (matrix H S^dagger); reads the imaginary part in a
// Hadamard test.
const Eigen::Matrix2cd& sdg_hadamard_matrix();
void apply_single_qubit(StateVector& psi, int qubit, const Eigen::Matrix2cd& u);
void apply_single_qubit(DensityMatrix& rho, int qubit, const Eigen::Matrix2cd& u);

struct RotationGate {
  PauliString pauli;  // coefficient 1
  double angle = 0.0;
};

class RotationCircuit {
 public:
  explicit RotationCircuit(int n_qubits = 1) : n_(n_qubits) {}
  RotationCircuit(int n_qubits, std::vector<RotationGate> gates);

  int n_qubits() const { return n_; }
  const std::vector<RotationGate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  void add(const PauliString& p, double angle);
  void append(const RotationCircuit& other);

  RotationCircuit inverse() const;
  void apply(StateVector& psi) const;
  void apply(DensityMatrix& rho) const;
  // Controlled version on a joint register; register qubit j maps to map[j].
  void apply_controlled(StateVector& joint, int ancilla, const std::vector<int>& map) const;
  void apply_conditioned(StateVector& joint, int ancilla, int value,
                         const std::vector<int>& map) const;

 private:
  int n_;
  std::vector<RotationGate> gates_;
};

// Register qubit j -> joint qubit j for j < ancilla, j + 1 otherwise.
std::vector<int> register_map(int n_register, int ancilla);

// Hardware-efficient layered circuit: per layer, R_X, R_Z, R_Y on every qubit
// (qubit-major), then R_ZZ on each nearest-neighbour pair (j, j+1).
std::size_t layered_parameter_count(int n_qubits, int layers);
RotationCircuit layered_circuit(int n_qubits, int layers, std::span<const double> angles);

}  // namespace qdos::qcore
