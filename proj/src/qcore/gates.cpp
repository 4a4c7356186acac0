#include "qdos/qcore/gates.hpp"

#include <cmath>
#include <string>

#include "qdos/common/errors.hpp"

namespace qdos::qcore {

namespace {

const cplx kI{0.0, 1.0};

void check_real(const PauliString& p) {
  if (std::abs(p.coefficient().imag()) > 1e-12)
    throw DomainError("rotation generator must have a real coefficient");
}

// exp(-i angle P) on the amplitudes a[b] with (b & cond_mask) == cond_value.
void rotate(cplx* a, std::uint64_t d, const PauliString& p, double angle, std::uint64_t cond_mask,
            std::uint64_t cond_value) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const std::uint64_t x = p.x_mask();
  if (x == 0) {
    const cplx plus{c, -s};   // phase(b) = +1
    const cplx minus{c, s};   // phase(b) = -1
    const std::uint64_t z = p.z_mask();
    for (std::uint64_t b = 0; b < d; ++b) {
      if ((b & cond_mask) != cond_value) continue;
      a[b] *= (__builtin_popcountll(b & z) & 1) ? minus : plus;
    }
    return;
  }
  const std::uint64_t pivot = x & (~x + 1);
  for (std::uint64_t b = 0; b < d; ++b) {
    if ((b & pivot) || (b & cond_mask) != cond_value) continue;
    const std::uint64_t bx = b ^ x;
    const cplx a0 = a[b];
    const cplx a1 = a[bx];
    a[b] = c * a0 - kI * s * p.phase(bx) * a1;
    a[bx] = c * a1 - kI * s * p.phase(b) * a0;
  }
}

template <typename Kernel>
void conjugate(Eigen::MatrixXcd& m, Kernel&& left) {
  const auto d = static_cast<std::uint64_t>(m.rows());
  for (Eigen::Index col = 0; col < m.cols(); ++col) left(m.col(col).data(), d);
  m.adjointInPlace();
  for (Eigen::Index col = 0; col < m.cols(); ++col) left(m.col(col).data(), d);
  m.adjointInPlace();
}

void check_qubits(int state_n, const PauliString& p) {
  if (state_n != p.n_qubits())
    throw DimensionError("rotation on " + std::to_string(p.n_qubits()) + " qubits applied to a " +
                         std::to_string(state_n) + "-qubit state");
}

std::uint64_t control_mask(int n, int ancilla, const PauliString& p) {
  if (ancilla < 0 || ancilla >= n) throw DimensionError("ancilla index out of range");
  const std::uint64_t mask = std::uint64_t{1} << ancilla;
  if ((p.x_mask() | p.z_mask()) & mask)
    throw DomainError("ancilla qubit " + std::to_string(ancilla) + " overlaps the rotation support");
  return mask;
}

void apply_1q_kernel(cplx* a, std::uint64_t d, int qubit, const Eigen::Matrix2cd& u) {
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  for (std::uint64_t b = 0; b < d; ++b) {
    if (b & bit) continue;
    const cplx a0 = a[b];
    const cplx a1 = a[b | bit];
    a[b] = u(0, 0) * a0 + u(0, 1) * a1;
    a[b | bit] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

}  // namespace

void apply_pauli_rotation(StateVector& psi, const PauliString& p, double angle) {
  check_qubits(psi.n_qubits(), p);
  check_real(p);
  rotate(psi.amplitudes().data(), psi.dimension(), p, angle, 0, 0);
}

void apply_pauli_rotation(DensityMatrix& rho, const PauliString& p, double angle) {
  check_qubits(rho.n_qubits(), p);
  check_real(p);
  conjugate(rho.matrix(), [&](cplx* a, std::uint64_t d) { rotate(a, d, p, angle, 0, 0); });
}

void apply_controlled_pauli_rotation(StateVector& psi, int ancilla, const PauliString& p,
                                     double angle) {
  apply_conditioned_pauli_rotation(psi, ancilla, 1, p, angle);
}

void apply_conditioned_pauli_rotation(StateVector& psi, int ancilla, int value,
                                      const PauliString& p, double angle) {
  check_qubits(psi.n_qubits(), p);
  check_real(p);
  const std::uint64_t mask = control_mask(psi.n_qubits(), ancilla, p);
  rotate(psi.amplitudes().data(), psi.dimension(), p, angle, mask, value ? mask : 0);
}

void apply_controlled_pauli_rotation(DensityMatrix& rho, int ancilla, const PauliString& p,
                                     double angle) {
  check_qubits(rho.n_qubits(), p);
  check_real(p);
  const std::uint64_t mask = control_mask(rho.n_qubits(), ancilla, p);
  conjugate(rho.matrix(), [&](cplx* a, std::uint64_t d) { rotate(a, d, p, angle, mask, mask); });
}

GateCost pauli_rotation_cost(const PauliString& p) {
  GateCost cost;
  cost.rotations = 1;
  const int w = p.weight();
  cost.single_qubit = 2 * __builtin_popcountll(p.x_mask());
  cost.cnot = w > 1 ? 2 * (w - 1) : 0;
  return cost;
}

const Eigen::Matrix2cd& hadamard_matrix() {
  static const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
  }();
  return h;
}

const Eigen::Matrix2cd& sdg_hadamard_matrix() {
  static const Eigen::Matrix2cd w = [] {
    Eigen::Matrix2cd sdg;
    sdg << 1.0, 0.0, 0.0, cplx(0.0, -1.0);
    return Eigen::Matrix2cd(hadamard_matrix() * sdg);
  }();
  return w;
}

void apply_single_qubit(StateVector& psi, int qubit, const Eigen::Matrix2cd& u) {
  if (qubit < 0 || qubit >= psi.n_qubits()) throw DimensionError("qubit index out of range");
  apply_1q_kernel(psi.amplitudes().data(), psi.dimension(), qubit, u);
}

void apply_single_qubit(DensityMatrix& rho, int qubit, const Eigen::Matrix2cd& u) {
  if (qubit < 0 || qubit >= rho.n_qubits()) throw DimensionError("qubit index out of range");
  conjugate(rho.matrix(), [&](cplx* a, std::uint64_t d) { apply_1q_kernel(a, d, qubit, u); });
}

RotationCircuit::RotationCircuit(int n_qubits, std::vector<RotationGate> gates) : n_(n_qubits) {
  for (auto& g : gates) add(g.pauli, g.angle);
}

void RotationCircuit::add(const PauliString& p, double angle) {
  if (p.n_qubits() != n_) throw DimensionError("gate qubit count differs from circuit");
  gates_.push_back({p.with_coefficient(1.0), angle});
}

void RotationCircuit::append(const RotationCircuit& other) {
  for (const auto& g : other.gates_) add(g.pauli, g.angle);
}

RotationCircuit RotationCircuit::inverse() const {
  RotationCircuit inv(n_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) inv.add(it->pauli, -it->angle);
  return inv;
}

void RotationCircuit::apply(StateVector& psi) const {
  for (const auto& g : gates_) apply_pauli_rotation(psi, g.pauli, g.angle);
}

void RotationCircuit::apply(DensityMatrix& rho) const {
  for (const auto& g : gates_) apply_pauli_rotation(rho, g.pauli, g.angle);
}

void RotationCircuit::apply_controlled(StateVector& joint, int ancilla,
                                       const std::vector<int>& map) const {
  apply_conditioned(joint, ancilla, 1, map);
}

void RotationCircuit::apply_conditioned(StateVector& joint, int ancilla, int value,
                                        const std::vector<int>& map) const {
  for (const auto& g : gates_)
    apply_conditioned_pauli_rotation(joint, ancilla, value, g.pauli.embed(joint.n_qubits(), map),
                                     g.angle);
}

std::vector<int> register_map(int n_register, int ancilla) {
  std::vector<int> map(static_cast<std::size_t>(n_register));
  for (int j = 0; j < n_register; ++j) map[static_cast<std::size_t>(j)] = j < ancilla ? j : j + 1;
  return map;
}

std::size_t layered_parameter_count(int n_qubits, int layers) {
  if (n_qubits < 1 || layers < 0) throw SpecError("layered circuit needs n >= 1 and L >= 0");
  return static_cast<std::size_t>(layers) * static_cast<std::size_t>(3 * n_qubits + (n_qubits - 1));
}

RotationCircuit layered_circuit(int n_qubits, int layers, std::span<const double> angles) {
  if (angles.size() != layered_parameter_count(n_qubits, layers))
    throw DimensionError("layered circuit expects " +
                         std::to_string(layered_parameter_count(n_qubits, layers)) +
                         " angles, got " + std::to_string(angles.size()));
  RotationCircuit c(n_qubits);
  std::size_t k = 0;
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n_qubits; ++q) {
      c.add(PauliString::single(n_qubits, q, 'X'), angles[k++]);
      c.add(PauliString::single(n_qubits, q, 'Z'), angles[k++]);
      c.add(PauliString::single(n_qubits, q, 'Y'), angles[k++]);
    }
    for (int q = 0; q + 1 < n_qubits; ++q) {
      const std::uint64_t zz = (std::uint64_t{3} << q);
      c.add(PauliString::from_masks(n_qubits, 0, zz), angles[k++]);
    }
  }
  return c;
}

}  // namespace qdos::qcore
