#pragma once

#include <cstdint>
#include <vector>

#include "qdos/qcore/gates.hpp"
#include "qdos/qcore/pauli.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::evolve {

// Result of snapping a requested time onto the step grid.
struct StepSnap {
  std::int64_t n_steps = 0;
  double requested = 0.0;
  double snapped = 0.0;
  bool adjusted = false;
};

// One product-formula step in the Hamiltonian's term order. Order 1 uses
// angles c*dt; order 2 runs the terms forward with c*dt/2 and back again,
// with the middle term merged into a single c*dt rotation.
class TrotterPlan {
 public:
  TrotterPlan(const qcore::QubitHamiltonian& h, double dt, int order = 1, bool controlled = false);

  int n_qubits() const { return n_; }
  double dt() const { return dt_; }
  int order() const { return order_; }
  bool controlled() const { return controlled_; }
  const qcore::RotationCircuit& step() const { return step_; }

  // Nearest multiple of dt (ties away from zero).
  StepSnap snap(double t) const;

  // Decomposed gate count of one step; every rotation is controlled when
  // `controlled()` is set.
  qcore::GateCost step_cost() const;
  std::size_t rotations_per_step() const { return step_.size(); }

 private:
  int n_;
  double dt_;
  int order_;
  bool controlled_;
  qcore::RotationCircuit step_;
};

void trotter_step(const TrotterPlan& plan, qcore::StateVector& psi);

qcore::StateVector trotter_evolve_steps(const TrotterPlan& plan, qcore::StateVector psi,
                                        std::int64_t n_steps);
// Evolves for plan.snap(t).n_steps steps; t must be non-negative.
qcore::StateVector trotter_evolve(const TrotterPlan& plan, qcore::StateVector psi, double t);

// Controlled evolution on a joint register: register qubit j sits at joint
// qubit j (j < ancilla) or j + 1 (j >= ancilla).
qcore::StateVector controlled_trotter_evolve(const TrotterPlan& plan, qcore::StateVector joint,
                                             int ancilla, double t);
qcore::StateVector controlled_trotter_evolve_steps(const TrotterPlan& plan, qcore::StateVector joint,
                                                   int ancilla, std::int64_t n_steps);

}  // namespace qdos::evolve
