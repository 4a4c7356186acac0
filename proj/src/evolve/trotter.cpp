#include "qdos/evolve/trotter.hpp"

#include <cmath>
#include <string>

#include "qdos/common/errors.hpp"

namespace qdos::evolve {

using qcore::PauliString;

TrotterPlan::TrotterPlan(const qcore::QubitHamiltonian& h, double dt, int order, bool controlled)
    : n_(h.n_qubits()), dt_(dt), order_(order), controlled_(controlled), step_(h.n_qubits()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw SpecError("Trotter step must be positive and finite");
  if (order != 1 && order != 2) throw SpecError("Trotter order must be 1 or 2");
  const auto& terms = h.terms();
  if (order == 1) {
    for (const auto& t : terms) step_.add(t, t.coefficient().real() * dt);
    return;
  }
  if (terms.empty()) return;
  for (std::size_t i = 0; i + 1 < terms.size(); ++i)
    step_.add(terms[i], 0.5 * terms[i].coefficient().real() * dt);
  step_.add(terms.back(), terms.back().coefficient().real() * dt);
  for (std::size_t i = terms.size() - 1; i-- > 0;)
    step_.add(terms[i], 0.5 * terms[i].coefficient().real() * dt);
}

StepSnap TrotterPlan::snap(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolution time must be finite and >= 0");
  StepSnap s;
  s.requested = t;
  s.n_steps = std::llround(t / dt_);
  s.snapped = static_cast<double>(s.n_steps) * dt_;
  s.adjusted = std::abs(s.snapped - t) > 1e-12 * std::max(1.0, t);
  return s;
}

qcore::GateCost TrotterPlan::step_cost() const {
  qcore::GateCost total;
  for (const auto& g : step_.gates()) total += qcore::pauli_rotation_cost(g.pauli);
  return total;
}

void trotter_step(const TrotterPlan& plan, qcore::StateVector& psi) {
  if (psi.n_qubits() != plan.n_qubits())
    throw DimensionError("plan acts on " + std::to_string(plan.n_qubits()) + " qubits, state has " +
                         std::to_string(psi.n_qubits()));
  plan.step().apply(psi);
}

qcore::StateVector trotter_evolve_steps(const TrotterPlan& plan, qcore::StateVector psi,
                                        std::int64_t n_steps) {
  if (n_steps < 0) throw DomainError("step count must be non-negative");
  for (std::int64_t k = 0; k < n_steps; ++k) trotter_step(plan, psi);
  return psi;
}

qcore::StateVector trotter_evolve(const TrotterPlan& plan, qcore::StateVector psi, double t) {
  return trotter_evolve_steps(plan, std::move(psi), plan.snap(t).n_steps);
}

qcore::StateVector controlled_trotter_evolve_steps(const TrotterPlan& plan, qcore::StateVector joint,
                                                   int ancilla, std::int64_t n_steps) {
  if (!plan.controlled()) throw SpecError("plan was not built for controlled evolution");
  if (joint.n_qubits() != plan.n_qubits() + 1)
    throw DimensionError("joint register must hold the plan's qubits plus one ancilla");
  if (n_steps < 0) throw DomainError("step count must be non-negative");
  const auto map = qcore::register_map(plan.n_qubits(), ancilla);
  for (std::int64_t k = 0; k < n_steps; ++k) plan.step().apply_controlled(joint, ancilla, map);
  return joint;
}

qcore::StateVector controlled_trotter_evolve(const TrotterPlan& plan, qcore::StateVector joint,
                                             int ancilla, double t) {
  return controlled_trotter_evolve_steps(plan, std::move(joint), ancilla, plan.snap(t).n_steps);
}

}  // namespace qdos::evolve
