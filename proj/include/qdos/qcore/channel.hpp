#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qdos/qcore/state.hpp"

namespace qdos::qcore {

// Completely positive trace-preserving map on `arity` qubits in Kraus form.
// Operators act on the local 2^k space with target i as local bit i.
class KrausChannel {
 public:
  KrausChannel(int arity, std::vector<Eigen::MatrixXcd> operators, double tol = 1e-10);

  // sum_b probs[b] P_b rho P_b, Pauli index b as in PauliString::from_index.
  static KrausChannel pauli(int arity, std::vector<double> probabilities, double tol = 1e-10);
  static KrausChannel identity(int arity);

  int arity() const { return arity_; }
  const std::vector<Eigen::MatrixXcd>& operators() const { return ops_; }
  bool is_pauli() const { return !pauli_probs_.empty(); }
  const std::vector<double>& pauli_probabilities() const { return pauli_probs_; }

 private:
  KrausChannel() = default;
  int arity_ = 0;
  std::vector<Eigen::MatrixXcd> ops_;
  std::vector<double> pauli_probs_;
};

void apply_kraus(DensityMatrix& rho, const KrausChannel& channel, const std::vector<int>& targets);

}  // namespace qdos::qcore
