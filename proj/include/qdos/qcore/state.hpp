#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qdos/qcore/pauli.hpp"

namespace qdos::qcore {

class StateVector {
 public:
  // |0...0> on n qubits.
  explicit StateVector(int n_qubits = 1);
  StateVector(int n_qubits, Eigen::VectorXcd amplitudes);

  static StateVector basis(int n_qubits, std::uint64_t index);
  static StateVector plus(int n_qubits);

  int n_qubits() const { return n_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
  cplx& operator[](std::size_t i) { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amps_.norm(); }
  void normalize();
  // Throws ValidationError when | |psi| - 1 | exceeds tol.
  void check_normalized(double tol = 1e-10) const;

 private:
  int n_;
  Eigen::VectorXcd amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits = 1);
  DensityMatrix(int n_qubits, Eigen::MatrixXcd matrix);

  static DensityMatrix from_pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int n_qubits);
  // Normalized projector onto the span of the given basis states.
  static DensityMatrix projected_mixed(int n_qubits, const std::vector<std::uint64_t>& indices);

  int n_qubits() const { return n_; }
  std::size_t dimension() const { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::MatrixXcd& matrix() { return rho_; }

  cplx trace() const { return rho_.trace(); }
  double purity() const;
  // Hermiticity and unit trace; the eigenvalue check is opt-in because it is O(d^3).
  void validate(double tol = 1e-10, bool check_psd = false) const;

 private:
  int n_;
  Eigen::MatrixXcd rho_;
};

// Tensor product with `high` occupying the most significant qubits.
DensityMatrix tensor(const DensityMatrix& high, const DensityMatrix& low);

cplx inner(const StateVector& a, const StateVector& b);

// Coefficient times <psi|P|psi>, or coefficient times Tr[rho P].
cplx pauli_expectation(const StateVector& psi, const PauliString& p);
cplx pauli_expectation(const DensityMatrix& rho, const PauliString& p);

double expectation(const StateVector& psi, const QubitHamiltonian& h);
double expectation(const DensityMatrix& rho, const QubitHamiltonian& h);

// out = H psi using the Pauli-mask action; no dense matrix is formed.
Eigen::VectorXcd apply_hamiltonian(const QubitHamiltonian& h, const Eigen::VectorXcd& psi);

// Dense 2^n x 2^n matrix of H. Intended for n <= 12.
Eigen::MatrixXcd dense_matrix(const QubitHamiltonian& h);
Eigen::MatrixXcd dense_matrix(const PauliString& p);

}  // namespace qdos::qcore
