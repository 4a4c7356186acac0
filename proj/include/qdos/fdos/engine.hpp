#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qdos/evolve/propagator.hpp"
#include "qdos/fdos/signal.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::fdos {

// Loschmidt echoes <psi|U(t)|psi> and traces Tr[U(t)] on one invariant space,
// with U either the exact propagator or a power of a Trotter step. Both are
// handled through their spectral decomposition U = sum_l u_l(t) |v_l><v_l|.
class EchoEngine {
 public:
  static EchoEngine exact(const evolve::PropagatorOracle& oracle);
  static EchoEngine trotter(const evolve::TrotterSpectrum& spectrum);

  const std::string& kind() const { return kind_; }
  int n_qubits() const { return n_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<std::uint64_t>& basis() const { return basis_; }
  bool is_full_space() const { return basis_.size() == (std::size_t{1} << n_); }
  // Common Hamming weight of the basis, or -1 when it is mixed.
  int particle_number() const { return weight_; }

  // u_l(t). Trotter engines snap t to the nearest step.
  Eigen::VectorXcd phases(double t) const;
  cplx trace(double t) const { return phases(t).sum(); }

  cplx echo(const qcore::StateVector& psi, double t) const;
  // Echo of the basis state at position `pos` of basis().
  cplx basis_echo(std::size_t pos, const Eigen::VectorXcd& phases) const;
  // The same for every basis state at once.
  Eigen::VectorXcd basis_echoes(const Eigen::VectorXcd& phases) const;
  // Echoes of a batch of states given as columns in basis() coordinates.
  Eigen::VectorXcd echoes(const Eigen::MatrixXcd& coords, const Eigen::VectorXcd& phases) const;

  // Amplitudes on basis(); throws DomainError when psi leaks outside.
  Eigen::VectorXcd project(const qcore::StateVector& psi) const;
  std::optional<std::size_t> position(std::uint64_t index) const;

 private:
  EchoEngine() = default;
  void finish();
  std::string kind_;
  int n_ = 0;
  int weight_ = -1;
  double dt_ = 0.0;
  std::vector<std::uint64_t> basis_;
  std::vector<std::int64_t> pos_;
  std::vector<double> energies_;      // exact
  Eigen::VectorXcd lambda_;           // trotter
  Eigen::MatrixXcd vectors_;          // columns v_l
  Eigen::MatrixXd basis_weights_;     // |v_l(b)|^2, rows b
};

// FDOS from the exact trace: G(t_k) = sum_l e^{-i E_l t_k} / sqrt(2 pi).
FdosSignal exact_fdos(const evolve::PropagatorOracle& oracle, const TimeGrid& grid);
FdosSignal exact_fdos(const std::vector<double>& eigenvalues, const TimeGrid& grid);
// Same with the engine's trace (exact or Trotterized dynamics).
FdosSignal trace_fdos(const EchoEngine& engine, const TimeGrid& grid);

}  // namespace qdos::fdos
