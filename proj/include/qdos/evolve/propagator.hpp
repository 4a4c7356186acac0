#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "qdos/evolve/trotter.hpp"
#include "qdos/hamlib/spectrum.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::evolve {

using qcore::cplx;

// Dense eigendecomposition of H on the full space or on one particle-number
// block. Vectors are stored in the coordinates of basis().
class PropagatorOracle {
 public:
  explicit PropagatorOracle(const qcore::QubitHamiltonian& h,
                            const std::optional<hamlib::SubspaceIndex>& subspace = std::nullopt,
                            std::optional<hamlib::RescaleInfo> rescale = std::nullopt);

  int n_qubits() const { return n_; }
  std::size_t dimension() const { return sys_.basis.size(); }
  bool is_full_space() const { return full_; }
  const std::vector<double>& eigenvalues() const { return sys_.values; }
  const Eigen::MatrixXcd& eigenvectors() const { return sys_.vectors; }
  const std::vector<std::uint64_t>& basis() const { return sys_.basis; }
  const std::optional<hamlib::RescaleInfo>& rescale() const { return rescale_; }
  // Particle number of the block, or -1 for the full space.
  int particle_number() const { return M_; }

  // Amplitudes on basis(); throws DomainError if psi has weight outside it.
  Eigen::VectorXcd project(const qcore::StateVector& psi) const;
  qcore::StateVector embed(const Eigen::VectorXcd& coords) const;

 private:
  int n_;
  bool full_;
  int M_;
  hamlib::EigenSystem sys_;
  std::optional<hamlib::RescaleInfo> rescale_;
};

qcore::StateVector exact_evolve(const PropagatorOracle& oracle, const qcore::StateVector& psi, double t);

// Spectral decomposition of one Trotter step restricted to an invariant span
// of basis states. The step matrix is unitary (hence normal), so its complex
// Schur form is diagonal up to rounding: V = Q diag(lambda) Q^dagger.
class TrotterSpectrum {
 public:
  TrotterSpectrum(const TrotterPlan& plan, const std::vector<std::uint64_t>& basis);

  double dt() const { return dt_; }
  int n_qubits() const { return n_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<std::uint64_t>& basis() const { return basis_; }
  const Eigen::VectorXcd& eigenphases() const { return lambda_; }
  const Eigen::MatrixXcd& eigenvectors() const { return q_; }
  const Eigen::MatrixXcd& step_matrix() const { return v_; }
  // Largest off-diagonal magnitude left in the Schur factor.
  double schur_residual() const { return residual_; }

  // lambda_l^k with the modulus kept (it is 1 up to rounding).
  Eigen::VectorXcd powers(std::int64_t k) const;
  cplx trace_power(std::int64_t k) const { return powers(k).sum(); }

 private:
  int n_;
  double dt_;
  std::vector<std::uint64_t> basis_;
  Eigen::MatrixXcd v_;
  Eigen::MatrixXcd q_;
  Eigen::VectorXcd lambda_;
  double residual_ = 0.0;
};

// F(t) = (1/D) Tr[e^{iHt} V^k], k = snapped step count and t = k dt, on the
// oracle's space. Setup is O(D^3); each evaluation is O(D^2).
class TrotterFidelity {
 public:
  TrotterFidelity(const PropagatorOracle& oracle, const TrotterPlan& plan);
  TrotterFidelity(const PropagatorOracle& oracle, const TrotterSpectrum& spectrum);
  cplx operator()(double t) const;
  std::size_t dimension() const { return static_cast<std::size_t>(overlap_.rows()); }

 private:
  void init(const PropagatorOracle& oracle, const TrotterSpectrum& spectrum);
  double dt_;
  std::vector<double> energies_;
  Eigen::VectorXcd lambda_;
  Eigen::MatrixXd overlap_;  // |(Q^dagger W)_{lj}|^2
};

cplx trotter_unitary_fidelity(const PropagatorOracle& oracle, const TrotterPlan& plan, double t);

// Full-space fidelity of a number-conserving H assembled from its
// particle-number blocks: F = sum_M D_M F_M / 2^n.
class BlockTrotterFidelity {
 public:
  BlockTrotterFidelity(const qcore::QubitHamiltonian& h, const TrotterPlan& plan);
  cplx operator()(double t) const;

 private:
  std::vector<TrotterFidelity> blocks_;
  std::vector<double> weights_;
};

}  // namespace qdos::evolve
