#include "qdos/evolve/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "qdos/common/errors.hpp"

namespace qdos::evolve {

PropagatorOracle::PropagatorOracle(const qcore::QubitHamiltonian& h,
                                   const std::optional<hamlib::SubspaceIndex>& subspace,
                                   std::optional<hamlib::RescaleInfo> rescale)
    : n_(h.n_qubits()),
      full_(!subspace.has_value()),
      M_(subspace ? subspace->M : -1),
      sys_(hamlib::eigensystem(h, subspace)),
      rescale_(rescale) {}

Eigen::VectorXcd PropagatorOracle::project(const qcore::StateVector& psi) const {
  if (psi.n_qubits() != n_) throw DimensionError("state and oracle qubit counts differ");
  if (full_) return psi.amplitudes();
  Eigen::VectorXcd c(static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < dimension(); ++i) c[static_cast<Eigen::Index>(i)] = psi[sys_.basis[i]];
  const double outside = psi.amplitudes().squaredNorm() - c.squaredNorm();
  if (outside > 1e-10) throw DomainError("state has weight outside the oracle's subspace");
  return c;
}

qcore::StateVector PropagatorOracle::embed(const Eigen::VectorXcd& coords) const {
  if (static_cast<std::size_t>(coords.size()) != dimension())
    throw DimensionError("coordinate vector length differs from oracle dimension");
  if (full_) return qcore::StateVector(n_, coords);
  qcore::StateVector psi(n_);
  psi[0] = 0.0;
  for (std::size_t i = 0; i < dimension(); ++i) psi[sys_.basis[i]] = coords[static_cast<Eigen::Index>(i)];
  return psi;
}

qcore::StateVector exact_evolve(const PropagatorOracle& oracle, const qcore::StateVector& psi, double t) {
  const Eigen::MatrixXcd& w = oracle.eigenvectors();
  Eigen::VectorXcd c = w.adjoint() * oracle.project(psi);
  const auto& e = oracle.eigenvalues();
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -e[static_cast<std::size_t>(i)] * t);
  return oracle.embed(w * c);
}

TrotterSpectrum::TrotterSpectrum(const TrotterPlan& plan, const std::vector<std::uint64_t>& basis)
    : n_(plan.n_qubits()), dt_(plan.dt()), basis_(basis) {
  const std::size_t dim = basis_.size();
  if (dim == 0) throw DimensionError("empty basis for Trotter spectrum");
  const std::uint64_t full = std::uint64_t{1} << n_;
  std::vector<std::int64_t> pos(full, -1);
  for (std::size_t i = 0; i < dim; ++i) {
    if (basis_[i] >= full) throw DimensionError("basis index exceeds register");
    pos[basis_[i]] = static_cast<std::int64_t>(i);
  }
  const auto d = static_cast<Eigen::Index>(dim);
  v_.resize(d, d);
  for (std::size_t c = 0; c < dim; ++c) {
    qcore::StateVector psi = qcore::StateVector::basis(n_, basis_[c]);
    trotter_step(plan, psi);
    double inside = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      const qcore::cplx a = psi[basis_[r]];
      v_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a;
      inside += std::norm(a);
    }
    if (1.0 - inside > 1e-10) throw DomainError("Trotter step leaks out of the requested subspace");
  }
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(v_);
  if (schur.info() != Eigen::Success) throw DomainError("Schur decomposition failed");
  const Eigen::MatrixXcd& t = schur.matrixT();
  lambda_ = t.diagonal();
  q_ = schur.matrixU();
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < j; ++i) residual_ = std::max(residual_, std::abs(t(i, j)));
  if (residual_ > 1e-8)
    throw DomainError("Trotter step matrix is not normal to working precision (residual " +
                      std::to_string(residual_) + ")");
}

Eigen::VectorXcd TrotterSpectrum::powers(std::int64_t k) const {
  Eigen::VectorXcd out(lambda_.size());
  const double kd = static_cast<double>(k);
  for (Eigen::Index l = 0; l < lambda_.size(); ++l)
    out[l] = std::polar(std::pow(std::abs(lambda_[l]), kd), kd * std::arg(lambda_[l]));
  return out;
}

TrotterFidelity::TrotterFidelity(const PropagatorOracle& oracle, const TrotterPlan& plan) {
  init(oracle, TrotterSpectrum(plan, oracle.basis()));
}

TrotterFidelity::TrotterFidelity(const PropagatorOracle& oracle, const TrotterSpectrum& spectrum) {
  init(oracle, spectrum);
}

void TrotterFidelity::init(const PropagatorOracle& oracle, const TrotterSpectrum& spectrum) {
  if (oracle.basis() != spectrum.basis()) throw DimensionError("oracle and Trotter spectrum use different spaces");
  dt_ = spectrum.dt();
  energies_ = oracle.eigenvalues();
  lambda_ = spectrum.eigenphases();
  overlap_ = (spectrum.eigenvectors().adjoint() * oracle.eigenvectors()).cwiseAbs2();
}

cplx TrotterFidelity::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("fidelity time must be non-negative");
  const std::int64_t k = std::llround(t / dt_);
  const double ts = static_cast<double>(k) * dt_;
  Eigen::VectorXcd phase(static_cast<Eigen::Index>(energies_.size()));
  for (std::size_t j = 0; j < energies_.size(); ++j) phase[static_cast<Eigen::Index>(j)] = std::polar(1.0, energies_[j] * ts);
  const Eigen::VectorXcd per_l = overlap_.cast<cplx>() * phase;
  cplx acc = 0.0;
  const double kd = static_cast<double>(k);
  for (Eigen::Index l = 0; l < lambda_.size(); ++l)
    acc += std::polar(std::pow(std::abs(lambda_[l]), kd), kd * std::arg(lambda_[l])) * per_l[l];
  return acc / static_cast<double>(energies_.size());
}

cplx trotter_unitary_fidelity(const PropagatorOracle& oracle, const TrotterPlan& plan, double t) {
  return TrotterFidelity(oracle, plan)(t);
}

BlockTrotterFidelity::BlockTrotterFidelity(const qcore::QubitHamiltonian& h, const TrotterPlan& plan) {
  if (!hamlib::conserves_number(h)) throw DomainError("block fidelity needs a number-conserving Hamiltonian");
  const int n = h.n_qubits();
  const double d = std::ldexp(1.0, n);
  for (int M = 0; M <= n; ++M) {
    const auto sub = hamlib::subspace_index(n, M);
    PropagatorOracle oracle(h, sub);
    blocks_.emplace_back(oracle, plan);
    weights_.push_back(static_cast<double>(sub.dimension()) / d);
  }
}

cplx BlockTrotterFidelity::operator()(double t) const {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) acc += weights_[i] * blocks_[i](t);
  return acc;
}

}  // namespace qdos::evolve
