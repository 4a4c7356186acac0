#include "qdos/qcore/state.hpp"

#include <cmath>
#include <string>

#include "qdos/common/errors.hpp"

namespace qdos::qcore {

namespace {

std::size_t dim_of(int n) {
  if (n < 1 || n > 30) throw DimensionError("state qubit count out of range: " + std::to_string(n));
  return std::size_t{1} << n;
}

void require_same(int a, int b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": qubit counts " + std::to_string(a) + " and " +
                         std::to_string(b));
}

}  // namespace

StateVector::StateVector(int n_qubits)
    : n_(n_qubits), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_of(n_qubits)))) {
  amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_(n_qubits), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != dim_of(n_qubits))
    throw DimensionError("amplitude vector length does not match 2^n");
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dimension()) throw DimensionError("basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

StateVector StateVector::plus(int n_qubits) {
  StateVector s(n_qubits);
  s.amps_.setConstant(1.0 / std::sqrt(static_cast<double>(s.dimension())));
  return s;
}

void StateVector::normalize() {
  const double nrm = amps_.norm();
  if (nrm == 0.0) throw DomainError("cannot normalize the zero vector");
  amps_ /= nrm;
}

void StateVector::check_normalized(double tol) const {
  if (std::abs(amps_.norm() - 1.0) > tol) throw ValidationError("state vector is not normalized");
}

DensityMatrix::DensityMatrix(int n_qubits)
    : n_(n_qubits),
      rho_(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_of(n_qubits)),
                                  static_cast<Eigen::Index>(dim_of(n_qubits)))) {
  rho_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(int n_qubits, Eigen::MatrixXcd matrix)
    : n_(n_qubits), rho_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(dim_of(n_qubits));
  if (rho_.rows() != d || rho_.cols() != d)
    throw DimensionError("density matrix shape does not match 2^n");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix(psi.n_qubits(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const auto d = static_cast<Eigen::Index>(dim_of(n_qubits));
  return DensityMatrix(n_qubits, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::projected_mixed(int n_qubits,
                                             const std::vector<std::uint64_t>& indices) {
  if (indices.empty()) throw DomainError("projected mixed state needs a non-empty subspace");
  const auto d = static_cast<Eigen::Index>(dim_of(n_qubits));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  const double w = 1.0 / static_cast<double>(indices.size());
  for (auto i : indices) {
    if (static_cast<Eigen::Index>(i) >= d) throw DimensionError("subspace index out of range");
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = w;
  }
  return DensityMatrix(n_qubits, std::move(m));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

void DensityMatrix::validate(double tol, bool check_psd) const {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > tol) throw ValidationError("density matrix trace is not 1");
  if (check_psd) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw ValidationError("density matrix has a negative eigenvalue");
  }
}

DensityMatrix tensor(const DensityMatrix& high, const DensityMatrix& low) {
  const auto dh = high.matrix().rows();
  const auto dl = low.matrix().rows();
  Eigen::MatrixXcd m(dh * dl, dh * dl);
  for (Eigen::Index i = 0; i < dh; ++i)
    for (Eigen::Index j = 0; j < dh; ++j) m.block(i * dl, j * dl, dl, dl) = high.matrix()(i, j) * low.matrix();
  return DensityMatrix(high.n_qubits() + low.n_qubits(), std::move(m));
}

cplx inner(const StateVector& a, const StateVector& b) {
  require_same(a.n_qubits(), b.n_qubits(), "inner product");
  return a.amplitudes().dot(b.amplitudes());
}

cplx pauli_expectation(const StateVector& psi, const PauliString& p) {
  require_same(psi.n_qubits(), p.n_qubits(), "expectation");
  const auto& a = psi.amplitudes();
  const std::uint64_t x = p.x_mask();
  cplx acc = 0.0;
  for (std::uint64_t b = 0; b < psi.dimension(); ++b)
    acc += std::conj(a[static_cast<Eigen::Index>(b ^ x)]) * p.phase(b) * a[static_cast<Eigen::Index>(b)];
  return p.coefficient() * acc;
}

cplx pauli_expectation(const DensityMatrix& rho, const PauliString& p) {
  require_same(rho.n_qubits(), p.n_qubits(), "expectation");
  // Tr[rho P] = sum_b rho(b, b ^ x) phase(b).
  const auto& m = rho.matrix();
  const std::uint64_t x = p.x_mask();
  cplx acc = 0.0;
  for (std::uint64_t b = 0; b < rho.dimension(); ++b)
    acc += m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ x)) * p.phase(b);
  return p.coefficient() * acc;
}

double expectation(const StateVector& psi, const QubitHamiltonian& h) {
  cplx acc = 0.0;
  for (const auto& t : h.terms()) acc += pauli_expectation(psi, t);
  return acc.real();
}

double expectation(const DensityMatrix& rho, const QubitHamiltonian& h) {
  cplx acc = 0.0;
  for (const auto& t : h.terms()) acc += pauli_expectation(rho, t);
  return acc.real();
}

Eigen::VectorXcd apply_hamiltonian(const QubitHamiltonian& h, const Eigen::VectorXcd& psi) {
  if (static_cast<std::size_t>(psi.size()) != h.dimension())
    throw DimensionError("vector length does not match Hamiltonian dimension");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  const std::uint64_t d = h.dimension();
  for (const auto& t : h.terms()) {
    const double c = t.coefficient().real();
    const std::uint64_t x = t.x_mask();
    for (std::uint64_t b = 0; b < d; ++b)
      out[static_cast<Eigen::Index>(b ^ x)] += c * t.phase(b) * psi[static_cast<Eigen::Index>(b)];
  }
  return out;
}

Eigen::MatrixXcd dense_matrix(const QubitHamiltonian& h) {
  const auto d = static_cast<Eigen::Index>(h.dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& t : h.terms()) m += dense_matrix(t);
  return m;
}

Eigen::MatrixXcd dense_matrix(const PauliString& p) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << p.n_qubits());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b)
    m(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ p.x_mask()), b) =
        p.coefficient() * p.phase(static_cast<std::uint64_t>(b));
  return m;
}

}  // namespace qdos::qcore
