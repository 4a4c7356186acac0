#include "qdos/hamlib/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qdos/common/errors.hpp"
#include "qdos/qcore/state.hpp"

namespace qdos::hamlib {

using qcore::cplx;
using qcore::PauliString;
using qcore::QubitHamiltonian;

std::optional<std::size_t> SubspaceIndex::position(std::uint64_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return std::nullopt;
  return static_cast<std::size_t>(it - indices.begin());
}

SubspaceIndex subspace_index(int n_qubits, int M) {
  if (n_qubits < 1 || n_qubits > 30) throw DimensionError("subspace qubit count out of range");
  if (M < 0 || M > n_qubits) throw DomainError("particle number must lie in [0, n]");
  SubspaceIndex s;
  s.n_qubits = n_qubits;
  s.M = M;
  const std::uint64_t d = std::uint64_t{1} << n_qubits;
  for (std::uint64_t b = 0; b < d; ++b)
    if (__builtin_popcountll(b) == M) s.indices.push_back(b);
  return s;
}

bool conserves_number(const QubitHamiltonian& h) {
  // [H, sum_j Z_j] = sum over anticommuting (term, Z_j) pairs of 2 P Z_j.
  const int n = h.n_qubits();
  QubitHamiltonian comm(n);
  std::vector<PauliString> acc;
  for (const auto& t : h.terms()) {
    for (int j = 0; j < n; ++j) {
      const PauliString z = PauliString::single(n, j, 'Z');
      if (qcore::symplectic_product(t, z) == 0) continue;
      acc.push_back(t * z);
    }
  }
  // Merge with complex coefficients.
  std::vector<PauliString> merged;
  for (const auto& p : acc) {
    bool found = false;
    for (auto& m : merged) {
      if (m.same_letters(p)) {
        m = m.with_coefficient(m.coefficient() + p.coefficient());
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(p);
  }
  for (const auto& m : merged)
    if (std::abs(m.coefficient()) > 1e-12) return false;
  return true;
}

Eigen::MatrixXcd restricted_matrix(const QubitHamiltonian& h, const std::vector<std::uint64_t>& basis) {
  const std::size_t dim = basis.size();
  const std::uint64_t full = h.dimension();
  std::vector<std::int64_t> pos(full, -1);
  for (std::size_t i = 0; i < dim; ++i) {
    if (basis[i] >= full) throw DimensionError("basis index exceeds Hamiltonian dimension");
    pos[basis[i]] = static_cast<std::int64_t>(i);
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<cplx> scratch(full, 0.0);
  std::vector<std::uint64_t> touched;
  for (std::size_t c = 0; c < dim; ++c) {
    const std::uint64_t b = basis[c];
    touched.clear();
    for (const auto& t : h.terms()) {
      const std::uint64_t r = b ^ t.x_mask();
      if (scratch[r] == cplx(0.0)) touched.push_back(r);
      scratch[r] += t.coefficient().real() * t.phase(b);
    }
    for (std::uint64_t r : touched) {
      const cplx v = scratch[r];
      scratch[r] = 0.0;
      if (pos[r] < 0) {
        if (std::abs(v) > 1e-12)
          throw DomainError("Hamiltonian does not preserve the requested subspace");
        continue;
      }
      m(pos[r], static_cast<Eigen::Index>(c)) += v;
    }
  }
  return m;
}

namespace {

std::vector<std::uint64_t> full_basis(int n) {
  std::vector<std::uint64_t> b(std::size_t{1} << n);
  std::iota(b.begin(), b.end(), std::uint64_t{0});
  return b;
}

std::vector<double> block_values(const QubitHamiltonian& h, const std::vector<std::uint64_t>& basis) {
  const Eigen::MatrixXcd m = restricted_matrix(h, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

}  // namespace

EigenSystem eigensystem(const QubitHamiltonian& h, const std::optional<SubspaceIndex>& subspace) {
  EigenSystem sys;
  if (subspace) {
    if (subspace->n_qubits != h.n_qubits()) throw DimensionError("subspace qubit count mismatch");
    sys.basis = subspace->indices;
  } else {
    if (h.n_qubits() > kMaxEigenvectorQubits)
      throw DimensionError("full-space eigenvectors limited to n <= " +
                           std::to_string(kMaxEigenvectorQubits) + "; restrict to a subspace");
    sys.basis = full_basis(h.n_qubits());
  }
  const Eigen::MatrixXcd m = restricted_matrix(h, sys.basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw DomainError("eigensolver failed to converge");
  sys.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  sys.vectors = es.eigenvectors();
  return sys;
}

std::vector<double> exact_spectrum(const QubitHamiltonian& h, const std::optional<SubspaceIndex>& subspace) {
  if (subspace) {
    if (subspace->n_qubits != h.n_qubits()) throw DimensionError("subspace qubit count mismatch");
    return block_values(h, subspace->indices);
  }
  const int n = h.n_qubits();
  if (n > kMaxDenseQubits)
    throw DimensionError("full spectrum limited to n <= " + std::to_string(kMaxDenseQubits));
  if (!conserves_number(h)) return block_values(h, full_basis(n));
  std::vector<double> all;
  for (int M = 0; M <= n; ++M) {
    const auto vals = block_values(h, subspace_index(n, M).indices);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

Rescaled rescale_spectrum(const QubitHamiltonian& h, RescaleMode mode) {
  double lo = 0.0, hi = 0.0;
  if (mode == RescaleMode::exact) {
    const auto e = exact_spectrum(h);
    lo = e.front();
    hi = e.back();
  } else {
    // Power iteration on H - c, with c the identity coefficient, estimates the
    // spectral radius of the traceless part; pad it by 1% for safety.
    const double c = h.identity_coefficient();
    const QubitHamiltonian traceless = h.affine(1.0, -c);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(h.dimension()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(1.0 + 0.1 * std::sin(1.7 * static_cast<double>(i)), 0.0);
    v.normalize();
    double radius = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXcd w = qcore::apply_hamiltonian(traceless, v);
      const double nrm = w.norm();
      if (nrm == 0.0) break;
      const double prev = radius;
      radius = nrm;
      v = w / nrm;
      if (it > 10 && std::abs(radius - prev) < 1e-10 * radius) break;
    }
    radius = std::min(radius * 1.01, traceless.one_norm());
    lo = c - radius;
    hi = c + radius;
  }
  if (!(hi - lo > 1e-12 * std::max(1.0, std::abs(hi))))
    throw DomainError("spectrum has zero width; cannot rescale");
  RescaleInfo info;
  info.scale = 2.0 / (hi - lo);
  info.shift = -(hi + lo) / (hi - lo);
  return {h.affine(info.scale, info.shift), info};
}

}  // namespace qdos::hamlib
