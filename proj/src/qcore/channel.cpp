#include "qdos/qcore/channel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qdos/common/errors.hpp"
#include "qdos/qcore/pauli.hpp"

namespace qdos::qcore {

namespace {

Eigen::Index local_dim(int arity) { return Eigen::Index{1} << arity; }

// Applies a local operator k to every column of m (left multiplication by the
// embedded operator).
void left_multiply(Eigen::MatrixXcd& m, const Eigen::MatrixXcd& k, const std::vector<int>& targets) {
  const auto d = static_cast<std::uint64_t>(m.rows());
  const auto kd = static_cast<std::uint64_t>(k.rows());
  std::uint64_t tmask = 0;
  for (int t : targets) tmask |= std::uint64_t{1} << t;
  std::vector<std::uint64_t> offsets(kd);
  for (std::uint64_t l = 0; l < kd; ++l) {
    std::uint64_t off = 0;
    for (std::size_t i = 0; i < targets.size(); ++i)
      if ((l >> i) & 1U) off |= std::uint64_t{1} << targets[i];
    offsets[l] = off;
  }
  Eigen::VectorXcd in(static_cast<Eigen::Index>(kd));
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    cplx* a = m.col(col).data();
    for (std::uint64_t base = 0; base < d; ++base) {
      if (base & tmask) continue;
      for (std::uint64_t l = 0; l < kd; ++l) in[static_cast<Eigen::Index>(l)] = a[base | offsets[l]];
      for (std::uint64_t r = 0; r < kd; ++r) {
        cplx acc = 0.0;
        for (std::uint64_t l = 0; l < kd; ++l)
          acc += k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) * in[static_cast<Eigen::Index>(l)];
        a[base | offsets[r]] = acc;
      }
    }
  }
}

PauliString embedded_pauli(int n, int arity, std::uint64_t index, const std::vector<int>& targets) {
  return PauliString::from_index(arity, index).embed(n, targets);
}

}  // namespace

KrausChannel::KrausChannel(int arity, std::vector<Eigen::MatrixXcd> operators, double tol)
    : arity_(arity), ops_(std::move(operators)) {
  if (arity < 1 || arity > 6) throw ValidationError("channel arity out of range");
  if (ops_.empty()) throw ValidationError("channel needs at least one Kraus operator");
  const Eigen::Index d = local_dim(arity);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : ops_) {
    if (k.rows() != d || k.cols() != d) throw ValidationError("Kraus operator has wrong shape");
    sum += k.adjoint() * k;
  }
  const double dev = (sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw ValidationError("Kraus operators are not trace preserving (deviation " +
                          std::to_string(dev) + ")");
}

KrausChannel KrausChannel::pauli(int arity, std::vector<double> probabilities, double tol) {
  if (arity < 1 || arity > 6) throw ValidationError("channel arity out of range");
  const std::size_t count = std::size_t{1} << (2 * arity);
  if (probabilities.size() != count) throw ValidationError("Pauli channel needs 4^k probabilities");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw ValidationError("Pauli channel probability is negative");
    total += p;
  }
  if (std::abs(total - 1.0) > tol) throw ValidationError("Pauli channel probabilities do not sum to 1");
  std::vector<Eigen::MatrixXcd> ops;
  for (std::size_t b = 0; b < count; ++b) {
    if (probabilities[b] == 0.0) continue;
    ops.push_back(std::sqrt(probabilities[b]) * dense_matrix(PauliString::from_index(arity, b)));
  }
  KrausChannel ch(arity, std::move(ops), tol);
  ch.pauli_probs_ = std::move(probabilities);
  return ch;
}

KrausChannel KrausChannel::identity(int arity) {
  std::vector<double> probs(std::size_t{1} << (2 * arity), 0.0);
  probs[0] = 1.0;
  return pauli(arity, std::move(probs));
}

void apply_kraus(DensityMatrix& rho, const KrausChannel& channel, const std::vector<int>& targets) {
  if (static_cast<int>(targets.size()) != channel.arity())
    throw DimensionError("channel arity " + std::to_string(channel.arity()) + " but " +
                         std::to_string(targets.size()) + " targets");
  const int n = rho.n_qubits();
  std::uint64_t seen = 0;
  for (int t : targets) {
    if (t < 0 || t >= n) throw DimensionError("channel target out of range");
    if (seen & (std::uint64_t{1} << t)) throw DimensionError("repeated channel target");
    seen |= std::uint64_t{1} << t;
  }

  Eigen::MatrixXcd& m = rho.matrix();
  const auto d = static_cast<std::uint64_t>(m.rows());

  if (channel.is_pauli()) {
    const auto& probs = channel.pauli_probabilities();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (std::size_t b = 0; b < probs.size(); ++b) {
      const double c = probs[b];
      if (c == 0.0) continue;
      if (b == 0) {
        out += c * m;
        continue;
      }
      // (P rho P)(r ^ x, s ^ x) = phase(r) rho(r, s) conj(phase(s)).
      const PauliString p = embedded_pauli(n, channel.arity(), b, targets);
      const std::uint64_t x = p.x_mask();
      for (std::uint64_t s = 0; s < d; ++s) {
        const cplx ps = c * std::conj(p.phase(s));
        const auto sx = static_cast<Eigen::Index>(s ^ x);
        for (std::uint64_t r = 0; r < d; ++r)
          out(static_cast<Eigen::Index>(r ^ x), sx) +=
              p.phase(r) * m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * ps;
      }
    }
    m = std::move(out);
    return;
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  for (const auto& k : channel.operators()) {
    Eigen::MatrixXcd t = m;
    left_multiply(t, k, targets);
    t.adjointInPlace();
    left_multiply(t, k, targets);
    t.adjointInPlace();
    out += t;
  }
  m = std::move(out);
}

}  // namespace qdos::qcore
