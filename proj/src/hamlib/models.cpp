#include "qdos/hamlib/models.hpp"

#include <cmath>
#include <unordered_map>

#include "qdos/common/errors.hpp"
#include "qdos/common/rng.hpp"

namespace qdos::hamlib {

using qcore::cplx;
using qcore::PauliString;
using qcore::QubitHamiltonian;

std::vector<double> disorder_fields(const HeisenbergSpec& spec) {
  std::vector<double> h(static_cast<std::size_t>(std::max(spec.n, 0)));
  for (int j = 0; j < spec.n; ++j)
    h[static_cast<std::size_t>(j)] =
        spec.h * (2.0 * keyed_uniform(spec.seed, {0x6865697365ULL, static_cast<std::uint64_t>(j)}) - 1.0);
  return h;
}

QubitHamiltonian build_heisenberg(const HeisenbergSpec& spec) {
  if (spec.n < 2) throw SpecError("Heisenberg chain needs n >= 2");
  const int n = spec.n;
  QubitHamiltonian h(n);
  for (int j = 0; j + 1 < n; ++j) {
    const std::uint64_t pair = std::uint64_t{3} << j;
    h.add_term(PauliString::from_masks(n, pair, 0, -spec.J));
    h.add_term(PauliString::from_masks(n, pair, pair, -spec.J));
    h.add_term(PauliString::from_masks(n, 0, pair, -spec.J));
  }
  const auto fields = disorder_fields(spec);
  for (int j = 0; j < n; ++j) h.add_term(PauliString::single(n, j, 'Z', fields[static_cast<std::size_t>(j)]));
  return h;
}

std::vector<std::pair<int, int>> grid_bonds(int rows, int cols) {
  std::vector<std::pair<int, int>> bonds;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int s = r * cols + c;
      if (c + 1 < cols) bonds.emplace_back(s, s + 1);
      if (r + 1 < rows) bonds.emplace_back(s, s + cols);
    }
  }
  return bonds;
}

FermionOpSum build_hubbard(const HubbardSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw SpecError("Hubbard lattice dimensions must be positive");
  FermionOpSum f;
  f.n_modes = spec.n_modes();
  for (const auto& [j, k] : grid_bonds(spec.rows, spec.cols)) {
    for (int s = 0; s < 2; ++s) {
      const int a = hubbard_mode(j, s), b = hubbard_mode(k, s);
      f.terms.push_back({{{a, true}, {b, false}}, -spec.J});
      f.terms.push_back({{{b, true}, {a, false}}, -spec.J});
    }
  }
  for (int j = 0; j < spec.n_sites(); ++j) {
    const int up = hubbard_mode(j, 0), dn = hubbard_mode(j, 1);
    f.terms.push_back({{{up, true}, {up, false}, {dn, true}, {dn, false}}, spec.U});
  }
  return f;
}

namespace {

// Ordered Pauli sum with complex coefficients, keyed by (x, z) masks.
class PauliAccumulator {
 public:
  explicit PauliAccumulator(int n) : n_(n) {}

  void add(const PauliString& p) {
    const Key key{p.x_mask(), p.z_mask()};
    auto it = index_.find(key);
    if (it == index_.end()) {
      index_.emplace(key, terms_.size());
      terms_.push_back(p);
    } else {
      terms_[it->second] = terms_[it->second].with_coefficient(terms_[it->second].coefficient() +
                                                               p.coefficient());
    }
  }

  const std::vector<PauliString>& terms() const { return terms_; }
  int n() const { return n_; }

 private:
  struct Key {
    std::uint64_t x, z;
    bool operator==(const Key& o) const { return x == o.x && z == o.z; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>()(k.x * 0x9e3779b97f4a7c15ULL ^ k.z); }
  };
  int n_;
  std::vector<PauliString> terms_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

std::vector<PauliString> ladder_paulis(int n, const LadderOp& op) {
  if (op.mode < 0 || op.mode >= n) throw DimensionError("fermionic mode outside the qubit register");
  const std::uint64_t bit = std::uint64_t{1} << op.mode;
  const std::uint64_t string = bit - 1;  // Z on all lower modes
  // c = (X + iY)/2, c+ = (X - iY)/2 on the mode qubit.
  const cplx y_coeff = op.creation ? cplx(0.0, -0.5) : cplx(0.0, 0.5);
  return {PauliString::from_masks(n, bit, string, 0.5),
          PauliString::from_masks(n, bit, string | bit, y_coeff)};
}

}  // namespace

QubitHamiltonian jordan_wigner(const FermionOpSum& f) {
  const int n = f.n_modes;
  if (n < 1 || n > PauliString::kMaxQubits) throw DimensionError("mode count outside qubit budget");
  PauliAccumulator total(n);
  for (const auto& term : f.terms) {
    std::vector<PauliString> product{PauliString::identity(n, term.coefficient)};
    for (const auto& op : term.ops) {
      PauliAccumulator next(n);
      const auto factors = ladder_paulis(n, op);
      for (const auto& p : product)
        for (const auto& q : factors) next.add(p * q);
      product = next.terms();
    }
    for (const auto& p : product) total.add(p);
  }
  QubitHamiltonian h(n);
  for (const auto& p : total.terms()) {
    if (std::abs(p.coefficient()) < 1e-14) continue;
    if (std::abs(p.coefficient().imag()) > 1e-12)
      throw DomainError("fermionic operator sum is not Hermitian (term " + p.letters() + ")");
    h.add_term(p.with_coefficient(p.coefficient().real()));
  }
  return h;
}

}  // namespace qdos::hamlib
