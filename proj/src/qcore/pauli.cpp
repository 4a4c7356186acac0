#include "qdos/qcore/pauli.hpp"

#include <cmath>

#include "qdos/common/errors.hpp"

namespace qdos::qcore {

namespace {

const cplx kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void check_qubits(int n) {
  if (n < 1 || n > PauliString::kMaxQubits)
    throw DimensionError("qubit count must be in [1, " + std::to_string(PauliString::kMaxQubits) +
                         "], got " + std::to_string(n));
}

}  // namespace

PauliString::PauliString(std::string_view letters, cplx coefficient)
    : n_(static_cast<int>(letters.size())), coeff_(coefficient) {
  check_qubits(n_);
  for (int q = 0; q < n_; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (letters[q]) {
      case 'I': break;
      case 'X': x_ |= bit; break;
      case 'Y': x_ |= bit; z_ |= bit; break;
      case 'Z': z_ |= bit; break;
      default:
        throw FormatError("invalid Pauli letter '" + std::string(1, letters[q]) + "'");
    }
  }
  refresh();
}

PauliString PauliString::identity(int n_qubits, cplx coefficient) {
  return from_masks(n_qubits, 0, 0, coefficient);
}

PauliString PauliString::single(int n_qubits, int qubit, char letter, cplx coefficient) {
  if (qubit < 0 || qubit >= n_qubits) throw DimensionError("qubit index out of range");
  std::string s(static_cast<std::size_t>(n_qubits), 'I');
  s[static_cast<std::size_t>(qubit)] = letter;
  return PauliString(s, coefficient);
}

PauliString PauliString::from_masks(int n_qubits, std::uint64_t x, std::uint64_t z,
                                    cplx coefficient) {
  check_qubits(n_qubits);
  const std::uint64_t mask = (std::uint64_t{1} << n_qubits) - 1;
  if ((x | z) & ~mask) throw DimensionError("Pauli mask exceeds qubit count");
  PauliString p;
  p.n_ = n_qubits;
  p.x_ = x;
  p.z_ = z;
  p.coeff_ = coefficient;
  p.refresh();
  return p;
}

PauliString PauliString::from_index(int n_qubits, std::uint64_t index, cplx coefficient) {
  std::uint64_t x = 0, z = 0;
  for (int q = 0; q < n_qubits; ++q) {
    const unsigned code = (index >> (2 * q)) & 3U;
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (code == 1 || code == 2) x |= bit;
    if (code == 2 || code == 3) z |= bit;
  }
  return from_masks(n_qubits, x, z, coefficient);
}

void PauliString::refresh() { y_phase_ = kIPowers[y_count() & 3]; }

PauliString PauliString::with_coefficient(cplx c) const {
  PauliString p = *this;
  p.coeff_ = c;
  return p;
}

char PauliString::letter(int qubit) const {
  const bool x = (x_ >> qubit) & 1U;
  const bool z = (z_ >> qubit) & 1U;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::letters() const {
  std::string s(static_cast<std::size_t>(n_), 'I');
  for (int q = 0; q < n_; ++q) s[static_cast<std::size_t>(q)] = letter(q);
  return s;
}

std::uint64_t PauliString::index() const {
  std::uint64_t idx = 0;
  for (int q = 0; q < n_; ++q) {
    const char c = letter(q);
    const std::uint64_t code = c == 'X' ? 1 : c == 'Y' ? 2 : c == 'Z' ? 3 : 0;
    idx |= code << (2 * q);
  }
  return idx;
}

int PauliString::weight() const { return __builtin_popcountll(x_ | z_); }
int PauliString::y_count() const { return __builtin_popcountll(x_ & z_); }

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int q = 0; q < n_; ++q)
    if (((x_ | z_) >> q) & 1U) s.push_back(q);
  return s;
}

PauliString PauliString::embed(int n_total, const std::vector<int>& map) const {
  if (static_cast<int>(map.size()) != n_) throw DimensionError("embedding map has wrong length");
  std::uint64_t x = 0, z = 0;
  for (int q = 0; q < n_; ++q) {
    if (map[q] < 0 || map[q] >= n_total) throw DimensionError("embedding target out of range");
    x |= ((x_ >> q) & 1U) << map[q];
    z |= ((z_ >> q) & 1U) << map[q];
  }
  return from_masks(n_total, x, z, coeff_);
}

PauliString operator*(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("Pauli product of unequal lengths");
  // a b = i^{ya} X^xa Z^za i^{yb} X^xb Z^zb; moving Z^za past X^xb costs
  // (-1)^{|za & xb|}. The result X^x Z^z carries i^{y} implicitly, so divide it out.
  const std::uint64_t x = a.x_mask() ^ b.x_mask();
  const std::uint64_t z = a.z_mask() ^ b.z_mask();
  int power = a.y_count() + b.y_count() + 2 * __builtin_popcountll(a.z_mask() & b.x_mask()) -
              __builtin_popcountll(x & z);
  power = ((power % 4) + 4) % 4;
  return PauliString::from_masks(a.n_qubits(), x, z,
                                 a.coefficient() * b.coefficient() * kIPowers[power]);
}

int symplectic_product(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("symplectic product of unequal lengths");
  const std::uint64_t s = (a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask());
  return __builtin_popcountll(s) & 1;
}

QubitHamiltonian::QubitHamiltonian(int n_qubits) : n_(n_qubits) { check_qubits(n_qubits); }

QubitHamiltonian::QubitHamiltonian(int n_qubits, const std::vector<PauliString>& terms)
    : QubitHamiltonian(n_qubits) {
  for (const auto& t : terms) add_term(t);
}

void QubitHamiltonian::add_term(const PauliString& term) {
  if (term.n_qubits() != n_) throw DimensionError("term qubit count differs from Hamiltonian");
  if (std::abs(term.coefficient().imag()) > 1e-12 * std::max(1.0, std::abs(term.coefficient())))
    throw DomainError("Hamiltonian terms need real coefficients, got imaginary part in " +
                      term.letters());
  const double c = term.coefficient().real();
  for (auto& t : terms_) {
    if (t.same_letters(term)) {
      t = t.with_coefficient(t.coefficient().real() + c);
      drop_zeros();
      return;
    }
  }
  terms_.push_back(term.with_coefficient(c));
  drop_zeros();
}

void QubitHamiltonian::add_term(double coefficient, std::string_view letters) {
  add_term(PauliString(letters, coefficient));
}

void QubitHamiltonian::drop_zeros() {
  std::erase_if(terms_, [](const PauliString& t) { return std::abs(t.coefficient()) < 1e-14; });
}

QubitHamiltonian QubitHamiltonian::affine(double a, double b) const {
  QubitHamiltonian out(n_);
  for (const auto& t : terms_) out.add_term(t.with_coefficient(a * t.coefficient().real()));
  if (b != 0.0) out.add_term(PauliString::identity(n_, b));
  return out;
}

double QubitHamiltonian::identity_coefficient() const {
  for (const auto& t : terms_)
    if (t.is_identity()) return t.coefficient().real();
  return 0.0;
}

double QubitHamiltonian::one_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient());
  return s;
}

}  // namespace qdos::qcore
