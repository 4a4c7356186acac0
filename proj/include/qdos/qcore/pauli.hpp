#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qdos::qcore {

using cplx = std::complex<double>;

// Pauli product stored as X/Z bit masks: P = i^{#Y} X^x Z^z (Z acts first).
// Letter j of the string acts on qubit j; qubit 0 is the least significant
// bit of a basis index.
class PauliString {
 public:
  static constexpr int kMaxQubits = 62;

  PauliString() = default;
  explicit PauliString(std::string_view letters, cplx coefficient = 1.0);

  static PauliString identity(int n_qubits, cplx coefficient = 1.0);
  static PauliString single(int n_qubits, int qubit, char letter, cplx coefficient = 1.0);
  static PauliString from_masks(int n_qubits, std::uint64_t x, std::uint64_t z,
                                cplx coefficient = 1.0);
  // Pauli index with two bits per qubit, letter codes I=0 X=1 Y=2 Z=3, qubit 0
  // in the lowest digit.
  static PauliString from_index(int n_qubits, std::uint64_t index, cplx coefficient = 1.0);

  int n_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  cplx coefficient() const { return coeff_; }
  PauliString with_coefficient(cplx c) const;

  char letter(int qubit) const;
  std::string letters() const;
  std::uint64_t index() const;
  int weight() const;
  int y_count() const;
  std::vector<int> support() const;
  bool is_identity() const { return (x_ | z_) == 0; }
  bool is_diagonal() const { return x_ == 0; }
  bool same_letters(const PauliString& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }

  // Bare Pauli (coefficient ignored) acting on |b>: P|b> = phase(b) |b ^ x_mask>.
  cplx phase(std::uint64_t b) const {
    const bool odd = (__builtin_popcountll(b & z_) & 1) != 0;
    return odd ? -y_phase_ : y_phase_;
  }
  cplx y_phase() const { return y_phase_; }

  // Inserts identities: qubit j of this string moves to qubit map[j] of an
  // n_total-qubit string.
  PauliString embed(int n_total, const std::vector<int>& map) const;

  bool operator==(const PauliString& o) const { return same_letters(o) && coeff_ == o.coeff_; }

 private:
  void refresh();
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  cplx coeff_{1.0, 0.0};
  cplx y_phase_{1.0, 0.0};
};

// Product including coefficients and the phase from letter multiplication.
PauliString operator*(const PauliString& a, const PauliString& b);

// 0 if the bare Paulis commute, 1 if they anticommute.
int symplectic_product(const PauliString& a, const PauliString& b);

// Sum of Pauli strings with real coefficients, free of duplicate letter
// patterns. Terms keep the order of first appearance.
class QubitHamiltonian {
 public:
  explicit QubitHamiltonian(int n_qubits = 1);
  QubitHamiltonian(int n_qubits, const std::vector<PauliString>& terms);

  void add_term(const PauliString& term);
  void add_term(double coefficient, std::string_view letters);

  int n_qubits() const { return n_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  std::size_t dimension() const { return std::size_t{1} << n_; }

  // a*H + b*I.
  QubitHamiltonian affine(double a, double b) const;
  // Coefficient of the identity term (0 if absent).
  double identity_coefficient() const;
  // Sum of |c| over all terms, an upper bound on the spectral radius.
  double one_norm() const;

 private:
  void drop_zeros();
  int n_;
  std::vector<PauliString> terms_;
};

}  // namespace qdos::qcore
