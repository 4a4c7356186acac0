#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qdos/qcore/channel.hpp"

namespace qdos::noisemodel {

// Replacement form: with probability p the k qubits are swapped for the
// maximally mixed state, i.e. a Pauli drawn uniformly from all 4^k
// (identity included). p = 1 on |0><0| gives diag(1/2, 1/2).
qcore::KrausChannel depolarizing_channel(double p, int arity = 1);

struct DepolSpec {
  double xi = 0.0;          // total circuit error rate
  std::size_t n_gates = 1;  // noisy controlled rotations in the whole circuit
  double lambda() const { return xi / static_cast<double>(n_gates); }
  void validate() const;
};

// Generator rates of one qubit pair, indexed like PauliString::from_index on
// two qubits (letter 0 acts on the lower joint index). Entry 0 is unused.
using PairRates = std::array<double, 16>;
using PauliDiagonal = std::array<double, 16>;

struct GammaTable {
  std::map<std::string, PairRates> sets;
  std::vector<std::string> ids() const;
  void validate() const;
};

GammaTable parse_gamma_table(const std::string& text);
std::string format_gamma_table(const GammaTable& table, const std::string& comment = "");
GammaTable read_gamma_table(const std::string& path);
void write_gamma_table(const std::string& path, const GammaTable& table, const std::string& comment = "");

// Sparse support (each non-identity Pauli kept with probability 1/2, at least
// one kept) and log-uniform magnitudes in [1e-4, 3e-3].
GammaTable synthetic_gamma_table(std::size_t n_sets, std::uint64_t seed);
inline constexpr std::uint64_t kBundledGammaSeed = 20240917;
inline constexpr std::size_t kBundledGammaSets = 16;
std::string bundled_gamma_path();
GammaTable bundled_gamma_table();

struct PauliLindbladSpec {
  double lambda0 = 1.0;
  GammaTable table;
  std::map<std::pair<int, int>, std::string> assignment;  // keys (low, high)

  void assign(int a, int b, const std::string& id);
  // Each pair gets a set drawn uniformly from the table.
  void assign_random(const std::vector<std::pair<int, int>>& pairs, std::uint64_t seed);
  bool has_pair(int a, int b) const;
  const PairRates& rates(int a, int b) const;
  void validate() const;
};

// <a, b> = 1 when the two-qubit Paulis anticommute.
int symplectic(std::size_t a, std::size_t b);

// f_j = prod_k [w_k + (1 - w_k)(-1)^<j,k>], w_k = (1 + e^{-2 lambda0 gamma_k})/2.
PauliDiagonal pauli_fidelities(const PairRates& rates, double lambda0);
PauliDiagonal lindblad_fidelities(const PauliLindbladSpec& spec, int a, int b);

// c_b = 4^-2 sum_a (-1)^<a,b> f_a and its inverse f_a = sum_b (-1)^<a,b> c_b.
PauliDiagonal fidelities_to_probabilities(const PauliDiagonal& f);
PauliDiagonal probabilities_to_fidelities(const PauliDiagonal& c);

// Pauli channel on (low, high). Coefficients in [-1e-8, 0) are clipped to 0
// and counted in `clipped`; anything more negative is a ValidationError.
qcore::KrausChannel lindblad_to_kraus(const PauliLindbladSpec& spec, int a, int b, int* clipped = nullptr);
qcore::KrausChannel pauli_channel_from_fidelities(const PauliDiagonal& f, int* clipped = nullptr);

}  // namespace qdos::noisemodel
