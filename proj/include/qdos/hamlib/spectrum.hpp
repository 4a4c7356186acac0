#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "qdos/qcore/pauli.hpp"

namespace qdos::hamlib {

struct SubspaceIndex {
  int n_qubits = 0;
  int M = 0;
  std::vector<std::uint64_t> indices;  // sorted
  std::size_t dimension() const { return indices.size(); }
  // Position of a basis index in `indices`, or nullopt.
  std::optional<std::size_t> position(std::uint64_t index) const;
};

SubspaceIndex subspace_index(int n_qubits, int M);

// H' = a H + b 1.
struct RescaleInfo {
  double scale = 1.0;
  double shift = 0.0;
  double to_rescaled(double e) const { return scale * e + shift; }
  double to_original(double e) const { return (e - shift) / scale; }
};

enum class RescaleMode { exact, power_bound };

struct Rescaled {
  qcore::QubitHamiltonian hamiltonian;
  RescaleInfo info;
};

// Maps the extremal eigenvalues to -1 and +1. The power-bound mode uses a
// padded power-iteration estimate of the spectral radius instead, so the
// rescaled spectrum sits inside [-1, 1] without touching the ends.
Rescaled rescale_spectrum(const qcore::QubitHamiltonian& h, RescaleMode mode = RescaleMode::exact);

// True when H commutes with the total number operator sum_j (1 - Z_j)/2.
bool conserves_number(const qcore::QubitHamiltonian& h);

// Matrix of H in the listed (sorted) basis. Throws DomainError when H maps
// the span outside itself.
Eigen::MatrixXcd restricted_matrix(const qcore::QubitHamiltonian& h,
                                   const std::vector<std::uint64_t>& basis);

struct EigenSystem {
  std::vector<double> values;      // ascending
  Eigen::MatrixXcd vectors;        // columns, in the coordinates of `basis`
  std::vector<std::uint64_t> basis;
};

// Dense eigensystem on the full space (n <= 10) or on a subspace block.
EigenSystem eigensystem(const qcore::QubitHamiltonian& h,
                        const std::optional<SubspaceIndex>& subspace = std::nullopt);

// Sorted eigenvalues. The full-space variant goes through the particle-number
// blocks when H conserves number, so n = 12 stays cheap.
std::vector<double> exact_spectrum(const qcore::QubitHamiltonian& h,
                                   const std::optional<SubspaceIndex>& subspace = std::nullopt);

inline constexpr int kMaxDenseQubits = 12;
inline constexpr int kMaxEigenvectorQubits = 10;

}  // namespace qdos::hamlib
