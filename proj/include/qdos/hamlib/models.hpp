#pragma once

#include <cstdint>
#include <vector>

#include "qdos/qcore/pauli.hpp"

namespace qdos::hamlib {

struct HeisenbergSpec {
  int n = 2;
  double J = 1.0;
  double h = 0.0;
  std::uint64_t seed = 0;
};

// h_j in [-h, h], one independent keyed draw per site.
std::vector<double> disorder_fields(const HeisenbergSpec& spec);

// H = -J sum_j (XX + YY + ZZ)_{j,j+1} + sum_j h_j Z_j on an open chain.
qcore::QubitHamiltonian build_heisenberg(const HeisenbergSpec& spec);

struct HubbardSpec {
  int rows = 1;
  int cols = 2;
  double J = 1.0;
  double U = 1.0;
  int n_sites() const { return rows * cols; }
  int n_modes() const { return 2 * n_sites(); }
};

struct LadderOp {
  int mode = 0;
  bool creation = false;
};

struct FermionTerm {
  std::vector<LadderOp> ops;  // operator product in written order
  double coefficient = 0.0;
};

struct FermionOpSum {
  int n_modes = 0;
  std::vector<FermionTerm> terms;
};

// Mode index for site j (row-major) and spin s (0 = up, 1 = down).
inline int hubbard_mode(int site, int spin) { return 2 * site + spin; }

// Nearest-neighbour bonds (j < k) of an open rows x cols grid, row-major sites.
std::vector<std::pair<int, int>> grid_bonds(int rows, int cols);

// -J sum_<jk>,s (c+_js c_ks + c+_ks c_js) + U sum_j n_j,up n_j,down.
// Hopping terms come first, bond by bond and spin by spin, followed by the
// on-site interactions.
FermionOpSum build_hubbard(const HubbardSpec& spec);

// Jordan-Wigner with mode j on qubit j: c_j = Z_0..Z_{j-1} (X_j + i Y_j)/2.
qcore::QubitHamiltonian jordan_wigner(const FermionOpSum& f);

}  // namespace qdos::hamlib
