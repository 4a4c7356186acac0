#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qdos/common/errors.hpp"
#include "qdos/qcore/channel.hpp"
#include "qdos/qcore/gates.hpp"
#include "support/oracle.hpp"

using namespace qdos;
using namespace qdos::qcore;
using std::numbers::pi;

namespace {

const cplx kI{0.0, 1.0};

QubitHamiltonian heisenberg3() {
  QubitHamiltonian h(3);
  for (const char* s : {"XXI", "YYI", "ZZI", "IXX", "IYY", "IZZ"}) h.add_term(-1.0, s);
  h.add_term(0.3, "ZII");
  h.add_term(-0.7, "IZI");
  h.add_term(0.2, "IIZ");
  return h;
}

}  // namespace

TEST(PauliString, LettersRoundTripAndIndex) {
  PauliString p("XYZI", 2.0);
  EXPECT_EQ(p.letters(), "XYZI");
  EXPECT_EQ(p.weight(), 3);
  EXPECT_EQ(p.support(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(PauliString::from_index(4, p.index()).letters(), "XYZI");
  EXPECT_THROW(PauliString("XQ"), FormatError);
}

TEST(PauliString, LittleEndianOrdering) {
  StateVector psi(2);
  apply_pauli_rotation(psi, PauliString("XI"), pi / 2);
  EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(psi[2]), 0.0, 1e-14);
}

TEST(PauliString, ProductMatchesDense) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    PauliString a(oracle::random_letters(3, rng), cplx(0.5, -1.0));
    PauliString b(oracle::random_letters(3, rng), 2.0);
    EXPECT_MAT_NEAR(oracle::pauli(a * b), oracle::pauli(a) * oracle::pauli(b), 1e-13);
  }
}

TEST(PauliString, IdentityIsMultiplicativeUnit) {
  PauliString p("YXZ", 3.0);
  EXPECT_EQ(PauliString::identity(3) * p, p);
  EXPECT_EQ(p * PauliString::identity(3), p);
}

TEST(PauliRotation, DiagonalPhaseOnZero) {
  StateVector psi(1);
  apply_pauli_rotation(psi, PauliString("Z"), pi / 2);
  EXPECT_NEAR(std::abs(psi[0] - std::exp(-kI * pi / 2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi[1]), 0.0, 1e-15);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(PauliRotation, ZeroAngleIsIdentity) {
  std::mt19937_64 rng(1);
  StateVector psi = oracle::random_state(3, rng);
  const StateVector before = psi;
  apply_pauli_rotation(psi, PauliString("XYZ"), 0.0);
  EXPECT_EQ(psi.amplitudes(), before.amplitudes());
}

TEST(PauliRotation, XHalfPiFlips) {
  StateVector psi(1);
  apply_pauli_rotation(psi, PauliString("X"), pi / 2);
  EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(psi[1] - cplx(0, -1)), 0.0, 1e-15);
}

TEST(PauliRotation, MatchesDenseExponential) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-pi, pi);
  for (int trial = 0; trial < 100; ++trial) {
    const std::string letters = oracle::random_letters(3, rng);
    const double theta = ang(rng);
    StateVector psi = oracle::random_state(3, rng);
    const Eigen::VectorXcd expected = oracle::rotation(letters, theta) * psi.amplitudes();
    apply_pauli_rotation(psi, PauliString(letters), theta);
    EXPECT_LE((psi.amplitudes() - expected).norm(), 1e-12) << letters;
    EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
  }
}

TEST(PauliRotation, RejectsMismatchAndComplexCoefficient) {
  StateVector psi(2);
  EXPECT_THROW(apply_pauli_rotation(psi, PauliString("XYZ"), 0.1), DimensionError);
  EXPECT_THROW(apply_pauli_rotation(psi, PauliString("XY", cplx(0, 1)), 0.1), DomainError);
}

TEST(PauliRotation, DensityMatrixConjugation) {
  std::mt19937_64 rng(3);
  DensityMatrix rho = oracle::random_density(3, rng);
  const Eigen::MatrixXcd u = oracle::rotation("YIX", 0.37);
  const Eigen::MatrixXcd expected = u * rho.matrix() * u.adjoint();
  apply_pauli_rotation(rho, PauliString("YIX"), 0.37);
  EXPECT_MAT_NEAR(rho.matrix(), expected, 1e-13);
}

TEST(ControlledRotation, ControlOffLeavesRegister) {
  std::mt19937_64 rng(4);
  StateVector reg = oracle::random_state(2, rng);
  // ancilla is qubit 2 in |0>: joint amplitudes are the register's in the low half.
  Eigen::VectorXcd joint = Eigen::VectorXcd::Zero(8);
  joint.head(4) = reg.amplitudes();
  StateVector psi(3, joint);
  apply_controlled_pauli_rotation(psi, 2, PauliString("XYI"), 0.9);
  EXPECT_LE((psi.amplitudes() - joint).norm(), 1e-15);
}

TEST(ControlledRotation, ControlOnPhase) {
  // ancilla = qubit 1 in |1>, target qubit 0 in |0>.
  StateVector psi = StateVector::basis(2, 2);
  const double theta = 0.61;
  apply_controlled_pauli_rotation(psi, 1, PauliString("ZI"), theta);
  EXPECT_NEAR(std::abs(psi[2] - std::exp(-kI * theta)), 0.0, 1e-15);
}

TEST(ControlledRotation, PlusAncillaMatchesDense) {
  // ancilla qubit 1 in |+>, target qubit 0 in |0>, P = Z, angle pi.
  StateVector psi(2, (Eigen::VectorXcd(4) << 1, 0, 1, 0).finished() / std::sqrt(2.0));
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(2, 2), p1 = Eigen::MatrixXcd::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  const Eigen::MatrixXcd cu = Eigen::kroneckerProduct(p0, Eigen::MatrixXcd::Identity(2, 2)).eval() +
                              Eigen::kroneckerProduct(p1, oracle::rotation("Z", pi)).eval();
  const Eigen::VectorXcd expected = cu * psi.amplitudes();
  apply_controlled_pauli_rotation(psi, 1, PauliString("ZI"), pi);
  EXPECT_LE((psi.amplitudes() - expected).norm(), 1e-14);
}

TEST(ControlledRotation, RandomDenseOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-pi, pi);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const int anc = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
    std::string reg = oracle::random_letters(n, rng);
    std::string letters;
    for (int q = 0, j = 0; q <= n; ++q) letters.push_back(q == anc ? 'I' : reg[j++]);
    const double theta = ang(rng);
    // Dense controlled unitary: 1 + |1><1|_a (x) (R - 1), R on the full joint space.
    const Eigen::MatrixXcd r = oracle::rotation(letters, theta);
    std::string proj_letters(static_cast<std::size_t>(n + 1), 'I');
    proj_letters[static_cast<std::size_t>(anc)] = 'Z';
    const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(r.rows(), r.cols());
    const Eigen::MatrixXcd p1 = 0.5 * (one - oracle::pauli(proj_letters));
    const Eigen::MatrixXcd cu = one + p1 * (r - one);
    StateVector psi = oracle::random_state(n + 1, rng);
    const Eigen::VectorXcd expected = cu * psi.amplitudes();
    apply_controlled_pauli_rotation(psi, anc, PauliString(letters), theta);
    EXPECT_LE((psi.amplitudes() - expected).norm(), 1e-12);
  }
}

TEST(ControlledRotation, OverlapIsDomainError) {
  StateVector psi(3);
  EXPECT_THROW(apply_controlled_pauli_rotation(psi, 1, PauliString("XYI"), 0.2), DomainError);
}

TEST(ControlledRotation, DecomposedCost) {
  const GateCost c = pauli_rotation_cost(PauliString("XZZY"));
  EXPECT_EQ(c.rotations, 1);
  EXPECT_EQ(c.single_qubit, 4);
  EXPECT_EQ(c.cnot, 6);
  EXPECT_EQ(pauli_rotation_cost(PauliString("IZI")).cnot, 0);
}

TEST(Kraus, IdentityChannelLeavesState) {
  std::mt19937_64 rng(6);
  DensityMatrix rho = oracle::random_density(2, rng);
  const Eigen::MatrixXcd before = rho.matrix();
  apply_kraus(rho, KrausChannel::identity(1), {1});
  EXPECT_MAT_NEAR(rho.matrix(), before, 1e-15);
}

TEST(Kraus, FullReplacementDepolarizingGivesMixed) {
  DensityMatrix rho(1);
  apply_kraus(rho, KrausChannel::pauli(1, {0.25, 0.25, 0.25, 0.25}), {0});
  EXPECT_MAT_NEAR(rho.matrix(), Eigen::MatrixXcd::Identity(2, 2) / 2.0, 1e-15);
}

TEST(Kraus, PauliChannelMatchesDirectSum) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c(16);
    double total = 0.0;
    for (auto& v : c) total += (v = u(rng));
    for (auto& v : c) v /= total;
    DensityMatrix rho = oracle::random_density(3, rng);
    const std::vector<int> targets = {2, 0};
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(8, 8);
    for (std::uint64_t b = 0; b < 16; ++b) {
      const std::string local = PauliString::from_index(2, b).letters();
      std::string full = "III";
      full[2] = local[0];
      full[0] = local[1];
      const Eigen::MatrixXcd p = oracle::pauli(full);
      expected += c[b] * p * rho.matrix() * p.adjoint();
    }
    DensityMatrix generic = rho;
    const KrausChannel ch = KrausChannel::pauli(2, c);
    apply_kraus(rho, ch, targets);
    EXPECT_MAT_NEAR(rho.matrix(), expected, 1e-12);
    apply_kraus(generic, KrausChannel(2, ch.operators()), targets);
    EXPECT_MAT_NEAR(generic.matrix(), expected, 1e-12);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-10);
  }
}

TEST(Kraus, AmplitudeDampingTracePreserved) {
  const double g = 0.3;
  Eigen::MatrixXcd k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  KrausChannel ch(1, {k0, k1});
  std::mt19937_64 rng(8);
  DensityMatrix rho = oracle::random_density(2, rng);
  apply_kraus(rho, ch, {1});
  EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-10);
  rho.validate(1e-10, true);
}

TEST(Kraus, NonTracePreservingRejected) {
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(2, 2) * 0.9;
  EXPECT_THROW(KrausChannel(1, {k}), ValidationError);
  DensityMatrix rho(2);
  EXPECT_THROW(apply_kraus(rho, KrausChannel::identity(2), {0}), DimensionError);
}

TEST(Expectation, BasicValues) {
  QubitHamiltonian z(1);
  z.add_term(1.0, "Z");
  EXPECT_DOUBLE_EQ(expectation(StateVector(1), z), 1.0);
  const QubitHamiltonian h = heisenberg3();
  EXPECT_NEAR(expectation(DensityMatrix::maximally_mixed(3), h), 0.0, 1e-15);
}

TEST(Expectation, HeisenbergMatchesDense) {
  std::mt19937_64 rng(9);
  const QubitHamiltonian h = heisenberg3();
  const Eigen::MatrixXcd hd = oracle::hamiltonian(h);
  for (int trial = 0; trial < 10; ++trial) {
    const StateVector psi = oracle::random_state(3, rng);
    const cplx expected = psi.amplitudes().dot(hd * psi.amplitudes());
    EXPECT_NEAR(expectation(psi, h), expected.real(), 1e-12);
    const DensityMatrix rho = oracle::random_density(3, rng);
    EXPECT_NEAR(expectation(rho, h), (rho.matrix() * hd).trace().real(), 1e-12);
  }
  EXPECT_MAT_NEAR(dense_matrix(h), hd, 1e-15);
  const StateVector psi = oracle::random_state(3, rng);
  EXPECT_LE((apply_hamiltonian(h, psi.amplitudes()) - hd * psi.amplitudes()).norm(), 1e-13);
}

TEST(Symplectic, Examples) {
  EXPECT_EQ(symplectic_product(PauliString("X"), PauliString("X")), 0);
  EXPECT_EQ(symplectic_product(PauliString("X"), PauliString("Z")), 1);
  EXPECT_EQ(symplectic_product(PauliString("XZ"), PauliString("ZX")), 0);
}

TEST(Symplectic, ExhaustiveTwoQubitCommutation) {
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      const PauliString pa = PauliString::from_index(2, a), pb = PauliString::from_index(2, b);
      const Eigen::MatrixXcd ma = oracle::pauli(pa), mb = oracle::pauli(pb);
      const bool commute = oracle::max_abs_diff(ma * mb, mb * ma) < 1e-12;
      EXPECT_EQ(symplectic_product(pa, pb), commute ? 0 : 1);
      for (std::uint64_t c = 0; c < 16; ++c) {
        const PauliString pc = PauliString::from_index(2, c);
        EXPECT_EQ(symplectic_product(pa * pc, pb),
                  symplectic_product(pa, pb) ^ symplectic_product(pc, pb));
      }
    }
  }
}

TEST(Inner, Examples) {
  std::mt19937_64 rng(10);
  const StateVector psi = oracle::random_state(3, rng);
  EXPECT_NEAR(std::abs(inner(psi, psi) - 1.0), 0.0, 1e-14);
  EXPECT_EQ(inner(StateVector::basis(1, 0), StateVector::basis(1, 1)), cplx(0.0));
  EXPECT_NEAR(inner(StateVector::plus(1), StateVector(1)).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(inner(StateVector(1), StateVector(2)), DimensionError);
}

TEST(LayeredCircuit, CountsAndIdentity) {
  EXPECT_EQ(layered_parameter_count(3, 1), 11U);
  std::vector<double> zeros(layered_parameter_count(4, 2), 0.0);
  std::mt19937_64 rng(12);
  StateVector psi = oracle::random_state(4, rng);
  const StateVector before = psi;
  layered_circuit(4, 2, zeros).apply(psi);
  EXPECT_LE((psi.amplitudes() - before.amplitudes()).norm(), 1e-15);
}

TEST(LayeredCircuit, MatchesDenseProduct) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi);
  std::vector<double> th(layered_parameter_count(3, 1));
  for (auto& t : th) t = ang(rng);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(8, 8);
  std::size_t k = 0;
  for (int q = 0; q < 3; ++q)
    for (char c : {'X', 'Z', 'Y'}) {
      std::string s = "III";
      s[static_cast<std::size_t>(q)] = c;
      u = oracle::rotation(s, th[k++]) * u;
    }
  u = oracle::rotation("ZZI", th[k++]) * u;
  u = oracle::rotation("IZZ", th[k++]) * u;
  EXPECT_MAT_NEAR(u * u.adjoint(), Eigen::MatrixXcd::Identity(8, 8), 1e-12);
  StateVector psi = oracle::random_state(3, rng);
  const Eigen::VectorXcd expected = u * psi.amplitudes();
  layered_circuit(3, 1, th).apply(psi);
  EXPECT_LE((psi.amplitudes() - expected).norm(), 1e-12);
}

TEST(RotationCircuit, InverseUndoes) {
  std::mt19937_64 rng(14);
  std::vector<double> th(layered_parameter_count(3, 2));
  for (auto& t : th) t = std::uniform_real_distribution<double>(0, 6)(rng);
  const RotationCircuit c = layered_circuit(3, 2, th);
  StateVector psi = oracle::random_state(3, rng);
  const StateVector before = psi;
  c.apply(psi);
  c.inverse().apply(psi);
  EXPECT_LE((psi.amplitudes() - before.amplitudes()).norm(), 1e-13);
}

TEST(SingleQubit, HadamardReadoutMatrices) {
  StateVector psi(1);
  apply_single_qubit(psi, 0, hadamard_matrix());
  EXPECT_LE((psi.amplitudes() - StateVector::plus(1).amplitudes()).norm(), 1e-15);
  EXPECT_MAT_NEAR(sdg_hadamard_matrix() * sdg_hadamard_matrix().adjoint(),
                  Eigen::MatrixXcd::Identity(2, 2), 1e-15);
}

TEST(DensityMatrix, ValidationAndMixtures) {
  DensityMatrix::maximally_mixed(3).validate(1e-12, true);
  const DensityMatrix p = DensityMatrix::projected_mixed(2, {1, 2});
  EXPECT_NEAR(p.purity(), 0.5, 1e-15);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_THROW(DensityMatrix(1, bad).validate(), ValidationError);
  const DensityMatrix t = tensor(DensityMatrix::from_pure(StateVector::plus(1)), DensityMatrix(1));
  EXPECT_NEAR(std::abs(t.matrix()(2, 0) - 0.5), 0.0, 1e-15);
}
