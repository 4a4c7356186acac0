#include "qdos/fdos/engine.hpp"

#include <bit>
#include <cmath>

#include "qdos/common/errors.hpp"

namespace qdos::fdos {

EchoEngine EchoEngine::exact(const evolve::PropagatorOracle& oracle) {
  EchoEngine e;
  e.kind_ = "exact";
  e.n_ = oracle.n_qubits();
  e.basis_ = oracle.basis();
  e.energies_ = oracle.eigenvalues();
  e.vectors_ = oracle.eigenvectors();
  e.finish();
  return e;
}

EchoEngine EchoEngine::trotter(const evolve::TrotterSpectrum& spectrum) {
  EchoEngine e;
  e.kind_ = "trotter";
  e.n_ = spectrum.n_qubits();
  e.dt_ = spectrum.dt();
  e.basis_ = spectrum.basis();
  e.lambda_ = spectrum.eigenphases();
  e.vectors_ = spectrum.eigenvectors();
  e.finish();
  return e;
}

void EchoEngine::finish() {
  pos_.assign(std::size_t{1} << n_, -1);
  for (std::size_t i = 0; i < basis_.size(); ++i) pos_[basis_[i]] = static_cast<std::int64_t>(i);
  weight_ = -1;
  if (!is_full_space()) {
    weight_ = std::popcount(basis_.front());
    for (auto b : basis_)
      if (std::popcount(b) != weight_) weight_ = -1;
  }
  basis_weights_ = vectors_.cwiseAbs2();
}

std::optional<std::size_t> EchoEngine::position(std::uint64_t index) const {
  if (index >= pos_.size() || pos_[index] < 0) return std::nullopt;
  return static_cast<std::size_t>(pos_[index]);
}

Eigen::VectorXcd EchoEngine::phases(double t) const {
  if (kind_ == "exact") {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(energies_.size()));
    for (std::size_t l = 0; l < energies_.size(); ++l)
      out[static_cast<Eigen::Index>(l)] = std::polar(1.0, -energies_[l] * t);
    return out;
  }
  const std::int64_t k = std::llround(t / dt_);
  const double kd = static_cast<double>(k);
  Eigen::VectorXcd out(lambda_.size());
  for (Eigen::Index l = 0; l < lambda_.size(); ++l)
    out[l] = k == 0 ? cplx(1.0) : std::polar(std::pow(std::abs(lambda_[l]), kd), kd * std::arg(lambda_[l]));
  return out;
}

Eigen::VectorXcd EchoEngine::project(const qcore::StateVector& psi) const {
  if (psi.n_qubits() != n_) throw DimensionError("state and engine qubit counts differ");
  if (is_full_space()) return psi.amplitudes();
  Eigen::VectorXcd c(static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t i = 0; i < basis_.size(); ++i) c[static_cast<Eigen::Index>(i)] = psi[basis_[i]];
  if (psi.amplitudes().squaredNorm() - c.squaredNorm() > 1e-10)
    throw DomainError("state has weight outside the engine's subspace");
  return c;
}

cplx EchoEngine::echo(const qcore::StateVector& psi, double t) const {
  const Eigen::VectorXcd c = vectors_.adjoint() * project(psi);
  return c.cwiseAbs2().cast<cplx>().dot(phases(t));
}

cplx EchoEngine::basis_echo(std::size_t pos, const Eigen::VectorXcd& phases) const {
  return basis_weights_.row(static_cast<Eigen::Index>(pos)).cast<cplx>().transpose().dot(phases);
}

Eigen::VectorXcd EchoEngine::basis_echoes(const Eigen::VectorXcd& phases) const {
  return basis_weights_.cast<cplx>() * phases;
}

Eigen::VectorXcd EchoEngine::echoes(const Eigen::MatrixXcd& coords, const Eigen::VectorXcd& phases) const {
  if (coords.rows() != vectors_.rows()) throw DimensionError("coordinate rows differ from engine dimension");
  const Eigen::MatrixXd w = (vectors_.adjoint() * coords).cwiseAbs2();
  return w.transpose().cast<cplx>() * phases;
}

FdosSignal exact_fdos(const std::vector<double>& eigenvalues, const TimeGrid& grid) {
  grid.validate();
  FdosSignal s;
  s.grid = grid;
  s.normalization = static_cast<double>(eigenvalues.size());
  s.values.resize(grid.n_points);
  s.shots.assign(grid.n_points, ShotRecord{0, 0, "exact", 0});
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double t = grid.time(k);
    cplx acc = 0.0;
    for (double e : eigenvalues) acc += std::polar(1.0, -e * t);
    s.values[k] = acc * kInvSqrt2Pi;
  }
  return s;
}

FdosSignal exact_fdos(const evolve::PropagatorOracle& oracle, const TimeGrid& grid) {
  return exact_fdos(oracle.eigenvalues(), grid);
}

FdosSignal trace_fdos(const EchoEngine& engine, const TimeGrid& grid) {
  grid.validate();
  FdosSignal s;
  s.grid = grid;
  s.normalization = static_cast<double>(engine.dimension());
  s.values.resize(grid.n_points);
  s.shots.assign(grid.n_points, ShotRecord{0, 0, "trace-" + engine.kind(), 0});
  for (std::size_t k = 0; k < grid.n_points; ++k) s.values[k] = engine.trace(grid.time(k)) * kInvSqrt2Pi;
  return s;
}

}  // namespace qdos::fdos
