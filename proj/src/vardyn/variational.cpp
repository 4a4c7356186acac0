#include "qdos/vardyn/variational.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <random>

#include "qdos/common/errors.hpp"
#include "qdos/common/parallel.hpp"
#include "qdos/common/rng.hpp"
#include "qdos/evolve/propagator.hpp"
#include "qdos/evolve/trotter.hpp"
#include "qdos/fdos/sampling.hpp"
#include "qdos/noisemodel/noisy.hpp"

namespace qdos::vardyn {

using qcore::PauliString;
using qcore::StateVector;

qcore::RotationCircuit Ansatz::circuit(std::span<const double> theta) const {
  return qcore::layered_circuit(n_qubits, layers, theta);
}

Ansatz build_ansatz(int n_qubits, int layers) {
  if (n_qubits < 2) throw SpecError("ansatz needs at least two qubits");
  if (layers < 1) throw SpecError("ansatz needs at least one layer");
  return {n_qubits, layers};
}

CompilationObjective::CompilationObjective(CompileMode mode, Ansatz ansatz, qcore::RotationCircuit prep,
                                           const qcore::RotationCircuit& step, std::vector<double> theta_t)
    : mode_(mode), ansatz_(ansatz), prep_inv_(prep.inverse()), theta_t_(std::move(theta_t)), target_(ansatz.n_qubits) {
  const int n = ansatz_.n_qubits;
  if (prep.n_qubits() != n || step.n_qubits() != n) throw DimensionError("compilation circuits disagree on qubit count");
  if (theta_t_.size() != ansatz_.n_params()) throw DimensionError("theta_t has the wrong length");
  prep.apply(target_);
  ansatz_.circuit(theta_t_).apply(target_);
  step.apply(target_);
}

int CompilationObjective::n_compile_qubits() const {
  return mode_ == CompileMode::phase_sensitive ? ansatz_.n_qubits + 1 : ansatz_.n_qubits;
}

qcore::QubitHamiltonian CompilationObjective::hamiltonian() const {
  const int m = n_compile_qubits();
  qcore::QubitHamiltonian h(m);
  for (int j = 0; j < m; ++j) h.add_term(PauliString::single(m, j, 'Z', -1.0));
  return h;
}

StateVector CompilationObjective::chi(std::span<const double> theta) const {
  StateVector s = target_;
  ansatz_.circuit(theta).inverse().apply(s);
  prep_inv_.apply(s);
  return s;
}

StateVector CompilationObjective::compilation_state(std::span<const double> theta) const {
  StateVector c = chi(theta);
  if (mode_ == CompileMode::phase_free) return c;
  const int n = ansatz_.n_qubits;
  const Eigen::Index d = Eigen::Index{1} << n;
  Eigen::VectorXcd joint(2 * d);
  joint.head(d) = 0.5 * c.amplitudes();
  joint.tail(d) = -0.5 * c.amplitudes();
  joint[0] += 0.5;
  joint[d] += 0.5;
  return StateVector(n + 1, std::move(joint));
}

double CompilationObjective::energy(std::span<const double> theta) const {
  return qcore::expectation(compilation_state(theta), hamiltonian());
}

double CompilationObjective::step_fidelity(std::span<const double> theta) const {
  return std::norm(chi(theta)[0]);
}

std::vector<PauliString> local_paulis(int n_qubits, int max_weight) {
  std::vector<PauliString> out;
  const std::uint64_t total = std::uint64_t{1} << (2 * n_qubits);
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    PauliString p = PauliString::from_index(n_qubits, idx);
    if (p.weight() <= max_weight) out.push_back(p);
  }
  return out;
}

CovarSet::CovarSet(std::vector<PauliString> pivots, std::vector<PauliString> observables)
    : pivots_(std::move(pivots)), obs_(std::move(observables)) {
  if (pivots_.empty() || obs_.empty()) throw SpecError("covariance set needs pivots and observables");
  const int n = pivots_.front().n_qubits();
  for (const auto* list : {&pivots_, &obs_})
    for (const auto& p : *list) {
      if (p.n_qubits() != n) throw DimensionError("covariance operators disagree on qubit count");
      if (p.coefficient().imag() != 0.0) throw DomainError("covariance operators must be Hermitian");
    }
  products_.reserve(size());
  for (const auto& p : pivots_)
    for (const auto& o : obs_) products_.push_back(p * o);
}

CovarSet CovarSet::for_objective(int n_qubits, int max_weight, std::size_t random_count, std::uint64_t seed,
                                 std::uint64_t step) {
  std::vector<PauliString> pivots;
  for (int j = 0; j < n_qubits; ++j) pivots.push_back(PauliString::single(n_qubits, j, 'Z'));
  auto obs = local_paulis(n_qubits, max_weight);
  if (random_count > 0 && random_count < obs.size()) {
    Engine rng = keyed_engine(seed, {step});
    std::shuffle(obs.begin(), obs.end(), rng);
    obs.resize(random_count);
  }
  return CovarSet(std::move(pivots), std::move(obs));
}

namespace {

// sum_b conj(a[b ^ x]) (-1)^{b.z} a[b] for every (x, z): one Walsh-Hadamard
// transform per x mask, O(d^2 log d) for all 4^n Pauli strings.
std::vector<cplx> pauli_table(const StateVector& state) {
  const std::size_t d = state.dimension();
  const auto& a = state.amplitudes();
  std::vector<cplx> t(d * d);
  for (std::size_t x = 0; x < d; ++x) {
    cplx* v = &t[x * d];
    for (std::size_t b = 0; b < d; ++b)
      v[b] = std::conj(a[static_cast<Eigen::Index>(b ^ x)]) * a[static_cast<Eigen::Index>(b)];
    for (std::size_t h = 1; h < d; h <<= 1)
      for (std::size_t i = 0; i < d; i += 2 * h)
        for (std::size_t j = i; j < i + h; ++j) {
          const cplx u = v[j], w = v[j + h];
          v[j] = u + w;
          v[j + h] = u - w;
        }
  }
  return t;
}

double table_expectation(const std::vector<cplx>& t, std::size_t d, const PauliString& p) {
  return (p.coefficient() * p.y_phase() * t[p.x_mask() * d + p.z_mask()]).real();
}

}  // namespace

Eigen::VectorXd CovarSet::raw(const StateVector& state) const {
  if (state.n_qubits() != pivots_.front().n_qubits()) throw DimensionError("state does not match the covariance set");
  Eigen::VectorXd r(static_cast<Eigen::Index>(obs_.size() + pivots_.size() + products_.size()));
  Eigen::Index i = 0;
  if (state.n_qubits() <= 10) {
    const auto t = pauli_table(state);
    const std::size_t d = state.dimension();
    for (const auto& o : obs_) r[i++] = table_expectation(t, d, o);
    for (const auto& p : pivots_) r[i++] = table_expectation(t, d, p);
    for (const auto& q : products_) r[i++] = table_expectation(t, d, q);
    return r;
  }
  for (const auto& o : obs_) r[i++] = qcore::pauli_expectation(state, o).real();
  for (const auto& p : pivots_) r[i++] = qcore::pauli_expectation(state, p).real();
  for (const auto& q : products_) r[i++] = qcore::pauli_expectation(state, q).real();
  return r;
}

Eigen::VectorXd CovarSet::covariances(const Eigen::VectorXd& r) const {
  const auto no = static_cast<Eigen::Index>(obs_.size()), np = static_cast<Eigen::Index>(pivots_.size());
  Eigen::VectorXd f(np * no);
  for (Eigen::Index k = 0; k < np; ++k)
    for (Eigen::Index j = 0; j < no; ++j) f[k * no + j] = r[no + np + k * no + j] - r[no + k] * r[j];
  return f;
}

Eigen::MatrixXd CovarSet::jacobian(const Eigen::VectorXd& r, const Eigen::MatrixXd& dr) const {
  const auto no = static_cast<Eigen::Index>(obs_.size()), np = static_cast<Eigen::Index>(pivots_.size());
  Eigen::MatrixXd j(np * no, dr.cols());
  for (Eigen::Index k = 0; k < np; ++k)
    for (Eigen::Index o = 0; o < no; ++o)
      j.row(k * no + o) = dr.row(no + np + k * no + o) - dr.row(no + k) * r[o] - r[no + k] * dr.row(o);
  return j;
}

std::vector<double> covar_vector(const StateVector& state, const std::vector<PauliString>& observables,
                                 const std::vector<PauliString>& pivots) {
  const CovarSet set(pivots, observables);
  const Eigen::VectorXd f = set.covariances(set.raw(state));
  return {f.data(), f.data() + f.size()};
}

std::vector<double> covar_vector(const StateVector& state, const std::vector<PauliString>& observables) {
  std::vector<PauliString> pivots;
  for (int j = 0; j < state.n_qubits(); ++j) pivots.push_back(PauliString::single(state.n_qubits(), j, 'Z'));
  return covar_vector(state, observables, pivots);
}

namespace {

template <class F>
Eigen::MatrixXd shift_jacobian(const std::vector<double>& theta, Eigen::Index rows, unsigned workers, F&& eval) {
  const std::size_t p = theta.size();
  Eigen::MatrixXd d(rows, static_cast<Eigen::Index>(p));
  const double c = 0.5 * (1.0 - std::sqrt(2.0));
  parallel_for(p, workers, [&](std::size_t i) {
    std::vector<double> t = theta;
    auto g = [&](double s) {
      t[i] = theta[i] + s;
      const Eigen::VectorXd plus = eval(t);
      t[i] = theta[i] - s;
      const Eigen::VectorXd minus = eval(t);
      t[i] = theta[i];
      return Eigen::VectorXd(plus - minus);
    };
    d.col(static_cast<Eigen::Index>(i)) = g(kShiftNear) + c * g(kShiftFar);
  });
  return d;
}

void check_finite(double v, const char* what, int iter) {
  if (!std::isfinite(v))
    throw OptimizerError(std::string("non-finite ") + what + " at iteration " + std::to_string(iter));
}

}  // namespace

StepResult recompile_step(const CompilationObjective& obj, std::vector<double> theta, const StepOptions& opt,
                          std::uint64_t step_index) {
  if (theta.size() != obj.ansatz().n_params()) throw DimensionError("theta_start has the wrong length");
  if (opt.max_iters < 0) throw SpecError("max_iters must be non-negative");
  const CovarSet set =
      CovarSet::for_objective(obj.n_compile_qubits(), opt.max_weight, opt.random_observables, opt.seed, step_index);
  auto raw_at = [&](const std::vector<double>& t) { return set.raw(obj.compilation_state(t)); };

  StepResult res;
  Eigen::VectorXd r = raw_at(theta);
  Eigen::VectorXd f = set.covariances(r);
  double cost = f.squaredNorm();
  double energy = obj.energy(theta);
  double mu = opt.damping;
  double lr = opt.learning_rate;
  auto record = [&](int it) {
    check_finite(cost, "covariance norm", it);
    check_finite(energy, "energy", it);
    res.history.push_back({it, energy, cost, obj.step_fidelity(theta), opt.optimizer == Optimizer::covar ? mu : lr});
  };
  record(0);

  bool need_jacobian = true;
  Eigen::MatrixXd jac;
  Eigen::VectorXd grad;
  const auto p = static_cast<Eigen::Index>(theta.size());
  for (int it = 1;; ++it) {
    if (opt.optimizer == Optimizer::covar && cost < opt.tol) {
      res.converged = true;
      res.reason = "root";
      break;
    }
    if (energy - obj.floor() < opt.tol) {
      res.converged = true;
      res.reason = "floor";
      break;
    }
    if (it > opt.max_iters) {
      res.reason = "max_iters";
      break;
    }
    res.iterations = it;
    if (opt.optimizer == Optimizer::covar) {
      if (need_jacobian) jac = set.jacobian(r, shift_jacobian(theta, r.size(), opt.workers, raw_at));
      Eigen::MatrixXd a = jac.transpose() * jac;
      const Eigen::VectorXd g = jac.transpose() * f;
      const Eigen::VectorXd diag = a.diagonal();
      const double scale = std::max(diag.maxCoeff(), 1e-12);
      for (Eigen::Index i = 0; i < p; ++i) a(i, i) += mu * (diag[i] + 1e-6 * scale);
      const Eigen::VectorXd delta = a.ldlt().solve(-g);
      std::vector<double> trial = theta;
      for (Eigen::Index i = 0; i < p; ++i) trial[static_cast<std::size_t>(i)] += delta[i];
      const Eigen::VectorXd r_new = raw_at(trial);
      const Eigen::VectorXd f_new = set.covariances(r_new);
      const double c_new = f_new.squaredNorm();
      check_finite(c_new, "covariance norm", it);
      if (c_new < cost) {
        theta = std::move(trial);
        r = r_new;
        f = f_new;
        cost = c_new;
        energy = obj.energy(theta);
        mu *= 0.5;
        need_jacobian = true;
        record(it);
      } else {
        mu *= 2.0;
        need_jacobian = false;
        if (mu > 1e12) {
          res.reason = "stalled";
          break;
        }
      }
    } else {
      if (need_jacobian) {
        auto e_at = [&](const std::vector<double>& t) { return Eigen::VectorXd::Constant(1, obj.energy(t)); };
        grad = shift_jacobian(theta, 1, opt.workers, e_at).row(0).transpose();
      }
      std::vector<double> trial = theta;
      for (Eigen::Index i = 0; i < p; ++i) trial[static_cast<std::size_t>(i)] -= lr * grad[i];
      const double e_new = obj.energy(trial);
      check_finite(e_new, "energy", it);
      if (e_new < energy) {
        theta = std::move(trial);
        energy = e_new;
        r = raw_at(theta);
        f = set.covariances(r);
        cost = f.squaredNorm();
        need_jacobian = true;
        record(it);
      } else {
        lr *= 0.5;
        need_jacobian = false;
        if (lr < 1e-12) {
          res.reason = "stalled";
          break;
        }
      }
    }
  }
  res.theta = std::move(theta);
  return res;
}

ParamTrajectory recompile_trajectory(const qcore::QubitHamiltonian& h, const qcore::RotationCircuit& prep, double dt,
                                     std::size_t n_steps, const Ansatz& ansatz, const TrajectoryOptions& opt) {
  if (h.n_qubits() != ansatz.n_qubits || prep.n_qubits() != ansatz.n_qubits)
    throw DimensionError("Hamiltonian, preparation and ansatz disagree on qubit count");
  if (!(dt > 0.0)) throw SpecError("time step must be positive");
  const evolve::TrotterPlan plan(h, dt, opt.trotter_order, false);
  const evolve::PropagatorOracle oracle(h);

  StateVector psi0(ansatz.n_qubits);
  prep.apply(psi0);

  ParamTrajectory traj;
  traj.dt = dt;
  std::vector<double> theta(ansatz.n_params(), 0.0);
  auto log_point = [&](double t, double e, double c, double sf, int iters) {
    traj.times.push_back(t);
    traj.thetas.push_back(theta);
    traj.energies.push_back(e);
    traj.covar_norm2.push_back(c);
    traj.step_fidelities.push_back(sf);
    traj.iterations.push_back(iters);
    StateVector var = psi0;
    ansatz.circuit(theta).apply(var);
    const StateVector exact = evolve::exact_evolve(oracle, psi0, t);
    traj.cumulative_fidelity.push_back(std::norm(qcore::inner(exact, var)));
    traj.echo_error.push_back(std::abs(qcore::inner(psi0, var) - qcore::inner(psi0, exact)));
  };
  const double floor0 = opt.mode == CompileMode::phase_sensitive ? -(ansatz.n_qubits + 1.0) : -ansatz.n_qubits;
  log_point(0.0, floor0, 0.0, 1.0, 0);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    const CompilationObjective obj(opt.mode, ansatz, prep, plan.step(), theta);
    StepResult r = recompile_step(obj, theta, opt.step, s);
    theta = std::move(r.theta);
    const auto& fin = r.final();
    log_point(static_cast<double>(s) * dt, fin.energy, fin.covar_norm2, fin.step_fidelity, r.iterations);
  }
  return traj;
}

NoisyFidelity noisy_fidelity(const qcore::DensityMatrix& ideal, const qcore::DensityMatrix& actual) {
  if (ideal.dimension() != actual.dimension()) throw DimensionError("density matrices differ in dimension");
  const double overlap = (ideal.matrix() * actual.matrix()).trace().real();
  return {overlap / static_cast<double>(ideal.dimension()), overlap};
}

qcore::DensityMatrix ansatz_state(const Ansatz& ansatz, std::span<const double> theta, const qcore::RotationCircuit& prep,
                                  const noisemodel::PauliLindbladSpec* noise) {
  StateVector psi(ansatz.n_qubits);
  prep.apply(psi);
  qcore::DensityMatrix rho = qcore::DensityMatrix::from_pure(psi);
  const auto circ = ansatz.circuit(theta);
  if (noise)
    noisemodel::attach_lindblad(circ, *noise, false).apply(rho);
  else
    circ.apply(rho);
  return rho;
}

cplx variational_echo(const Ansatz& ansatz, std::span<const double> theta, const qcore::RotationCircuit& prep,
                      const noisemodel::PauliLindbladSpec* noise) {
  StateVector psi(ansatz.n_qubits);
  prep.apply(psi);
  const auto circ = ansatz.circuit(theta);
  if (!noise) {
    StateVector out = psi;
    circ.apply(out);
    return qcore::inner(psi, out);
  }
  qcore::DensityMatrix rho = noisemodel::plus_ancilla(qcore::DensityMatrix::from_pure(psi));
  noisemodel::attach_lindblad(circ, *noise, true).apply(rho);
  return noisemodel::ancilla_echo(rho, ansatz.n_qubits);
}

fdos::FdosSignal variational_fdos(const Ansatz& ansatz, const std::vector<ParamTrajectory>& trajectories,
                                  const std::vector<qcore::RotationCircuit>& preps,
                                  const noisemodel::PauliLindbladSpec* noise, const fdos::ShotPlan& plan,
                                  const fdos::TimeGrid& grid, std::uint64_t seed, unsigned workers) {
  grid.validate();
  plan.validate();
  if (trajectories.size() != preps.size()) throw DimensionError("trajectory and initial-state counts differ");
  if (trajectories.size() != plan.n_states()) throw DimensionError("trajectory count does not match the shot plan");
  for (const auto& t : trajectories) {
    if (std::abs(t.dt - grid.dt) > 1e-12 * grid.dt) throw DimensionError("grid step differs from the trajectory step");
    if (t.thetas.size() < grid.n_points) throw DimensionError("trajectory shorter than the time grid");
  }
  const std::size_t n_states = trajectories.size();
  std::vector<std::vector<cplx>> echo(grid.n_points, std::vector<cplx>(n_states));
  parallel_for(n_states, workers, [&](std::size_t s) {
    for (std::size_t k = 0; k < grid.n_points; ++k)
      echo[k][s] = variational_echo(ansatz, trajectories[s].thetas[k], preps[s], noise);
  });
  fdos::FdosSignal sig;
  sig.grid = grid;
  sig.normalization = std::ldexp(1.0, ansatz.n_qubits);
  sig.values.resize(grid.n_points);
  const fdos::ShotRecord rec = plan.analytic ? fdos::ShotRecord{0, 0, "variational", seed}
                                             : fdos::ShotRecord{plan.n_shots, plan.n_reuse, "variational", seed};
  sig.shots.assign(grid.n_points, rec);
  for (std::size_t k = 0; k < grid.n_points; ++k)
    sig.values[k] = sig.normalization * fdos::kInvSqrt2Pi * fdos::shot_average(echo[k], plan, seed, k);
  return sig;
}

}  // namespace qdos::vardyn
