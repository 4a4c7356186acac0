#include "qdos/fdos/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qdos/common/errors.hpp"
#include "qdos/common/parallel.hpp"

namespace qdos::fdos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t binomial(std::uint64_t n, double p, Engine& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::uint64_t>(n, p)(rng);
}

// Number of even integers in [a, b).
std::uint64_t evens(std::uint64_t a, std::uint64_t b) { return (b + 1) / 2 - (a + 1) / 2; }

void check_sampler(const EchoEngine& engine, const SamplerSpec& sampler) {
  if (sampler.is_dqc1()) throw SpecError("DQC1 samplers go through dqc1_fdos");
  if (sampler.kind == SamplerKind::hamming) {
    if (engine.is_full_space() || engine.particle_number() != sampler.param)
      throw SpecError("hamming(" + std::to_string(sampler.param) +
                      ") needs an engine on the matching particle-number block");
  } else if (!engine.is_full_space()) {
    throw SpecError(sampler.id() + " sampler needs a full-space engine; use hamming(M) on a block");
  }
}

std::uint64_t draw_hamming(int n, int M, Engine& rng) {
  std::vector<int> q(static_cast<std::size_t>(n));
  std::iota(q.begin(), q.end(), 0);
  std::uint64_t b = 0;
  for (int j = 0; j < M; ++j) {
    std::uniform_int_distribution<int> pick(j, n - 1);
    std::swap(q[static_cast<std::size_t>(j)], q[static_cast<std::size_t>(pick(rng))]);
    b |= std::uint64_t{1} << q[static_cast<std::size_t>(j)];
  }
  return b;
}

std::uint64_t draw_basis_index(const SamplerSpec& sampler, int n, Engine& rng) {
  if (sampler.kind == SamplerKind::hamming) return draw_hamming(n, sampler.param, rng);
  return std::uniform_int_distribution<std::uint64_t>(0, (std::uint64_t{1} << n) - 1)(rng);
}

}  // namespace

std::string SamplerSpec::id() const {
  switch (kind) {
    case SamplerKind::bitflip: return "bitflip";
    case SamplerKind::euler: return "euler";
    case SamplerKind::haar: return "haar";
    case SamplerKind::layered: return "layered(" + std::to_string(param) + ")";
    case SamplerKind::hamming: return "hamming(" + std::to_string(param) + ")";
    case SamplerKind::dqc1_full: return "dqc1-full";
    case SamplerKind::dqc1_subspace: return "dqc1-subspace(" + std::to_string(param) + ")";
  }
  return "?";
}

SamplerSpec SamplerSpec::parse(const std::string& id) {
  SamplerSpec s;
  std::string name = id;
  bool has_param = false;
  const auto open = id.find('(');
  if (open != std::string::npos) {
    if (id.back() != ')') throw SpecError("malformed sampler id '" + id + "'");
    name = id.substr(0, open);
    const std::string arg = id.substr(open + 1, id.size() - open - 2);
    std::size_t used = 0;
    try {
      s.param = std::stoi(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (arg.empty() || used != arg.size()) throw SpecError("malformed sampler parameter in '" + id + "'");
    has_param = true;
  }
  struct Entry {
    const char* name;
    SamplerKind kind;
    bool param;
  };
  static const Entry table[] = {{"bitflip", SamplerKind::bitflip, false},
                                {"euler", SamplerKind::euler, false},
                                {"haar", SamplerKind::haar, false},
                                {"layered", SamplerKind::layered, true},
                                {"hamming", SamplerKind::hamming, true},
                                {"dqc1-full", SamplerKind::dqc1_full, false},
                                {"dqc1-subspace", SamplerKind::dqc1_subspace, true}};
  for (const auto& e : table) {
    if (name != e.name) continue;
    if (e.param != has_param) throw SpecError("sampler '" + name + "' parameter mismatch");
    if (has_param && s.param < 0) throw SpecError("sampler parameter must be non-negative");
    s.kind = e.kind;
    return s;
  }
  throw SpecError("unknown sampler '" + id + "'");
}

double hadamard_p0(cplx echo, Part part) {
  const double x = part == Part::real ? echo.real() : echo.imag();
  return std::clamp(0.5 * (1.0 + x), 0.0, 1.0);
}

HadamardResult hadamard_test(const qcore::StateVector& initial, const EchoEngine& engine, double t,
                             Part part, std::optional<std::uint64_t> shots, Engine& rng) {
  HadamardResult r;
  r.p0 = hadamard_p0(engine.echo(initial, t), part);
  r.p0_hat = r.p0;
  if (shots) {
    if (*shots == 0) throw DomainError("Hadamard test needs at least one shot");
    r.p0_hat = static_cast<double>(binomial(*shots, r.p0, rng)) / static_cast<double>(*shots);
  }
  r.estimate = 2.0 * r.p0_hat - 1.0;
  return r;
}

double hadamard_test_circuit_p0(const qcore::StateVector& initial, const evolve::TrotterPlan& plan,
                                double t, Part part) {
  const int n = plan.n_qubits();
  if (initial.n_qubits() != n) throw DimensionError("state and plan qubit counts differ");
  const std::size_t d = initial.dimension();
  qcore::StateVector joint(n + 1);
  const double r = std::sqrt(0.5);
  for (std::size_t b = 0; b < d; ++b) {
    joint[b] = r * initial[b];
    joint[b + d] = r * initial[b];
  }
  joint = evolve::controlled_trotter_evolve(plan, joint, n, t);
  qcore::apply_single_qubit(joint, n, part == Part::real ? qcore::hadamard_matrix() : qcore::sdg_hadamard_matrix());
  double p0 = 0.0;
  for (std::size_t b = 0; b < d; ++b) p0 += std::norm(joint[b]);
  return p0;
}

qcore::RotationCircuit initial_state_circuit(const SamplerSpec& sampler, int n_qubits, Engine& rng) {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  if (sampler.kind == SamplerKind::euler) {
    qcore::RotationCircuit c(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
      const double a1 = angle(rng), a2 = angle(rng), a3 = angle(rng);
      c.add(qcore::PauliString::single(n_qubits, q, 'X'), a3);
      c.add(qcore::PauliString::single(n_qubits, q, 'Z'), a2);
      c.add(qcore::PauliString::single(n_qubits, q, 'X'), a1);
    }
    return c;
  }
  if (sampler.kind == SamplerKind::layered) {
    std::vector<double> angles(qcore::layered_parameter_count(n_qubits, sampler.param));
    for (auto& a : angles) a = angle(rng);
    return qcore::layered_circuit(n_qubits, sampler.param, angles);
  }
  throw SpecError(sampler.id() + " states are not prepared by a rotation circuit");
}

qcore::StateVector draw_initial_state(const SamplerSpec& sampler, int n_qubits, Engine& rng) {
  switch (sampler.kind) {
    case SamplerKind::bitflip:
    case SamplerKind::hamming:
      if (sampler.kind == SamplerKind::hamming && (sampler.param > n_qubits))
        throw SpecError("hamming weight exceeds qubit count");
      return qcore::StateVector::basis(n_qubits, draw_basis_index(sampler, n_qubits, rng));
    case SamplerKind::euler: {
      // Product state; same draw order as initial_state_circuit.
      std::uniform_real_distribution<double> angle(0.0, kTwoPi);
      Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
      for (int q = 0; q < n_qubits; ++q) {
        const double a1 = angle(rng), a2 = angle(rng), a3 = angle(rng);
        // Rx(a3)|0> = (cos a3, -i sin a3)
        Eigen::Vector2cd u(std::cos(a3), cplx(0.0, -std::sin(a3)));
        u[0] *= std::polar(1.0, -a2);
        u[1] *= std::polar(1.0, a2);
        const Eigen::Vector2cd v(std::cos(a1) * u[0] - cplx(0.0, std::sin(a1)) * u[1],
                                 std::cos(a1) * u[1] - cplx(0.0, std::sin(a1)) * u[0]);
        Eigen::VectorXcd next(psi.size() * 2);
        next.head(psi.size()) = v[0] * psi;
        next.tail(psi.size()) = v[1] * psi;
        psi = std::move(next);
      }
      return qcore::StateVector(n_qubits, psi);
    }
    case SamplerKind::haar: {
      std::normal_distribution<double> g;
      Eigen::VectorXcd psi(Eigen::Index{1} << n_qubits);
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double re = g(rng);
        psi[i] = cplx(re, g(rng));
      }
      psi.normalize();
      return qcore::StateVector(n_qubits, psi);
    }
    case SamplerKind::layered: {
      qcore::StateVector psi(n_qubits);
      initial_state_circuit(sampler, n_qubits, rng).apply(psi);
      return psi;
    }
    default:
      throw SpecError("DQC1 samplers do not draw pure initial states");
  }
}

qcore::StateVector dicke_state(int n_qubits, int M) {
  if (M < 0 || M > n_qubits) throw DomainError("Dicke weight must lie in [0, n]");
  qcore::StateVector psi(n_qubits);
  psi[0] = 0.0;
  double count = 0.0;
  for (std::uint64_t b = 0; b < psi.dimension(); ++b)
    if (std::popcount(b) == M) count += 1.0;
  const double a = 1.0 / std::sqrt(count);
  for (std::uint64_t b = 0; b < psi.dimension(); ++b)
    if (std::popcount(b) == M) psi[b] = a;
  return psi;
}

FdosSignal exhaustive_fdos(const EchoEngine& engine, const TimeGrid& grid, const SamplerSpec& sampler) {
  grid.validate();
  check_sampler(engine, sampler);
  if (sampler.kind != SamplerKind::bitflip && sampler.kind != SamplerKind::hamming)
    throw SpecError("exhaustive enumeration needs a basis-state sampler");
  const auto& basis = engine.basis();
  FdosSignal s;
  s.grid = grid;
  s.normalization = static_cast<double>(basis.size());
  s.values.resize(grid.n_points);
  s.shots.assign(grid.n_points, ShotRecord{0, 0, sampler.id(), sampler.seed});
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    cplx acc = 0.0;
    for (auto b : basis) acc += engine.echo(qcore::StateVector::basis(engine.n_qubits(), b), grid.time(k));
    s.values[k] = acc * kInvSqrt2Pi;
  }
  return s;
}

cplx shot_average(const std::vector<cplx>& echoes, const ShotPlan& plan, std::uint64_t seed, std::uint64_t k) {
  if (echoes.size() != plan.n_states()) throw DimensionError("echo count does not match the shot plan");
  if (plan.analytic) {
    cplx acc = 0.0;
    for (const auto& e : echoes) acc += e;
    return acc / static_cast<double>(echoes.size());
  }
  const std::uint64_t n_re = (plan.n_shots + 1) / 2;
  const std::uint64_t n_im = plan.n_shots / 2;
  double sum_re = 0.0, sum_im = 0.0;
  for (std::uint64_t i = 0; i < echoes.size(); ++i) {
    const std::uint64_t a = i * plan.n_reuse, b = a + plan.n_reuse;
    const std::uint64_t nr = evens(a, b), ni = plan.n_reuse - nr;
    Engine rng = keyed_engine(seed, {k, i, 1});
    const std::uint64_t xr = binomial(nr, hadamard_p0(echoes[i], Part::real), rng);
    const std::uint64_t xi = binomial(ni, hadamard_p0(echoes[i], Part::imag), rng);
    sum_re += 2.0 * static_cast<double>(xr) - static_cast<double>(nr);
    sum_im += 2.0 * static_cast<double>(xi) - static_cast<double>(ni);
  }
  return {sum_re / static_cast<double>(n_re), n_im ? sum_im / static_cast<double>(n_im) : 0.0};
}

FdosSignal sample_fdos(const EchoEngine& engine, const TimeGrid& grid, const SamplerSpec& sampler,
                       const ShotPlan& plan, unsigned workers) {
  grid.validate();
  plan.validate();
  check_sampler(engine, sampler);
  if (sampler.n_reuse != plan.n_reuse) throw SpecError("sampler and shot plan disagree on the reuse count");
  const int n = engine.n_qubits();
  const std::uint64_t n_states = plan.n_states();
  const bool basis_states = sampler.kind == SamplerKind::bitflip || sampler.kind == SamplerKind::hamming;
  const double norm = static_cast<double>(engine.dimension());

  FdosSignal s;
  s.grid = grid;
  s.normalization = norm;
  s.values.resize(grid.n_points);
  const ShotRecord rec = plan.analytic ? ShotRecord{0, 0, sampler.id(), sampler.seed}
                                       : ShotRecord{plan.n_shots, plan.n_reuse, sampler.id(), sampler.seed};
  s.shots.assign(grid.n_points, rec);

  parallel_for(grid.n_points, workers, [&](std::size_t k) {
    const Eigen::VectorXcd ph = engine.phases(grid.time(k));
    std::vector<cplx> echo(n_states);
    if (basis_states) {
      const Eigen::VectorXcd be = engine.basis_echoes(ph);
      for (std::uint64_t i = 0; i < n_states; ++i) {
        Engine rng = keyed_engine(sampler.seed, {k, i, 0});
        echo[i] = be[static_cast<Eigen::Index>(*engine.position(draw_basis_index(sampler, n, rng)))];
      }
    } else {
      constexpr std::uint64_t batch = 128;
      Eigen::MatrixXcd coords(static_cast<Eigen::Index>(engine.dimension()), 0);
      for (std::uint64_t start = 0; start < n_states; start += batch) {
        const std::uint64_t m = std::min(batch, n_states - start);
        coords.resize(coords.rows(), static_cast<Eigen::Index>(m));
        for (std::uint64_t j = 0; j < m; ++j) {
          Engine rng = keyed_engine(sampler.seed, {k, start + j, 0});
          coords.col(static_cast<Eigen::Index>(j)) = draw_initial_state(sampler, n, rng).amplitudes();
        }
        const Eigen::VectorXcd e = engine.echoes(coords, ph);
        for (std::uint64_t j = 0; j < m; ++j) echo[start + j] = e[static_cast<Eigen::Index>(j)];
      }
    }
    const cplx est = shot_average(echo, plan, sampler.seed, k);
    s.values[k] = norm * kInvSqrt2Pi * est;
  });
  return s;
}

FdosSignal dqc1_fdos(const EchoEngine& engine, const TimeGrid& grid, const ShotPlan& plan, std::uint64_t seed) {
  grid.validate();
  plan.validate();
  const double norm = static_cast<double>(engine.dimension());
  SamplerSpec sampler;
  sampler.kind = engine.is_full_space() ? SamplerKind::dqc1_full : SamplerKind::dqc1_subspace;
  sampler.param = engine.is_full_space() ? 0 : engine.particle_number();
  FdosSignal s;
  s.grid = grid;
  s.normalization = norm;
  s.values.resize(grid.n_points);
  s.shots.assign(grid.n_points, plan.analytic ? ShotRecord{0, 0, sampler.id(), seed}
                                              : ShotRecord{plan.n_shots, 1, sampler.id(), seed});
  const std::uint64_t n_re = (plan.n_shots + 1) / 2;
  const std::uint64_t n_im = plan.n_shots / 2;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const cplx l = engine.trace(grid.time(k)) / norm;
    cplx est = l;
    if (!plan.analytic) {
      Engine rng_re = keyed_engine(seed, {k, 0});
      Engine rng_im = keyed_engine(seed, {k, 1});
      const double xr = static_cast<double>(binomial(n_re, hadamard_p0(l, Part::real), rng_re));
      const double xi = static_cast<double>(binomial(n_im, hadamard_p0(l, Part::imag), rng_im));
      est = cplx(2.0 * xr / static_cast<double>(n_re) - 1.0,
                 n_im ? 2.0 * xi / static_cast<double>(n_im) - 1.0 : 0.0);
    }
    s.values[k] = norm * kInvSqrt2Pi * est;
  }
  return s;
}

std::size_t Dqc1Circuit::count(const std::string& name) const {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(), [&](const CircuitOp& op) { return op.name == name; }));
}

Dqc1Circuit dqc1_circuit(const evolve::TrotterPlan& plan, double t, Part part, std::optional<int> M) {
  if (!plan.controlled()) throw SpecError("DQC1 circuit needs a controlled Trotter plan");
  const int n = plan.n_qubits();
  if (M && (*M < 0 || *M > n)) throw DomainError("subspace weight must lie in [0, n]");
  Dqc1Circuit c;
  c.n_qubits = 2 * n + 1;
  const int anc = 2 * n;
  if (M) {
    std::vector<int> copy(static_cast<std::size_t>(n));
    std::iota(copy.begin(), copy.end(), n);
    c.ops.push_back({"dicke", copy});
  } else {
    for (int j = 0; j < n; ++j) c.ops.push_back({"h", {n + j}});
  }
  for (int j = 0; j < n; ++j) c.ops.push_back({"cx", {n + j, j}});
  c.ops.push_back({"h", {anc}});
  c.trotter_steps = plan.snap(t).n_steps;
  std::vector<int> ctrl{anc};
  for (int j = 0; j < n; ++j) ctrl.push_back(j);
  for (std::int64_t s = 0; s < c.trotter_steps; ++s) {
    c.ops.push_back({"ctrl-trotter-step", ctrl});
    c.evolution_cost += plan.step_cost();
  }
  if (part == Part::imag) c.ops.push_back({"sdg", {anc}});
  c.ops.push_back({"h", {anc}});
  return c;
}

qcore::StateVector purified_register(int n_qubits, std::optional<int> M) {
  if (2 * n_qubits > 24) throw DimensionError("purified register too large");
  qcore::StateVector psi(2 * n_qubits);
  psi[0] = 0.0;
  double count = 0.0;
  const std::uint64_t d = std::uint64_t{1} << n_qubits;
  for (std::uint64_t b = 0; b < d; ++b)
    if (!M || std::popcount(b) == *M) count += 1.0;
  const double a = 1.0 / std::sqrt(count);
  for (std::uint64_t b = 0; b < d; ++b)
    if (!M || std::popcount(b) == *M) psi[b | (b << n_qubits)] = a;
  return psi;
}

}  // namespace qdos::fdos
