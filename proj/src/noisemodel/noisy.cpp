#include "qdos/noisemodel/noisy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qdos/common/errors.hpp"

namespace qdos::noisemodel {

NoisyCircuit::NoisyCircuit(int n_register, bool controlled) : n_(n_register), controlled_(controlled) {
  if (n_register < 1) throw DimensionError("noisy circuit needs at least one qubit");
}

void NoisyCircuit::add_rotation(const qcore::PauliString& p, double angle) {
  if (p.n_qubits() != n_) throw DimensionError("rotation does not match the register");
  Op op;
  op.pauli = controlled_ ? p.with_coefficient(1.0).embed(n_ + 1, qcore::register_map(n_, n_)) : p.with_coefficient(1.0);
  op.angle = angle;
  ops_.push_back(std::move(op));
  ++n_rot_;
}

void NoisyCircuit::add_channel(std::shared_ptr<const qcore::KrausChannel> channel, std::vector<int> targets) {
  if (!channel) throw ValidationError("null channel");
  if (static_cast<int>(targets.size()) != channel->arity()) throw DimensionError("channel arity does not match targets");
  for (int t : targets)
    if (t < 0 || t >= n_joint()) throw DimensionError("channel target outside the register");
  Op op;
  op.channel = std::move(channel);
  op.targets = std::move(targets);
  ops_.push_back(std::move(op));
}

void NoisyCircuit::append(const NoisyCircuit& other) {
  if (other.n_ != n_ || other.controlled_ != controlled_) throw DimensionError("cannot append mismatched circuits");
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  n_rot_ += other.n_rot_;
}

void NoisyCircuit::apply(qcore::DensityMatrix& rho) const {
  if (rho.n_qubits() != n_joint()) throw DimensionError("density matrix does not match the noisy circuit");
  for (const auto& op : ops_) {
    if (op.channel) {
      qcore::apply_kraus(rho, *op.channel, op.targets);
    } else if (controlled_) {
      qcore::apply_controlled_pauli_rotation(rho, n_, op.pauli, op.angle);
    } else {
      qcore::apply_pauli_rotation(rho, op.pauli, op.angle);
    }
  }
}

std::size_t noisy_gate_count(const evolve::TrotterPlan& plan, double t_max) {
  const auto snap = plan.snap(t_max);
  return plan.rotations_per_step() * static_cast<std::size_t>(std::max<std::int64_t>(snap.n_steps, 0));
}

DepolSpec depol_for_evolution(double xi, const evolve::TrotterPlan& plan, double t_max) {
  DepolSpec s{xi, noisy_gate_count(plan, t_max)};
  s.validate();
  return s;
}

NoisyCircuit attach_depolarizing(const qcore::RotationCircuit& step, const DepolSpec& spec) {
  spec.validate();
  const int n = step.n_qubits();
  NoisyCircuit out(n, true);
  const double lambda = spec.lambda();
  auto ch = std::make_shared<const qcore::KrausChannel>(depolarizing_channel(lambda, 1));
  for (const auto& g : step.gates()) {
    out.add_rotation(g.pauli, g.angle);
    if (lambda == 0.0) continue;
    out.add_channel(ch, {n});
    const auto sup = g.pauli.support();
    if (sup.empty()) continue;
    out.add_channel(ch, {sup.front()});
    if (sup.back() != sup.front()) out.add_channel(ch, {sup.back()});
  }
  return out;
}

NoisyCircuit attach_depolarizing(const evolve::TrotterPlan& plan, const DepolSpec& spec) {
  if (!plan.controlled()) throw SpecError("depolarizing model needs a controlled Trotter plan");
  return attach_depolarizing(plan.step(), spec);
}

std::vector<std::pair<int, int>> lindblad_pairs(const qcore::RotationCircuit& circuit, bool controlled) {
  std::vector<std::pair<int, int>> out;
  auto add = [&](int a, int b) {
    const std::pair<int, int> k{std::min(a, b), std::max(a, b)};
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  const int n = circuit.n_qubits();
  for (const auto& g : circuit.gates()) {
    const auto sup = g.pauli.support();
    for (std::size_t i = 1; i < sup.size(); ++i) add(sup[i - 1], sup[i]);
    if (controlled && !sup.empty()) add(sup.back(), n);
  }
  return out;
}

NoisyCircuit attach_lindblad(const qcore::RotationCircuit& circuit, const PauliLindbladSpec& spec, bool controlled) {
  spec.validate();
  const int n = circuit.n_qubits();
  NoisyCircuit out(n, controlled);
  std::map<std::pair<int, int>, std::shared_ptr<const qcore::KrausChannel>> cache;
  auto channel = [&](int a, int b) {
    const std::pair<int, int> k{std::min(a, b), std::max(a, b)};
    auto it = cache.find(k);
    if (it == cache.end())
      it = cache.emplace(k, std::make_shared<const qcore::KrausChannel>(lindblad_to_kraus(spec, k.first, k.second))).first;
    out.add_channel(it->second, {k.first, k.second});
  };
  for (const auto& g : circuit.gates()) {
    out.add_rotation(g.pauli, g.angle);
    if (spec.lambda0 == 0.0) continue;
    const auto sup = g.pauli.support();
    for (std::size_t i = 1; i < sup.size(); ++i) channel(sup[i - 1], sup[i]);
    if (controlled && !sup.empty()) channel(sup.back(), n);
  }
  return out;
}

NoisyCircuit attach_lindblad(const evolve::TrotterPlan& plan, const PauliLindbladSpec& spec) {
  return attach_lindblad(plan.step(), spec, plan.controlled());
}

qcore::DensityMatrix plus_ancilla(const qcore::DensityMatrix& rho_s) {
  qcore::DensityMatrix plus = qcore::DensityMatrix::from_pure(qcore::StateVector::plus(1));
  return qcore::tensor(plus, rho_s);
}

fdos::cplx ancilla_echo(const qcore::DensityMatrix& joint, int ancilla) {
  if (ancilla < 0 || ancilla >= joint.n_qubits()) throw DimensionError("ancilla outside the register");
  const std::uint64_t bit = std::uint64_t{1} << ancilla;
  const auto& m = joint.matrix();
  fdos::cplx acc = 0.0;
  for (std::uint64_t i = 0; i < joint.dimension(); ++i)
    if (!(i & bit)) acc += m(static_cast<Eigen::Index>(i | bit), static_cast<Eigen::Index>(i));
  return 2.0 * acc;
}

fdos::FdosSignal noisy_fdos(const NoisyCircuit& step, const qcore::DensityMatrix& rho_s,
                            const fdos::TimeGrid& grid, double normalization) {
  grid.validate();
  if (!step.controlled()) throw SpecError("noisy FDOS needs a controlled step circuit");
  if (rho_s.n_qubits() != step.n_register()) throw DimensionError("initial state does not match the register");
  fdos::FdosSignal sig;
  sig.grid = grid;
  sig.normalization = normalization;
  sig.values.resize(grid.n_points);
  sig.shots.assign(grid.n_points, fdos::ShotRecord{0, 0, "trace-noisy", 0});
  qcore::DensityMatrix rho = plus_ancilla(rho_s);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    if (k > 0) step.apply(rho);
    sig.values[k] = normalization * fdos::kInvSqrt2Pi * ancilla_echo(rho, step.ancilla());
  }
  return sig;
}

EnvelopeFit fit_envelope(const fdos::FdosSignal& noisy, const fdos::FdosSignal& ideal, double floor, double ideal_min) {
  if (noisy.size() != ideal.size()) throw DimensionError("envelope fit needs signals of equal length");
  if (ideal.size() < 2) throw DomainError("envelope fit needs at least two points");
  const double ref = std::abs(ideal.values[0]);
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < ideal.size(); ++k) {
    const double gi = std::abs(ideal.values[k]);
    if (gi < ideal_min * ref) continue;
    const double r = std::abs(noisy.values[k]) / gi;
    if (r < floor) break;
    ts.push_back(ideal.grid.time(k));
    ys.push_back(std::log(r));
  }
  if (ts.size() < 3) throw DomainError("too few pre-floor points for an envelope fit");
  const double n = static_cast<double>(ts.size());
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  EnvelopeFit fit;
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.tau = slope < 0.0 ? -1.0 / slope : INFINITY;
  fit.intercept = my - slope * mt;
  fit.r2 = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  fit.n_used = ts.size();
  return fit;
}

}  // namespace qdos::noisemodel
