#include "qdos/doscli/pipeline.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "qdos/common/errors.hpp"
#include "qdos/common/parallel.hpp"
#include "qdos/common/rng.hpp"
#include "qdos/doscli/digest.hpp"
#include "qdos/doscli/formats.hpp"
#include "qdos/evolve/propagator.hpp"
#include "qdos/evolve/trotter.hpp"
#include "qdos/fdos/engine.hpp"
#include "qdos/fdos/sampling.hpp"
#include "qdos/hamlib/io.hpp"
#include "qdos/noisemodel/channels.hpp"
#include "qdos/noisemodel/noisy.hpp"
#include "qdos/spectral/dos.hpp"
#include "qdos/spectral/thermo.hpp"
#include "qdos/vardyn/variational.hpp"

namespace qdos::doscli {

using nlohmann::json;
using spectral::DosEstimate;
using spectral::WindowSpec;

namespace {

const std::vector<std::string> kSweepSummaryColumns{"xi", "kind", "lambda", "tau", "sigma_star", "error_min"};
const std::vector<std::string> kFidelityColumns{"t", "literal", "overlap"};
const std::vector<std::string> kVardynSummaryColumns{"lambda0", "window", "error"};

std::string num_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::optional<hamlib::SubspaceIndex> subspace_of(int n, const std::optional<int>& M) {
  if (!M) return std::nullopt;
  return hamlib::subspace_index(n, *M);
}

std::vector<std::uint64_t> basis_of(int n, const std::optional<hamlib::SubspaceIndex>& sub) {
  if (sub) return sub->indices;
  std::vector<std::uint64_t> all(std::size_t{1} << n);
  std::iota(all.begin(), all.end(), std::uint64_t{0});
  return all;
}

std::uint64_t block_key(const std::optional<int>& M) { return M ? static_cast<std::uint64_t>(*M) + 1 : 0; }

noisemodel::PauliLindbladSpec lindblad_spec(const ExperimentConfig& cfg, double lambda0,
                                            const std::vector<std::pair<int, int>>& pairs) {
  noisemodel::PauliLindbladSpec spec;
  spec.lambda0 = lambda0;
  spec.table = cfg.noise.table.empty() ? noisemodel::bundled_gamma_table() : noisemodel::read_gamma_table(cfg.noise.table);
  spec.assign_random(pairs, derive_key(cfg.seed, {kSeedAssignment}));
  spec.validate();
  return spec;
}

// Ancilla-echo FDOS of the projected mixed state under a noisy controlled step.
fdos::FdosSignal noisy_trace_fdos(const ExperimentConfig& cfg, const noisemodel::NoisyCircuit& step,
                                  const std::optional<hamlib::SubspaceIndex>& sub, std::uint64_t seed) {
  const int n = cfg.n_qubits();
  const qcore::DensityMatrix rho =
      sub ? qcore::DensityMatrix::projected_mixed(n, sub->indices) : qcore::DensityMatrix::maximally_mixed(n);
  const double norm = sub ? static_cast<double>(sub->dimension()) : std::ldexp(1.0, n);
  fdos::FdosSignal sig = noisemodel::noisy_fdos(step, rho, cfg.time, norm);
  if (cfg.estimator.kind == "dqc1") {
    // one mixed "state" read by every shot
    const fdos::ShotPlan plan{cfg.estimator.shots, cfg.estimator.shots, cfg.estimator.analytic};
    const double scale = norm * fdos::kInvSqrt2Pi;
    for (std::size_t k = 0; k < sig.size(); ++k)
      sig.values[k] = scale * fdos::shot_average({sig.values[k] / scale}, plan, seed, k);
    const std::string id = sub ? "dqc1-subspace(" + std::to_string(cfg.subspace.M) + ")" : "dqc1-full";
    sig.shots.assign(sig.size(), plan.analytic ? fdos::ShotRecord{0, 0, id, seed}
                                               : fdos::ShotRecord{plan.n_shots, plan.n_reuse, id, seed});
  }
  return sig;
}

json signal_info(const fdos::FdosSignal& s) {
  return {{"dt", s.grid.dt}, {"n_points", s.grid.n_points}, {"t_max", s.grid.t_max()}, {"normalization", s.normalization}};
}

void add_csv(Artifacts& out, const StageContext& ctx, const std::string& name, const std::string& csv,
             const std::string& kind, json extra, const std::vector<std::string>& columns) {
  json side = sidecar(ctx, kind);
  side["file"] = name;
  side["columns"] = columns;
  side.update(extra);
  out.push_back({name, csv});
  out.push_back({name.substr(0, name.rfind('.')) + ".json", side.dump(2) + "\n"});
}

json block_json(const std::optional<int>& M) { return M ? json(*M) : json(nullptr); }

std::vector<double> betas(const ThermoConfig& t) {
  std::vector<double> b;
  for (double x : t.x) b.push_back(t.axis == "T" ? 1.0 / x : x);
  return b;
}

}  // namespace

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::spectrum: return "spectrum";
    case Stage::fdos: return "fdos";
    case Stage::reconstruct: return "reconstruct";
    case Stage::thermo: return "thermo";
    case Stage::noise_sweep: return "noise-sweep";
    case Stage::vardyn: return "vardyn";
  }
  return "?";
}

Stage parse_stage(const std::string& name) {
  for (Stage s : {Stage::spectrum, Stage::fdos, Stage::reconstruct, Stage::thermo, Stage::noise_sweep, Stage::vardyn})
    if (stage_name(s) == name) return s;
  throw ValidationError("unknown stage '" + name + "'");
}

std::vector<Stage> default_stages(const ExperimentConfig& cfg) {
  std::vector<Stage> s{Stage::fdos, Stage::reconstruct};
  if (cfg.thermo.enabled) s.push_back(Stage::thermo);
  if (cfg.sweep.enabled) s.push_back(Stage::noise_sweep);
  if (cfg.vardyn.enabled) s.push_back(Stage::vardyn);
  return s;
}

PreparedModel prepare_model(const ExperimentConfig& cfg) {
  PreparedModel m;
  m.original = build_model(cfg.model);
  m.hamiltonian = m.original;
  if (cfg.model.rescale != "none") {
    const auto r = hamlib::rescale_spectrum(
        m.original, cfg.model.rescale == "exact" ? hamlib::RescaleMode::exact : hamlib::RescaleMode::power_bound);
    m.hamiltonian = r.hamiltonian;
    m.rescale = r.info;
  }
  m.sha256 = sha256_hex(hamlib::format_hamiltonian(m.hamiltonian));
  return m;
}

std::string fdos_file(const std::optional<int>& M) { return "fdos" + block_tag(M) + ".csv"; }

std::string dos_file(const WindowSpec& w, const std::optional<int>& M) {
  return "dos_" + file_tag(w.id()) + block_tag(M) + ".csv";
}

fdos::FdosSignal block_fdos(const ExperimentConfig& cfg, const PreparedModel& model, const std::optional<int>& M,
                            unsigned workers, std::optional<double> xi_override) {
  const int n = cfg.n_qubits();
  const auto& h = model.hamiltonian;
  const auto sub = subspace_of(n, M);
  const std::uint64_t seed = derive_key(cfg.seed, {kSeedFdos, block_key(M)});
  const auto& est = cfg.estimator;
  const std::string noise = xi_override ? "depol" : cfg.noise.kind;

  if (noise != "none") {
    if (est.kind == "sample") throw ValidationError("noisy runs support the exact and dqc1 estimators only");
    const evolve::TrotterPlan plan(h, cfg.time.dt, cfg.dynamics.order, true);
    if (noise == "depol") {
      const double xi = xi_override ? *xi_override : cfg.noise.xi;
      const auto step = noisemodel::attach_depolarizing(plan, noisemodel::depol_for_evolution(xi, plan, cfg.time.t_max()));
      return noisy_trace_fdos(cfg, step, sub, seed);
    }
    const auto spec = lindblad_spec(cfg, cfg.noise.lambda0, noisemodel::lindblad_pairs(plan.step(), true));
    return noisy_trace_fdos(cfg, noisemodel::attach_lindblad(plan, spec), sub, seed);
  }

  if (cfg.dynamics.kind == "exact") {
    const evolve::PropagatorOracle oracle(h, sub);
    if (est.kind == "exact") return fdos::exact_fdos(oracle, cfg.time);
    const auto engine = fdos::EchoEngine::exact(oracle);
    if (est.kind == "dqc1") return fdos::dqc1_fdos(engine, cfg.time, {est.shots, est.reuse, est.analytic}, seed);
    auto sampler = fdos::SamplerSpec::parse(est.sampler);
    sampler.n_reuse = est.reuse;
    sampler.seed = seed;
    return fdos::sample_fdos(engine, cfg.time, sampler, {est.shots, est.reuse, est.analytic}, workers);
  }
  const evolve::TrotterPlan plan(h, cfg.time.dt, cfg.dynamics.order, false);
  const auto engine = fdos::EchoEngine::trotter(evolve::TrotterSpectrum(plan, basis_of(n, sub)));
  if (est.kind == "exact") return fdos::trace_fdos(engine, cfg.time);
  if (est.kind == "dqc1") return fdos::dqc1_fdos(engine, cfg.time, {est.shots, est.reuse, est.analytic}, seed);
  auto sampler = fdos::SamplerSpec::parse(est.sampler);
  sampler.n_reuse = est.reuse;
  sampler.seed = seed;
  return fdos::sample_fdos(engine, cfg.time, sampler, {est.shots, est.reuse, est.analytic}, workers);
}

std::vector<double> energy_points(const ExperimentConfig& cfg, const fdos::TimeGrid& grid) {
  const auto eg = spectral::dft_energy_grid(grid, cfg.energy.oversample);
  std::vector<double> out;
  for (double e : eg.energies())
    if (!cfg.energy.range || (e >= cfg.energy.range->first && e <= cfg.energy.range->second)) out.push_back(e);
  if (out.empty()) throw ValidationError("energy.range contains no grid point");
  return out;
}

json sidecar(const StageContext& ctx, const std::string& kind) {
  return {{"config_hash", ctx.hash}, {"kind", kind}, {"code_version", kCodeVersion}, {"config", ctx.cfg.canonical()}};
}

namespace {

Artifacts stage_spectrum(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const PreparedModel model = prepare_model(cfg);
  Artifacts out;
  for (const auto& M : cfg.blocks()) {
    const auto eig = hamlib::exact_spectrum(model.hamiltonian, subspace_of(cfg.n_qubits(), M));
    const std::string name = "spectrum" + block_tag(M) + ".csv";
    json extra{{"block", block_json(M)}, {"hamiltonian_sha256", model.sha256}, {"dimension", eig.size()}};
    if (model.rescale) extra["rescale"] = {{"scale", model.rescale->scale}, {"shift", model.rescale->shift}};
    add_csv(out, ctx, name, spectrum_csv(eig, ctx.hash), "spectrum", extra, kSpectrumColumns);
  }
  return out;
}

Artifacts stage_fdos(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const PreparedModel model = prepare_model(cfg);
  Artifacts out;
  for (const auto& M : cfg.blocks()) {
    const auto sig = block_fdos(cfg, model, M, ctx.workers);
    json extra = signal_info(sig);
    extra["block"] = block_json(M);
    extra["hamiltonian_sha256"] = model.sha256;
    extra["seed"] = sig.shots.empty() ? 0 : sig.shots.front().seed;
    if (model.rescale) extra["rescale"] = {{"scale", model.rescale->scale}, {"shift", model.rescale->shift}};
    add_csv(out, ctx, fdos_file(M), fdos_csv(sig, ctx.hash), "fdos", extra, kFdosColumns);
  }
  return out;
}

void check_hash(const std::string& found, const StageContext& ctx, const std::string& name) {
  if (found != ctx.hash)
    throw FormatError(name + ": config_hash " + found + " does not match the current config " + ctx.hash);
}

Artifacts stage_reconstruct(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  Artifacts out;
  for (const auto& M : cfg.blocks()) {
    std::string hash;
    const std::string src = fdos_file(M);
    const auto sig = parse_fdos_csv(ctx.input(src), src, &hash);
    check_hash(hash, ctx, src);
    const auto energies = energy_points(cfg, sig.grid);
    for (const auto& w : cfg.windows) {
      DosEstimate d = spectral::reconstruct_dos(sig, w, energies);
      d.source = src;
      json extra = signal_info(sig);
      extra.update({{"block", block_json(M)}, {"window", w.id()}, {"source", src}, {"imag_residue", d.imag_residue}});
      add_csv(out, ctx, dos_file(w, M), dos_csv(d, ctx.hash), "dos", extra, kDosColumns);
    }
  }
  return out;
}

Artifacts stage_thermo(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.thermo.enabled) throw ValidationError("config has no thermo section");
  const auto& t = cfg.thermo;
  const PreparedModel model = prepare_model(cfg);
  Artifacts out;
  // same energy units as the DOS files; the rescale map is recorded alongside
  json units = nullptr;
  if (model.rescale) units = {{"scale", model.rescale->scale}, {"shift", model.rescale->shift}};
  std::map<std::string, std::map<int, DosEstimate>> by_window;
  std::map<int, std::vector<double>> exact_by_block;
  for (const auto& M : cfg.blocks()) {
    const auto eig = hamlib::exact_spectrum(model.hamiltonian, subspace_of(cfg.n_qubits(), M));
    const json extra{{"block", block_json(M)}, {"source", "exact eigenvalues"}, {"rescale", units}};
    add_csv(out, ctx, "thermo_exact" + block_tag(M) + ".csv",
            thermo_csv(spectral::thermo_curve(eig, t.quantity, t.axis, t.x), ctx.hash), "thermo", extra,
            kThermoColumns);
    if (M) exact_by_block[*M] = eig;
    for (const auto& w : cfg.windows) {
      std::string hash;
      const std::string src = dos_file(w, M);
      const DosEstimate d = parse_dos_csv(ctx.input(src), src, &hash);
      check_hash(hash, ctx, src);
      const json ex{{"block", block_json(M)}, {"window", w.id()}, {"source", src}, {"rescale", units}};
      add_csv(out, ctx, "thermo_" + file_tag(w.id()) + block_tag(M) + ".csv",
              thermo_csv(spectral::thermo_curve(d, t.quantity, t.axis, t.x), ctx.hash), "thermo", ex, kThermoColumns);
      if (M) by_window[w.id()][*M] = d;
    }
  }
  if (!t.mu.empty()) {
    const auto bs = betas(t);
    const int n = cfg.n_qubits();
    auto grand = [&](const std::function<double(int, double)>& z, double mu) {
      spectral::ThermoResult r{t.axis, t.quantity, t.x, {}};
      for (double b : bs) {
        std::map<int, double> zm;
        for (int m = 0; m <= n; ++m) zm[m] = z(m, b);
        const double xi = spectral::grand_canonical_partition(zm, n, b, mu);
        r.values.push_back(t.quantity == "logZ" ? std::log(xi) : xi);
      }
      return r;
    };
    for (double mu : t.mu) {
      const std::string tag = "_mu" + num_tag(mu);
      const json ex{{"mu", mu}, {"source", "exact eigenvalues"}, {"rescale", units}};
      add_csv(out, ctx, "thermo_grand_exact" + tag + ".csv",
              thermo_csv(grand([&](int m, double b) { return spectral::canonical_partition(exact_by_block[m], b); }, mu),
                         ctx.hash),
              "thermo", ex, kThermoColumns);
      for (const auto& w : cfg.windows) {
        const auto& blocks = by_window[w.id()];
        const json exw{{"mu", mu}, {"window", w.id()}, {"rescale", units}};
        add_csv(out, ctx, "thermo_grand_" + file_tag(w.id()) + tag + ".csv",
                thermo_csv(grand([&](int m, double b) { return spectral::canonical_partition(blocks.at(m), b); }, mu),
                           ctx.hash),
                "thermo", exw, kThermoColumns);
      }
    }
  }
  return out;
}

Artifacts stage_noise_sweep(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.sweep.enabled) throw ValidationError("config has no sweep section");
  const auto& sw = cfg.sweep;
  const PreparedModel model = prepare_model(cfg);
  const auto M = cfg.blocks().front();
  const int n = cfg.n_qubits();
  const auto sub = subspace_of(n, M);
  const evolve::TrotterPlan plan(model.hamiltonian, cfg.time.dt, cfg.dynamics.order, true);
  const qcore::DensityMatrix rho =
      sub ? qcore::DensityMatrix::projected_mixed(n, sub->indices) : qcore::DensityMatrix::maximally_mixed(n);
  const double norm = sub ? static_cast<double>(sub->dimension()) : std::ldexp(1.0, n);
  // noiseless Trotter reference
  const auto ideal = noisemodel::noisy_fdos(noisemodel::attach_depolarizing(plan, {0.0, 1}), rho, cfg.time, norm);
  const auto energies = energy_points(cfg, cfg.time);
  const auto sigmas = sw.sigmas();

  struct Point {
    fdos::FdosSignal signal;
    double lambda = 0.0;
    noisemodel::EnvelopeFit fit;
    std::vector<spectral::WindowSweep> sweeps;
    std::vector<DosEstimate> estimates;
  };
  std::vector<Point> pts(sw.xi.size());
  parallel_for(sw.xi.size(), ctx.workers, [&](std::size_t i) {
    Point& p = pts[i];
    p.signal = block_fdos(cfg, model, M, 1, sw.xi[i]);
    p.lambda = noisemodel::depol_for_evolution(sw.xi[i], plan, cfg.time.t_max()).lambda();
    p.fit = noisemodel::fit_envelope(p.signal, ideal);
    for (const auto& fam : sw.families) {
      const DosEstimate est = spectral::reconstruct_dos(p.signal, fam.pre_window, energies);
      auto ref = [&](const WindowSpec& w) { return spectral::reconstruct_dos(ideal, w, energies); };
      p.sweeps.push_back(spectral::sweep_window_error(est, ref, fam.kind, sigmas));
      p.estimates.push_back(est);
    }
  });

  Artifacts out;
  std::vector<std::vector<std::string>> summary;
  for (std::size_t i = 0; i < sw.xi.size(); ++i) {
    const auto& p = pts[i];
    const std::string xt = "_xi" + num_tag(sw.xi[i]);
    json ex = signal_info(p.signal);
    ex.update({{"xi", sw.xi[i]}, {"lambda", p.lambda}, {"block", block_json(M)}});
    add_csv(out, ctx, "sweep_fdos" + xt + ".csv", fdos_csv(p.signal, ctx.hash), "fdos", ex, kFdosColumns);
    for (std::size_t f = 0; f < sw.families.size(); ++f) {
      const auto& fam = sw.families[f];
      const std::string kind = fam.kind == spectral::WindowKind::gaussian ? "gaussian" : "exponential";
      const auto& s = p.sweeps[f];
      std::vector<std::vector<std::string>> rows;
      for (std::size_t j = 0; j < s.sigmas.size(); ++j) rows.push_back({format_double(s.sigmas[j]), format_double(s.errors[j])});
      const Meta meta{{"xi", format_double(sw.xi[i])},
                      {"kind", kind},
                      {"pre_window", fam.pre_window.id()},
                      {"sigma_star", format_double(s.sigma_star)},
                      {"error_min", format_double(s.error_min)}};
      const json exs{{"xi", sw.xi[i]}, {"family", kind}, {"pre_window", fam.pre_window.id()}, {"sigma_star", s.sigma_star}};
      add_csv(out, ctx, "sweep" + xt + "_" + kind + ".csv", format_csv(ctx.hash, meta, kSweepColumns, rows), "sweep",
              exs, kSweepColumns);
      const std::string dname = "sweep_dos" + xt + "_" + file_tag(fam.pre_window.id()) + ".csv";
      bool seen = false;
      for (const auto& a : out) seen = seen || a.name == dname;
      if (!seen)
        add_csv(out, ctx, dname, dos_csv(p.estimates[f], ctx.hash), "dos",
                {{"xi", sw.xi[i]}, {"window", fam.pre_window.id()}}, kDosColumns);
      summary.push_back({format_double(sw.xi[i]), kind, format_double(p.lambda), format_double(p.fit.tau),
                         format_double(s.sigma_star), format_double(s.error_min)});
    }
  }
  add_csv(out, ctx, "sweep_summary.csv", format_csv(ctx.hash, {}, kSweepSummaryColumns, summary), "sweep-summary",
          {{"sigmas", sigmas.size()}}, kSweepSummaryColumns);
  return out;
}

Artifacts stage_vardyn(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.vardyn.enabled) throw ValidationError("config has no vardyn section");
  const auto& v = cfg.vardyn;
  const PreparedModel model = prepare_model(cfg);
  const int n = cfg.n_qubits();
  const auto ansatz = vardyn::build_ansatz(n, v.layers);
  const std::size_t n_steps = cfg.time.n_points - 1;

  std::vector<qcore::RotationCircuit> preps;
  const auto sampler = fdos::SamplerSpec::parse(v.sampler);
  const std::uint64_t state_seed = derive_key(cfg.seed, {kSeedVardynStates});
  for (std::size_t s = 0; s < v.n_states; ++s) {
    Engine rng = keyed_engine(state_seed, {s});
    preps.push_back(fdos::initial_state_circuit(sampler, n, rng));
  }

  vardyn::TrajectoryOptions topt;
  topt.mode = v.mode == "phase_sensitive" ? vardyn::CompileMode::phase_sensitive : vardyn::CompileMode::phase_free;
  topt.trotter_order = v.trotter_order;
  topt.step.optimizer = v.optimizer == "covar" ? vardyn::Optimizer::covar : vardyn::Optimizer::gradient;
  topt.step.max_iters = v.max_iters;
  topt.step.tol = v.tol;
  topt.step.max_weight = v.max_weight;
  topt.step.random_observables = v.random_observables;
  std::vector<vardyn::ParamTrajectory> trajs(v.n_states);
  parallel_for(v.n_states, ctx.workers, [&](std::size_t s) {
    vardyn::TrajectoryOptions o = topt;
    o.step.seed = derive_key(cfg.seed, {kSeedVardynObservables, s});
    trajs[s] = vardyn::recompile_trajectory(model.hamiltonian, preps[s], cfg.time.dt, n_steps, ansatz, o);
  });

  Artifacts out;
  for (std::size_t s = 0; s < v.n_states; ++s) {
    json j = sidecar(ctx, "trajectory");
    j["state"] = s;
    j["sampler"] = v.sampler;
    j["trajectory"] = trajectory_json(trajs[s], derive_key(cfg.seed, {kSeedVardynObservables, s}));
    out.push_back({"vardyn_traj_s" + std::to_string(s) + ".json", j.dump(2) + "\n"});
  }

  const auto eig = hamlib::exact_spectrum(model.hamiltonian);
  const auto energies = energy_points(cfg, cfg.time);
  const std::vector<double> zeros(ansatz.n_params(), 0.0);
  const auto pairs = noisemodel::lindblad_pairs(ansatz.circuit(zeros), true);
  const fdos::ShotPlan plan = v.shots_per_state == 0
                                  ? fdos::ShotPlan::exact_echoes(v.n_states)
                                  : fdos::ShotPlan{v.n_states * v.shots_per_state, v.shots_per_state, false};
  const evolve::PropagatorOracle oracle(model.hamiltonian);
  std::vector<std::vector<std::string>> summary;
  for (std::size_t li = 0; li < v.lambda0.size(); ++li) {
    const double lam = v.lambda0[li];
    std::optional<noisemodel::PauliLindbladSpec> spec;
    if (lam > 0.0) {
      noisemodel::PauliLindbladSpec ls;
      ls.lambda0 = lam;
      ls.table = cfg.noise.table.empty() ? noisemodel::bundled_gamma_table() : noisemodel::read_gamma_table(cfg.noise.table);
      ls.assign_random(pairs, derive_key(cfg.seed, {kSeedAssignment}));
      ls.validate();
      spec = std::move(ls);
    }
    const auto* noise = spec ? &*spec : nullptr;
    const std::uint64_t shot_seed = derive_key(cfg.seed, {kSeedVardynShots, li});
    fdos::FdosSignal sig = vardyn::variational_fdos(ansatz, trajs, preps, noise, plan, cfg.time, shot_seed, ctx.workers);
    const std::string lt = "_l" + num_tag(lam);
    json ex = signal_info(sig);
    ex.update({{"lambda0", lam}, {"hamiltonian_sha256", model.sha256}, {"seed", shot_seed}});
    add_csv(out, ctx, "vardyn_fdos" + lt + ".csv", fdos_csv(sig, ctx.hash), "fdos", ex, kFdosColumns);

    // mean noisy fidelity against exact evolution
    std::vector<std::vector<double>> lit(cfg.time.n_points, std::vector<double>(v.n_states)), ovl = lit;
    parallel_for(v.n_states, ctx.workers, [&](std::size_t s) {
      qcore::StateVector psi0(n);
      preps[s].apply(psi0);
      for (std::size_t k = 0; k < cfg.time.n_points; ++k) {
        const auto ideal = qcore::DensityMatrix::from_pure(evolve::exact_evolve(oracle, psi0, cfg.time.time(k)));
        const auto f = vardyn::noisy_fidelity(ideal, vardyn::ansatz_state(ansatz, trajs[s].thetas[k], preps[s], noise));
        lit[k][s] = f.literal;
        ovl[k][s] = f.overlap;
      }
    });
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < cfg.time.n_points; ++k) {
      const double a = std::accumulate(lit[k].begin(), lit[k].end(), 0.0) / static_cast<double>(v.n_states);
      const double b = std::accumulate(ovl[k].begin(), ovl[k].end(), 0.0) / static_cast<double>(v.n_states);
      rows.push_back({format_double(cfg.time.time(k)), format_double(a), format_double(b)});
    }
    add_csv(out, ctx, "vardyn_fidelity" + lt + ".csv", format_csv(ctx.hash, {{"lambda0", format_double(lam)}}, kFidelityColumns, rows),
            "fidelity", {{"lambda0", lam}}, kFidelityColumns);

    for (const auto& w : cfg.windows) {
      DosEstimate d = spectral::reconstruct_dos(sig, w, energies);
      d.source = "vardyn_fdos" + lt + ".csv";
      add_csv(out, ctx, "vardyn_dos" + lt + "_" + file_tag(w.id()) + ".csv", dos_csv(d, ctx.hash), "dos",
              {{"lambda0", lam}, {"window", w.id()}}, kDosColumns);
      if (w.kind != spectral::WindowKind::none) {
        const double err = spectral::dos_error(d, spectral::exact_windowed_dos(eig, w, energies));
        summary.push_back({format_double(lam), w.id(), format_double(err)});
      }
    }
  }
  add_csv(out, ctx, "vardyn_summary.csv", format_csv(ctx.hash, {}, kVardynSummaryColumns, summary), "vardyn-summary",
          {{"n_states", v.n_states}}, kVardynSummaryColumns);
  return out;
}

}  // namespace

Artifacts run_stage(Stage s, const StageContext& ctx) {
  switch (s) {
    case Stage::spectrum: return stage_spectrum(ctx);
    case Stage::fdos: return stage_fdos(ctx);
    case Stage::reconstruct: return stage_reconstruct(ctx);
    case Stage::thermo: return stage_thermo(ctx);
    case Stage::noise_sweep: return stage_noise_sweep(ctx);
    case Stage::vardyn: return stage_vardyn(ctx);
  }
  throw ValidationError("unknown stage");
}

}  // namespace qdos::doscli
