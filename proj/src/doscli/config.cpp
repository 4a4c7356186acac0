#include "qdos/doscli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qdos/common/errors.hpp"
#include "qdos/doscli/digest.hpp"
#include "qdos/evolve/trotter.hpp"
#include "qdos/hamlib/io.hpp"
#include "qdos/hamlib/models.hpp"
#include "qdos/hamlib/spectrum.hpp"
#include "qdos/noisemodel/channels.hpp"
#include "qdos/noisemodel/noisy.hpp"

namespace qdos::doscli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "boolean";
  else if constexpr (std::is_integral_v<T>) return "integer";
  else if constexpr (std::is_floating_point_v<T>) return "number";
  else return "string";
}

// A YAML mapping that remembers which keys were read.
class Section {
 public:
  // A null node is an absent section.
  Section(YAML::Node node, std::string path) : path_(std::move(path)) {
    if (node && !node.IsNull()) {
      if (!node.IsMap()) throw FormatError(path_ + ": expected a mapping");
      node_ = node;
      present_ = true;
    }
  }

  bool has(const std::string& key) const {
    if (!present_) return false;
    const YAML::Node& n = node_;
    return static_cast<bool>(n[key]);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ValidationError("missing required key " + name(key));
    const YAML::Node v = static_cast<const YAML::Node&>(node_)[key];
    if (!v.IsScalar()) throw FormatError(name(key) + ": expected a " + type_name<T>());
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      throw FormatError(name(key) + ": expected a " + type_name<T>() + ", found '" + v.Scalar() + "'");
    }
  }

  template <class T>
  std::vector<T> list(const std::string& key, std::vector<T> fallback = {}) {
    used_.insert(key);
    if (!has(key)) return fallback;
    const YAML::Node v = static_cast<const YAML::Node&>(node_)[key];
    if (!v.IsSequence()) throw FormatError(name(key) + ": expected a list");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].IsScalar()) throw FormatError(name(key) + "[" + std::to_string(i) + "]: expected a " + type_name<T>());
      try {
        out.push_back(v[i].as<T>());
      } catch (const YAML::Exception&) {
        throw FormatError(name(key) + "[" + std::to_string(i) + "]: expected a " + type_name<T>() + ", found '" +
                          v[i].Scalar() + "'");
      }
    }
    return out;
  }

  Section child(const std::string& key) {
    used_.insert(key);
    return Section(has(key) ? static_cast<const YAML::Node&>(node_)[key] : YAML::Node(), name(key));
  }

  YAML::Node node(const std::string& key) {
    used_.insert(key);
    return has(key) ? static_cast<const YAML::Node&>(node_)[key] : YAML::Node(YAML::NodeType::Undefined);
  }

  bool present() const { return present_; }

  void finish() const {
    if (!present_) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ValidationError("unknown key " + name(key));
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  YAML::Node node_;
  bool present_ = false;
  std::string path_;
  std::set<std::string> used_;
};

void check(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::string resolve(const std::string& path, const std::string& dir) {
  fs::path p(path);
  if (p.is_relative()) p = fs::path(dir) / p;
  return p.lexically_normal().string();
}

std::string require_file(const std::string& path, const std::string& key) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ValidationError(key + ": file not found: " + path);
  return sha256_file(path);
}

spectral::WindowSpec parse_window(const std::string& id, const std::string& key) {
  try {
    return spectral::WindowSpec::parse(id);
  } catch (const SpecError& e) {
    throw ValidationError(key + ": " + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(key + ": " + e.what());
  }
}

fdos::SamplerSpec parse_sampler(const std::string& id, const std::string& key) {
  try {
    return fdos::SamplerSpec::parse(id);
  } catch (const SpecError& e) {
    throw ValidationError(key + ": " + e.what());
  }
}

void parse_model(Section s, ModelConfig& m, const std::string& dir) {
  m.kind = s.require<std::string>("kind");
  m.rescale = s.get<std::string>("rescale", "none");
  check(m.rescale == "none" || m.rescale == "exact" || m.rescale == "power_bound",
        "model.rescale must be none, exact or power_bound");
  if (m.kind == "heisenberg") {
    m.n = s.require<int>("n");
    m.J = s.get<double>("J", 1.0);
    m.h = s.get<double>("h", 0.0);
    m.disorder_seed = s.get<std::uint64_t>("disorder_seed", 0);
    check(m.n >= 2 && m.n <= hamlib::kMaxDenseQubits, "model.n must lie in [2, 12]");
    check(std::isfinite(m.J) && std::isfinite(m.h) && m.h >= 0.0, "model.J must be finite and model.h >= 0");
  } else if (m.kind == "hubbard") {
    m.rows = s.require<int>("rows");
    m.cols = s.require<int>("cols");
    m.J = s.get<double>("J", 1.0);
    m.U = s.get<double>("U", 1.0);
    check(m.rows >= 1 && m.cols >= 1, "model.rows and model.cols must be positive");
    check(2 * m.rows * m.cols <= hamlib::kMaxDenseQubits, "hubbard model needs at most 12 qubits");
    check(std::isfinite(m.J) && std::isfinite(m.U), "model.J and model.U must be finite");
    m.n = 2 * m.rows * m.cols;
  } else if (m.kind == "pauli") {
    m.terms = s.list<std::string>("terms");
    check(!m.terms.empty(), "model.terms must list at least one term");
  } else if (m.kind == "file") {
    m.path = resolve(s.require<std::string>("path"), dir);
    m.path_sha256 = require_file(m.path, "model.path");
  } else {
    throw ValidationError("model.kind must be heisenberg, hubbard, pauli or file");
  }
  s.finish();
}

}  // namespace

qcore::QubitHamiltonian build_model(const ModelConfig& m) {
  if (m.kind == "heisenberg") return hamlib::build_heisenberg({m.n, m.J, m.h, m.disorder_seed});
  if (m.kind == "hubbard") return hamlib::jordan_wigner(hamlib::build_hubbard({m.rows, m.cols, m.J, m.U}));
  if (m.kind == "pauli") {
    std::string text;
    for (const auto& t : m.terms) text += t + "\n";
    return hamlib::parse_hamiltonian(text);
  }
  if (m.kind == "file") {
    std::ifstream in(m.path);
    if (!in) throw ValidationError("model.path: cannot read " + m.path);
    return hamlib::read_hamiltonian(in);
  }
  throw ValidationError("unknown model kind " + m.kind);
}

std::vector<double> SweepConfig::sigmas() const {
  std::vector<double> out;
  for (double s = sigma_min; s <= sigma_max * (1.0 + 1e-12); s *= sigma_factor) out.push_back(s);
  return out;
}

std::vector<std::optional<int>> ExperimentConfig::blocks() const {
  switch (subspace.mode) {
    case SubspaceConfig::Mode::full: return {std::nullopt};
    case SubspaceConfig::Mode::single: return {subspace.M};
    case SubspaceConfig::Mode::all: break;
  }
  std::vector<std::optional<int>> out;
  for (int m = 0; m <= n_qubits(); ++m) out.emplace_back(m);
  return out;
}

int ExperimentConfig::n_qubits() const { return model.n; }

std::string file_tag(const std::string& id) {
  std::string out;
  for (char c : id) {
    if (c == '(') out += '-';
    else if (c != ')') out += c;
  }
  return out;
}

std::string block_tag(const std::optional<int>& M) { return M ? "_M" + std::to_string(*M) : ""; }

ExperimentConfig parse_config(const std::string& text, const std::string& source_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw FormatError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ValidationError("config is empty");
  Section top(root, "");
  ExperimentConfig c;
  c.source_dir = source_dir;

  c.schema = top.require<int>("schema");
  check(c.schema == kSchemaVersion, "unsupported schema version " + std::to_string(c.schema) + " (this build reads " +
                                        std::to_string(kSchemaVersion) + ")");
  c.name = top.get<std::string>("name", "");
  c.seed = top.get<std::uint64_t>("seed", 0);

  parse_model(top.child("model"), c.model, source_dir);
  if (!top.has("model")) throw ValidationError("missing required key model");
  const qcore::QubitHamiltonian h = build_model(c.model);
  c.model.n = h.n_qubits();
  const int n = c.model.n;
  check(n >= 1 && n <= hamlib::kMaxDenseQubits, "model must act on 1 to 12 qubits");

  {
    Section s = top.child("subspace");
    if (s.present()) {
      const std::string m = s.require<std::string>("M");
      if (m == "all") {
        c.subspace.mode = SubspaceConfig::Mode::all;
      } else {
        c.subspace.mode = SubspaceConfig::Mode::single;
        c.subspace.M = s.require<int>("M");
        check(c.subspace.M >= 0 && c.subspace.M <= n, "subspace.M must lie in [0, n]");
      }
      check(hamlib::conserves_number(h), "subspace needs a number-conserving Hamiltonian");
    }
    s.finish();
  }
  {
    Section s = top.child("time");
    if (!s.present()) throw ValidationError("missing required key time");
    c.time.dt = s.require<double>("dt");
    c.time.n_points = s.require<std::size_t>("n_points");
    check(c.time.dt > 0.0 && std::isfinite(c.time.dt), "time.dt must be positive");
    check(c.time.n_points >= 1 && c.time.n_points <= 10'000'000, "time.n_points must lie in [1, 1e7]");
    s.finish();
  }
  {
    Section s = top.child("dynamics");
    c.dynamics.kind = s.get<std::string>("kind", "exact");
    c.dynamics.order = s.get<int>("order", 1);
    check(c.dynamics.kind == "exact" || c.dynamics.kind == "trotter", "dynamics.kind must be exact or trotter");
    check(c.dynamics.order == 1 || c.dynamics.order == 2, "dynamics.order must be 1 or 2");
    s.finish();
  }
  {
    Section s = top.child("estimator");
    auto& e = c.estimator;
    e.kind = s.get<std::string>("kind", "exact");
    e.sampler = s.get<std::string>("sampler", "haar");
    e.shots = s.get<std::uint64_t>("shots", 0);
    e.reuse = s.get<std::uint64_t>("reuse", 1);
    e.analytic = s.get<bool>("analytic", false);
    check(e.kind == "exact" || e.kind == "dqc1" || e.kind == "sample", "estimator.kind must be exact, dqc1 or sample");
    if (e.kind != "exact") {
      check(e.shots > 0, "estimator.shots must be positive");
      check(e.reuse >= 1 && e.shots % e.reuse == 0, "estimator.shots must be a multiple of estimator.reuse");
    }
    if (e.kind == "sample") {
      const auto sp = parse_sampler(e.sampler, "estimator.sampler");
      check(!sp.is_dqc1(), "estimator.sampler: use estimator.kind dqc1 for trace estimates");
      if (c.subspace.mode != SubspaceConfig::Mode::full)
        check(sp.kind == fdos::SamplerKind::hamming && (c.subspace.mode == SubspaceConfig::Mode::all ||
                                                         sp.param == c.subspace.M),
              "estimator.sampler must be hamming(M) inside a subspace");
      if (sp.kind == fdos::SamplerKind::hamming)
        check(sp.param >= 0 && sp.param <= n, "estimator.sampler: hamming weight outside [0, n]");
      if (sp.kind == fdos::SamplerKind::layered) check(sp.param >= 1, "estimator.sampler: layered depth must be >= 1");
    }
    s.finish();
  }
  {
    Section s = top.child("noise");
    auto& z = c.noise;
    z.kind = s.get<std::string>("kind", "none");
    check(z.kind == "none" || z.kind == "depol" || z.kind == "lindblad", "noise.kind must be none, depol or lindblad");
    if (z.kind == "depol") {
      z.xi = s.require<double>("xi");
      check(z.xi >= 0.0 && std::isfinite(z.xi), "noise.xi must be non-negative");
    }
    if (z.kind == "lindblad") {
      z.lambda0 = s.require<double>("lambda0");
      check(z.lambda0 >= 0.0 && std::isfinite(z.lambda0), "noise.lambda0 must be non-negative");
    }
    if (s.has("table")) {
      z.table = resolve(s.require<std::string>("table"), source_dir);
      z.table_sha256 = require_file(z.table, "noise.table");
    } else {
      s.get<std::string>("table", "");
    }
    if (z.kind != "none") {
      check(c.dynamics.kind == "trotter", "noise needs dynamics.kind trotter");
      check(c.estimator.kind != "sample", "noise supports the exact and dqc1 estimators only");
      check(n <= 8, "noisy density-matrix simulation is limited to 8 qubits");
    }
    if (z.kind == "depol") {
      const evolve::TrotterPlan plan(h, c.time.dt, c.dynamics.order, true);
      try {
        noisemodel::depol_for_evolution(z.xi, plan, c.time.t_max()).validate();
      } catch (const ValidationError& e) {
        throw ValidationError(std::string("noise.xi: ") + e.what());
      }
    }
    s.finish();
  }
  {
    const auto ids = top.list<std::string>("windows", {"none"});
    check(!ids.empty(), "windows must list at least one window");
    std::set<std::string> seen;
    for (const auto& id : ids) {
      c.windows.push_back(parse_window(id, "windows"));
      check(seen.insert(c.windows.back().id()).second, "windows: duplicate window " + id);
    }
  }
  {
    Section s = top.child("energy");
    c.energy.oversample = s.get<std::size_t>("oversample", 1);
    check(c.energy.oversample >= 1 && c.energy.oversample <= 64, "energy.oversample must lie in [1, 64]");
    const auto r = s.list<double>("range");
    if (!r.empty()) {
      check(r.size() == 2 && r[0] < r[1], "energy.range must be [lo, hi] with lo < hi");
      c.energy.range = std::make_pair(r[0], r[1]);
    }
    s.finish();
  }
  {
    Section s = top.child("thermo");
    auto& t = c.thermo;
    t.enabled = s.present();
    if (t.enabled) {
      t.quantity = s.get<std::string>("quantity", "Z");
      t.axis = s.get<std::string>("axis", "T");
      t.x = s.list<double>("values");
      t.mu = s.list<double>("mu");
      check(t.quantity == "Z" || t.quantity == "logZ" || t.quantity == "U", "thermo.quantity must be Z, logZ or U");
      check(t.axis == "T" || t.axis == "beta", "thermo.axis must be T or beta");
      check(!t.x.empty(), "thermo.values must list at least one point");
      for (double x : t.x) check(x > 0.0 && std::isfinite(x), "thermo.values must be positive");
      if (!t.mu.empty()) {
        check(c.subspace.mode == SubspaceConfig::Mode::all, "thermo.mu needs subspace.M: all");
        check(t.quantity != "U", "thermo.mu supports Z and logZ only");
        for (double m : t.mu) check(std::isfinite(m), "thermo.mu must be finite");
      }
    }
    s.finish();
  }
  {
    Section s = top.child("sweep");
    auto& w = c.sweep;
    w.enabled = s.present();
    if (w.enabled) {
      w.xi = s.list<double>("xi");
      w.sigma_min = s.get<double>("sigma_min", 2.0);
      w.sigma_max = s.get<double>("sigma_max", 1000.0);
      w.sigma_factor = s.get<double>("sigma_factor", 1.05);
      check(!w.xi.empty(), "sweep.xi must list at least one error rate");
      for (double x : w.xi) check(x >= 0.0 && std::isfinite(x), "sweep.xi must be non-negative");
      check(w.sigma_min > 0.0 && w.sigma_max > w.sigma_min && w.sigma_factor > 1.0,
            "sweep needs 0 < sigma_min < sigma_max and sigma_factor > 1");
      check(w.sigmas().size() <= 100'000, "sweep sigma grid is too large");
      const YAML::Node fams = s.node("families");
      if (!fams || fams.IsNull()) {
        w.families = {{spectral::WindowKind::gaussian, spectral::WindowSpec::none()},
                      {spectral::WindowKind::exponential, spectral::WindowSpec::none()}};
      } else {
        if (!fams.IsSequence()) throw FormatError("sweep.families: expected a list");
        for (std::size_t i = 0; i < fams.size(); ++i) {
          Section f(fams[i], "sweep.families[" + std::to_string(i) + "]");
          SweepFamily fam;
          const std::string kind = f.require<std::string>("kind");
          check(kind == "gaussian" || kind == "exponential", f.name("kind") + " must be gaussian or exponential");
          fam.kind = kind == "gaussian" ? spectral::WindowKind::gaussian : spectral::WindowKind::exponential;
          fam.pre_window = parse_window(f.get<std::string>("pre_window", "none"), f.name("pre_window"));
          f.finish();
          w.families.push_back(fam);
        }
        check(!w.families.empty(), "sweep.families must not be empty");
      }
      check(c.dynamics.kind == "trotter", "sweep needs dynamics.kind trotter");
      check(c.estimator.kind != "sample", "sweep supports the exact and dqc1 estimators only");
      check(c.subspace.mode != SubspaceConfig::Mode::all, "sweep runs on a single block");
      check(n <= 8, "noisy density-matrix simulation is limited to 8 qubits");
      const evolve::TrotterPlan plan(h, c.time.dt, c.dynamics.order, true);
      for (double x : w.xi) {
        try {
          noisemodel::depol_for_evolution(x, plan, c.time.t_max()).validate();
        } catch (const ValidationError& e) {
          throw ValidationError(std::string("sweep.xi: ") + e.what());
        }
      }
    }
    s.finish();
  }
  {
    Section s = top.child("vardyn");
    auto& v = c.vardyn;
    v.enabled = s.present();
    if (v.enabled) {
      v.layers = s.get<int>("layers", 2);
      v.mode = s.get<std::string>("mode", "phase_sensitive");
      v.optimizer = s.get<std::string>("optimizer", "covar");
      v.max_iters = s.get<int>("max_iters", 100);
      v.tol = s.get<double>("tol", 1e-10);
      v.max_weight = s.get<int>("max_weight", 3);
      v.random_observables = s.get<std::size_t>("random_observables", 0);
      v.trotter_order = s.get<int>("trotter_order", 2);
      v.n_states = s.get<std::size_t>("n_states", 1);
      v.sampler = s.get<std::string>("sampler", "euler");
      v.shots_per_state = s.get<std::uint64_t>("shots_per_state", 0);
      v.lambda0 = s.list<double>("lambda0", {0.0});
      check(n >= 2, "vardyn needs at least two qubits");
      check(v.layers >= 1 && v.layers <= 64, "vardyn.layers must lie in [1, 64]");
      check(v.mode == "phase_sensitive" || v.mode == "phase_free", "vardyn.mode must be phase_sensitive or phase_free");
      check(v.optimizer == "covar" || v.optimizer == "gradient", "vardyn.optimizer must be covar or gradient");
      check(v.max_iters >= 0, "vardyn.max_iters must be non-negative");
      check(v.tol > 0.0, "vardyn.tol must be positive");
      check(v.max_weight >= 1 && v.max_weight <= n + 1, "vardyn.max_weight must lie in [1, n + 1]");
      check(v.trotter_order == 1 || v.trotter_order == 2, "vardyn.trotter_order must be 1 or 2");
      check(v.n_states >= 1, "vardyn.n_states must be positive");
      const auto sp = parse_sampler(v.sampler, "vardyn.sampler");
      check(sp.kind == fdos::SamplerKind::euler || sp.kind == fdos::SamplerKind::layered,
            "vardyn.sampler must be euler or layered(L)");
      check(!v.lambda0.empty(), "vardyn.lambda0 must list at least one noise level");
      for (double l : v.lambda0) check(l >= 0.0 && std::isfinite(l), "vardyn.lambda0 must be non-negative");
      check(c.subspace.mode == SubspaceConfig::Mode::full, "vardyn runs on the full space");
      check(n <= 8, "noisy density-matrix simulation is limited to 8 qubits");
    }
    s.finish();
  }
  {
    Section s = top.child("output");
    c.output_dir = s.get<std::string>("dir", "");
    s.finish();
  }
  top.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const fs::path dir = fs::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

json ExperimentConfig::canonical() const {
  json j;
  j["schema"] = schema;
  j["seed"] = seed;
  json m{{"kind", model.kind}, {"n", model.n}, {"rescale", model.rescale}};
  if (model.kind == "heisenberg")
    m.update({{"J", model.J}, {"h", model.h}, {"disorder_seed", model.disorder_seed}});
  if (model.kind == "hubbard") m.update({{"rows", model.rows}, {"cols", model.cols}, {"J", model.J}, {"U", model.U}});
  if (model.kind == "pauli") m["terms"] = model.terms;
  if (model.kind == "file") m["sha256"] = model.path_sha256;
  j["model"] = m;
  if (subspace.mode == SubspaceConfig::Mode::all) j["subspace"] = "all";
  else if (subspace.mode == SubspaceConfig::Mode::single) j["subspace"] = subspace.M;
  else j["subspace"] = nullptr;
  j["time"] = {{"dt", time.dt}, {"n_points", time.n_points}};
  j["dynamics"] = {{"kind", dynamics.kind}, {"order", dynamics.order}};
  j["estimator"] = {{"kind", estimator.kind},
                    {"sampler", estimator.sampler},
                    {"shots", estimator.shots},
                    {"reuse", estimator.reuse},
                    {"analytic", estimator.analytic}};
  j["noise"] = {{"kind", noise.kind}, {"xi", noise.xi}, {"lambda0", noise.lambda0}, {"table_sha256", noise.table_sha256}};
  json w = json::array();
  for (const auto& x : windows) w.push_back(x.id());
  j["windows"] = w;
  j["energy"] = {{"oversample", energy.oversample}};
  if (energy.range) j["energy"]["range"] = {energy.range->first, energy.range->second};
  if (thermo.enabled)
    j["thermo"] = {{"quantity", thermo.quantity}, {"axis", thermo.axis}, {"values", thermo.x}, {"mu", thermo.mu}};
  if (sweep.enabled) {
    json f = json::array();
    for (const auto& fam : sweep.families)
      f.push_back({{"kind", fam.kind == spectral::WindowKind::gaussian ? "gaussian" : "exponential"},
                   {"pre_window", fam.pre_window.id()}});
    j["sweep"] = {{"xi", sweep.xi},
                  {"sigma_min", sweep.sigma_min},
                  {"sigma_max", sweep.sigma_max},
                  {"sigma_factor", sweep.sigma_factor},
                  {"families", f}};
  }
  if (vardyn.enabled)
    j["vardyn"] = {{"layers", vardyn.layers},
                   {"mode", vardyn.mode},
                   {"optimizer", vardyn.optimizer},
                   {"max_iters", vardyn.max_iters},
                   {"tol", vardyn.tol},
                   {"max_weight", vardyn.max_weight},
                   {"random_observables", vardyn.random_observables},
                   {"trotter_order", vardyn.trotter_order},
                   {"n_states", vardyn.n_states},
                   {"sampler", vardyn.sampler},
                   {"shots_per_state", vardyn.shots_per_state},
                   {"lambda0", vardyn.lambda0}};
  return j;
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical().dump()); }

}  // namespace qdos::doscli
