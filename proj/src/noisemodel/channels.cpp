#include "qdos/noisemodel/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qdos/common/errors.hpp"
#include "qdos/common/rng.hpp"
#include "qdos/qcore/pauli.hpp"

namespace qdos::noisemodel {

qcore::KrausChannel depolarizing_channel(double p, int arity) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("depolarizing probability outside [0, 1]");
  if (arity < 1 || arity > 6) throw DomainError("depolarizing arity out of range");
  const std::size_t count = std::size_t{1} << (2 * arity);
  std::vector<double> probs(count, p / static_cast<double>(count));
  probs[0] = 1.0 - p + p / static_cast<double>(count);
  return qcore::KrausChannel::pauli(arity, probs, 1e-12);
}

void DepolSpec::validate() const {
  if (n_gates == 0) throw ValidationError("DepolSpec needs at least one gate");
  if (!(xi >= 0.0)) throw ValidationError("DepolSpec xi must be non-negative");
  const double l = lambda();
  if (l > 1.0) throw ValidationError("per-gate depolarizing probability exceeds 1");
}

std::vector<std::string> GammaTable::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, r] : sets) out.push_back(id);
  return out;
}

void GammaTable::validate() const {
  for (const auto& [id, rates] : sets) {
    if (id.empty()) throw ValidationError("gamma set with empty id");
    for (double g : rates)
      if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("gamma set " + id + " has a negative or non-finite rate");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::size_t label_index(const std::string& label) {
  if (label.size() != 2) throw FormatError("pauli label must have two letters: '" + label + "'");
  for (char c : label)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw FormatError("bad pauli label '" + label + "'");
  const auto idx = qcore::PauliString(label).index();
  if (idx == 0) throw FormatError("identity has no generator rate");
  return idx;
}

}  // namespace

GammaTable parse_gamma_table(const std::string& text) {
  GammaTable table;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 3) throw FormatError("gamma table line " + std::to_string(lineno) + ": expected 3 fields");
    if (fields[0] == "pair_id") continue;  // column header
    const std::size_t idx = label_index(fields[1]);
    double g = 0.0;
    std::size_t used = 0;
    try {
      g = std::stod(fields[2], &used);
    } catch (const std::exception&) {
      throw FormatError("gamma table line " + std::to_string(lineno) + ": bad number");
    }
    if (used != fields[2].size()) throw FormatError("gamma table line " + std::to_string(lineno) + ": bad number");
    if (!(g >= 0.0)) throw ValidationError("gamma table line " + std::to_string(lineno) + ": negative rate");
    auto [it, fresh] = table.sets.try_emplace(fields[0]);
    if (fresh) it->second.fill(0.0);
    if (it->second[idx] != 0.0) throw FormatError("gamma table line " + std::to_string(lineno) + ": duplicate entry");
    it->second[idx] = g;
  }
  return table;
}

std::string format_gamma_table(const GammaTable& table, const std::string& comment) {
  std::string out;
  out += "# Sparse Pauli-Lindblad generator rates for qubit pairs.\n";
  out += "# Channel: exp(L), L(rho) = lambda0 * sum_k gamma_k (P_k rho P_k - rho).\n";
  out += "# lambda0 is set at run time; gamma is the rate at lambda0 = 1.\n";
  out += "# Label letter 0 acts on the lower qubit of the pair. Missing labels have gamma = 0.\n";
  if (!comment.empty()) {
    std::istringstream in(comment);
    std::string l;
    while (std::getline(in, l)) out += "# " + l + "\n";
  }
  out += "pair_id,pauli_label,gamma\n";
  char buf[64];
  for (const auto& [id, rates] : table.sets) {
    for (std::size_t k = 1; k < 16; ++k) {
      if (rates[k] == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", rates[k]);
      out += id + "," + qcore::PauliString::from_index(2, k).letters() + "," + buf + "\n";
    }
  }
  return out;
}

GammaTable read_gamma_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open gamma table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_gamma_table(ss.str());
}

void write_gamma_table(const std::string& path, const GammaTable& table, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write gamma table " + path);
  out << format_gamma_table(table, comment);
}

GammaTable synthetic_gamma_table(std::size_t n_sets, std::uint64_t seed) {
  GammaTable table;
  const double lo = std::log(1e-4), hi = std::log(3e-3);
  char id[32];
  for (std::size_t s = 0; s < n_sets; ++s) {
    Engine rng = keyed_engine(seed, {s});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PairRates r{};
    int kept = 0;
    for (std::size_t k = 1; k < 16; ++k) {
      const bool keep = u(rng) < 0.5;
      const double mag = std::exp(lo + (hi - lo) * u(rng));
      if (keep) {
        r[k] = mag;
        ++kept;
      }
    }
    if (kept == 0) r[1 + static_cast<std::size_t>(u(rng) * 15.0) % 15] = std::exp(lo + (hi - lo) * u(rng));
    std::snprintf(id, sizeof id, "s%02zu", s);
    table.sets[id] = r;
  }
  return table;
}

std::string bundled_gamma_path() { return std::string(QDOS_DATA_DIR) + "/lindblad_gamma_synthetic.txt"; }

GammaTable bundled_gamma_table() { return read_gamma_table(bundled_gamma_path()); }

namespace {
std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }
}  // namespace

void PauliLindbladSpec::assign(int a, int b, const std::string& id) {
  if (a == b) throw ValidationError("pair needs two distinct qubits");
  if (!table.sets.count(id)) throw ValidationError("unknown gamma set '" + id + "'");
  assignment[key(a, b)] = id;
}

void PauliLindbladSpec::assign_random(const std::vector<std::pair<int, int>>& pairs, std::uint64_t seed) {
  const auto ids = table.ids();
  if (ids.empty()) throw ValidationError("gamma table is empty");
  for (const auto& [a, b] : pairs) {
    const auto k = key(a, b);
    const double u = keyed_uniform(seed, {static_cast<std::uint64_t>(k.first), static_cast<std::uint64_t>(k.second)});
    assign(a, b, ids[static_cast<std::size_t>(u * static_cast<double>(ids.size()))]);
  }
}

bool PauliLindbladSpec::has_pair(int a, int b) const { return assignment.count(key(a, b)) != 0; }

const PairRates& PauliLindbladSpec::rates(int a, int b) const {
  const auto it = assignment.find(key(a, b));
  if (it == assignment.end())
    throw ValidationError("no gamma set assigned to pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  const auto t = table.sets.find(it->second);
  if (t == table.sets.end()) throw ValidationError("pair assigned to unknown gamma set '" + it->second + "'");
  return t->second;
}

void PauliLindbladSpec::validate() const {
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) throw ValidationError("lambda0 must be non-negative");
  table.validate();
  for (const auto& [pair, id] : assignment)
    if (!table.sets.count(id)) throw ValidationError("pair assigned to unknown gamma set '" + id + "'");
}

int symplectic(std::size_t a, std::size_t b) {
  // Two letters anticommute when both are non-identity and different.
  int parity = 0;
  for (int q = 0; q < 2; ++q) {
    const std::size_t la = (a >> (2 * q)) & 3U, lb = (b >> (2 * q)) & 3U;
    if (la && lb && la != lb) parity ^= 1;
  }
  return parity;
}

PauliDiagonal pauli_fidelities(const PairRates& rates, double lambda0) {
  if (!(lambda0 >= 0.0)) throw ValidationError("lambda0 must be non-negative");
  PauliDiagonal f;
  f.fill(1.0);
  for (std::size_t k = 1; k < 16; ++k) {
    if (rates[k] < 0.0) throw ValidationError("negative generator rate");
    if (rates[k] == 0.0) continue;
    const double w = 0.5 * (1.0 + std::exp(-2.0 * lambda0 * rates[k]));
    for (std::size_t j = 0; j < 16; ++j) f[j] *= symplectic(j, k) ? 2.0 * w - 1.0 : 1.0;
  }
  return f;
}

PauliDiagonal lindblad_fidelities(const PauliLindbladSpec& spec, int a, int b) {
  return pauli_fidelities(spec.rates(a, b), spec.lambda0);
}

PauliDiagonal fidelities_to_probabilities(const PauliDiagonal& f) {
  PauliDiagonal c{};
  for (std::size_t b = 0; b < 16; ++b) {
    double acc = 0.0;
    for (std::size_t a = 0; a < 16; ++a) acc += symplectic(a, b) ? -f[a] : f[a];
    c[b] = acc / 16.0;
  }
  return c;
}

PauliDiagonal probabilities_to_fidelities(const PauliDiagonal& c) {
  PauliDiagonal f{};
  for (std::size_t a = 0; a < 16; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < 16; ++b) acc += symplectic(a, b) ? -c[b] : c[b];
    f[a] = acc;
  }
  return f;
}

qcore::KrausChannel pauli_channel_from_fidelities(const PauliDiagonal& f, int* clipped) {
  auto c = fidelities_to_probabilities(f);
  int n_clip = 0;
  double worst = 0.0;
  for (double& x : c) {
    if (x < -1e-8) throw ValidationError("Pauli-Lindblad channel has a materially negative coefficient");
    if (x < 0.0) {
      worst = std::max(worst, -x);
      x = 0.0;
      ++n_clip;
    }
  }
  if (n_clip > 0) {
    double total = 0.0;
    for (double x : c) total += x;
    for (double& x : c) x /= total;
  }
  if (clipped)
    *clipped = n_clip;
  else if (worst > 1e-13)  // below this it is summation rounding
    std::cerr << "warning: clipped " << n_clip << " small negative Pauli channel coefficients\n";
  return qcore::KrausChannel::pauli(2, std::vector<double>(c.begin(), c.end()), 1e-12);
}

qcore::KrausChannel lindblad_to_kraus(const PauliLindbladSpec& spec, int a, int b, int* clipped) {
  return pauli_channel_from_fidelities(lindblad_fidelities(spec, a, b), clipped);
}

}  // namespace qdos::noisemodel
