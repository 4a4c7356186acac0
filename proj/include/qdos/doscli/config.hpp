#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qdos/fdos/sampling.hpp"
#include "qdos/fdos/signal.hpp"
#include "qdos/qcore/pauli.hpp"
#include "qdos/spectral/dos.hpp"

namespace qdos::doscli {

inline constexpr int kSchemaVersion = 1;

struct ModelConfig {
  std::string kind;  // heisenberg, hubbard, pauli, file
  int n = 0;
  double J = 1.0;
  double h = 0.0;
  std::uint64_t disorder_seed = 0;
  int rows = 1;
  int cols = 2;
  double U = 1.0;
  std::vector<std::string> terms;  // pauli: "<coefficient> <letters>"
  std::string path;                // file, resolved against the config directory
  std::string path_sha256;
  std::string rescale = "none";    // none, exact, power_bound
};

// Full space, one particle-number block, or every block 0..n.
struct SubspaceConfig {
  enum class Mode { full, single, all } mode = Mode::full;
  int M = 0;
};

struct EstimatorConfig {
  std::string kind = "exact";  // exact, dqc1, sample
  std::string sampler = "haar";
  std::uint64_t shots = 0;
  std::uint64_t reuse = 1;
  bool analytic = false;
};

struct DynamicsConfig {
  std::string kind = "exact";  // exact, trotter; the Trotter step is time.dt
  int order = 1;
};

struct NoiseConfig {
  std::string kind = "none";  // none, depol, lindblad
  double xi = 0.0;
  double lambda0 = 0.0;
  std::string table;  // empty: bundled synthetic table
  std::string table_sha256;
};

struct EnergyConfig {
  std::size_t oversample = 1;
  std::optional<std::pair<double, double>> range;
};

struct ThermoConfig {
  bool enabled = false;
  std::string quantity = "Z";  // Z, logZ, U
  std::string axis = "T";      // T, beta
  std::vector<double> x;
  std::vector<double> mu;  // grand canonical; needs subspace M = all
};

struct SweepFamily {
  spectral::WindowKind kind = spectral::WindowKind::gaussian;
  spectral::WindowSpec pre_window;
};

struct SweepConfig {
  bool enabled = false;
  std::vector<double> xi;
  double sigma_min = 2.0;
  double sigma_max = 1000.0;
  double sigma_factor = 1.05;
  std::vector<SweepFamily> families;
  std::vector<double> sigmas() const;
};

struct VardynConfig {
  bool enabled = false;
  int layers = 2;
  std::string mode = "phase_sensitive";  // phase_sensitive, phase_free
  std::string optimizer = "covar";       // covar, gradient
  int max_iters = 100;
  double tol = 1e-10;
  int max_weight = 3;
  std::size_t random_observables = 0;
  int trotter_order = 2;
  std::size_t n_states = 1;
  std::string sampler = "euler";
  std::uint64_t shots_per_state = 0;  // 0: exact echoes
  std::vector<double> lambda0{0.0};
};

struct ExperimentConfig {
  int schema = kSchemaVersion;
  std::string name;
  ModelConfig model;
  SubspaceConfig subspace;
  fdos::TimeGrid time;
  EstimatorConfig estimator;
  DynamicsConfig dynamics;
  NoiseConfig noise;
  std::vector<spectral::WindowSpec> windows;
  EnergyConfig energy;
  ThermoConfig thermo;
  SweepConfig sweep;
  VardynConfig vardyn;
  std::string output_dir;  // as written; empty when absent
  std::string source_dir;  // directory of the config file
  std::uint64_t seed = 0;

  // Blocks the pipeline fans out over; nullopt is the full space.
  std::vector<std::optional<int>> blocks() const;
  int n_qubits() const;
  // Canonical form that the hash covers: every field that changes results,
  // referenced files by content hash, output location and workers excluded.
  nlohmann::json canonical() const;
  std::string hash() const;
};

// Parses the YAML text and validates every range. Unknown keys, missing
// required keys and out-of-range values throw ValidationError; YAML syntax
// and type errors throw FormatError.
ExperimentConfig parse_config(const std::string& text, const std::string& source_dir = ".");
ExperimentConfig load_config(const std::string& path);

qcore::QubitHamiltonian build_model(const ModelConfig& model);

// "gaussian(180)" -> "gaussian-180"
std::string file_tag(const std::string& id);
std::string block_tag(const std::optional<int>& M);

}  // namespace qdos::doscli
