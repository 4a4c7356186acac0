#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdos/doscli/config.hpp"
#include "qdos/fdos/signal.hpp"
#include "qdos/hamlib/spectrum.hpp"
#include "qdos/qcore/pauli.hpp"

namespace qdos::doscli {

inline const char* const kCodeVersion = QDOS_VERSION;

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string content;
};
using Artifacts = std::vector<Artifact>;

// Returns the text of an upstream file; throws FormatError when it is absent.
using InputReader = std::function<std::string(const std::string& name)>;

enum class Stage { spectrum, fdos, reconstruct, thermo, noise_sweep, vardyn };
std::string stage_name(Stage s);
Stage parse_stage(const std::string& name);
// fdos, reconstruct, then thermo, noise-sweep and vardyn when configured.
std::vector<Stage> default_stages(const ExperimentConfig& cfg);

// Seeds of the independent random streams, derived from the master seed.
enum SeedStream : std::uint64_t {
  kSeedFdos = 1,
  kSeedAssignment = 2,
  kSeedVardynStates = 3,
  kSeedVardynObservables = 4,
  kSeedVardynShots = 5,
};

struct PreparedModel {
  qcore::QubitHamiltonian original;
  qcore::QubitHamiltonian hamiltonian;  // after rescaling
  std::optional<hamlib::RescaleInfo> rescale;
  std::string sha256;  // of the serialized simulated Hamiltonian
};
PreparedModel prepare_model(const ExperimentConfig& cfg);

std::string fdos_file(const std::optional<int>& M);
std::string dos_file(const spectral::WindowSpec& w, const std::optional<int>& M);

// FDOS of one block with the configured estimator, dynamics and noise. A
// depolarizing `xi_override` replaces the noise section.
fdos::FdosSignal block_fdos(const ExperimentConfig& cfg, const PreparedModel& model, const std::optional<int>& M,
                            unsigned workers, std::optional<double> xi_override = std::nullopt);
// Energies of the reconstruction grid for a signal.
std::vector<double> energy_points(const ExperimentConfig& cfg, const fdos::TimeGrid& grid);

struct StageContext {
  const ExperimentConfig& cfg;
  std::string hash;
  unsigned workers = 1;
  InputReader input;
};

Artifacts run_stage(Stage s, const StageContext& ctx);

// JSON sidecar shared fields: config hash, canonical config, kind.
nlohmann::json sidecar(const StageContext& ctx, const std::string& kind);

}  // namespace qdos::doscli
