#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdos/doscli/pipeline.hpp"

namespace qdos::doscli {

inline const char* const kManifestName = "manifest.json";

struct FileEntry {
  std::string sha256;
  std::uintmax_t bytes = 0;
  std::string stage;
};

struct StageRecord {
  std::string stage;
  double wall_time_s = 0.0;
  unsigned workers = 1;
};

struct Manifest {
  std::string config_hash;
  std::string code_version;
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  std::map<std::string, FileEntry> files;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);  // FormatError on missing fields
};

std::optional<Manifest> read_manifest(const std::string& dir);

struct StageOutput {
  StageRecord record;
  Artifacts artifacts;
};

// Writes every artifact into a staging directory first and moves them into
// `dir` only when all writes succeeded, then merges the manifest. A manifest
// from a different config is replaced and the files it listed are removed.
void commit_outputs(const std::string& dir, const std::string& config_hash, std::uint64_t seed,
                    const std::vector<StageOutput>& outputs);

// Reads upstream files from disk.
InputReader disk_reader(const std::string& dir);

struct DriftReport {
  std::string config_hash;
  std::vector<std::string> problems;
  std::size_t n_files = 0;
  bool ok() const { return problems.empty(); }
};

// Checks that every manifest entry exists with the recorded size and
// SHA-256, that every file carries the manifest's config hash, and that the
// directory holds no unlisted files.
DriftReport validate_outputs(const std::string& dir, const std::optional<std::string>& expected_hash = std::nullopt);

}  // namespace qdos::doscli
