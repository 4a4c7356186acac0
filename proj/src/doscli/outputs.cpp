#include "qdos/doscli/outputs.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdos/common/errors.hpp"
#include "qdos/doscli/digest.hpp"

namespace qdos::doscli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

// Hash embedded in an output file, or empty when it has none.
std::string embedded_hash(const std::string& name, const std::string& text) {
  if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
    const std::string key = "# config_hash=";
    if (text.compare(0, key.size(), key) != 0) return "";
    return text.substr(key.size(), text.find('\n') - key.size());
  }
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("config_hash") || !j["config_hash"].is_string()) return "";
    return j["config_hash"].get<std::string>();
  }
  return "";
}

}  // namespace

json Manifest::to_json() const {
  json st = json::array();
  for (const auto& s : stages) st.push_back({{"stage", s.stage}, {"wall_time_s", s.wall_time_s}, {"workers", s.workers}});
  json fl = json::object();
  for (const auto& [name, e] : files) fl[name] = {{"sha256", e.sha256}, {"bytes", e.bytes}, {"stage", e.stage}};
  return {{"config_hash", config_hash}, {"code_version", code_version}, {"seed", seed}, {"stages", st}, {"files", fl}};
}

Manifest Manifest::from_json(const json& j) {
  Manifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("stages"))
      m.stages.push_back({s.at("stage").get<std::string>(), s.at("wall_time_s").get<double>(), s.at("workers").get<unsigned>()});
    for (const auto& [name, e] : j.at("files").items())
      m.files[name] = {e.at("sha256").get<std::string>(), e.at("bytes").get<std::uintmax_t>(), e.at("stage").get<std::string>()};
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::optional<Manifest> read_manifest(const std::string& dir) {
  const fs::path p = fs::path(dir) / kManifestName;
  if (!fs::exists(p)) return std::nullopt;
  const json j = json::parse(slurp(p), nullptr, false);
  if (j.is_discarded()) throw FormatError("manifest is not valid JSON: " + p.string());
  return Manifest::from_json(j);
}

void commit_outputs(const std::string& dir, const std::string& config_hash, std::uint64_t seed,
                    const std::vector<StageOutput>& outputs) {
  const fs::path root(dir);
  fs::create_directories(root);
  const fs::path staging = root / (".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging);
  fs::create_directories(staging);
  Manifest m;
  try {
    if (auto old = read_manifest(dir); old && old->config_hash == config_hash) m = *old;
    else if (old)
      for (const auto& [name, e] : old->files) fs::remove(root / name);
    for (const auto& out : outputs)
      for (const auto& a : out.artifacts) {
        if (a.name == kManifestName || a.name.find('/') != std::string::npos)
          throw std::logic_error("bad artifact name " + a.name);
        spit(staging / a.name, a.content);
      }
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  m.config_hash = config_hash;
  m.code_version = kCodeVersion;
  m.seed = seed;
  for (const auto& out : outputs) {
    std::erase_if(m.stages, [&](const StageRecord& s) { return s.stage == out.record.stage; });
    m.stages.push_back(out.record);
    for (const auto& a : out.artifacts) {
      fs::rename(staging / a.name, root / a.name);
      m.files[a.name] = {sha256_hex(a.content), a.content.size(), out.record.stage};
    }
  }
  fs::remove_all(staging);
  const fs::path tmp = root / ".manifest.tmp";
  spit(tmp, m.to_json().dump(2) + "\n");
  fs::rename(tmp, root / kManifestName);
}

InputReader disk_reader(const std::string& dir) {
  return [dir](const std::string& name) {
    const fs::path p = fs::path(dir) / name;
    if (!fs::is_regular_file(p)) throw FormatError("missing stage input " + p.string());
    return slurp(p);
  };
}

DriftReport validate_outputs(const std::string& dir, const std::optional<std::string>& expected_hash) {
  DriftReport r;
  std::optional<Manifest> m;
  try {
    m = read_manifest(dir);
  } catch (const FormatError& e) {
    r.problems.push_back(e.what());
    return r;
  }
  if (!m) {
    r.problems.push_back("no manifest in " + dir);
    return r;
  }
  r.config_hash = m->config_hash;
  if (expected_hash && *expected_hash != m->config_hash)
    r.problems.push_back("manifest config_hash " + m->config_hash + " differs from the config " + *expected_hash);
  for (const auto& [name, e] : m->files) {
    ++r.n_files;
    const fs::path p = fs::path(dir) / name;
    if (!fs::is_regular_file(p)) {
      r.problems.push_back("missing file " + name);
      continue;
    }
    const std::string text = slurp(p);
    if (text.size() != e.bytes)
      r.problems.push_back("size drift in " + name + ": " + std::to_string(text.size()) + " bytes, manifest has " +
                           std::to_string(e.bytes));
    if (sha256_hex(text) != e.sha256) r.problems.push_back("content drift in " + name);
    const std::string h = embedded_hash(name, text);
    if (h != m->config_hash)
      r.problems.push_back("config hash drift in " + name + ": '" + h + "'");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == kManifestName || !entry.is_regular_file()) continue;
    if (!m->files.count(name)) r.problems.push_back("unlisted file " + name);
  }
  return r;
}

}  // namespace qdos::doscli
