#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "qdos/common/errors.hpp"
#include "qdos/doscli/cli.hpp"
#include "qdos/doscli/config.hpp"
#include "qdos/doscli/formats.hpp"
#include "qdos/doscli/outputs.hpp"
#include "qdos/hamlib/spectrum.hpp"
#include "qdos/spectral/thermo.hpp"

using namespace qdos;
using namespace qdos::doscli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

class Scratch {
 public:
  explicit Scratch(const std::string& name)
      : dir_(fs::temp_directory_path() / ("doscli_test_" + std::to_string(::getpid()) + "_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

 private:
  fs::path dir_;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_files(const std::string& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name != kManifestName) out[name] = slurp(e.path().string());
  }
  return out;
}

const char* kHubbard = R"(schema: 1
seed: 7
model:
  kind: hubbard
  rows: 1
  cols: 2
  J: -1
  U: 2
  rescale: exact
subspace:
  M: 2
time:
  dt: 0.5
  n_points: 120
windows: [gaussian(20), gaussian(5)]
energy:
  range: [-1.5, 1.5]
thermo:
  values: [0.2, 0.5, 1, 2]
)";

const char* kSampled = R"(schema: 1
seed: 99
model:
  kind: hubbard
  rows: 1
  cols: 2
  J: -1
  U: 2
  rescale: exact
subspace:
  M: 2
time:
  dt: 0.5
  n_points: 40
estimator:
  kind: sample
  sampler: hamming(2)
  shots: 60
  reuse: 10
windows: [gaussian(10)]
)";

}  // namespace

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const auto c = parse_config(kHubbard);
  EXPECT_EQ(c.n_qubits(), 4);
  EXPECT_EQ(c.subspace.mode, SubspaceConfig::Mode::single);
  EXPECT_EQ(c.windows.size(), 2u);
  ASSERT_TRUE(c.thermo.enabled);

  std::string typo = kHubbard;
  typo.replace(typo.find("  U: 2"), 6, "  Uu: 2");
  try {
    parse_config(typo);
    FAIL() << "unknown key accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("model.Uu"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config(std::string(kHubbard) + "extra: 1\n"), ValidationError);
  EXPECT_THROW(parse_config("schema: 2\nmodel: {kind: pauli, terms: ['1 Z']}\ntime: {dt: 1, n_points: 2}\n"),
               ValidationError);
  EXPECT_THROW(parse_config("schema: 1\nmodel: [1, 2\n"), FormatError);
  EXPECT_THROW(parse_config("schema: 1\nmodel: {kind: pauli, terms: ['1 Z']}\ntime: {dt: abc, n_points: 2}\n"),
               FormatError);
}

TEST(Config, RangesAreValidatedBeforeCompute) {
  const std::string base = "schema: 1\nmodel: {kind: pauli, terms: ['1 Z']}\n";
  EXPECT_THROW(parse_config(base + "time: {dt: -1, n_points: 2}\n"), ValidationError);
  EXPECT_THROW(parse_config(base + "time: {dt: 1, n_points: 0}\n"), ValidationError);
  EXPECT_THROW(parse_config(base + "time: {dt: 1, n_points: 2}\nwindows: [gaussian(-3)]\n"), ValidationError);
  EXPECT_THROW(parse_config(base + "time: {dt: 1, n_points: 2}\nestimator: {kind: sample, shots: 10, reuse: 3}\n"),
               ValidationError);
  EXPECT_THROW(parse_config(base + "time: {dt: 1, n_points: 2}\nnoise: {kind: depol, xi: 1}\n"), ValidationError);
  // depolarizing lambda = xi / N_gates must not exceed 1
  EXPECT_THROW(parse_config(base + "time: {dt: 1, n_points: 2}\ndynamics: {kind: trotter}\nnoise: {kind: depol, xi: 50}\n"),
               ValidationError);
  EXPECT_THROW(parse_config(base + "time: {dt: 1, n_points: 2}\nnoise: {kind: lindblad, lambda0: 1, table: nope.txt}\n"),
               ValidationError);
  // X does not conserve particle number
  EXPECT_THROW(parse_config("schema: 1\nmodel: {kind: pauli, terms: ['1 X']}\nsubspace: {M: 0}\ntime: {dt: 1, n_points: 2}\n"),
               ValidationError);
  EXPECT_THROW(parse_config("schema: 1\nmodel: {kind: file, path: missing.ham}\ntime: {dt: 1, n_points: 2}\n"),
               ValidationError);
}

TEST(Config, HashCoversResultsOnly) {
  const auto a = parse_config(kHubbard);
  const auto b = parse_config(std::string("# comment\n") + kHubbard + "output:\n  dir: elsewhere\n");
  EXPECT_EQ(a.hash(), b.hash());
  std::string other = kHubbard;
  other.replace(other.find("seed: 7"), 7, "seed: 8");
  EXPECT_NE(a.hash(), parse_config(other).hash());
  EXPECT_EQ(a.hash().size(), 64u);
}

TEST(Formats, FdosRoundTripIsExact) {
  fdos::FdosSignal s;
  s.grid = {0.1, 50};
  s.normalization = 6;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t k = 0; k < 50; ++k) {
    s.values.emplace_back(g(rng) * 1e3, g(rng) * 1e-7);
    s.shots.push_back({100, 10, "hamming(2)", 12345678901234567ULL});
  }
  std::string hash;
  const auto back = parse_fdos_csv(fdos_csv(s, "abc"), "test", &hash);
  EXPECT_EQ(hash, "abc");
  ASSERT_EQ(back.size(), s.size());
  EXPECT_EQ(back.grid.dt, s.grid.dt);
  EXPECT_EQ(back.normalization, 6.0);
  for (std::size_t k = 0; k < 50; ++k) {
    EXPECT_EQ(back.values[k], s.values[k]);
    EXPECT_EQ(back.shots[k].seed, s.shots[k].seed);
    EXPECT_EQ(back.shots[k].sampler, "hamming(2)");
  }
  EXPECT_EQ(fdos_csv(back, "abc"), fdos_csv(s, "abc"));
}

TEST(Formats, SchemaMismatchNamesTheColumn) {
  const std::string good = "# config_hash=x\n# dt=1\n# normalization=1\n# n_reuse=0\nt,re,im,n_shots,sampler,seed\n0,1,0,0,exact,0\n";
  EXPECT_NO_THROW(parse_fdos_csv(good, "f"));
  std::string bad = good;
  bad.replace(bad.find(",im,"), 4, ",imag,");
  try {
    parse_fdos_csv(bad, "f");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("'imag'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_dos_csv(good, "f"), FormatError);
  EXPECT_THROW(parse_fdos_csv("t,re,im,n_shots,sampler,seed\n", "f"), FormatError);  // no hash
  EXPECT_THROW(parse_fdos_csv("# config_hash=x\n# dt=1\n# normalization=1\n# n_reuse=0\nt,re,im,n_shots,sampler,seed\n0,1,0\n", "f"),
               FormatError);
}

TEST(Cli, SpectrumOfPauliZ) {
  Scratch s("z");
  const auto cfg = s.write("z.yaml", "schema: 1\nmodel: {kind: pauli, terms: ['1.0 Z']}\ntime: {dt: 1, n_points: 4}\n");
  const auto r = cli({"spectrum", "--config", cfg, "--out", s.path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_spectrum_csv(slurp(s.path("out/spectrum.csv")), "spectrum"), (std::vector<double>{-1.0, 1.0}));
}

TEST(Cli, ValidateOnlyWritesNothing) {
  Scratch s("vo");
  const auto cfg = s.write("c.yaml", kHubbard);
  const auto r = cli({"run", "--validate-only", cfg, "--out", s.path("out")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(s.path("out")));
  EXPECT_EQ(json::parse(r.out)["config_hash"], parse_config(kHubbard).hash());

  const auto bad = s.write("bad.yaml", std::string(kHubbard) + "typo: 1\n");
  const auto rb = cli({"run", "--validate-only", bad, "--out", s.path("out")});
  EXPECT_EQ(rb.code, kExitInvalid);
  const auto report = json::parse(rb.err);
  EXPECT_EQ(report["status"], "error");
  EXPECT_EQ(report["error"], "ValidationError");
  EXPECT_FALSE(fs::exists(s.path("out")));
}

TEST(Cli, RunIsDeterministicAndCarriesTheHash) {
  Scratch s("det");
  const auto cfg = s.write("c.yaml", kSampled);
  ASSERT_EQ(cli({"run", cfg, "--out", s.path("a"), "--workers", "1"}).code, 0);
  ASSERT_EQ(cli({"run", cfg, "--out", s.path("b"), "--workers", "1"}).code, 0);
  ASSERT_EQ(cli({"run", cfg, "--out", s.path("c"), "--workers", "3"}).code, 0);
  const auto a = dir_files(s.path("a"));
  EXPECT_EQ(a, dir_files(s.path("b")));
  EXPECT_EQ(a, dir_files(s.path("c")));
  const std::string hash = parse_config(kSampled, s.path("")).hash();
  for (const auto& [name, text] : a) {
    if (name.ends_with(".csv")) EXPECT_EQ(text.substr(0, text.find('\n')), "# config_hash=" + hash) << name;
    if (name.ends_with(".json")) EXPECT_EQ(json::parse(text)["config_hash"], hash) << name;
  }
  // a different seed changes the sampled signal
  ASSERT_EQ(cli({"run", cfg, "--out", s.path("d"), "--seed", "100"}).code, 0);
  EXPECT_NE(slurp(s.path("a/fdos_M2.csv")), slurp(s.path("d/fdos_M2.csv")));
  const auto m = read_manifest(s.path("a"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->config_hash, hash);
  EXPECT_EQ(m->code_version, kCodeVersion);
  EXPECT_EQ(m->files.size(), a.size());
}

TEST(Cli, PiecewiseStagesEqualRun) {
  Scratch s("piece");
  const auto cfg = s.write("c.yaml", kHubbard);
  ASSERT_EQ(cli({"run", cfg, "--out", s.path("whole")}).code, 0);
  for (const char* stage : {"fdos", "reconstruct", "thermo"}) {
    const auto r = cli({stage, cfg, "--out", s.path("parts")});
    ASSERT_EQ(r.code, 0) << stage << r.err;
  }
  const auto whole = dir_files(s.path("whole")), parts = dir_files(s.path("parts"));
  EXPECT_EQ(whole, parts);
  // two windows fan out into two DOS files
  EXPECT_TRUE(whole.count("dos_gaussian-20_M2.csv"));
  EXPECT_TRUE(whole.count("dos_gaussian-5_M2.csv"));
  EXPECT_EQ(cli({"validate", cfg, "--out", s.path("parts")}).code, 0);
  // --stage on run is the same as the subcommand
  ASSERT_EQ(cli({"run", cfg, "--stage", "fdos", "--out", s.path("staged")}).code, 0);
  EXPECT_EQ(slurp(s.path("staged/fdos_M2.csv")), whole.at("fdos_M2.csv"));
}

TEST(Cli, StageInputSchemaMismatch) {
  Scratch s("schema");
  const auto cfg = s.write("c.yaml", kHubbard);
  ASSERT_EQ(cli({"fdos", cfg, "--out", s.path("o")}).code, 0);
  std::string text = slurp(s.path("o/fdos_M2.csv"));
  text.replace(text.find("t,re,im"), 7, "t,re,imag");
  std::ofstream(s.path("o/fdos_M2.csv")) << text;
  const auto r = cli({"reconstruct", cfg, "--out", s.path("o")});
  EXPECT_EQ(r.code, kExitFormat);
  const auto report = json::parse(r.err);
  EXPECT_EQ(report["error"], "FormatError");
  EXPECT_NE(report["message"].get<std::string>().find("'imag'"), std::string::npos);
  EXPECT_FALSE(fs::exists(s.path("o/dos_gaussian-20_M2.csv")));
  // a missing upstream file is a format error too
  const auto r2 = cli({"thermo", cfg, "--out", s.path("o")});
  EXPECT_EQ(r2.code, kExitFormat);
}

TEST(Cli, ValidateDetectsDrift) {
  Scratch s("drift");
  const auto cfg = s.write("c.yaml", kHubbard);
  ASSERT_EQ(cli({"run", cfg, "--out", s.path("o")}).code, 0);
  EXPECT_EQ(cli({"validate", "--out", s.path("o")}).code, 0);

  const std::string dos = s.path("o/dos_gaussian-5_M2.csv");
  const std::string orig = slurp(dos);
  std::string edited = orig;
  edited[edited.size() - 2] = edited[edited.size() - 2] == '1' ? '2' : '1';
  std::ofstream(dos) << edited;
  auto r = cli({"validate", "--out", s.path("o")});
  EXPECT_EQ(r.code, kExitDrift);
  EXPECT_NE(r.err.find("content drift in dos_gaussian-5_M2.csv"), std::string::npos) << r.err;
  std::ofstream(dos) << orig;
  EXPECT_EQ(cli({"validate", "--out", s.path("o")}).code, 0);

  s.write("o/stray.csv", "x\n");
  EXPECT_EQ(cli({"validate", "--out", s.path("o")}).code, kExitDrift);
  fs::remove(s.path("o/stray.csv"));
  fs::remove(s.path("o/fdos_M2.json"));
  r = cli({"validate", "--out", s.path("o")});
  EXPECT_EQ(r.code, kExitDrift);
  EXPECT_NE(r.err.find("missing file fdos_M2.json"), std::string::npos);

  // a config other than the one that produced the outputs
  const auto other = s.write("d.yaml", std::string(kHubbard).replace(std::string(kHubbard).find("seed: 7"), 7, "seed: 3"));
  EXPECT_EQ(cli({"validate", other, "--out", s.path("o")}).code, kExitDrift);
}

TEST(Cli, FailedRunLeavesNoPartialOutputs) {
  Scratch s("fail");
  // Z overflows at T = 1e-4 once the DOS has been computed
  std::string text = kHubbard;
  text.replace(text.find("values: [0.2"), 12, "values: [1e-4");
  const auto cfg = s.write("c.yaml", text);
  const auto r = cli({"run", cfg, "--out", s.path("o")});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(json::parse(r.err)["status"], "error");
  EXPECT_TRUE(!fs::exists(s.path("o")) || fs::is_empty(s.path("o")));
}

TEST(Cli, GrandCanonicalMatchesDirectTrace) {
  Scratch s("grand");
  const auto cfg = s.write("c.yaml", R"(schema: 1
model: {kind: hubbard, rows: 1, cols: 2, J: -1, U: 2}
subspace: {M: all}
time: {dt: 0.25, n_points: 200}
windows: [gaussian(10)]
energy: {range: [-4, 8]}
thermo: {quantity: Z, axis: beta, values: [0.1, 0.5, 1], mu: [0.5, 1.5]}
)");
  const auto r = cli({"run", cfg, "--out", s.path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto h = build_model(parse_config(slurp(cfg)).model);
  for (double mu : {0.5, 1.5}) {
    // Tr e^{-beta (H - mu N)} with N = sum_j (1 - Z_j)/2
    qcore::QubitHamiltonian k = h;
    for (int j = 0; j < 4; ++j) {
      k.add_term(qcore::PauliString::identity(4, -mu / 2));
      k.add_term(qcore::PauliString::single(4, j, 'Z', mu / 2));
    }
    const auto eig = hamlib::exact_spectrum(k);
    char tag[16];
    std::snprintf(tag, sizeof tag, "%g", mu);
    const auto exact = parse_thermo_csv(slurp(s.path(std::string("o/thermo_grand_exact_mu") + tag + ".csv")), "g");
    const auto est = parse_thermo_csv(slurp(s.path(std::string("o/thermo_grand_gaussian-10_mu") + tag + ".csv")), "g");
    for (std::size_t i = 0; i < exact.x.size(); ++i) {
      const double direct = spectral::canonical_partition(eig, exact.x[i]);
      EXPECT_NEAR(exact.values[i], direct, 1e-10 * direct);
      EXPECT_NEAR(est.values[i], direct, 0.05 * direct);
    }
  }
}
