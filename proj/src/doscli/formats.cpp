#include "qdos/doscli/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qdos/common/errors.hpp"

namespace qdos::doscli {

const std::vector<std::string> kFdosColumns{"t", "re", "im", "n_shots", "sampler", "seed"};
const std::vector<std::string> kDosColumns{"E", "g"};
const std::vector<std::string> kThermoColumns{"T_or_beta", "value"};
const std::vector<std::string> kSpectrumColumns{"E"};
const std::vector<std::string> kSweepColumns{"sigma", "error"};

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

}  // namespace

const std::string& CsvTable::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  throw FormatError("missing metadata line '# " + key + "='");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_csv(const std::string& config_hash, const Meta& meta, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out = "# config_hash=" + config_hash + "\n";
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  out += join(columns) + "\n";
  for (const auto& r : rows) out += join(r) + "\n";
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& what, const std::vector<std::string>& expected) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header && line[0] == '#') {
      const auto eq = line.find('=');
      std::size_t k0 = 1;
      while (k0 < line.size() && line[k0] == ' ') ++k0;
      if (eq != std::string::npos) t.meta.emplace_back(line.substr(k0, eq - k0), line.substr(eq + 1));
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
      for (std::size_t i = 0; i < std::max(t.columns.size(), expected.size()); ++i) {
        if (i >= t.columns.size())
          throw FormatError(what + ": missing column " + std::to_string(i + 1) + " '" + expected[i] + "'");
        if (i >= expected.size())
          throw FormatError(what + ": unexpected column " + std::to_string(i + 1) + " '" + t.columns[i] + "'");
        if (t.columns[i] != expected[i])
          throw FormatError(what + ": column " + std::to_string(i + 1) + " is '" + t.columns[i] + "', expected '" +
                            expected[i] + "'");
      }
      continue;
    }
    auto fields = split(line);
    if (fields.size() != expected.size())
      throw FormatError(what + ": line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(expected.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!header) throw FormatError(what + ": no header line");
  bool has_hash = false;
  for (const auto& kv : t.meta) has_hash = has_hash || kv.first == "config_hash";
  if (!has_hash) throw FormatError(what + ": missing '# config_hash=' line");
  return t;
}

double parse_number(const std::string& field, const std::string& what) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw FormatError(what + ": bad number '" + field + "'");
  return v;
}

std::uint64_t parse_count(const std::string& field, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw FormatError(what + ": bad count '" + field + "'");
  return v;
}

std::string fdos_csv(const fdos::FdosSignal& s, const std::string& config_hash) {
  if (s.shots.size() != s.values.size()) throw DimensionError("signal has no shot record per point");
  const Meta meta{{"dt", format_double(s.grid.dt)},
                  {"normalization", format_double(s.normalization)},
                  {"n_reuse", s.shots.empty() ? "0" : std::to_string(s.shots.front().n_reuse)}};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& r = s.shots[k];
    rows.push_back({format_double(s.grid.time(k)), format_double(s.values[k].real()), format_double(s.values[k].imag()),
                    std::to_string(r.n_shots), r.sampler, std::to_string(r.seed)});
  }
  return format_csv(config_hash, meta, kFdosColumns, rows);
}

fdos::FdosSignal parse_fdos_csv(const std::string& text, const std::string& what, std::string* config_hash) {
  const CsvTable t = parse_csv(text, what, kFdosColumns);
  fdos::FdosSignal s;
  s.grid.dt = parse_number(t.meta_value("dt"), what + " dt");
  s.normalization = parse_number(t.meta_value("normalization"), what + " normalization");
  const std::uint64_t reuse = parse_count(t.meta_value("n_reuse"), what + " n_reuse");
  if (t.rows.empty()) throw FormatError(what + ": no records");
  s.grid.n_points = t.rows.size();
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    const std::string at = what + " row " + std::to_string(k + 1);
    const double time = parse_number(r[0], at + " column 't'");
    if (std::abs(time - s.grid.time(k)) > 1e-9 * std::max(1.0, std::abs(time)))
      throw FormatError(at + ": column 't' is off the grid k*dt");
    s.values.emplace_back(parse_number(r[1], at + " column 're'"), parse_number(r[2], at + " column 'im'"));
    s.shots.push_back({parse_count(r[3], at + " column 'n_shots'"), reuse, r[4], parse_count(r[5], at + " column 'seed'")});
  }
  if (config_hash) *config_hash = t.config_hash();
  return s;
}

std::string dos_csv(const spectral::DosEstimate& d, const std::string& config_hash) {
  const Meta meta{{"window", d.window.id()},
                  {"normalization", format_double(d.normalization)},
                  {"imag_residue", format_double(d.imag_residue)},
                  {"source", d.source}};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < d.energies.size(); ++i)
    rows.push_back({format_double(d.energies[i]), format_double(d.values[i])});
  return format_csv(config_hash, meta, kDosColumns, rows);
}

spectral::DosEstimate parse_dos_csv(const std::string& text, const std::string& what, std::string* config_hash) {
  const CsvTable t = parse_csv(text, what, kDosColumns);
  spectral::DosEstimate d;
  try {
    d.window = spectral::WindowSpec::parse(t.meta_value("window"));
  } catch (const SpecError& e) {
    throw FormatError(what + ": " + e.what());
  }
  d.normalization = parse_number(t.meta_value("normalization"), what + " normalization");
  d.imag_residue = parse_number(t.meta_value("imag_residue"), what + " imag_residue");
  d.source = t.meta_value("source");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string at = what + " row " + std::to_string(i + 1);
    d.energies.push_back(parse_number(t.rows[i][0], at + " column 'E'"));
    d.values.push_back(parse_number(t.rows[i][1], at + " column 'g'"));
  }
  if (config_hash) *config_hash = t.config_hash();
  return d;
}

std::string thermo_csv(const spectral::ThermoResult& r, const std::string& config_hash) {
  const Meta meta{{"axis", r.axis}, {"quantity", r.quantity}};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.x.size(); ++i) rows.push_back({format_double(r.x[i]), format_double(r.values[i])});
  return format_csv(config_hash, meta, kThermoColumns, rows);
}

spectral::ThermoResult parse_thermo_csv(const std::string& text, const std::string& what, std::string* config_hash) {
  const CsvTable t = parse_csv(text, what, kThermoColumns);
  spectral::ThermoResult r;
  r.axis = t.meta_value("axis");
  r.quantity = t.meta_value("quantity");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string at = what + " row " + std::to_string(i + 1);
    r.x.push_back(parse_number(t.rows[i][0], at + " column 'T_or_beta'"));
    r.values.push_back(parse_number(t.rows[i][1], at + " column 'value'"));
  }
  if (config_hash) *config_hash = t.config_hash();
  return r;
}

std::string spectrum_csv(const std::vector<double>& eigenvalues, const std::string& config_hash, const Meta& meta) {
  std::vector<std::vector<std::string>> rows;
  for (double e : eigenvalues) rows.push_back({format_double(e)});
  return format_csv(config_hash, meta, kSpectrumColumns, rows);
}

std::vector<double> parse_spectrum_csv(const std::string& text, const std::string& what) {
  const CsvTable t = parse_csv(text, what, kSpectrumColumns);
  std::vector<double> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    out.push_back(parse_number(t.rows[i][0], what + " row " + std::to_string(i + 1) + " column 'E'"));
  return out;
}

nlohmann::json trajectory_json(const vardyn::ParamTrajectory& t, std::uint64_t seed) {
  return {{"dt", t.dt},
          {"seed", seed},
          {"times", t.times},
          {"thetas", t.thetas},
          {"energies", t.energies},
          {"covar_norm2", t.covar_norm2},
          {"step_fidelities", t.step_fidelities},
          {"iterations", t.iterations},
          {"cumulative_fidelity", t.cumulative_fidelity},
          {"echo_error", t.echo_error}};
}

}  // namespace qdos::doscli
