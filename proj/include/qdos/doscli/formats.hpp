#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qdos/fdos/signal.hpp"
#include "qdos/spectral/dos.hpp"
#include "qdos/spectral/thermo.hpp"
#include "qdos/vardyn/variational.hpp"

namespace qdos::doscli {

// Every CSV starts with `# config_hash=<hex>`, then further `# key=value`
// metadata lines, then the header and the records. Floats use 17
// significant digits in the C locale.
using Meta = std::vector<std::pair<std::string, std::string>>;

struct CsvTable {
  Meta meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  const std::string& meta_value(const std::string& key) const;  // FormatError if missing
  std::string config_hash() const { return meta_value("config_hash"); }
};

std::string format_double(double v);
std::string format_csv(const std::string& config_hash, const Meta& meta, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows);
// `what` names the stream in error messages. Throws FormatError naming the
// first column that differs from `expected`.
CsvTable parse_csv(const std::string& text, const std::string& what, const std::vector<std::string>& expected);
double parse_number(const std::string& field, const std::string& what);
std::uint64_t parse_count(const std::string& field, const std::string& what);

extern const std::vector<std::string> kFdosColumns;      // t,re,im,n_shots,sampler,seed
extern const std::vector<std::string> kDosColumns;       // E,g
extern const std::vector<std::string> kThermoColumns;    // T_or_beta,value
extern const std::vector<std::string> kSpectrumColumns;  // E
extern const std::vector<std::string> kSweepColumns;     // sigma,error

std::string fdos_csv(const fdos::FdosSignal& s, const std::string& config_hash);
fdos::FdosSignal parse_fdos_csv(const std::string& text, const std::string& what, std::string* config_hash = nullptr);

std::string dos_csv(const spectral::DosEstimate& d, const std::string& config_hash);
spectral::DosEstimate parse_dos_csv(const std::string& text, const std::string& what,
                                    std::string* config_hash = nullptr);

std::string thermo_csv(const spectral::ThermoResult& r, const std::string& config_hash);
spectral::ThermoResult parse_thermo_csv(const std::string& text, const std::string& what,
                                        std::string* config_hash = nullptr);

std::string spectrum_csv(const std::vector<double>& eigenvalues, const std::string& config_hash, const Meta& meta = {});
std::vector<double> parse_spectrum_csv(const std::string& text, const std::string& what);

nlohmann::json trajectory_json(const vardyn::ParamTrajectory& t, std::uint64_t seed);

}  // namespace qdos::doscli
