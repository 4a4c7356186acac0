#include "qdos/hamlib/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "qdos/common/errors.hpp"

namespace qdos::hamlib {

void write_hamiltonian(std::ostream& out, const qcore::QubitHamiltonian& h) {
  char buf[64];
  for (const auto& t : h.terms()) {
    std::snprintf(buf, sizeof buf, "%.17g", t.coefficient().real());
    out << buf << ' ' << t.letters() << '\n';
  }
}

qcore::QubitHamiltonian read_hamiltonian(std::istream& in) {
  std::vector<qcore::PauliString> terms;
  std::string line;
  int line_no = 0;
  int n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string coeff_text, letters, extra;
    if (!(ls >> coeff_text >> letters) || (ls >> extra))
      throw FormatError("line " + std::to_string(line_no) + ": expected '<coefficient> <letters>'");
    double c = 0.0;
    const auto res = std::from_chars(coeff_text.data(), coeff_text.data() + coeff_text.size(), c);
    if (res.ec != std::errc() || res.ptr != coeff_text.data() + coeff_text.size())
      throw FormatError("line " + std::to_string(line_no) + ": bad coefficient '" + coeff_text + "'");
    if (n == 0) n = static_cast<int>(letters.size());
    if (static_cast<int>(letters.size()) != n)
      throw FormatError("line " + std::to_string(line_no) + ": inconsistent qubit count");
    try {
      terms.emplace_back(letters, c);
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (terms.empty()) throw FormatError("Hamiltonian text contains no terms");
  return qcore::QubitHamiltonian(n, terms);
}

std::string format_hamiltonian(const qcore::QubitHamiltonian& h) {
  std::ostringstream out;
  write_hamiltonian(out, h);
  return out.str();
}

qcore::QubitHamiltonian parse_hamiltonian(const std::string& text) {
  std::istringstream in(text);
  return read_hamiltonian(in);
}

}  // namespace qdos::hamlib
