#pragma once

#include <iosfwd>
#include <string>

#include "qdos/qcore/pauli.hpp"

namespace qdos::hamlib {

// One term per line: `<coefficient> <letters>`, 17 significant digits.
// Blank lines and lines starting with '#' are ignored on input.
void write_hamiltonian(std::ostream& out, const qcore::QubitHamiltonian& h);
qcore::QubitHamiltonian read_hamiltonian(std::istream& in);
std::string format_hamiltonian(const qcore::QubitHamiltonian& h);
qcore::QubitHamiltonian parse_hamiltonian(const std::string& text);

}  // namespace qdos::hamlib
