#pragma once

#include <stdexcept>
#include <string>

namespace qdos {

// Operand shapes disagree (qubit counts, vector lengths, grid sizes).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input is well formed but outside the mathematical domain of the operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A model or experiment specification is inconsistent.
struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Constructed object fails its invariants (channels, noise tables, configs).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file or stage input.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OptimizerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qdos
