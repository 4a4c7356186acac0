#include "qdos/fdos/signal.hpp"

#include <cmath>

#include "qdos/common/errors.hpp"

namespace qdos::fdos {

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive and finite");
  if (n_points == 0) throw DomainError("time grid needs at least one point");
}

void ShotPlan::validate() const {
  if (n_shots == 0) throw SpecError("shot budget must be positive");
  if (n_reuse == 0) throw SpecError("reuse count must be positive");
  if (n_shots % n_reuse != 0) throw SpecError("shot budget must be a multiple of the reuse count");
}

cplx FdosSignal::at(std::int64_t k) const {
  const auto idx = static_cast<std::size_t>(k < 0 ? -k : k);
  if (idx >= values.size()) throw DimensionError("time index outside the signal");
  return k < 0 ? std::conj(values[idx]) : values[idx];
}

}  // namespace qdos::fdos
