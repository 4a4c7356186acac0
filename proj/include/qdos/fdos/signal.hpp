#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qdos::fdos {

using cplx = std::complex<double>;

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

struct TimeGrid {
  double dt = 1.0;
  std::size_t n_points = 1;
  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
  double t_max() const { return static_cast<double>(n_points) * dt; }
  void validate() const;
};

// N_s total shots per time point, each drawn state reused for N_r shots.
struct ShotPlan {
  std::uint64_t n_shots = 0;
  std::uint64_t n_reuse = 1;
  // Infinite shots per state: each of the N_psi states contributes its exact echo.
  bool analytic = false;

  std::uint64_t n_states() const { return n_shots / n_reuse; }
  void validate() const;
  static ShotPlan exact_echoes(std::uint64_t n_states) { return {n_states, 1, true}; }
};

struct ShotRecord {
  std::uint64_t n_shots = 0;  // 0 for analytic estimates
  std::uint64_t n_reuse = 0;
  std::string sampler;
  std::uint64_t seed = 0;
};

struct FdosSignal {
  TimeGrid grid;
  std::vector<cplx> values;
  double normalization = 1.0;  // d or |S|
  std::vector<ShotRecord> shots;

  std::size_t size() const { return values.size(); }
  // G(t_k) for k >= 0 and conj(G(t_{-k})) for k < 0.
  cplx at(std::int64_t k) const;
};

}  // namespace qdos::fdos
