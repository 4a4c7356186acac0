#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qdos/spectral/dos.hpp"

namespace qdos::spectral {

// log of the trapezoid integral of e^{-beta E} g(E); DomainError if it is not positive.
double log_canonical_partition(const DosEstimate& dos, double beta);
// Throws DomainError when Z over- or underflows a double.
double canonical_partition(const DosEstimate& dos, double beta);
double internal_energy(const DosEstimate& dos, double beta);

double log_canonical_partition(const std::vector<double>& eigenvalues, double beta);
double canonical_partition(const std::vector<double>& eigenvalues, double beta);
double internal_energy(const std::vector<double>& eigenvalues, double beta);

// sum_M e^{beta mu M} Z_M; every M in 0..n must be present.
double grand_canonical_partition(const std::map<int, double>& z_per_m, int n_modes, double beta, double mu);

struct ThermoResult {
  std::string axis;      // "T" or "beta"
  std::string quantity;  // "Z", "logZ" or "U"
  std::vector<double> x;
  std::vector<double> values;
};

ThermoResult thermo_curve(const DosEstimate& dos, const std::string& quantity, const std::string& axis,
                          const std::vector<double>& x);
ThermoResult thermo_curve(const std::vector<double>& eigenvalues, const std::string& quantity,
                          const std::string& axis, const std::vector<double>& x);

using EchoSource = std::function<cplx(double)>;

// G(t) = sum_k e^{-i E_k t}/sqrt(2 pi).
EchoSource trace_source(std::vector<double> eigenvalues);

// Monte-Carlo windowed DOS: times drawn from W/int W (normal for gaussian,
// Laplace for exponential), values Re[int W] * mean(e^{iEt} G(t)).
DosEstimate mc_windowed_dos(const EchoSource& source, const WindowSpec& w, const std::vector<double>& energies,
                            std::size_t n_draws, std::uint64_t seed);

enum class ThermoFunction { boltzmann, energy_boltzmann };

struct ParsevalOptions {
  // f is multiplied by a C2 quintic taper that falls from 1 to 0 over this
  // distance outside the support, which makes its transform decay as t^-4.
  double margin = 0.5;
  double t_cut = 0.0;        // 0 picks a cut where the tail is negligible
  double table_step = 0.0;   // 0 picks a step from the support width
};

struct ParsevalResult {
  double value = 0.0;
  double std_error = 0.0;
  double norm = 0.0;  // integral of |F[f]| over (-t_cut, t_cut)
  double t_cut = 0.0;
  std::size_t n_draws = 0;
};

// F[f](t) = (1/sqrt(2 pi)) int f(E) taper(E) e^{iEt} dE in closed form.
cplx thermo_transform(ThermoFunction f, double beta, double e_lo, double e_hi, double margin, double t);

ParsevalResult parseval_estimate(const EchoSource& source, ThermoFunction f, double beta, double e_lo,
                                 double e_hi, std::size_t n_draws, std::uint64_t seed,
                                 const ParsevalOptions& opt = {});

}  // namespace qdos::spectral
