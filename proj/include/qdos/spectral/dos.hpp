#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qdos/fdos/signal.hpp"

namespace qdos::spectral {

using fdos::cplx;
using fdos::FdosSignal;
using fdos::TimeGrid;

enum class WindowKind { none, gaussian, exponential };

struct WindowSpec {
  WindowKind kind = WindowKind::none;
  double sigma = 0.0;

  static WindowSpec none() { return {}; }
  static WindowSpec gaussian(double sigma) { return {WindowKind::gaussian, sigma}; }
  static WindowSpec exponential(double sigma) { return {WindowKind::exponential, sigma}; }
  void validate() const;
  std::string id() const;  // "none", "gaussian(20)", "exponential(250)"
  static WindowSpec parse(const std::string& id);
  // Decay rate 1/(ln2 sigma) of the exponential window.
  double gamma() const;
};

// exp(-t^2/2s^2) or exp(-|t|/(ln2 s)); 1 for none.
double window_shape(const WindowSpec& w, double t);
// W(t) = shape/sqrt(2 pi) for gaussian and exponential; 1 for none.
double window_value(const WindowSpec& w, double t);
// Point-spread function w_{1/sigma}(E) (unit area); none has no density.
double window_kernel(const WindowSpec& w, double e);

FdosSignal apply_window(const FdosSignal& signal, const WindowSpec& w);

// Uniform energy grid e_min + j de, j < n.
struct EnergyGrid {
  double e_min = 0.0;
  double de = 1.0;
  std::size_t n = 0;
  std::vector<double> energies() const;
};

// Zero-centred DFT frequencies in (-pi/dt, pi/dt] for the Hermitian-extended
// signal, refined by `oversample`.
EnergyGrid dft_energy_grid(const TimeGrid& grid, std::size_t oversample = 1);
// Throws ValidationError when any energy leaves (-pi/dt, pi/dt].
void check_alias_free(const TimeGrid& grid, const std::vector<double>& energies);

struct DosEstimate {
  std::vector<double> energies;
  std::vector<double> values;
  WindowSpec window;
  double normalization = 0.0;  // d or |S| of the source signal
  double imag_residue = 0.0;
  std::string source;

  // Trapezoid integral of the values.
  double integral() const;
};

// g(E) = dt/sqrt(2 pi) sum_{|k|<N} e^{iE t_k} shape(t_k) G(t_k), with
// G(-t) = conj G(t) and t = 0 counted once.
DosEstimate reconstruct_dos(const FdosSignal& signal, const WindowSpec& w, const std::vector<double>& energies);
DosEstimate reconstruct_dos(const FdosSignal& signal, const WindowSpec& w, const EnergyGrid& grid);

// Continuum reference sum_k w_{1/sigma}(E - E_k).
DosEstimate exact_windowed_dos(const std::vector<double>& eigenvalues, const WindowSpec& w,
                               const std::vector<double>& energies);

// 1 - <f,g>/sqrt(<f,f><g,g>) with trapezoid inner products.
double dos_error(const DosEstimate& f, const DosEstimate& reference);
double dos_error(const std::vector<double>& energies, const std::vector<double>& f, const std::vector<double>& g);

// Mean error of i.i.d. standard normal values against the reference.
double white_noise_baseline(const DosEstimate& reference, std::size_t trials, std::uint64_t seed);

struct WindowSweep {
  std::vector<double> sigmas;
  std::vector<double> errors;
  double sigma_star = 0.0;
  double error_min = 0.0;
};

// Error of a fixed estimate against reference(kind, sigma') for each sigma';
// the argmin breaks ties toward the smaller width.
WindowSweep sweep_window_error(const DosEstimate& noisy,
                               const std::function<DosEstimate(const WindowSpec&)>& reference,
                               WindowKind kind, const std::vector<double>& sigmas);

}  // namespace qdos::spectral
