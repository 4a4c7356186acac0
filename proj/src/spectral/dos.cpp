#include "qdos/spectral/dos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "qdos/common/errors.hpp"
#include "qdos/common/rng.hpp"

namespace qdos::spectral {

namespace {

constexpr double kInvSqrt2Pi = fdos::kInvSqrt2Pi;

double trapezoid_dot(const std::vector<double>& e, const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) acc += 0.5 * (e[i + 1] - e[i]) * (a[i] * b[i] + a[i + 1] * b[i + 1]);
  return acc;
}

}  // namespace

void WindowSpec::validate() const {
  if (kind != WindowKind::none && !(sigma > 0.0 && std::isfinite(sigma)))
    throw DomainError("window width must be positive");
}

std::string WindowSpec::id() const {
  if (kind == WindowKind::none) return "none";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%.17g)", kind == WindowKind::gaussian ? "gaussian" : "exponential", sigma);
  return buf;
}

WindowSpec WindowSpec::parse(const std::string& id) {
  if (id == "none") return none();
  const auto open = id.find('(');
  if (open == std::string::npos || id.back() != ')') throw SpecError("malformed window '" + id + "'");
  const std::string name = id.substr(0, open), arg = id.substr(open + 1, id.size() - open - 2);
  WindowSpec w;
  if (name == "gaussian") {
    w.kind = WindowKind::gaussian;
  } else if (name == "exponential") {
    w.kind = WindowKind::exponential;
  } else {
    throw SpecError("unknown window '" + name + "'");
  }
  std::size_t used = 0;
  try {
    w.sigma = std::stod(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (arg.empty() || used != arg.size()) throw SpecError("malformed window width in '" + id + "'");
  w.validate();
  return w;
}

double WindowSpec::gamma() const { return 1.0 / (std::numbers::ln2 * sigma); }

double window_shape(const WindowSpec& w, double t) {
  switch (w.kind) {
    case WindowKind::gaussian: return std::exp(-t * t / (2.0 * w.sigma * w.sigma));
    case WindowKind::exponential: return std::exp(-std::abs(t) * w.gamma());
    default: return 1.0;
  }
}

double window_value(const WindowSpec& w, double t) {
  return w.kind == WindowKind::none ? 1.0 : kInvSqrt2Pi * window_shape(w, t);
}

double window_kernel(const WindowSpec& w, double e) {
  w.validate();
  switch (w.kind) {
    case WindowKind::gaussian: return w.sigma * kInvSqrt2Pi * std::exp(-0.5 * w.sigma * w.sigma * e * e);
    case WindowKind::exponential: {
      const double g = w.gamma();
      return g / (std::numbers::pi * (g * g + e * e));
    }
    default: throw SpecError("the unwindowed kernel is a delta function");
  }
}

FdosSignal apply_window(const FdosSignal& signal, const WindowSpec& w) {
  w.validate();
  FdosSignal out = signal;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] *= window_value(w, signal.grid.time(k));
  return out;
}

std::vector<double> EnergyGrid::energies() const {
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) e[j] = e_min + static_cast<double>(j) * de;
  return e;
}

EnergyGrid dft_energy_grid(const TimeGrid& grid, std::size_t oversample) {
  grid.validate();
  if (oversample == 0) throw DomainError("oversampling factor must be positive");
  const std::size_t m = 2 * grid.n_points * oversample;
  const double de = 2.0 * std::numbers::pi / (static_cast<double>(m) * grid.dt);
  const auto half = static_cast<double>(m / 2);
  return {(-half + 1.0) * de, de, m};
}

void check_alias_free(const TimeGrid& grid, const std::vector<double>& energies) {
  const double band = std::numbers::pi / grid.dt;
  const double tol = 1e-12 * band;
  for (double e : energies)
    if (!(e > -band + tol && e <= band + tol))
      throw ValidationError("energy " + std::to_string(e) + " outside the alias-free band (-pi/dt, pi/dt]");
}

double DosEstimate::integral() const {
  std::vector<double> ones(values.size(), 1.0);
  return trapezoid_dot(energies, values, ones);
}

DosEstimate reconstruct_dos(const FdosSignal& signal, const WindowSpec& w, const std::vector<double>& energies) {
  w.validate();
  signal.grid.validate();
  if (signal.values.size() != signal.grid.n_points) throw DimensionError("signal length differs from its grid");
  check_alias_free(signal.grid, energies);
  const std::size_t n = signal.values.size();
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = window_shape(w, signal.grid.time(k)) * signal.values[k];
  const double pref = signal.grid.dt * kInvSqrt2Pi;

  DosEstimate out;
  out.energies = energies;
  out.values.resize(energies.size());
  out.window = w;
  out.normalization = signal.normalization;
  out.imag_residue = pref * std::abs(c[0].imag());
  out.source = signal.shots.empty() ? std::string() : signal.shots.front().sampler;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    const cplx z = std::polar(1.0, energies[j] * signal.grid.dt);
    cplx acc = 0.0;
    for (std::size_t k = n; k-- > 1;) acc = (acc + c[k]) * z;
    out.values[j] = pref * (c[0].real() + 2.0 * acc.real());
  }
  return out;
}

DosEstimate reconstruct_dos(const FdosSignal& signal, const WindowSpec& w, const EnergyGrid& grid) {
  return reconstruct_dos(signal, w, grid.energies());
}

DosEstimate exact_windowed_dos(const std::vector<double>& eigenvalues, const WindowSpec& w,
                               const std::vector<double>& energies) {
  DosEstimate out;
  out.energies = energies;
  out.values.assign(energies.size(), 0.0);
  out.window = w;
  out.normalization = static_cast<double>(eigenvalues.size());
  out.source = "exact";
  for (std::size_t j = 0; j < energies.size(); ++j)
    for (double ek : eigenvalues) out.values[j] += window_kernel(w, energies[j] - ek);
  return out;
}

double dos_error(const std::vector<double>& energies, const std::vector<double>& f, const std::vector<double>& g) {
  if (f.size() != energies.size() || g.size() != energies.size()) throw DimensionError("DOS lengths differ from the grid");
  const double ff = trapezoid_dot(energies, f, f), gg = trapezoid_dot(energies, g, g);
  if (!(ff > 0.0) || !(gg > 0.0)) throw DomainError("DOS error of a zero-norm function");
  const double eps = 1.0 - trapezoid_dot(energies, f, g) / std::sqrt(ff * gg);
  return std::clamp(eps, 0.0, 2.0);
}

double dos_error(const DosEstimate& f, const DosEstimate& reference) {
  if (f.energies.size() != reference.energies.size()) throw DimensionError("DOS estimates use different grids");
  for (std::size_t i = 0; i < f.energies.size(); ++i)
    if (std::abs(f.energies[i] - reference.energies[i]) > 1e-12 * (1.0 + std::abs(f.energies[i])))
      throw DimensionError("DOS estimates use different grids");
  return dos_error(f.energies, f.values, reference.values);
}

double white_noise_baseline(const DosEstimate& reference, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw DomainError("noise baseline needs at least one trial");
  std::vector<double> f(reference.values.size());
  double acc = 0.0;
  for (std::size_t r = 0; r < trials; ++r) {
    Engine rng = keyed_engine(seed, {r});
    std::normal_distribution<double> g;
    for (auto& v : f) v = g(rng);
    acc += dos_error(reference.energies, f, reference.values);
  }
  return acc / static_cast<double>(trials);
}

WindowSweep sweep_window_error(const DosEstimate& noisy,
                               const std::function<DosEstimate(const WindowSpec&)>& reference,
                               WindowKind kind, const std::vector<double>& sigmas) {
  if (sigmas.empty()) throw SpecError("window sweep needs at least one width");
  if (kind == WindowKind::none) throw SpecError("window sweep needs a windowed reference");
  WindowSweep out;
  out.sigmas = sigmas;
  std::vector<std::size_t> order(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    out.errors.push_back(dos_error(noisy, reference(WindowSpec{kind, sigmas[i]})));
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.errors[a] != out.errors[b] ? out.errors[a] < out.errors[b] : sigmas[a] < sigmas[b];
  });
  out.sigma_star = sigmas[order.front()];
  out.error_min = out.errors[order.front()];
  return out;
}

}  // namespace qdos::spectral
