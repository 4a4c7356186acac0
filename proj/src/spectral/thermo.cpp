#include "qdos/spectral/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qdos/common/errors.hpp"
#include "qdos/common/rng.hpp"

namespace qdos::spectral {

namespace {

// Trapezoid integrals of e^{-beta E - shift} g and E e^{-beta E - shift} g.
struct Moments {
  double shift = 0.0;
  double z = 0.0;
  double ez = 0.0;
};

Moments dos_moments(const DosEstimate& dos, double beta) {
  const auto& e = dos.energies;
  if (e.size() < 2) throw DimensionError("thermodynamics needs at least two energy points");
  Moments m;
  m.shift = -std::numeric_limits<double>::infinity();
  for (double x : e) m.shift = std::max(m.shift, -beta * x);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double h = 0.5 * (e[i + 1] - e[i]);
    const double a = std::exp(-beta * e[i] - m.shift) * dos.values[i];
    const double b = std::exp(-beta * e[i + 1] - m.shift) * dos.values[i + 1];
    m.z += h * (a + b);
    m.ez += h * (a * e[i] + b * e[i + 1]);
  }
  return m;
}

Moments spectrum_moments(const std::vector<double>& eig, double beta) {
  if (eig.empty()) throw DimensionError("empty spectrum");
  Moments m;
  m.shift = -std::numeric_limits<double>::infinity();
  for (double x : eig) m.shift = std::max(m.shift, -beta * x);
  for (double x : eig) {
    const double w = std::exp(-beta * x - m.shift);
    m.z += w;
    m.ez += w * x;
  }
  return m;
}

double log_z(const Moments& m) {
  if (!(m.z > 0.0)) throw DomainError("partition integral is not positive at this temperature");
  return m.shift + std::log(m.z);
}

double checked_exp(double log_value) {
  const double z = std::exp(log_value);
  if (!std::isfinite(z) || z == 0.0) throw DomainError("partition function overflows a double; use the log form");
  return z;
}

double mean_energy(const Moments& m) {
  if (!(m.z > 0.0)) throw DomainError("partition integral underflowed or is not positive");
  return m.ez / m.z;
}

double beta_of(const std::string& axis, double x) {
  if (axis == "beta") return x;
  if (axis == "T") {
    if (!(x > 0.0)) throw DomainError("temperature must be positive");
    return 1.0 / x;
  }
  throw SpecError("unknown thermodynamic axis '" + axis + "'");
}

template <class Fn>
ThermoResult curve(const std::string& quantity, const std::string& axis, const std::vector<double>& x, Fn moments) {
  if (quantity != "Z" && quantity != "logZ" && quantity != "U") throw SpecError("unknown quantity '" + quantity + "'");
  ThermoResult r{axis, quantity, x, {}};
  for (double xi : x) {
    const Moments m = moments(beta_of(axis, xi));
    if (quantity == "Z") r.values.push_back(checked_exp(log_z(m)));
    else if (quantity == "logZ") r.values.push_back(log_z(m));
    else r.values.push_back(mean_energy(m));
  }
  return r;
}

// ---- closed-form transforms ----

// int_0^h x^j e^{cx} dx for j = 0..deg
std::vector<cplx> exp_moments(cplx c, double h, int deg) {
  std::vector<cplx> out(static_cast<std::size_t>(deg + 1));
  if (std::abs(c) * h < 1.0) {
    for (int j = 0; j <= deg; ++j) {
      cplx acc = 0.0, term = 1.0;  // term = (ch)^n / n!
      for (int n = 0; n < 40; ++n) {
        acc += term / static_cast<double>(n + j + 1);
        term *= c * h / static_cast<double>(n + 1);
        if (std::abs(term) < 1e-18) break;
      }
      out[static_cast<std::size_t>(j)] = acc * std::pow(h, j + 1);
    }
    return out;
  }
  const cplx ech = std::exp(c * h);
  out[0] = (ech - 1.0) / c;
  for (int j = 1; j <= deg; ++j)
    out[static_cast<std::size_t>(j)] = (std::pow(h, j) * ech - static_cast<double>(j) * out[static_cast<std::size_t>(j - 1)]) / c;
  return out;
}

// int_l^{l+h} q(x) E^p e^{cE} dE with E = l + x and q given by coefficients in x.
cplx piece(std::vector<double> q, int p, double l, double h, cplx c) {
  if (p == 1) {
    std::vector<double> r(q.size() + 1, 0.0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      r[j] += l * q[j];
      r[j + 1] += q[j];
    }
    q = std::move(r);
  }
  const auto mom = exp_moments(c, h, static_cast<int>(q.size()) - 1);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) acc += q[j] * mom[j];
  return std::exp(c * l) * acc;
}

}  // namespace

double log_canonical_partition(const DosEstimate& dos, double beta) { return log_z(dos_moments(dos, beta)); }
double canonical_partition(const DosEstimate& dos, double beta) { return checked_exp(log_canonical_partition(dos, beta)); }
double internal_energy(const DosEstimate& dos, double beta) { return mean_energy(dos_moments(dos, beta)); }

double log_canonical_partition(const std::vector<double>& eig, double beta) { return log_z(spectrum_moments(eig, beta)); }
double canonical_partition(const std::vector<double>& eig, double beta) { return checked_exp(log_canonical_partition(eig, beta)); }
double internal_energy(const std::vector<double>& eig, double beta) { return mean_energy(spectrum_moments(eig, beta)); }

double grand_canonical_partition(const std::map<int, double>& z_per_m, int n_modes, double beta, double mu) {
  double acc = 0.0;
  for (int M = 0; M <= n_modes; ++M) {
    const auto it = z_per_m.find(M);
    if (it == z_per_m.end()) throw ValidationError("missing canonical partition function for M = " + std::to_string(M));
    acc += std::exp(beta * mu * M) * it->second;
  }
  if (z_per_m.size() != static_cast<std::size_t>(n_modes + 1))
    throw ValidationError("partition functions supplied for particle numbers outside 0..n");
  return acc;
}

ThermoResult thermo_curve(const DosEstimate& dos, const std::string& quantity, const std::string& axis,
                          const std::vector<double>& x) {
  return curve(quantity, axis, x, [&](double b) { return dos_moments(dos, b); });
}

ThermoResult thermo_curve(const std::vector<double>& eig, const std::string& quantity, const std::string& axis,
                          const std::vector<double>& x) {
  return curve(quantity, axis, x, [&](double b) { return spectrum_moments(eig, b); });
}

EchoSource trace_source(std::vector<double> eigenvalues) {
  return [e = std::move(eigenvalues)](double t) {
    cplx acc = 0.0;
    for (double x : e) acc += std::polar(1.0, -x * t);
    return acc * fdos::kInvSqrt2Pi;
  };
}

DosEstimate mc_windowed_dos(const EchoSource& source, const WindowSpec& w, const std::vector<double>& energies,
                            std::size_t n_draws, std::uint64_t seed) {
  w.validate();
  if (w.kind == WindowKind::none) throw SpecError("Monte-Carlo reconstruction needs a normalizable window");
  if (n_draws == 0) throw DomainError("need at least one draw");
  // int W dt
  const double mass = w.kind == WindowKind::gaussian ? w.sigma : 2.0 * fdos::kInvSqrt2Pi / w.gamma();
  std::vector<double> acc(energies.size(), 0.0);
  Engine rng = keyed_engine(seed, {0x6d63});
  std::normal_distribution<double> normal(0.0, w.kind == WindowKind::gaussian ? w.sigma : 1.0);
  std::exponential_distribution<double> expo(w.kind == WindowKind::exponential ? w.gamma() : 1.0);
  std::bernoulli_distribution coin;
  for (std::size_t i = 0; i < n_draws; ++i) {
    double t;
    if (w.kind == WindowKind::gaussian) {
      t = normal(rng);
    } else {
      t = expo(rng);
      if (coin(rng)) t = -t;
    }
    const cplx g = t < 0.0 ? std::conj(source(-t)) : source(t);
    for (std::size_t j = 0; j < energies.size(); ++j) acc[j] += (std::polar(1.0, energies[j] * t) * g).real();
  }
  DosEstimate out;
  out.energies = energies;
  out.values.resize(energies.size());
  out.window = w;
  out.source = "monte-carlo";
  for (std::size_t j = 0; j < energies.size(); ++j) out.values[j] = mass * acc[j] / static_cast<double>(n_draws);
  out.normalization = source(0.0).real() / fdos::kInvSqrt2Pi;
  return out;
}

cplx thermo_transform(ThermoFunction f, double beta, double e_lo, double e_hi, double margin, double t) {
  const int p = f == ThermoFunction::energy_boltzmann ? 1 : 0;
  const cplx c(-beta, t);
  const double m3 = std::pow(margin, 3), m4 = m3 * margin, m5 = m4 * margin;
  // smoothstep S(x/m) = 10u^3 - 15u^4 + 6u^5 rising over the left margin,
  // 1 - S(x/m) falling over the right one
  const std::vector<double> rise{0.0, 0.0, 0.0, 10.0 / m3, -15.0 / m4, 6.0 / m5};
  const std::vector<double> fall{1.0, 0.0, 0.0, -10.0 / m3, 15.0 / m4, -6.0 / m5};
  cplx acc = piece(rise, p, e_lo - margin, margin, c);
  acc += piece({1.0}, p, e_lo, e_hi - e_lo, c);
  acc += piece(fall, p, e_hi, margin, c);
  return acc * fdos::kInvSqrt2Pi;
}

ParsevalResult parseval_estimate(const EchoSource& source, ThermoFunction f, double beta, double e_lo, double e_hi,
                                 std::size_t n_draws, std::uint64_t seed, const ParsevalOptions& opt) {
  if (!(e_hi > e_lo) || !std::isfinite(e_lo) || !std::isfinite(e_hi))
    throw SpecError("Parseval estimate needs a finite support interval");
  if (!(opt.margin > 0.0))
    throw SpecError("transform of a sharply truncated function is not absolutely integrable; use a positive margin");
  if (n_draws == 0) throw DomainError("need at least one draw");
  const double width = e_hi - e_lo + 2.0 * opt.margin;
  const double t_cut = opt.t_cut > 0.0 ? opt.t_cut : 250.0 / opt.margin;
  const double step = opt.table_step > 0.0 ? opt.table_step : 0.1 / width;
  const auto cells = static_cast<std::size_t>(std::ceil(t_cut / step));

  std::vector<double> node(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    node[i] = std::abs(thermo_transform(f, beta, e_lo, e_hi, opt.margin, static_cast<double>(i) * step));
  std::vector<double> mass(cells);
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) total += mass[i] = 0.5 * step * (node[i] + node[i + 1]);

  Engine rng = keyed_engine(seed, {0x7061727365});
  std::discrete_distribution<std::size_t> pick(mass.begin(), mass.end());
  std::uniform_real_distribution<double> unit;
  std::bernoulli_distribution coin;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    const std::size_t cell = pick(rng);
    double t = (static_cast<double>(cell) + unit(rng)) * step;
    const double density = mass[cell] / (step * 2.0 * total);
    if (coin(rng)) t = -t;
    const cplx g = t < 0.0 ? std::conj(source(-t)) : source(t);
    const double w = (thermo_transform(f, beta, e_lo, e_hi, opt.margin, t) * g).real() / density;
    sum += w;
    sum2 += w * w;
  }
  ParsevalResult r;
  const double n = static_cast<double>(n_draws);
  r.value = sum / n;
  r.std_error = std::sqrt(std::max(0.0, sum2 / n - r.value * r.value) / n);
  r.norm = 2.0 * total;
  r.t_cut = t_cut;
  r.n_draws = n_draws;
  return r;
}

}  // namespace qdos::spectral
