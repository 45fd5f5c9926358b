#include "bosecycles/wavefunctions.hpp"

#include <cmath>
#include <numbers>

#include "bosecycles/errors.hpp"
#include "bosecycles/special_functions.hpp"

namespace bosecycles {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// delta = delta0 + k L with delta0 in [-L/2, L/2).
std::pair<double, double> split_period(double delta, double L) {
  const double k = std::floor(delta / L + 0.5);
  return {delta - k * L, k};
}

double shift_of(const CycleWaveParams& p, int i) {
  if (p.xbar.empty()) return 0.0;
  return reduce_shift(p.L * p.xbar[static_cast<std::size_t>(i)]);
}

cplx planewave_1d(int n, double L, double lambda, double b, double delta) {
  const double s = n * lambda * lambda / (2 * L * L);
  const int zmax = theta_cutoff(s) + 1;
  const auto [d0, k] = split_period(delta, L);
  cplx num = 0.0;
  double den = 0.0;
  for (int z = -zmax; z <= zmax; ++z) {
    const double zb = z + b;
    // e^{pi s b^2} cancels between num and sqrt(den) and keeps z = 0 at weight 1.
    const double w = std::exp(-kPi * s * (zb * zb - b * b));
    num += w * expi(2 * kPi * zb * d0 / L);
    den += w * w;
  }
  return num * expi(2 * kPi * b * k) / std::sqrt(L * den);
}

cplx gaussian_1d(int n, double L, double lambda, double b, double delta) {
  const double g = n * lambda * lambda;
  const auto [d0, k] = split_period(delta, L);

  const int znum = theta_cutoff(2 * L * L / g) + 1;
  cplx num = 0.0;
  for (int z = -znum; z <= znum; ++z) {
    const double r = d0 + L * z;
    num += std::exp(-2 * kPi * r * r / g) * expi(-2 * kPi * z * b);
  }

  const int zden = theta_cutoff(L * L / g);
  double den = 1.0, mass = 1.0;
  for (int z = zden; z >= 1; --z) {
    const double w = std::exp(-kPi * L * L * z * z / g);
    den += 2 * w * std::cos(2 * kPi * z * b);
    mass += 2 * w;
  }
  if (!(den > 1e-8 * mass))
    throw NumericError("cycle wave function: cosine-form denominator cancels (" + std::to_string(den) + " of " +
                       std::to_string(mass) + ")");
  return std::sqrt(2 / (std::sqrt(static_cast<double>(n)) * lambda)) * num * expi(2 * kPi * b * k) /
         std::sqrt(den);
}

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size() || a.empty()) throw ArgumentError(std::string(what) + ": dimension mismatch");
}

}  // namespace

void CycleWaveParams::validate() const {
  if (n < 1) throw ArgumentError("cycle length n must be >= 1");
  if (!(L > 0) || !(lambda > 0)) throw ArgumentError("L and lambda must be positive");
  if (y.empty()) throw ArgumentError("centre y must have at least one coordinate");
  if (!xbar.empty() && xbar.size() != y.size()) throw ArgumentError("xbar and y differ in dimension");
}

bool CycleWaveParams::shifted() const {
  for (double v : xbar)
    if (v != 0.0) return true;
  return false;
}

cplx psi_planewave_form(const CycleWaveParams& p, std::span<const double> x) {
  p.validate();
  require_same_size(p.y, x, "psi_planewave_form");
  cplx out = 1.0;
  for (int i = 0; i < p.d(); ++i)
    out *= planewave_1d(p.n, p.L, p.lambda, shift_of(p, i), x[static_cast<std::size_t>(i)] - p.y[static_cast<std::size_t>(i)]);
  return out;
}

double psi_gaussian_form(const CycleWaveParams& p, std::span<const double> x) {
  p.validate();
  require_same_size(p.y, x, "psi_gaussian_form");
  if (p.shifted()) throw ArgumentError("psi_gaussian_form takes no momentum shift; use psi_shifted");
  double out = 1.0;
  for (int i = 0; i < p.d(); ++i)
    out *= gaussian_1d(p.n, p.L, p.lambda, 0.0, x[static_cast<std::size_t>(i)] - p.y[static_cast<std::size_t>(i)]).real();
  return out;
}

cplx psi_shifted(const CycleWaveParams& p, std::span<const double> x) {
  p.validate();
  require_same_size(p.y, x, "psi_shifted");
  cplx out = 1.0;
  for (int i = 0; i < p.d(); ++i)
    out *= gaussian_1d(p.n, p.L, p.lambda, shift_of(p, i), x[static_cast<std::size_t>(i)] - p.y[static_cast<std::size_t>(i)]);
  return out;
}

double psi_infinite_volume(const CycleWaveParams& p, std::span<const double> x) {
  p.validate();
  require_same_size(p.y, x, "psi_infinite_volume");
  const double g = p.n * p.lambda * p.lambda;
  double r2 = 0.0;
  for (int i = 0; i < p.d(); ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - p.y[static_cast<std::size_t>(i)];
    r2 += dx * dx;
  }
  return std::pow(2 / std::sqrt(g), p.d() / 2.0) * std::exp(-2 * kPi * r2 / g);
}

cplx poisson_identity_lhs(double lambda, double L, std::span<const double> a, std::span<const double> x) {
  require_same_size(a, x, "poisson_identity_lhs");
  if (!(lambda > 0) || !(L > 0)) throw ArgumentError("lambda and L must be positive");
  const double s = lambda * lambda / (L * L);
  const int zmax = theta_cutoff(s) + 1;
  cplx out = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double z0 = -std::round(a[i]);
    const double x0 = split_period(x[i], L).first;  // e^{i 2pi z k} = 1
    cplx sum = 0.0;
    for (int j = -zmax; j <= zmax; ++j) {
      const double z = z0 + j;
      sum += std::exp(-kPi * s * (z + a[i]) * (z + a[i])) * expi(2 * kPi * z * x0 / L);
    }
    out *= sum / L;
  }
  return out;
}

cplx poisson_identity_rhs(double lambda, double L, std::span<const double> a, std::span<const double> x) {
  require_same_size(a, x, "poisson_identity_rhs");
  if (!(lambda > 0) || !(L > 0)) throw ArgumentError("lambda and L must be positive");
  const double s = L * L / (lambda * lambda);
  const int zmax = theta_cutoff(s) + 1;
  cplx out = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double z0 = -std::round(x[i] / L);
    cplx sum = 0.0;
    for (int j = -zmax; j <= zmax; ++j) {
      const double r = x[i] + L * (z0 + j);
      sum += std::exp(-kPi * r * r / (lambda * lambda)) * expi(-2 * kPi * a[i] * r / L);
    }
    out *= sum / lambda;
  }
  return out;
}

double normalization_1d(int n, double L, double lambda, double xbar, int points) {
  CycleWaveParams p{n, L, lambda, {0.0}, {xbar}};
  p.validate();
  if (points <= 0) {
    const int zmax = theta_cutoff(n * lambda * lambda / (2 * L * L)) + 1;
    points = 4 * zmax + 8;
  }
  const double b = shift_of(p, 0);
  double sum = 0.0;
  for (int j = 0; j < points; ++j) sum += std::norm(planewave_1d(n, L, lambda, b, L * j / points));
  return sum * L / points;
}

std::vector<WaveProfileRow> wave_profile(const CycleWaveParams& p, int axis, int points) {
  p.validate();
  if (axis < 0 || axis >= p.d()) throw ArgumentError("profile axis out of range");
  if (points < 1) throw ArgumentError("profile needs at least one point");
  std::vector<double> x = p.y;
  std::vector<WaveProfileRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    x[static_cast<std::size_t>(axis)] = p.L * j / points;
    const cplx v = psi_planewave_form(p, x);
    rows.push_back({x[static_cast<std::size_t>(axis)], v.real(), v.imag(), std::norm(v)});
  }
  return rows;
}

}  // namespace bosecycles
