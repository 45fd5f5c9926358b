#include "bosecycles/potentials.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bosecycles/errors.hpp"
#include "bosecycles/special_functions.hpp"
#include "bosecycles/thermo.hpp"

namespace bosecycles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kImageTolerance = 1e-10;
constexpr long kMaxImages = 20'000'000;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

// Surface area of the unit sphere in R^m.
double sphere_area(int m) { return 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m); }

double zeta_half(int d) {
  if (d < 3) throw UnsupportedError("bounds involving zeta(d/2) need d >= 3");
  return riemann_zeta(0.5 * d);
}

// Adaptive Gauss-Kronrod over consecutive breakpoints.
template <class F>
double integrate(F&& f, std::vector<double> points, double rel_tol, double abs_floor, const char* what) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] - points[i] <= 0.0) continue;
    double err = 0.0, piece_l1 = 0.0;
    total += Kronrod::integrate(f, points[i], points[i + 1], 12, rel_tol, &err, &piece_l1);
    error += err;
    l1 += piece_l1;
  }
  // oscillatory integrands are judged against the L1 norm, not the cancelled sum
  if (!(error <= std::max(1e3 * rel_tol * l1, abs_floor))) {
    std::ostringstream msg;
    msg << what << ": quadrature error estimate " << error << " for value " << total;
    throw NumericError(msg.str());
  }
  return total;
}

void require_flags(const PairPotential& pot, const char* what) {
  if (!pot.positive || !pot.positive_type) {
    throw UnsupportedError(std::string(what) + " requires a potential that is both positive and of positive type (" +
                           pot.kind + ")");
  }
}

double bessel_j(double nu, double x) { return std::cyl_bessel_j(nu, x); }

// Radial Fourier transform of f supported in [0, R].
double radial_fourier(const std::function<double(double)>& f, double R, int d, double k, double rel_tol,
                      double abs_floor, std::vector<double> breaks = {}) {
  breaks.push_back(0.0);
  breaks.push_back(R);
  if (k > 0.0) {
    // split at every few oscillations
    const int pieces = std::min(2000, static_cast<int>(std::ceil(4.0 * k * R)));
    for (int i = 1; i < pieces; ++i) breaks.push_back(R * i / pieces);
  }
  std::vector<double> clipped;
  for (double b : breaks) {
    if (b >= 0.0 && b <= R) clipped.push_back(b);
  }
  if (k == 0.0) {
    if (d == 1) return 2.0 * integrate(f, clipped, rel_tol, abs_floor, "fourier transform");
    const double area = sphere_area(d);
    return area * integrate([&](double r) { return std::pow(r, d - 1) * f(r); }, clipped, rel_tol, abs_floor,
                            "fourier transform");
  }
  if (d == 1) {
    return 2.0 * integrate([&](double r) { return f(r) * std::cos(2.0 * kPi * k * r); }, clipped, rel_tol,
                           abs_floor, "fourier transform");
  }
  const double nu = 0.5 * d - 1.0;
  const double integral = integrate(
      [&](double r) { return f(r) * bessel_j(nu, 2.0 * kPi * k * r) * std::pow(r, 0.5 * d); }, clipped, rel_tol,
      abs_floor, "fourier transform");
  return 2.0 * kPi * std::pow(k, 1.0 - 0.5 * d) * integral;
}

}  // namespace

PairPotential gaussian_potential(double g, double sigma, int d) {
  if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("gaussian potential: g must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian potential: sigma must be positive");
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  PairPotential pot;
  pot.d = d;
  pot.kind = "gaussian";
  std::ostringstream desc;
  desc << "gaussian g=" << g << " sigma=" << sigma;
  pot.description = desc.str();
  const double scale = std::pow(sigma, d);
  pot.u = [g, sigma](double r) { return g * std::exp(-kPi * r * r / (sigma * sigma)); };
  pot.uhat = [g, sigma, scale](double k) { return g * scale * std::exp(-kPi * sigma * sigma * k * k); };
  pot.u0 = g;
  pot.uhat0 = g * scale;
  pot.norm1 = g * scale;
  pot.tail = {TailKind::gaussian, sigma, g, std::numeric_limits<double>::infinity()};
  pot.positive = true;
  pot.positive_type = true;
  return pot;
}

PairPotential autocorrelation_potential(std::function<double(double)> v, double support, int d,
                                        const AutocorrelationOptions& options) {
  if (!(support > 0.0) || !std::isfinite(support)) throw DomainError("autocorrelation: support must be positive");
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  const double R = support;
  for (int i = 0; i <= 200; ++i) {
    const double value = v(R * i / 200.0);
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw DomainError("autocorrelation: v must be nonnegative and finite on its support");
    }
  }
  auto vv = [v, R](double r) { return r <= R ? v(r) : 0.0; };
  const double tol = options.rel_tol;

  // u(0) = int v^2 and int v fix the absolute error floors
  const double v_int = radial_fourier(vv, R, d, 0.0, tol, 0.0);
  const double v2_int = radial_fourier([vv](double r) { return vv(r) * vv(r); }, R, d, 0.0, tol, 0.0);
  if (!(v_int > 0.0)) throw DomainError("autocorrelation: v must not vanish identically");
  const double floor_u = 1e-13 * v2_int;

  std::function<double(double)> u;
  if (d == 1) {
    u = [vv, R, tol, floor_u](double x) {
      x = std::abs(x);
      if (x >= 2.0 * R) return 0.0;
      auto f = [&](double y) { return vv(std::abs(x + y)) * vv(std::abs(y)); };
      return integrate(f, {-R, R - x, 0.0, -x}, tol, floor_u, "autocorrelation");
    };
  } else {
    const double area = sphere_area(d - 1);
    u = [vv, R, d, area, tol, floor_u](double x) {
      x = std::abs(x);
      if (x >= 2.0 * R) return 0.0;
      auto inner = [&](double r) {
        if (x == 0.0) return std::pow(r, d - 1) * vv(r) * vv(r) * sphere_area(d) / area;
        auto g = [&](double theta) {
          const double s = std::sqrt(std::max(0.0, r * r + x * x + 2.0 * r * x * std::cos(theta)));
          return vv(s) * std::pow(std::sin(theta), d - 2);
        };
        std::vector<double> pts = {0.0, kPi};
        const double c = (R * R - r * r - x * x) / (2.0 * r * x);
        if (c > -1.0 && c < 1.0) pts.push_back(std::acos(c));
        return std::pow(r, d - 1) * vv(r) * integrate(g, pts, tol, 1e-3 * floor_u, "autocorrelation angle");
      };
      return area * integrate(inner, {0.0, R, std::abs(R - x)}, tol, floor_u, "autocorrelation radius");
    };
  }

  PairPotential pot;
  pot.d = d;
  pot.kind = "autocorrelation";
  std::ostringstream desc;
  desc << "autocorrelation support=" << R;
  pot.description = desc.str();
  pot.u = u;
  pot.uhat = [vv, R, d, tol, v_int](double k) {
    const double vhat = radial_fourier(vv, R, d, std::abs(k), tol, 1e-13 * v_int);
    return vhat * vhat;
  };
  pot.u0 = v2_int;
  pot.uhat0 = v_int * v_int;
  pot.norm1 = v_int * v_int;
  pot.tail = {TailKind::compact, 2.0 * R, 0.0, std::numeric_limits<double>::infinity()};
  pot.positive = true;
  pot.positive_type = true;
  return pot;
}

PairPotential tabulated_potential(std::vector<double> r, std::vector<double> values, int d) {
  if (r.size() != values.size() || r.size() < 2) throw ArgumentError("tabulated potential needs >= 2 (r, u) rows");
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(values[i])) throw DomainError("tabulated potential: non-finite entry");
    if (i > 0 && !(r[i] > r[i - 1])) throw ArgumentError("tabulated potential: r must increase strictly");
  }
  if (r.front() < 0.0) throw DomainError("tabulated potential: r must be >= 0");
  if (r.front() > 0.0) {
    r.insert(r.begin(), 0.0);
    values.insert(values.begin(), values.front());
  }
  const double R = r.back();
  auto u = [r, values](double x) {
    x = std::abs(x);
    if (x >= r.back()) return x == r.back() ? values.back() : 0.0;
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin());
    const double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
  };

  PairPotential pot;
  pot.d = d;
  pot.kind = "tabulated";
  std::ostringstream desc;
  desc << "tabulated rows=" << r.size() << " r_max=" << R;
  pot.description = desc.str();
  pot.u = u;
  const auto breaks = r;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double floor = 1e-13 * scale * std::pow(R, d);
  pot.uhat = [u, R, d, breaks, floor](double k) { return radial_fourier(u, R, d, std::abs(k), 1e-10, floor, breaks); };
  pot.u0 = values.front();
  pot.uhat0 = radial_fourier(u, R, d, 0.0, 1e-10, floor, breaks);
  // |u| has extra kinks where a segment crosses zero
  std::vector<double> abs_breaks = breaks;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (values[i - 1] * values[i] < 0.0) {
      abs_breaks.push_back(r[i - 1] + (r[i] - r[i - 1]) * values[i - 1] / (values[i - 1] - values[i]));
    }
  }
  pot.norm1 = radial_fourier([u](double x) { return std::abs(u(x)); }, R, d, 0.0, 1e-10, floor, abs_breaks);
  pot.tail = {TailKind::compact, R, scale, std::numeric_limits<double>::infinity()};
  pot.positive = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  double min_uhat = pot.uhat0;
  double dr = R;
  for (std::size_t i = 1; i < r.size(); ++i) dr = std::min(dr, r[i] - r[i - 1]);
  const double k_max = std::min(4.0 / dr, 200.0 / R);
  for (int i = 1; i <= 200; ++i) min_uhat = std::min(min_uhat, pot.uhat(k_max * i / 200.0));
  pot.positive_type = min_uhat >= -1e-10 * std::abs(pot.uhat0);
  return pot;
}

double periodize(const PairPotential& pot, double L, std::span<const double> x) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("periodize: L must be positive");
  const int d = pot.d;
  if (static_cast<int>(x.size()) != d) throw ArgumentError("periodize: point must have d components");
  const auto& tail = pot.tail;
  if (tail.kind == TailKind::unknown || !(tail.eta > 0.0)) {
    throw ArgumentError("periodize: the decay exponent eta of the potential is unknown; refusing to sum images");
  }
  std::vector<double> y(d);
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) {
    y[i] = x[i] - L * std::round(x[i] / L);
    r2 += y[i] * y[i];
  }
  const double ref = std::max({std::abs(pot.u(std::sqrt(r2))), std::abs(pot.norm1) / std::pow(L, d),
                               std::numeric_limits<double>::min()});
  const double target = kImageTolerance * ref;

  double r_cut = 0.0;
  switch (tail.kind) {
    case TailKind::compact:
      r_cut = tail.scale;
      break;
    case TailKind::gaussian: {
      r_cut = tail.scale;
      // images in the shell beyond r_cut are bounded by a lattice point count
      while (tail.amplitude * std::exp(-kPi * r_cut * r_cut / (tail.scale * tail.scale)) *
                 std::pow(2.0 * r_cut / L + 3.0, d) >
             target) {
        r_cut *= 1.1;
      }
      break;
    }
    case TailKind::power_law: {
      const double bound = 2.0 * tail.amplitude * sphere_area(d) / (tail.eta * std::pow(L, d) * target);
      r_cut = std::max(tail.scale, std::pow(bound, 1.0 / tail.eta)) + std::sqrt(static_cast<double>(d)) * L;
      break;
    }
    case TailKind::unknown:
      break;
  }
  const double Zd = std::ceil(r_cut / L + 0.5);
  const double count = std::pow(2.0 * Zd + 1.0, d);
  if (!(count <= static_cast<double>(kMaxImages))) {
    std::ostringstream msg;
    msg << "periodize: " << count << " images needed for a 1e-10 tail (cap " << kMaxImages << ")";
    throw NumericError(msg.str());
  }

  const long Z = static_cast<long>(Zd);
  std::vector<long> z(d, -Z);
  double total = 0.0;
  while (true) {
    double s2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = y[i] + L * z[i];
      s2 += c * c;
    }
    if (tail.kind != TailKind::compact || s2 <= r_cut * r_cut) total += pot.u(std::sqrt(s2));
    int i = 0;
    for (; i < d; ++i) {
      if (++z[i] <= Z) break;
      z[i] = -Z;
    }
    if (i == d) break;
  }
  return total;
}

double alpha_nk(int n, int k, double lambda) {
  if (k < 1 || k > n - 1) throw DomainError("alpha_nk: k must satisfy 1 <= k <= n-1");
  if (!(lambda > 0.0)) throw DomainError("alpha_nk: lambda must be positive");
  return (1.0 / k + 1.0 / (n - k)) / (lambda * lambda);
}

MeanInteractionBound mean_interaction_upper(int n, double L, double beta, const PairPotential& pot) {
  if (n < 1) throw DomainError("cycle length must be >= 1");
  if (!(L > 0.0)) throw DomainError("L must be positive");
  const int d = pot.d;
  const double lambda = thermal_wavelength(beta);
  const double pref = 0.5 * pot.norm1 * n;
  const double Ld = std::pow(L, d);
  MeanInteractionBound out;
  out.simplified = pref * ((n - 1) / Ld + std::pow(2.0, 0.5 * d) * zeta_half(d) / std::pow(lambda, d));
  double exact = 0.0, k_sum = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    const double a = alpha_nk(n, k, lambda);
    const double ad = std::pow(a, 0.5 * d);
    k_sum += ad;
    exact += std::pow(std::sqrt(a) + 1.0 / L, d);
  }
  out.exact = pref * exact;
  out.k_sum = pref * k_sum;
  out.o1 = out.exact - pref * ((n - 1) / Ld + k_sum);
  return out;
}

WeightFactorBounds phi_nn_bounds(int n, double L, double beta, const PairPotential& pot) {
  require_flags(pot, "phi_nn_bounds");
  if (n < 1) throw DomainError("cycle length must be >= 1");
  const int d = pot.d;
  const double lambda = thermal_wavelength(beta);
  const std::vector<double> origin(d, 0.0);
  const double uL0 = periodize(pot, L, origin);
  WeightFactorBounds out;
  out.log_lower = -std::pow(2.0, 0.5 * d - 1.0) * zeta_half(d) * beta * pot.norm1 * n / std::pow(lambda, d);
  out.log_upper = 0.5 * beta * uL0 * n;
  out.factor = {std::exp(out.log_lower), std::exp(out.log_upper), "Phi^n_n / q_n"};
  return out;
}

FreeEnergyBounds free_energy_bounds(double rho, double beta, const PairPotential& pot) {
  const int d = pot.d;
  double C = 0.0;
  if (pot.superstability) {
    C = *pot.superstability;
  } else if (pot.positive_type) {
    C = 0.5 * pot.uhat0;
  } else {
    throw UnsupportedError("free_energy_bounds: potential is not of positive type; supply C[u] explicitly");
  }
  const double lambda_d = std::pow(thermal_wavelength(beta), d);
  FreeEnergyBounds out;
  out.superstability = C;
  out.f0 = ideal_free_energy_density(rho, beta, d);
  const double lower = C * rho * rho - 0.5 * pot.u0 * rho + out.f0;
  const double upper = 0.5 * pot.norm1 * rho * rho +
                       std::pow(2.0, 0.5 * d - 1.0) * zeta_half(d) * pot.norm1 * rho / lambda_d + out.f0;
  out.f = {lower, upper, "f(rho, beta)"};
  if (pot.positive && pot.positive_type) {
    const double shift = 0.5 * rho * rho * pot.norm1;
    out.f_tilde = BoundPair{lower - shift, upper - shift, "f(rho, beta) - rho^2 |u|_1 / 2"};
  }
  return out;
}

WeightSequence dcp_bound_weights(const SystemParams& params, const PairPotential& pot, bool upper) {
  if (params.d() != pot.d) throw ArgumentError("potential and system dimensions differ");
  const auto per_one = phi_nn_bounds(1, params.L(), params.beta(), pot);
  const double log_c = upper ? per_one.log_upper : per_one.log_lower;
  return WeightSequence::ideal(params).scaled_exponentially(
      log_c, upper ? WeightProvenance::dcp_upper : WeightProvenance::dcp_lower);
}

DcpSandwich dcp_partition_sandwich(int N, double L, double beta, const PairPotential& pot, int random_surrogates,
                                   std::uint64_t seed) {
  require_flags(pot, "dcp_partition_sandwich");
  const int d = pot.d;
  const auto params = SystemParams::from_box(d, L, N, beta);
  const double lambda = params.lambda();
  const std::vector<double> origin(d, 0.0);

  DcpSandwich out;
  out.bounds.lower = -std::pow(2.0, 0.5 * d - 1.0) * zeta_half(d) * beta * pot.uhat0 * N / std::pow(lambda, d);
  out.bounds.upper = 0.5 * beta * periodize(pot, L, origin) * N;
  out.bounds.context = "ln Q~dcp - ln Q0";

  const auto ideal = WeightSequence::ideal(params);
  const double logQ0 = build_partition_table(params, ideal).logQ[N];
  out.recursion_lower = build_partition_table(params, dcp_bound_weights(params, pot, false)).logQ[N] - logQ0;
  out.recursion_upper = build_partition_table(params, dcp_bound_weights(params, pot, true)).logQ[N] - logQ0;

  const double lo = out.bounds.lower / N, hi = out.bounds.upper / N;
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial <= random_surrogates; ++trial) {
    std::vector<double> logs = ideal.log_values();
    for (int n = 1; n <= N; ++n) {
      const double t = trial == 0 ? 0.5 : static_cast<double>(rng() >> 11) * 0x1.0p-53;
      logs[n - 1] += n * (lo + t * (hi - lo));
    }
    const WeightSequence w(std::move(logs), WeightProvenance::custom);
    out.surrogates.push_back(build_partition_table(params, w).logQ[N] - logQ0);
  }

  const double slack = 1e-9 * std::max({1.0, std::abs(out.bounds.lower), std::abs(out.bounds.upper)});
  auto within = [&](double v) { return v >= out.bounds.lower - slack && v <= out.bounds.upper + slack; };
  out.inside = within(out.recursion_lower) && within(out.recursion_upper) &&
               out.recursion_lower <= out.recursion_upper + slack &&
               std::all_of(out.surrogates.begin(), out.surrogates.end(), within);
  return out;
}

ConditionReport validate_conditions(const PairPotential& pot, const ConditionGrid& grid) {
  const int d = pot.d;
  const double scale = pot.tail.scale > 0.0 ? pot.tail.scale : 1.0;
  double r_max = grid.r_max;
  if (r_max <= 0.0) {
    switch (pot.tail.kind) {
      case TailKind::compact: r_max = 1.5 * scale; break;
      case TailKind::gaussian: r_max = 3.0 * scale; break;
      case TailKind::power_law: r_max = 50.0 * scale; break;
      case TailKind::unknown: r_max = 10.0 * scale; break;
    }
  }
  const double k_max = grid.k_max > 0.0 ? grid.k_max : 6.0 / scale;
  const int points = std::max(20, grid.points);

  ConditionReport rep;
  rep.min_u = std::numeric_limits<double>::infinity();
  rep.min_uhat = std::numeric_limits<double>::infinity();
  std::vector<double> rs, us;
  for (int i = 0; i <= points; ++i) {
    const double r = r_max * i / points;
    const double value = pot.u(r);
    rep.min_u = std::min(rep.min_u, value);
    rs.push_back(r);
    us.push_back(value);
  }
  for (int i = 0; i <= points; ++i) rep.min_uhat = std::min(rep.min_uhat, pot.uhat(k_max * i / points));
  rep.positive = rep.min_u >= -1e-14 * std::abs(pot.u0);
  rep.positive_type = rep.min_uhat >= -1e-10 * std::abs(pot.uhat0);

  // log-log slope over the outer half where u is nonzero
  std::vector<double> lx, ly;
  for (std::size_t i = rs.size() / 2; i < rs.size(); ++i) {
    if (us[i] != 0.0 && rs[i] > 0.0) {
      lx.push_back(std::log(rs[i]));
      ly.push_back(std::log(std::abs(us[i])));
    }
  }
  bool vanishes_outside = pot.tail.kind == TailKind::compact && r_max > pot.tail.scale;
  for (std::size_t i = 0; i < rs.size() && vanishes_outside; ++i) {
    if (rs[i] > pot.tail.scale && us[i] != 0.0) vanishes_outside = false;
  }
  if (vanishes_outside || lx.size() < 2) {
    rep.tail_exponent = -std::numeric_limits<double>::infinity();
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    rep.tail_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  rep.decay_ok = rep.tail_exponent < -d;

  auto weighted = [&](double k) { return (d == 1 ? 2.0 : sphere_area(d) * std::pow(k, d - 1)) * std::abs(pot.uhat(k)); };
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < points; ++i) {
    const double a = k_max * i / points, b = k_max * (i + 1) / points;
    const double part = 0.5 * (b - a) * (weighted(a) + weighted(b));
    (i < points / 2 ? head : tail) += part;
  }
  rep.uhat_integral = head + tail;
  rep.uhat_tail_fraction = rep.uhat_integral > 0.0 ? tail / rep.uhat_integral : 0.0;
  return rep;
}

PairPotential parse_potential_shorthand(const std::string& spec, int d) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (kind != "gaussian" || colon == std::string::npos) {
    throw ArgumentError("potential shorthand must look like gaussian:g,sigma (got '" + spec + "')");
  }
  std::istringstream in(spec.substr(colon + 1));
  double g = 0.0, sigma = 0.0;
  char comma = 0;
  if (!(in >> g >> comma >> sigma) || comma != ',' || !(in >> std::ws).eof()) {
    throw ArgumentError("potential shorthand must look like gaussian:g,sigma (got '" + spec + "')");
  }
  return gaussian_potential(g, sigma, d);
}

}  // namespace bosecycles
