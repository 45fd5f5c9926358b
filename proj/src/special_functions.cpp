#include "bosecycles/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bosecycles/errors.hpp"
#include "bosecycles/system.hpp"

namespace bosecycles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// B_2, B_4, ..., B_16
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,   -1.0 / 30.0,       1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0,  -691.0 / 2730.0,   7.0 / 6.0,  -3617.0 / 510.0};

// Below this index the Euler-Maclaurin tail starts; earlier terms are summed.
constexpr long kEulerMaclaurinStart = 16;

void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

bool is_integer(double s) { return std::abs(s - std::round(s)) < 1e-12; }

// E_s(y), y <= 1, integer s = n >= 1.
double expint_series_integer(int n, double y) {
  const int nm1 = n - 1;
  double ans = (nm1 != 0) ? 1.0 / nm1 : -std::log(y) - kEulerGamma;
  double fact = 1.0;
  for (int i = 1; i < 500; ++i) {
    fact *= -y / i;
    double del;
    if (i != nm1) {
      del = -fact / (i - nm1);
    } else {
      double psi = -kEulerGamma;
      for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(y) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * 1e-17) break;
  }
  return ans;
}

// E_s(y), y <= 1, non-integer s.
double expint_series_real(double s, double y) {
  double sum = 0.0;
  double power = 1.0;  // (-y)^k / k!
  for (int k = 0; k < 500; ++k) {
    if (k > 0) power *= -y / k;
    const double del = power / (1.0 - s + k);
    sum += del;
    if (k > 2 && std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return std::tgamma(1.0 - s) * std::pow(y, s - 1.0) - sum;
}

// E_s(y), y > 1, modified Lentz evaluation of the Legendre continued fraction.
double expint_continued_fraction(double s, double y) {
  constexpr double kTiny = 1e-300;
  double b = y + s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (s - 1.0 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-y);
  }
  throw NumericError("expint_e: continued fraction failed to converge");
}

// d^m/dx^m [x^{-s} exp(-t x)] at x.
double tail_derivative(double s, double t, double x, int m) {
  double total = 0.0;
  double binom = 1.0;
  double rising = 1.0;  // s (s+1) ... (s+j-1)
  for (int j = 0; j <= m; ++j) {
    if (j > 0) {
      binom = binom * (m - j + 1) / j;
      rising *= s + j - 1;
    }
    const double power_part = ((j % 2) ? -1.0 : 1.0) * rising * std::pow(x, -s - j);
    const double exp_part = std::pow(-t, m - j);
    total += binom * power_part * exp_part;
  }
  return total * std::exp(-t * x);
}

double direct_tail(double s, double t, long m) {
  double sum = 0.0;
  for (long n = m; n < m + 100000000L; ++n) {
    const double term = std::exp(-t * n - s * std::log(static_cast<double>(n)));
    sum += term;
    if (term <= 1e-18 * sum || term == 0.0) return sum;
  }
  throw NumericError("bose_tail: direct summation did not converge");
}

}  // namespace

double thermal_wavelength(double beta) {
  require_positive(beta, "inverse temperature beta");
  return std::sqrt(2.0 * kPi * beta);
}

int theta_cutoff(double a) {
  return static_cast<int>(std::ceil(std::sqrt(40.0 / (kPi * a)))) + 1;
}

double theta1d_direct(double a) {
  require_positive(a, "theta argument a");
  const int zmax = theta_cutoff(a);
  double sum = 0.0;
  for (int z = zmax; z >= 1; --z) sum += std::exp(-kPi * a * z * z);
  return 1.0 + 2.0 * sum;
}

double theta1d_dual(double a) {
  require_positive(a, "theta argument a");
  return theta1d_direct(1.0 / a) / std::sqrt(a);
}

double theta1d(double a) {
  require_positive(a, "theta argument a");
  return a >= 1.0 ? theta1d_direct(a) : theta1d_dual(a);
}

double theta1d_excess(double a) {
  require_positive(a, "theta argument a");
  if (a < 1.0) return theta1d_dual(a) - 1.0;
  const int zmax = theta_cutoff(a);
  double sum = 0.0;
  for (int z = zmax; z >= 1; --z) sum += std::exp(-kPi * a * z * z);
  return 2.0 * sum;
}

double reduce_shift(double s) {
  if (!std::isfinite(s)) throw DomainError("shift must be finite");
  double r = s - std::round(s);
  if (r < -0.5) r += 1.0;
  if (r > 0.5) r -= 1.0;
  return r;
}

double theta1d_shifted_direct(double a, double s) {
  require_positive(a, "theta argument a");
  const double r = reduce_shift(s);
  const int zmax = theta_cutoff(a) + 1;
  double sum = 0.0;
  for (int k = zmax; k >= 1; --k) {
    sum += std::exp(-kPi * a * (k + r) * (k + r));
    sum += std::exp(-kPi * a * (-k + r) * (-k + r));
  }
  return sum + std::exp(-kPi * a * r * r);
}

double theta1d_shifted_cosine(double a, double s) {
  require_positive(a, "theta argument a");
  const double r = reduce_shift(s);
  const double inv = 1.0 / a;
  const int zmax = theta_cutoff(inv);
  double sum = 0.0;
  for (int z = zmax; z >= 1; --z) {
    sum += std::exp(-kPi * inv * z * z) * std::cos(2.0 * kPi * r * z);
  }
  return (1.0 + 2.0 * sum) / std::sqrt(a);
}

double theta1d_shifted(double a, double s) {
  require_positive(a, "theta argument a");
  return a >= 1.0 ? theta1d_shifted_direct(a, s) : theta1d_shifted_cosine(a, s);
}

double expint_e(double s, double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("expint_e: y must be >= 0");
  if (!std::isfinite(s)) throw DomainError("expint_e: s must be finite");
  if (y == 0.0) {
    if (s <= 1.0) throw DivergenceError("expint_e: E_s(0) diverges for s <= 1");
    return 1.0 / (s - 1.0);
  }
  if (y > 1.0) return expint_continued_fraction(s, y);
  if (is_integer(s)) {
    const int n = static_cast<int>(std::round(s));
    if (n < 1) throw DomainError("expint_e: integer order must be >= 1");
    return expint_series_integer(n, y);
  }
  return expint_series_real(s, y);
}

double bose_tail(double s, double t, long m) {
  if (!(t >= 0.0)) throw DomainError("bose_tail: t must be >= 0");
  if (m < 1) throw ArgumentError("bose_tail: start index must be >= 1");
  if (t == 0.0 && s <= 1.0) throw DivergenceError("bose_tail: sum n^{-s} diverges for s <= 1");
  if (t >= 0.5) return direct_tail(s, t, m);

  double head = 0.0;
  long start = m;
  for (; start < kEulerMaclaurinStart; ++start) {
    head += std::exp(-t * start - s * std::log(static_cast<double>(start)));
  }
  const double x = static_cast<double>(start);
  double tail = std::pow(x, 1.0 - s) * expint_e(s, t * x);
  tail += 0.5 * std::exp(-t * x) * std::pow(x, -s);
  double factorial = 1.0;  // (2k)!
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    factorial *= static_cast<double>((2 * k - 1) * (2 * k));
    tail -= kBernoulli[k - 1] / factorial * tail_derivative(s, t, x, static_cast<int>(2 * k - 1));
  }
  return head + tail;
}

double polylog(double s, double z) {
  if (!std::isfinite(s)) throw DomainError("polylog: order must be finite");
  if (!(z >= 0.0) || z > 1.0) throw DomainError("polylog: argument must lie in [0, 1]");
  if (z == 1.0 && s <= 1.0) throw DivergenceError("polylog: g_s(1) diverges for s <= 1");
  if (z == 0.0) return 0.0;
  const double log_z = std::log(z);
  if (z <= 0.99) {
    double sum = 0.0;
    for (long n = 1; n < 100000000L; ++n) {
      const double term = std::exp(n * log_z - s * std::log(static_cast<double>(n)));
      sum += term;
      if (term < 1e-17 * sum) return sum;
    }
    throw NumericError("polylog: series did not converge");
  }
  double head = 0.0;
  for (long n = 1; n < kEulerMaclaurinStart; ++n) {
    head += std::exp(n * log_z - s * std::log(static_cast<double>(n)));
  }
  return head + bose_tail(s, -log_z, kEulerMaclaurinStart);
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw DomainError("riemann_zeta: only real s > 1 is supported");
  return polylog(s, 1.0);
}

namespace {

double scale_of(const SystemParams& params, int n) {
  if (n < 1) throw DomainError("cycle length n must be >= 1");
  const double ratio = params.lambda() / params.L();
  return n * ratio * ratio;
}

void check_shift(const SystemParams& params, std::span<const double> shift) {
  if (!shift.empty() && static_cast<int>(shift.size()) != params.d()) {
    throw ArgumentError("shift vector must have one component per dimension");
  }
}

}  // namespace

double log_q_n(const SystemParams& params, int n, std::span<const double> shift) {
  const double a = scale_of(params, n);
  check_shift(params, shift);
  if (shift.empty()) return params.d() * std::log1p(theta1d_excess(a));
  double total = 0.0;
  for (double s : shift) total += std::log(theta1d_shifted(a, s));
  return total;
}

double q_n(const SystemParams& params, int n, std::span<const double> shift) {
  const double a = scale_of(params, n);
  check_shift(params, shift);
  if (shift.empty()) return std::pow(theta1d(a), params.d());
  double product = 1.0;
  for (double s : shift) product *= theta1d_shifted(a, s);
  return product;
}

const char* to_string(QRegime regime) {
  switch (regime) {
    case QRegime::bulk: return "bulk";
    case QRegime::macroscopic: return "macroscopic";
    case QRegime::critical: return "critical";
  }
  return "unknown";
}

QAsymptotic q_asymptotic_regime(const SystemParams& params, int n, std::span<const double> shift,
                                double tol) {
  const double a = scale_of(params, n);
  check_shift(params, shift);
  const double exact = q_n(params, n, shift);
  const int d = params.d();

  // The bulk branch ignores the shift: after the Poisson transform the shift
  // only enters through exponentially small cosine terms.
  const double bulk = std::pow(a, -0.5 * d);
  double shift_sq = 0.0;
  for (double s : shift) {
    const double r = reduce_shift(s);
    shift_sq += r * r;
  }
  const double macro = std::exp(-kPi * a * shift_sq);

  if (std::abs(bulk - exact) <= tol * exact) return {QRegime::bulk, a, bulk, exact};
  if (std::abs(macro - exact) <= tol * exact) return {QRegime::macroscopic, a, macro, exact};
  return {QRegime::critical, a, exact, exact};
}

}  // namespace bosecycles
