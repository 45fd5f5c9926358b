#pragma once

#include <span>

namespace bosecycles {

class SystemParams;

/// lambda_beta = sqrt(2 pi beta) in units hbar = m = 1.
double thermal_wavelength(double beta);

/// Number of terms |z| <= zmax kept in sum_z exp(-pi a z^2) so that the
/// discarded tail is below 1e-16 of the z = 0 term.
int theta_cutoff(double a);

/// Theta(a) = sum_{z in Z} exp(-pi a z^2).  Evaluates the direct series for
/// a >= 1 and the Poisson-dual form a^{-1/2} Theta(1/a) otherwise.
double theta1d(double a);
/// Direct series, whatever the value of a.
double theta1d_direct(double a);
/// a^{-1/2} sum_z exp(-pi z^2 / a), whatever the value of a.
double theta1d_dual(double a);
/// Theta(a) - 1 without cancellation for large a.
double theta1d_excess(double a);

/// Reduces a shift to its representative in [-1/2, 1/2] (integer parts drop
/// out of every periodic sum).
double reduce_shift(double s);

/// sum_z exp(-pi a (z+s)^2), direct or cosine-dual form chosen at a = 1.
double theta1d_shifted(double a, double s);
double theta1d_shifted_direct(double a, double s);
/// a^{-1/2} sum_z exp(-pi z^2 / a) cos(2 pi s z)
double theta1d_shifted_cosine(double a, double s);

/// Generalized exponential integral E_s(y) = int_1^inf exp(-y u) u^{-s} du.
double expint_e(double s, double y);

/// sum_{n >= m} exp(-t n) n^{-s} for t >= 0 (s > 1 required when t == 0).
/// Euler-Maclaurin with an exact integral term for small t.
double bose_tail(double s, double t, long m);

/// g_s(z) = sum_{n>=1} z^n / n^s for 0 <= z <= 1.
double polylog(double s, double z);

/// Riemann zeta for real s > 1.
double riemann_zeta(double s);

/// Single-particle partition function at inverse temperature n*beta on the
/// torus, optionally with a per-dimension shift (reduced to [-1/2,1/2]).
double q_n(const SystemParams& params, int n, std::span<const double> shift = {});
double log_q_n(const SystemParams& params, int n, std::span<const double> shift = {});

enum class QRegime { bulk, macroscopic, critical };

const char* to_string(QRegime regime);

struct QAsymptotic {
  QRegime regime;
  double scale;  // n lambda^2 / L^2
  double value;  // limiting expression of the selected branch
  double exact;  // q_n itself
};

/// Picks the asymptotic branch of q_n whose limiting expression reproduces the
/// exact value to relative tolerance `tol`: bulk L^d/(n^{d/2} lambda^d),
/// macroscopic exp(-pi a |s|^2), or the exact critical theta product.
QAsymptotic q_asymptotic_regime(const SystemParams& params, int n,
                                std::span<const double> shift = {}, double tol = 1e-12);

}  // namespace bosecycles
