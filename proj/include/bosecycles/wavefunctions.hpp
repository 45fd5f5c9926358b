#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bosecycles {

/// Common wave function of the n particles of one cycle centred at y, with an
/// optional average momentum shift xbar.  Every form below is a product over
/// coordinates of one-dimensional factors, so d-dimensional values reduce to
/// 1-d sums.
struct CycleWaveParams {
  int n = 1;
  double L = 1.0;
  double lambda = 1.0;
  std::vector<double> y;     // size d
  std::vector<double> xbar;  // size d or empty (no shift)

  int d() const { return static_cast<int>(y.size()); }
  /// Throws ArgumentError on n < 1, nonpositive L or lambda, or size mismatches.
  void validate() const;
  bool shifted() const;
};

/// L^{-d/2} sum_z exp(-pi n lambda^2 (z+b)^2 / (2L^2)) e^{i 2pi (z+b).(x-y)/L},
/// divided by [sum_z exp(-pi n lambda^2 (z+b)^2 / L^2)]^{1/2}, with b = L xbar
/// reduced componentwise to [-1/2, 1/2].
std::complex<double> psi_planewave_form(const CycleWaveParams& p, std::span<const double> x);

/// (2/(sqrt(n) lambda))^{d/2} sum_z exp(-2pi (x-y+Lz)^2 / (n lambda^2))
/// / [sum_z exp(-pi L^2 z^2 / (n lambda^2))]^{1/2}.  Zero shift only.
double psi_gaussian_form(const CycleWaveParams& p, std::span<const double> x);

/// Gaussian numerator with phases e^{-i 2pi z.b} over the cosine-form
/// denominator sum_z exp(-pi L^2 z^2/(n lambda^2)) cos(2pi z.b).  NumericError
/// when the denominator cancels below 1e-8 of its term sum.
std::complex<double> psi_shifted(const CycleWaveParams& p, std::span<const double> x);

/// L -> infinity limit (2/(sqrt(n) lambda))^{d/2} exp(-2pi (x-y)^2 / (n lambda^2)).
double psi_infinite_volume(const CycleWaveParams& p, std::span<const double> x);

/// L^{-d} sum_z exp(-pi lambda^2 (z+a)^2 / L^2) e^{i 2pi z.x/L}
std::complex<double> poisson_identity_lhs(double lambda, double L, std::span<const double> a,
                                          std::span<const double> x);
/// lambda^{-d} sum_z exp(-pi (x+Lz)^2 / lambda^2) e^{-i 2pi a.(x+Lz)/L}
std::complex<double> poisson_identity_rhs(double lambda, double L, std::span<const double> a,
                                          std::span<const double> x);

/// Periodic trapezoid rule for int_0^L |psi|^2 dx in d = 1 (xbar may be set).
/// `points` = 0 picks a count that integrates the band-limited |psi|^2 exactly.
double normalization_1d(int n, double L, double lambda, double xbar = 0.0, int points = 0);

struct WaveProfileRow {
  double x = 0.0;
  double re = 0.0;
  double im = 0.0;
  double abs2 = 0.0;
};

/// psi along coordinate `axis` over [0, L), other coordinates at y.
std::vector<WaveProfileRow> wave_profile(const CycleWaveParams& p, int axis, int points);

}  // namespace bosecycles
