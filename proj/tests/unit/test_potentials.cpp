#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bosecycles/errors.hpp"
#include "bosecycles/potentials.hpp"
#include "bosecycles/special_functions.hpp"
#include "bosecycles/thermo.hpp"

using namespace bosecycles;

namespace {

constexpr double kPi = std::numbers::pi;
const double kZeta32 = 2.6123753486854883;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

// 3-d radial transform (2/k) int r u(r) sin(2 pi k r) dr as an independent check
double fourier3_oracle(const std::function<double(double)>& u, double r_max, double k) {
  auto f = [&](double r) { return r * u(r) * std::sin(2 * kPi * k * r); };
  return 2.0 / k * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, r_max, 25, 1e-13);
}

// Plain image sum over a fixed cube
double image_oracle(const PairPotential& pot, double L, const std::vector<double>& x, int Z) {
  double total = 0.0;
  for (int a = -Z; a <= Z; ++a)
    for (int b = -Z; b <= Z; ++b)
      for (int c = -Z; c <= Z; ++c) {
        const double dx = x[0] + L * a, dy = x[1] + L * b, dz = x[2] + L * c;
        total += pot.u(std::sqrt(dx * dx + dy * dy + dz * dz));
      }
  return total;
}

}  // namespace

TEST_CASE("gaussian potential") {
  const auto pot = gaussian_potential(2.0, 1.5, 3);
  CHECK(pot.u0 == 2.0);
  CHECK(pot.uhat0 == doctest::Approx(2.0 * 1.5 * 1.5 * 1.5));
  CHECK(pot.norm1 == pot.uhat0);
  CHECK(gaussian_potential(1.0, 1.0, 3).norm1 == 1.0);
  for (double k : {0.1, 0.4, 0.9}) CHECK(rel_close(pot.uhat(k), fourier3_oracle(pot.u, 20.0, k), 1e-10));
  CHECK_THROWS_AS(gaussian_potential(0.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(gaussian_potential(1.0, -1.0, 3), DomainError);
  CHECK(parse_potential_shorthand("gaussian:1,2", 3).uhat0 == doctest::Approx(8.0));
  CHECK_THROWS_AS(parse_potential_shorthand("gaussian:1", 3), ArgumentError);
  CHECK_THROWS_AS(parse_potential_shorthand("lj:1,2", 3), ArgumentError);
}

TEST_CASE("autocorrelation: tent function in d = 1") {
  const double R = 0.75;
  const auto pot = autocorrelation_potential([](double) { return 1.0; }, R, 1);
  CHECK(pot.u0 == doctest::Approx(2 * R).epsilon(1e-12));
  for (double x : {0.0, 0.1, 0.7, 1.2, 1.49, 1.6}) {
    CAPTURE(x);
    CHECK(pot.u(x) == doctest::Approx(std::max(0.0, 2 * R - x)).epsilon(1e-10));
    CHECK(pot.u(x) <= pot.u0 + 1e-14);
  }
  for (double k : {0.05, 0.3, 1.1}) {
    const double vhat = std::sin(2 * kPi * k * R) / (kPi * k);
    CHECK(pot.uhat(k) == doctest::Approx(vhat * vhat).epsilon(1e-9));
  }
  CHECK(pot.uhat0 == doctest::Approx(4 * R * R).epsilon(1e-12));
  CHECK(pot.norm1 == pot.uhat0);
}

TEST_CASE("autocorrelation: ball and Gaussian in d = 3") {
  const double R = 1.0;
  const auto ball = autocorrelation_potential([](double) { return 1.0; }, R, 3);
  // volume of the lens between two unit balls at distance x
  auto lens = [R](double x) { return x >= 2 * R ? 0.0 : kPi / 12.0 * (4 * R + x) * (2 * R - x) * (2 * R - x); };
  for (double x : {0.0, 0.3, 1.0, 1.8, 2.5}) {
    CAPTURE(x);
    CHECK(ball.u(x) == doctest::Approx(lens(x)).epsilon(1e-8));
  }
  const double volume = 4.0 / 3.0 * kPi;
  CHECK(ball.uhat0 == doctest::Approx(volume * volume).epsilon(1e-10));

  const double s = 0.8;
  const auto gauss = autocorrelation_potential([s](double r) { return std::exp(-kPi * r * r / (s * s)); }, 8 * s, 3);
  const double g_u = std::pow(s / std::sqrt(2.0), 3);
  for (double x : {0.0, 0.5, 1.3}) {
    CAPTURE(x);
    CHECK(gauss.u(x) == doctest::Approx(g_u * std::exp(-kPi * x * x / (2 * s * s))).epsilon(1e-8));
  }
  CHECK(gauss.uhat(0.5) == doctest::Approx(std::pow(s, 6) * std::exp(-2 * kPi * s * s * 0.25)).epsilon(1e-8));
  CHECK(gauss.uhat0 <= gauss.norm1 * (1 + 1e-14));
  CHECK_THROWS_AS(autocorrelation_potential([](double) { return -1.0; }, 1.0, 3), DomainError);
}

TEST_CASE("tabulated potential") {
  std::vector<double> r, u;
  for (int i = 0; i <= 400; ++i) {
    r.push_back(i * 0.01);
    u.push_back(std::max(0.0, 2.0 - r.back()));
  }
  const auto pot = tabulated_potential(r, u, 1);
  CHECK(pot.u(0.55) == doctest::Approx(1.45));
  CHECK(pot.u(5.0) == 0.0);
  CHECK(pot.uhat0 == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(pot.positive);
  CHECK(pot.positive_type);
  CHECK(pot.uhat(0.3) == doctest::Approx(std::pow(std::sin(2 * kPi * 0.3) / (kPi * 0.3), 2)).epsilon(1e-9));

  // a negative dip breaks positivity and |uhat(0)| < |u|_1
  std::vector<double> dip = {1.0, -0.5, 0.0};
  const auto bad = tabulated_potential({0.0, 1.0, 2.0}, dip, 3);
  CHECK_FALSE(bad.positive);
  CHECK(std::abs(bad.uhat0) < bad.norm1);
  CHECK_THROWS_AS(tabulated_potential({0.0, 0.0}, {1.0, 1.0}, 3), ArgumentError);
}

TEST_CASE("periodize") {
  const auto pot = gaussian_potential(1.0, 1.0, 3);
  const std::vector<double> x = {0.3, -0.2, 0.9};
  const double r = std::sqrt(0.09 + 0.04 + 0.81);
  CHECK(rel_close(periodize(pot, 40.0, x), pot.u(r), 1e-10));

  const double L = 2.0;
  const double value = periodize(pot, L, x);
  CHECK(rel_close(value, image_oracle(pot, L, x, 8), 1e-10));
  // u_L(x) = u_L(L z - x)
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_int_distribution<int> shift(-2, 2);
  for (int i = 0; i < 20; ++i) {
    const std::vector<double> p = {coord(rng), coord(rng), coord(rng)};
    const std::vector<double> q = {L * shift(rng) - p[0], L * shift(rng) - p[1], L * shift(rng) - p[2]};
    CHECK(rel_close(periodize(pot, L, p), periodize(pot, L, q), 1e-12));
  }
  const std::vector<double> origin(3, 0.0);
  CHECK(periodize(pot, L, origin) >= pot.u0);

  PairPotential mystery = pot;
  mystery.tail = {};
  CHECK_THROWS_AS(periodize(mystery, L, origin), ArgumentError);
  PairPotential power = pot;
  power.tail = {TailKind::power_law, 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(periodize(power, L, origin), ArgumentError);
  power.tail.eta = 1e-3;
  CHECK_THROWS_AS(periodize(power, L, origin), NumericError);
  CHECK_THROWS_AS(periodize(pot, L, std::vector<double>{0.0}), ArgumentError);

  const auto tent = autocorrelation_potential([](double) { return 1.0; }, 0.5, 1);
  const std::vector<double> x1 = {0.2};
  CHECK(periodize(tent, 1.5, x1) == doctest::Approx(tent.u(0.2) + tent.u(1.3) + tent.u(1.7)).epsilon(1e-10));
}

TEST_CASE("alpha_nk") {
  CHECK(alpha_nk(2, 1, 1.3) == doctest::Approx(2.0 / (1.3 * 1.3)));
  CHECK(alpha_nk(10, 3, 1.0) == doctest::Approx(10.0 / 21.0));
  for (int n = 2; n < 30; ++n)
    for (int k = 1; k < n; ++k) {
      CHECK(alpha_nk(n, k, 0.7) == alpha_nk(n, n - k, 0.7));
      CHECK(alpha_nk(n, k, 0.7) > 0.0);
    }
  CHECK_THROWS_AS(alpha_nk(5, 0, 1.0), DomainError);
  CHECK_THROWS_AS(alpha_nk(5, 5, 1.0), DomainError);
}

TEST_CASE("mean interaction bound") {
  const auto pot = gaussian_potential(1.0, 1.0, 3);
  const double beta = 1.0, lambda = thermal_wavelength(beta);
  CHECK(mean_interaction_upper(1, 10.0, beta, pot).exact == 0.0);
  CHECK(mean_interaction_upper(1, 10.0, beta, pot).simplified == doctest::Approx(1.0 * 0.5 * std::pow(2.0, 1.5) * kZeta32 / std::pow(lambda, 3)));

  const double L = 10.0;
  const auto two = mean_interaction_upper(2, L, beta, pot);
  const double a = 2.0 / (lambda * lambda);
  CHECK(two.k_sum == doctest::Approx(std::pow(a, 1.5)));
  CHECK(two.exact == doctest::Approx(std::pow(std::sqrt(a) + 1.0 / L, 3)));
  CHECK(two.exact == doctest::Approx(two.k_sum + 1.0 / (L * L * L) + two.o1));

  // k-sum never exceeds its zeta bound; per-particle limit at fixed density
  const double rho = 0.5;
  double previous_gap = INFINITY;
  for (int n : {100, 1000, 10000}) {
    const double Ln = std::cbrt(n / rho);
    const auto b = mean_interaction_upper(n, Ln, beta, pot);
    CHECK(b.k_sum <= 0.5 * n * std::pow(2.0, 1.5) * kZeta32 / std::pow(lambda, 3));
    CHECK(b.exact >= b.k_sum);
    const double limit = 0.5 * (rho + std::pow(2.0, 1.5) * kZeta32 / std::pow(lambda, 3));
    const double gap = std::abs(b.simplified / n - limit);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
}

TEST_CASE("phi_nn bounds") {
  const auto pot = gaussian_potential(1.0, 1.0, 3);
  // as beta -> 0 the upper factor tends to 1, while beta / lambda^3 grows like
  // beta^{-1/2} and drives the lower factor to 0
  const auto tiny = phi_nn_bounds(7, 10.0, 1e-12, pot);
  CHECK(tiny.factor.upper == doctest::Approx(1.0));
  const auto hot1 = phi_nn_bounds(7, 10.0, 1e-4, pot);
  const auto hot2 = phi_nn_bounds(7, 10.0, 1e-6, pot);
  CHECK(hot2.log_lower / hot1.log_lower == doctest::Approx(10.0).epsilon(1e-12));

  const double lambda3 = std::pow(thermal_wavelength(1.0), 3);
  const auto b5 = phi_nn_bounds(5, 10.0, 1.0, pot);
  CHECK(b5.factor.lower == doctest::Approx(std::exp(-std::sqrt(2.0) * kZeta32 * 5 / lambda3)).epsilon(1e-13));
  CHECK(b5.factor.upper == doctest::Approx(std::exp(2.5 * periodize(pot, 10.0, std::vector<double>(3, 0.0)))).epsilon(1e-13));
  CHECK(periodize(pot, 10.0, std::vector<double>(3, 0.0)) == doctest::Approx(1.0).epsilon(1e-10));
  const auto b1 = phi_nn_bounds(1, 10.0, 1.0, pot);
  for (int n = 1; n <= 50; ++n) {
    const auto b = phi_nn_bounds(n, 10.0, 1.0, pot);
    CHECK(std::abs(b.log_lower - n * b1.log_lower) <= 1e-14 * std::abs(b.log_lower));
    CHECK(std::abs(b.log_upper - n * b1.log_upper) <= 1e-14 * std::abs(b.log_upper));
  }
  PairPotential plain = pot;
  plain.positive_type = false;
  CHECK_THROWS_AS(phi_nn_bounds(1, 10.0, 1.0, plain), UnsupportedError);
}

TEST_CASE("free energy bounds") {
  const double beta = 1.0;
  const double lambda3 = std::pow(thermal_wavelength(beta), 3);
  const double rho = 1.0 / lambda3;
  const double f0 = ideal_free_energy_density(rho, beta, 3);
  const auto weak = free_energy_bounds(rho, beta, gaussian_potential(1e-12, 1.0, 3));
  CHECK(weak.f.lower == doctest::Approx(f0).epsilon(1e-9));
  CHECK(weak.f.upper == doctest::Approx(f0).epsilon(1e-9));

  const auto pot = gaussian_potential(1.0, 1.0, 3);
  for (double r : {0.1, 1.0, 5.0, 20.0}) {
    const auto b = free_energy_bounds(r, beta, pot);
    const double gap = r * (0.5 * pot.u0 + std::sqrt(2.0) * kZeta32 * pot.uhat0 / lambda3);
    CHECK(b.f.upper - b.f.lower == doctest::Approx(gap).epsilon(1e-12));
    REQUIRE(b.f_tilde.has_value());
    CHECK(b.f_tilde->upper - b.f_tilde->lower == doctest::Approx(gap).epsilon(1e-12));
    CHECK(b.f.lower <= b.f.upper);
  }
  double previous = INFINITY;
  for (double r : {1e2, 1e4, 1e6}) {
    const auto b = free_energy_bounds(r, beta, pot);
    const double dev = std::max(std::abs(b.f.lower / (r * r) - 0.5), std::abs(b.f.upper / (r * r) - 0.5));
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 1e-4);

  // sandwich over a grid of points and Gaussian shapes
  for (double g : {0.1, 1.0, 3.0})
    for (double sigma : {0.5, 1.0, 2.0})
      for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
          const auto b = free_energy_bounds(0.05 * i * i, 0.2 * j, gaussian_potential(g, sigma, 3));
          CHECK(b.f.lower <= b.f.upper);
        }

  PairPotential not_pt = pot;
  not_pt.positive_type = false;
  CHECK_THROWS_AS(free_energy_bounds(rho, beta, not_pt), UnsupportedError);
  not_pt.superstability = 0.3;
  const auto overridden = free_energy_bounds(rho, beta, not_pt);
  CHECK(overridden.superstability == 0.3);
  CHECK_FALSE(overridden.f_tilde.has_value());
}

TEST_CASE("scaling identity w_n -> c^n w_n") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lw(-2.0, 2.0), lc(-1.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> logs(8);
    for (auto& v : logs) v = lw(rng);
    const WeightSequence w(logs, WeightProvenance::custom);
    const double log_c = lc(rng);
    const auto scaled = w.scaled_exponentially(log_c, WeightProvenance::custom);
    for (int N = 1; N <= 8; ++N) {
      CHECK(brute_force_partition_fn(scaled, N) ==
            doctest::Approx(brute_force_partition_fn(w, N) * std::exp(N * log_c)).epsilon(1e-12));
    }
  }
  const auto params = SystemParams::from_degeneracy(3, 1.0, 500, 1.0);
  const auto ideal = WeightSequence::ideal(params);
  const double base = build_partition_table(params, ideal).logQ[500];
  const double shifted = build_partition_table(params, ideal.scaled_exponentially(-0.37, WeightProvenance::dcp_lower)).logQ[500];
  CHECK(std::abs((shifted - base) - 500 * -0.37) <= 1e-12 * 500 * 0.37);
}

TEST_CASE("dcp partition sandwich") {
  const auto pot = gaussian_potential(1.0, 1.0, 3);
  const double beta = 1.0;
  const double lambda3 = std::pow(thermal_wavelength(beta), 3);
  const int N = 128;
  const double L = std::cbrt(N * lambda3 / 1.0);
  const auto s = dcp_partition_sandwich(N, L, beta, pot, 4, 77);
  CHECK(s.inside);
  CHECK(s.bounds.lower < 0.0);
  CHECK(s.bounds.upper > 0.0);
  CHECK(std::abs(s.recursion_lower - s.bounds.lower) <= 1e-12 * std::abs(s.bounds.lower));
  CHECK(std::abs(s.recursion_upper - s.bounds.upper) <= 1e-12 * std::abs(s.bounds.upper));
  CHECK(s.surrogates.size() == 5);
  for (double v : s.surrogates) {
    CHECK(v > s.recursion_lower);
    CHECK(v < s.recursion_upper);
  }
  const auto hot = dcp_partition_sandwich(16, 3.0, 1e-12, pot, 1);
  CHECK(std::abs(hot.bounds.upper) < 1e-9);
  CHECK(hot.inside);
}

TEST_CASE("validate conditions") {
  const auto g = validate_conditions(gaussian_potential(1.0, 1.0, 3));
  CHECK(g.all_pass());
  CHECK(g.tail_exponent < -3.0);
  CHECK(g.uhat_integral == doctest::Approx(1.0).epsilon(1e-3));

  PairPotential neg = gaussian_potential(1.0, 1.0, 3);
  neg.u = [](double r) { return -std::exp(-r * r); };
  neg.u0 = -1.0;
  CHECK_FALSE(validate_conditions(neg).positive);

  const auto tent = validate_conditions(autocorrelation_potential([](double) { return 1.0; }, 0.5, 1));
  CHECK(tent.positive);
  CHECK(tent.positive_type);
  CHECK(std::isinf(tent.tail_exponent));
  CHECK(tent.tail_exponent < 0.0);
  CHECK(tent.decay_ok);
}
