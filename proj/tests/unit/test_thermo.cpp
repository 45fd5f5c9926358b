#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "bosecycles/errors.hpp"
#include "bosecycles/special_functions.hpp"
#include "bosecycles/thermo.hpp"

using namespace bosecycles;

namespace {

const double kZeta32 = 2.6123753486854883;
const double kZeta52 = 1.3414872572509172;

double lambda3(double beta) { return std::pow(thermal_wavelength(beta), 3); }

double rho_for(double rho_lambda3, double beta) { return rho_lambda3 / lambda3(beta); }

// sum_{n=1}^{nmax} exp(a n) n^{-s} in long double
long double series_oracle(long double a, long double s, long nmax) {
  long double sum = 0.0L;
  for (long n = nmax; n >= 1; --n) sum += std::exp(a * n - s * std::log(static_cast<long double>(n)));
  return sum;
}

}  // namespace

TEST_CASE("ideal mu: threshold, round trip and Boltzmann limit") {
  const double beta = 1.3;
  CHECK(ideal_mu(rho_for(kZeta32, beta), beta, 3) == 0.0);
  CHECK(ideal_mu(rho_for(2 * kZeta32, beta), beta, 3) == 0.0);

  const double mu1 = ideal_mu(rho_for(1.0, beta), beta, 3);
  CHECK(mu1 < 0.0);
  CHECK(static_cast<double>(series_oracle(beta * mu1, 1.5L, 20000)) == doctest::Approx(1.0).epsilon(1e-10));

  for (double t : {1e-3, 1e-5, 1e-8}) {
    const double bm = beta * ideal_mu(rho_for(t, beta), beta, 3);
    CHECK(std::abs(bm - std::log(t)) < 2.0 * t);
  }

  double previous = -INFINITY;
  for (int i = 1; i <= 50; ++i) {
    const double t = kZeta32 * i / 51.0;
    const double mu = ideal_mu(rho_for(t, beta), beta, 3);
    CAPTURE(t);
    CHECK(std::abs(polylog(1.5, std::exp(beta * mu)) - t) <= 1e-10 * t);
    CHECK(mu > previous);
    previous = mu;
  }
}

TEST_CASE("ideal mu and f0 in other dimensions") {
  const double t = 0.5 * riemann_zeta(2.0);
  const double mu = ideal_mu(t / std::pow(thermal_wavelength(1.0), 4), 1.0, 4);
  CHECK(polylog(2.0, std::exp(mu)) == doctest::Approx(t).epsilon(1e-10));
  CHECK_THROWS_AS(ideal_mu(1.0, 1.0, 2), UnsupportedError);
  CHECK_THROWS_AS(ideal_free_energy_density(1.0, 1.0, 1), UnsupportedError);
  CHECK_THROWS_AS(ideal_mu(0.0, 1.0, 3), DomainError);
}

TEST_CASE("free energy density") {
  const double beta = 0.8;
  const double f_cond = ideal_free_energy_density(rho_for(2 * kZeta32, beta), beta, 3);
  CHECK(f_cond == doctest::Approx(-kZeta52 / (beta * lambda3(beta))).epsilon(1e-13));
  // f0 ~ rho (ln(rho lambda^3) - 1) / beta vanishes with rho
  double previous = -INFINITY;
  for (double t : {1e-3, 1e-6, 1e-9, 1e-12}) {
    const double f = ideal_free_energy_density(rho_for(t, beta), beta, 3);
    CHECK(f < 0.0);
    CHECK(f > previous);
    CHECK(f * beta * lambda3(beta) == doctest::Approx(t * (std::log(t) - 1.0)).epsilon(1e-3));
    previous = f;
  }

  // derivative of f0 is mu, on both sides of the threshold
  for (double t : {0.2, 1.0, 2.0, 2.5, 3.5}) {
    const double rho = rho_for(t, beta);
    const double h = 1e-6 * rho;
    const double fd = (ideal_free_energy_density(rho + h, beta, 3) - ideal_free_energy_density(rho - h, beta, 3)) / (2 * h);
    CAPTURE(t);
    CHECK(std::abs(fd - ideal_mu(rho, beta, 3)) <= 1e-6);
  }

  // convexity on a grid
  const double h = 0.02 / lambda3(beta);
  for (int i = 2; i < 200; ++i) {
    const double rho = i * h;
    const double second = ideal_free_energy_density(rho + h, beta, 3) - 2 * ideal_free_energy_density(rho, beta, 3) +
                          ideal_free_energy_density(rho - h, beta, 3);
    CHECK(second >= -1e-9);
  }

  const auto p = ideal_thermo_point(rho_for(2 * kZeta32, beta), beta, 3);
  CHECK(p.condensate_fraction == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.critical_density == doctest::Approx(kZeta32 / lambda3(beta)).epsilon(1e-14));
  CHECK(p.mu <= 0.0);
}

TEST_CASE("condensate fraction") {
  CHECK(condensate_fraction(rho_for(kZeta32, 1.0), 1.0, 3) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(condensate_fraction(rho_for(2 * kZeta32, 1.0), 1.0, 3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(condensate_fraction(rho_for(0.5 * kZeta32, 1.0), 1.0, 3) == 0.0);
}

TEST_CASE("dcp model: ideal reduction") {
  const auto flat = DcpModel::family(0.0, 1.0, 0.0, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t_dist(0.05, 4.0), b_dist(0.3, 3.0);
  for (int i = 0; i < 25; ++i) {
    const double beta = b_dist(rng), t = t_dist(rng);
    const double rho = rho_for(t, beta);
    CHECK(std::abs(dcp_mu(rho, beta, flat, 3) - ideal_mu(rho, beta, 3)) <= 1e-12 * std::max(1.0, std::abs(ideal_mu(rho, beta, 3))));
  }
  CHECK(dcp_critical_density(1.0, flat, 3) == doctest::Approx(kZeta32 / lambda3(1.0)).epsilon(1e-13));

  // same with a long table, extrapolated beyond its end
  const auto table = DcpModel::tabulated(WeightSequence::constant(500), 0.0, true);
  CHECK(table.zeta_dcp(3) == doctest::Approx(kZeta32).epsilon(1e-12));
  CHECK(dcp_mu(rho_for(1.0, 1.0), 1.0, table, 3) == doctest::Approx(ideal_mu(rho_for(1.0, 1.0), 1.0, 3)).epsilon(1e-11));
}

TEST_CASE("dcp model: exponential and power families") {
  const double beta = 1.0;
  // pure exponential: critical density is the ideal one and mu = -b at threshold
  const auto expo = DcpModel::family(0.2 * std::exp(0.5), 0.5, 0.0, beta);
  CHECK(expo.rate() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(dcp_critical_density(beta, expo, 3) == doctest::Approx(kZeta32 / lambda3(beta)).epsilon(1e-13));
  CHECK(dcp_mu(rho_for(kZeta32, beta), beta, expo, 3) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(dcp_mu(rho_for(1.0, beta), beta, expo, 3) ==
        doctest::Approx(ideal_mu(rho_for(1.0, beta), beta, 3) - 0.2).epsilon(1e-10));

  // phi_n = e^{bn}/n
  const auto over_n = DcpModel::family(0.2, 0.0, 1.0, beta);
  CHECK(dcp_critical_density(beta, over_n, 3) == doctest::Approx(kZeta52 / lambda3(beta)).epsilon(1e-13));
  const double mu = dcp_mu(rho_for(1.0, beta), beta, over_n, 3);
  CHECK(beta * mu < -0.2);
  const double forward = static_cast<double>(series_oracle(0.2L + beta * mu, 2.5L, 200000));
  CHECK(forward == doctest::Approx(1.0).epsilon(1e-10));
  // above the dcp threshold mu saturates at -b
  CHECK(dcp_mu(rho_for(1.5, beta), beta, over_n, 3) == doctest::Approx(-0.2));
  CHECK(condensate_fraction(rho_for(2 * kZeta52, beta), beta, 3, &over_n) == doctest::Approx(0.5));
}

TEST_CASE("dcp model: tables, rates and truncation") {
  // ln phi_n = 0.3 n - 0.5 ln n, rate recovered by regression to within the log drift
  std::vector<double> logs;
  for (int n = 1; n <= 3000; ++n) logs.push_back(0.3 * n - 0.5 * std::log(n));
  const WeightSequence seq(logs, WeightProvenance::custom);
  CHECK(estimate_rate(seq) == doctest::Approx(0.3).epsilon(1e-3));

  const auto exact_rate = DcpModel::tabulated(seq, 0.3, false);
  // sum n^{-2} from a finite table cannot certify a 1e-10 tail
  CHECK_THROWS_AS(exact_rate.zeta_dcp(3), TruncationError);
  const auto extrapolated = DcpModel::tabulated(seq, 0.3, true);
  CHECK(extrapolated.tail_power() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(extrapolated.zeta_dcp(3) == doctest::Approx(riemann_zeta(2.0)).epsilon(1e-12));
  // below threshold the geometric factor makes the table sufficient
  const double mu = dcp_mu(rho_for(0.5, 1.0), 1.0, exact_rate, 3);
  CHECK(static_cast<double>(series_oracle(0.3L + mu, 2.0L, 3000)) == doctest::Approx(0.5).epsilon(1e-10));

  CHECK_THROWS_AS(exact_rate.log_phi(3001), TruncationError);
  CHECK(extrapolated.log_phi(3002) == doctest::Approx(0.3 * 3002 - 0.5 * std::log(3002.0)).epsilon(1e-13));

  // phi_n = n^{+1} e^{bn}: n^{1 - 3/2} is not summable
  std::vector<double> growing;
  for (int n = 1; n <= 300; ++n) growing.push_back(0.1 * n + std::log(n));
  const auto divergent = DcpModel::tabulated(WeightSequence(growing, WeightProvenance::custom), 0.1, true);
  CHECK_THROWS_AS(divergent.zeta_dcp(3), DivergenceError);
  CHECK_THROWS_AS(DcpModel::family(1.0, 1.0, -0.6, 1.0).zeta_dcp(3), DivergenceError);
  CHECK_THROWS_AS(DcpModel::family(-1.0, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("finite size scan") {
  const double rho = rho_for(2 * kZeta32, 1.0);
  const auto rows = finite_size_scan(rho, 1.0, 3, {512, 1024, 2048}, {0.01, 0.1, nullptr, true});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].N == 512);
  CHECK(rows[2].N == 2048);
  CHECK(rows[1].L == doctest::Approx(std::cbrt(1024 / rho)));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(rows[i].macro_fraction - 0.5) < std::abs(rows[i - 1].macro_fraction - 0.5));
    CHECK(rows[i].band_fraction < rows[i - 1].band_fraction);
  }
  const auto serial = finite_size_scan(rho, 1.0, 3, {512, 1024, 2048}, {0.01, 0.1, nullptr, false});
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(serial[i].macro_fraction == rows[i].macro_fraction);

  const auto below = finite_size_scan(rho_for(0.5 * kZeta32, 1.0), 1.0, 3, {256, 2048});
  CHECK(below[1].macro_fraction < below[0].macro_fraction);
  CHECK(below[1].macro_fraction < 1e-3);

  const auto single = finite_size_scan(rho, 1.0, 3, {1});
  CHECK(single[0].macro_fraction == doctest::Approx(1.0));

  const auto over_n = DcpModel::family(0.2, 0.0, 1.0, 1.0);
  const auto dcp_rows = finite_size_scan(rho_for(2 * kZeta52, 1.0), 1.0, 3, {256, 1024}, {0.01, {}, &over_n, true});
  CHECK(dcp_rows[1].macro_fraction > 0.3);
}
