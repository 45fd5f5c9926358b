#include "bosecycles/cycle_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "bosecycles/errors.hpp"
#include "bosecycles/special_functions.hpp"

namespace bosecycles {

const char* to_string(WeightProvenance p) {
  switch (p) {
    case WeightProvenance::ideal: return "ideal";
    case WeightProvenance::dcp_lower: return "dcp-lower";
    case WeightProvenance::dcp_upper: return "dcp-upper";
    case WeightProvenance::custom: return "custom";
  }
  return "unknown";
}

WeightSequence::WeightSequence(std::vector<double> log_w, WeightProvenance provenance,
                               std::optional<double> rate)
    : log_w_(std::move(log_w)), provenance_(provenance), rate_(rate) {
  if (log_w_.empty()) throw ArgumentError("weight sequence must contain at least w_1");
  for (std::size_t i = 0; i < log_w_.size(); ++i) {
    if (!std::isfinite(log_w_[i])) {
      throw DomainError("weight w_" + std::to_string(i + 1) + " must be positive and finite");
    }
  }
}

WeightSequence WeightSequence::from_values(std::span<const double> w, WeightProvenance provenance) {
  std::vector<double> logs;
  logs.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
      throw DomainError("weight w_" + std::to_string(i + 1) + " must be positive and finite");
    }
    logs.push_back(std::log(w[i]));
  }
  return WeightSequence(std::move(logs), provenance);
}

WeightSequence WeightSequence::ideal(const SystemParams& params) {
  std::vector<double> logs(static_cast<std::size_t>(params.N()));
  for (int n = 1; n <= params.N(); ++n) logs[n - 1] = log_q_n(params, n);
  return WeightSequence(std::move(logs), WeightProvenance::ideal, 0.0);
}

WeightSequence WeightSequence::constant(int n_max, double w) {
  if (n_max < 1) throw ArgumentError("weight sequence length must be >= 1");
  if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("constant weight must be positive");
  return WeightSequence(std::vector<double>(static_cast<std::size_t>(n_max), std::log(w)),
                        WeightProvenance::custom, 0.0);
}

double WeightSequence::w(int n) const { return std::exp(log_w(n)); }

WeightSequence WeightSequence::scaled_exponentially(double log_c, WeightProvenance provenance) const {
  std::vector<double> logs = log_w_;
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] += static_cast<double>(i + 1) * log_c;
  std::optional<double> rate;
  if (rate_) rate = *rate_ + log_c;
  return WeightSequence(std::move(logs), provenance, rate);
}

LogPartitionTable build_partition_table(const SystemParams& params, const WeightSequence& weights) {
  const int N = params.N();
  if (weights.size() < N) {
    throw ArgumentError("weight sequence covers n <= " + std::to_string(weights.size()) +
                        " but N = " + std::to_string(N));
  }
  const auto& lw = weights.log_values();
  std::vector<double> logQ(static_cast<std::size_t>(N) + 1, 0.0);
  std::vector<double> terms(static_cast<std::size_t>(N));
  for (int M = 1; M <= N; ++M) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= M; ++n) {
      terms[n - 1] = lw[n - 1] + logQ[M - n];
      peak = std::max(peak, terms[n - 1]);
    }
    double sum = 0.0;
    for (int n = 1; n <= M; ++n) sum += std::exp(terms[n - 1] - peak);
    logQ[M] = peak + (std::log(sum) - std::log(static_cast<double>(M)));
    if (!std::isfinite(logQ[M])) {
      throw NumericError("partition table entry ln Q_" + std::to_string(M) + " is not finite");
    }
  }
  return LogPartitionTable{params, weights, std::move(logQ)};
}

std::vector<double> first_cycle_probabilities(const LogPartitionTable& table, int M) {
  if (M < 1 || M > table.N()) throw ArgumentError("particle count outside the table");
  std::vector<double> p(static_cast<std::size_t>(M));
  const double norm = table.logQ[M] + std::log(static_cast<double>(M));
  for (int n = 1; n <= M; ++n) p[n - 1] = std::exp(table.weights.log_w(n) + table.logQ[M - n] - norm);
  return p;
}

CycleSpectrum cycle_density_spectrum(const LogPartitionTable& table) {
  CycleSpectrum out;
  out.N = table.N();
  out.d = table.params.d();
  out.rho = table.params.rho();
  out.fraction = first_cycle_probabilities(table, out.N);
  out.rho_n.resize(out.fraction.size());
  for (std::size_t i = 0; i < out.fraction.size(); ++i) out.rho_n[i] = out.rho * out.fraction[i];
  return out;
}

CycleSampler::CycleSampler(const LogPartitionTable& table, std::uint64_t seed)
    : table_(table), rng_(seed) {
  cdf_full_ = first_cycle_probabilities(table, table.N());
  for (std::size_t i = 1; i < cdf_full_.size(); ++i) cdf_full_[i] += cdf_full_[i - 1];
}

// 53 random bits; std::uniform_real_distribution is not reproducible across
// standard libraries.
double CycleSampler::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

int CycleSampler::draw(int M) {
  const double u = uniform();
  if (M == table_.N()) {
    const auto scaled = u * cdf_full_.back();
    const auto it = std::upper_bound(cdf_full_.begin(), cdf_full_.end(), scaled);
    return std::min(M, static_cast<int>(it - cdf_full_.begin()) + 1);
  }
  const double norm = table_.logQ[M] + std::log(static_cast<double>(M));
  double cumulative = 0.0;
  for (int n = 1; n < M; ++n) {
    cumulative += std::exp(table_.weights.log_w(n) + table_.logQ[M - n] - norm);
    if (u < cumulative) return n;
  }
  return M;
}

int CycleSampler::first_cycle_length() { return draw(table_.N()); }

CycleType CycleSampler::cycle_type() {
  CycleType type;
  int remaining = table_.N();
  while (remaining > 0) {
    const int n = draw(remaining);
    type.push_back(n);
    remaining -= n;
  }
  std::sort(type.begin(), type.end(), std::greater<>());
  return type;
}

CycleType sample_cycle_type(const LogPartitionTable& table, std::uint64_t seed) {
  CycleSampler sampler(table, seed);
  return sampler.cycle_type();
}

namespace {

// Partitions of `remaining` into parts <= max_part; multiplicities of larger
// parts are already folded into `product`.
double partition_sum(const WeightSequence& weights, int remaining, int max_part, double product) {
  if (remaining == 0) return product;
  if (max_part == 0) return 0.0;
  double total = 0.0;
  const double factor = weights.w(max_part) / max_part;
  double term = product;
  for (int m = 0; m * max_part <= remaining; ++m) {
    if (m > 0) term *= factor / m;
    total += partition_sum(weights, remaining - m * max_part, max_part - 1, term);
  }
  return total;
}

}  // namespace

double brute_force_partition_fn(const WeightSequence& weights, int N) {
  if (N < 1) throw ArgumentError("brute force needs N >= 1");
  if (N > kBruteForceMaxN) {
    throw ArgumentError("brute-force enumeration is limited to N <= " +
                        std::to_string(kBruteForceMaxN));
  }
  if (weights.size() < N) throw ArgumentError("weight sequence shorter than N");
  return partition_sum(weights, N, N, 1.0);
}

AuxiliaryIdentityReport verify_auxiliary_identity(const SystemParams& params,
                                                  const WeightSequence& base, double C, double D) {
  if (!std::isfinite(C) || !std::isfinite(D)) throw ArgumentError("C and D must be finite");
  const int N = params.N();
  const LogPartitionTable plain = build_partition_table(params, base);

  // Long double: ln Q-_M reaches C M^2 / 2 in magnitude, and double rounding
  // at that scale accumulates past 1e-10 over a few hundred steps.
  std::vector<long double> logQm(static_cast<std::size_t>(N) + 1, 0.0L);
  std::vector<long double> terms(static_cast<std::size_t>(N));
  const long double Cl = C, Dl = D;
  AuxiliaryIdentityReport report;
  for (int M = 1; M <= N; ++M) {
    long double peak = -std::numeric_limits<long double>::infinity();
    for (int n = 1; n <= M; ++n) {
      const long double psi = Cl * (static_cast<long double>(n) * (M - n) + 0.5L * n * (n - 1.0L)) + Dl * n;
      terms[n - 1] = base.log_w(n) - psi + logQm[M - n];
      peak = std::max(peak, terms[n - 1]);
    }
    long double sum = 0.0L;
    for (int n = 1; n <= M; ++n) sum += std::exp(terms[n - 1] - peak);
    logQm[M] = peak + (std::log(sum) - std::log(static_cast<long double>(M)));

    const long double predicted = -0.5L * Cl * M * (M - 1.0L) - Dl * M + plain.logQ[M];
    const double deviation = static_cast<double>(std::abs(std::expm1(logQm[M] - predicted)));
    if (!(deviation <= report.max_deviation)) {
      report.max_deviation = deviation;
      report.worst_M = M;
    }
  }
  return report;
}

int submacroscopic_upper(int N) {
  if (N < 3) return N;
  return static_cast<int>(std::floor(N / std::log(static_cast<double>(N))));
}

MacroscopicAggregate aggregate_macroscopic(const CycleSpectrum& spectrum, double eps,
                                           std::optional<double> band_eps) {
  if (!(eps > 0.0) || eps > 1.0) throw ArgumentError("eps must lie in (0, 1]");
  const double beps = band_eps.value_or(eps);
  if (!(beps > 0.0)) throw ArgumentError("band eps must be positive");
  const int N = spectrum.N;

  MacroscopicAggregate out;
  out.macro_start = std::max(1, static_cast<int>(std::ceil(eps * N - 1e-9)));
  for (int n = out.macro_start; n <= N; ++n) out.macro_density += spectrum.rho_n[n - 1];

  out.band_lower = std::max(1, static_cast<int>(std::ceil(beps * std::pow(N, 2.0 / spectrum.d))));
  out.band_upper = submacroscopic_upper(N);
  for (int n = out.band_lower; n <= std::min(out.band_upper, N); ++n) {
    out.band_density += spectrum.rho_n[n - 1];
  }
  return out;
}

}  // namespace bosecycles
