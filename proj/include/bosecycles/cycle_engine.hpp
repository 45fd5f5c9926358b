#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bosecycles/system.hpp"

namespace bosecycles {

enum class WeightProvenance { ideal, dcp_lower, dcp_upper, custom };

const char* to_string(WeightProvenance p);

/// Cycle-length weights w_1..w_n, stored as logarithms.
class WeightSequence {
 public:
  WeightSequence(std::vector<double> log_w, WeightProvenance provenance,
                 std::optional<double> rate = std::nullopt);

  static WeightSequence from_values(std::span<const double> w,
                                    WeightProvenance provenance = WeightProvenance::custom);
  /// w_n = q_n for the parameters' box and temperature.
  static WeightSequence ideal(const SystemParams& params);
  static WeightSequence constant(int n_max, double w = 1.0);

  int size() const { return static_cast<int>(log_w_.size()); }
  /// ln w_n, 1-based.
  double log_w(int n) const { return log_w_.at(static_cast<std::size_t>(n - 1)); }
  double w(int n) const;
  const std::vector<double>& log_values() const { return log_w_; }
  WeightProvenance provenance() const { return provenance_; }
  std::optional<double> rate() const { return rate_; }

  /// Multiplies w_n by c^n, i.e. adds n ln c to every log weight.
  WeightSequence scaled_exponentially(double log_c, WeightProvenance provenance) const;

 private:
  std::vector<double> log_w_;
  WeightProvenance provenance_;
  std::optional<double> rate_;
};

/// ln Q_M for M = 0..N from Q_M = (1/M) sum_{n=1}^M w_n Q_{M-n}.
struct LogPartitionTable {
  SystemParams params;
  WeightSequence weights;
  std::vector<double> logQ;

  int N() const { return static_cast<int>(logQ.size()) - 1; }
};

struct CycleSpectrum {
  int N = 0;
  int d = 0;
  double rho = 0.0;
  std::vector<double> rho_n;     // index n-1
  std::vector<double> fraction;  // rho_n / rho, index n-1
};

/// Cycle lengths, sorted in decreasing order.
using CycleType = std::vector<int>;

/// O(N^2).  Weights must cover 1..params.N().
LogPartitionTable build_partition_table(const SystemParams& params, const WeightSequence& weights);

CycleSpectrum cycle_density_spectrum(const LogPartitionTable& table);

/// Probability that a tagged particle among M sits in a cycle of length n,
/// n = 1..M, from the table rows 0..M.
std::vector<double> first_cycle_probabilities(const LogPartitionTable& table, int M);

/// Exact draw of the cycle type; deterministic for a given seed.
CycleType sample_cycle_type(const LogPartitionTable& table, std::uint64_t seed);

/// Repeated exact draws from one table.  Keeps a reference to the table.
class CycleSampler {
 public:
  CycleSampler(const LogPartitionTable& table, std::uint64_t seed);
  /// Length of the cycle through a tagged particle among all N.
  int first_cycle_length();
  CycleType cycle_type();

 private:
  int draw(int M);
  double uniform();

  const LogPartitionTable& table_;
  std::mt19937_64 rng_;
  std::vector<double> cdf_full_;  // cumulative law for M = N
};

inline constexpr int kBruteForceMaxN = 10;

/// Enumeration over integer partitions of N of prod_n w_n^{m_n} / (m_n! n^{m_n}).
double brute_force_partition_fn(const WeightSequence& weights, int N);

struct AuxiliaryIdentityReport {
  double max_deviation = 0.0;  // max_M |Q-_M / (e^{-C M(M-1)/2 - D M} Q0_M) - 1|
  int worst_M = 0;
};

/// Builds Q- with weights w_n exp(-C[n(M-n) + n(n-1)/2] - D n) and compares it
/// with exp(-C M(M-1)/2 - D M) Q0_M for every M.
AuxiliaryIdentityReport verify_auxiliary_identity(const SystemParams& params,
                                                  const WeightSequence& base, double C, double D);

struct MacroscopicAggregate {
  double macro_density = 0.0;  // sum_{n >= eps N} rho_n
  double band_density = 0.0;   // sum over eps N^{2/d} <= n <= N / ln N
  int macro_start = 0;
  int band_lower = 0;
  int band_upper = 0;
};

/// `band_eps` defaults to `eps`.
MacroscopicAggregate aggregate_macroscopic(const CycleSpectrum& spectrum, double eps,
                                           std::optional<double> band_eps = std::nullopt);

/// Upper edge of the sub-macroscopic band, floor(N / ln N) (N for N < 3).
int submacroscopic_upper(int N);

}  // namespace bosecycles
