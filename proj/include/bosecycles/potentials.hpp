#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bosecycles/cycle_engine.hpp"

namespace bosecycles {

enum class TailKind { compact, gaussian, power_law, unknown };

/// Decay of |u(r)|, used to truncate image sums.
///   compact:   u = 0 for r > scale
///   gaussian:  |u(r)| <= amplitude exp(-pi r^2 / scale^2)
///   power_law: |u(r)| <= amplitude r^{-d-eta} for r >= scale
struct TailModel {
  TailKind kind = TailKind::unknown;
  double scale = 0.0;
  double amplitude = 0.0;
  double eta = 0.0;
};

/// Radial pair potential with Fourier convention uhat(k) = int u(x) e^{-2 pi i k.x} dx.
struct PairPotential {
  int d = 3;
  std::string kind;
  std::string description;
  std::function<double(double)> u;     // of |x|
  std::function<double(double)> uhat;  // of |k|
  double u0 = 0.0;
  double uhat0 = 0.0;
  double norm1 = 0.0;
  TailModel tail;
  bool positive = false;
  bool positive_type = false;
  /// User-supplied superstability constant C[u]; otherwise uhat0/2 is used for
  /// potentials of positive type.
  std::optional<double> superstability;
};

PairPotential gaussian_potential(double g, double sigma, int d);

struct AutocorrelationOptions {
  double rel_tol = 1e-10;
};

/// u = v * v(-.) for a nonnegative radial v supported in [0, support].
PairPotential autocorrelation_potential(std::function<double(double)> v, double support, int d,
                                        const AutocorrelationOptions& options = {});

/// Linear interpolation of a radial profile r_i -> u_i, zero beyond the last r.
PairPotential tabulated_potential(std::vector<double> r, std::vector<double> values, int d);

/// sum_z u(x + L z), truncated so the tail bound is below 1e-10 of the result.
double periodize(const PairPotential& pot, double L, std::span<const double> x);

double alpha_nk(int n, int k, double lambda);

struct MeanInteractionBound {
  /// (|u|_1/2) n [(n-1)/L^d + 2^{d/2} zeta(d/2)/lambda^d]
  double simplified = 0.0;
  /// (|u|_1/2) n sum_k alpha^{d/2} (1 + 1/(L sqrt(alpha)))^d
  double exact = 0.0;
  /// (|u|_1/2) n sum_k alpha^{d/2}, the L -> infinity part of `exact`
  double k_sum = 0.0;
  /// exact - (|u|_1/2) n [(n-1)/L^d + sum_k alpha^{d/2}]: finite-L cross terms
  double o1 = 0.0;
};

MeanInteractionBound mean_interaction_upper(int n, double L, double beta, const PairPotential& pot);

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
  std::string context;
};

/// Bounds on Phi^n_n / q_n.  `log_lower`/`log_upper` avoid underflow at large n.
struct WeightFactorBounds {
  BoundPair factor;
  double log_lower = 0.0;
  double log_upper = 0.0;
};

WeightFactorBounds phi_nn_bounds(int n, double L, double beta, const PairPotential& pot);

struct FreeEnergyBounds {
  BoundPair f;
  /// f - rho^2 |u|_1 / 2; only for potentials that are positive and of positive type
  std::optional<BoundPair> f_tilde;
  double f0 = 0.0;
  double superstability = 0.0;  // C[u] used in the lower bound
};

FreeEnergyBounds free_energy_bounds(double rho, double beta, const PairPotential& pot);

struct DcpSandwich {
  BoundPair bounds;  // on ln Q~dcp - ln Q0
  /// ln Q - ln Q0 for weights q_n c^n at the lower and upper per-n factors.
  double recursion_lower = 0.0;
  double recursion_upper = 0.0;
  /// Same for weights with per-n factors drawn between the bounds.
  std::vector<double> surrogates;
  bool inside = false;
};

DcpSandwich dcp_partition_sandwich(int N, double L, double beta, const PairPotential& pot,
                                   int random_surrogates = 3, std::uint64_t seed = 1);

/// Weight sequences q_n times the lower or upper per-n bound factor.
WeightSequence dcp_bound_weights(const SystemParams& params, const PairPotential& pot, bool upper);

struct ConditionGrid {
  double r_max = 0.0;  // 0: pick from the tail model
  double k_max = 0.0;
  int points = 400;
};

struct ConditionReport {
  double min_u = 0.0;
  double min_uhat = 0.0;
  bool positive = false;       // condition (i) on the grid
  bool positive_type = false;  // condition (ii) on the grid
  double uhat_integral = 0.0;  // int |uhat| d^d k up to k_max
  double uhat_tail_fraction = 0.0;
  /// Fitted log-log slope of |u| on the outer grid; -inf for compact support.
  double tail_exponent = 0.0;
  bool decay_ok = false;  // condition (iii): tail_exponent < -d
  bool all_pass() const { return positive && positive_type && decay_ok; }
};

ConditionReport validate_conditions(const PairPotential& pot, const ConditionGrid& grid = {});

/// Parses "gaussian:g,sigma".
PairPotential parse_potential_shorthand(const std::string& spec, int d);

}  // namespace bosecycles
