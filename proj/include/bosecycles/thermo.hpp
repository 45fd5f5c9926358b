#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bosecycles/cycle_engine.hpp"

namespace bosecycles {

struct ThermoPoint {
  double rho = 0.0;
  double beta = 0.0;
  int d = 3;
  double mu = 0.0;
  double beta_mu = 0.0;
  double rho_lambda_d = 0.0;
  double f0 = 0.0;
  double condensate_fraction = 0.0;
  double critical_density = 0.0;
};

/// Cycle-decoupling surrogate phi_n for the weight correction of n-cycles.
///
/// Either the built-in family phi_n = exp(c e^{-eps beta} n) n^{-gamma}, or a
/// table of ln phi_n continued past its end as e^{b n} n^{-p}, with p fitted to
/// the last third of the table.
class DcpModel {
 public:
  struct Family {
    double c;
    double eps;
    double gamma;
  };

  static DcpModel family(double c, double eps, double gamma, double beta);
  /// `rate` is estimated from the last third of the table when absent.
  static DcpModel tabulated(WeightSequence log_phi, std::optional<double> rate = std::nullopt,
                            bool allow_extrapolation = false);

  /// b = lim ln(phi_n) / n
  double rate() const { return rate_; }
  bool is_family() const { return family_.has_value(); }
  const std::optional<Family>& family_params() const { return family_; }
  double log_phi(int n) const;
  /// Fitted p of the table continuation (gamma for the family).
  double tail_power() const { return tail_power_; }

  /// sum_{n>=1} phi_n e^{x n} / n^{d/2} for x <= -b.
  double density_sum(double x, int d) const;
  /// density_sum(-b, d)
  double zeta_dcp(int d) const;
  /// Partial sum over the table at x = -b; a lower bound on zeta_dcp.
  double zeta_dcp_lower(int d) const;

  /// w_n = q_n phi_n, n = 1..N
  WeightSequence surrogate_weights(const SystemParams& params) const;

  std::string describe() const;

 private:
  DcpModel() = default;

  std::optional<Family> family_;
  std::vector<double> table_;  // ln phi_n, index n-1
  double rate_ = 0.0;
  double tail_power_ = 0.0;
  bool allow_extrapolation_ = false;
};

/// Least-squares slope of ln phi_n against n over the last third of the table.
double estimate_rate(const WeightSequence& log_phi);

double ideal_mu(double rho, double beta, int d);
double ideal_free_energy_density(double rho, double beta, int d);
ThermoPoint ideal_thermo_point(double rho, double beta, int d);

double dcp_mu(double rho, double beta, const DcpModel& model, int d);
double dcp_critical_density(double beta, const DcpModel& model, int d);

double condensate_fraction(double rho, double beta, int d, const DcpModel* model = nullptr);

struct ScanRow {
  int N = 0;
  double L = 0.0;
  double macro_fraction = 0.0;
  double band_fraction = 0.0;
  /// 1 - (fraction of particles in cycles shorter than band_eps N^{2/d})
  double condensate_estimate = 0.0;
};

struct ScanOptions {
  double eps = 0.01;
  std::optional<double> band_eps;
  const DcpModel* model = nullptr;
  bool parallel = true;
};

/// One partition table per N with L = (N/rho)^{1/d}.  Rows follow N_list order.
std::vector<ScanRow> finite_size_scan(double rho, double beta, int d, const std::vector<int>& N_list,
                                      const ScanOptions& options = {});

}  // namespace bosecycles
