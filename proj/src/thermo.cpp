#include "bosecycles/thermo.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "bosecycles/errors.hpp"
#include "bosecycles/special_functions.hpp"

namespace bosecycles {

namespace {

constexpr double kTailTolerance = 1e-10;

void require_condensation_dimension(int d) {
  if (d < 3) {
    throw UnsupportedError("condensation quantities need d >= 3 (g_{d/2}(1) diverges for d <= 2), got d = " +
                           std::to_string(d));
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be positive and finite");
}

double degeneracy(double rho, double beta, int d) {
  return rho * std::pow(thermal_wavelength(beta), d);
}

// Bisection for the root of f(x) = target on [lo, hi] where f increases.
// Runs until the bracket stops shrinking.
template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct LinearFit {
  double slope;
  double intercept;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

std::size_t last_third_start(std::size_t size) {
  return size >= 3 ? size - size / 3 : 0;
}

}  // namespace

double estimate_rate(const WeightSequence& log_phi) {
  const auto& values = log_phi.log_values();
  if (values.size() < 2) throw ArgumentError("rate estimate needs at least two weights");
  std::vector<double> x, y;
  for (std::size_t i = std::min(last_third_start(values.size()), values.size() - 2); i < values.size(); ++i) {
    x.push_back(static_cast<double>(i + 1));
    y.push_back(values[i]);
  }
  return least_squares(x, y).slope;
}

DcpModel DcpModel::family(double c, double eps, double gamma, double beta) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("dcp family: c must be >= 0");
  if (!std::isfinite(eps)) throw DomainError("dcp family: eps must be finite");
  if (!std::isfinite(gamma)) throw DomainError("dcp family: gamma must be finite");
  require_positive(beta, "beta");
  DcpModel model;
  model.family_ = Family{c, eps, gamma};
  model.rate_ = c * std::exp(-eps * beta);
  model.tail_power_ = gamma;
  return model;
}

DcpModel DcpModel::tabulated(WeightSequence log_phi, std::optional<double> rate, bool allow_extrapolation) {
  DcpModel model;
  model.table_ = log_phi.log_values();
  model.rate_ = rate ? *rate : (log_phi.rate() ? *log_phi.rate() : estimate_rate(log_phi));
  if (!std::isfinite(model.rate_)) throw DomainError("dcp rate must be finite");
  model.allow_extrapolation_ = allow_extrapolation;
  const auto& t = model.table_;
  if (t.size() >= 3) {
    std::vector<double> x, y;
    for (std::size_t i = last_third_start(t.size()); i < t.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      x.push_back(std::log(n));
      y.push_back(t[i] - model.rate_ * n);
    }
    model.tail_power_ = -least_squares(x, y).slope;
  }
  return model;
}

double DcpModel::log_phi(int n) const {
  if (n < 1) throw ArgumentError("cycle length must be >= 1");
  if (family_) return rate_ * n - family_->gamma * std::log(static_cast<double>(n));
  const int K = static_cast<int>(table_.size());
  if (n <= K) return table_[n - 1];
  if (!allow_extrapolation_) {
    throw TruncationError("tabulated phi covers n <= " + std::to_string(K) + ", asked for n = " +
                          std::to_string(n) + " (enable extrapolation to continue exponentially)");
  }
  return table_.back() + rate_ * (n - K) - tail_power_ * std::log(static_cast<double>(n) / K);
}

double DcpModel::density_sum(double x, int d) const {
  const double excess = x + rate_;
  if (excess > 1e-14 * std::max(1.0, std::abs(rate_))) {
    throw DomainError("density sum diverges for beta*mu > -b");
  }
  const double shifted = std::min(excess, 0.0);
  const double s = 0.5 * d;
  if (family_) {
    const double order = s + family_->gamma;
    if (shifted == 0.0 && order <= 1.0) {
      throw DivergenceError("dcp saturation sum diverges: d/2 + gamma = " + std::to_string(order) + " <= 1");
    }
    return polylog(order, std::exp(shifted));
  }

  const int K = static_cast<int>(table_.size());
  double head = 0.0;
  for (int n = K; n >= 1; --n) head += std::exp(table_[n - 1] + x * n - s * std::log(static_cast<double>(n)));
  const double order = s + tail_power_;
  if (shifted == 0.0 && order <= 1.0) {
    throw DivergenceError("dcp saturation sum diverges: table tail decays like n^-" + std::to_string(order) +
                          " (is the rate b misestimated?)");
  }
  const double tail = std::exp(table_.back() - rate_ * K + tail_power_ * std::log(static_cast<double>(K))) *
                      bose_tail(order, -shifted, K + 1);
  if (!allow_extrapolation_ && tail > kTailTolerance * (head + tail)) {
    std::ostringstream msg;
    msg << "tabulated phi ends at n = " << K << " with an estimated tail of " << tail / (head + tail)
        << " of the sum (limit " << kTailTolerance << "); extend the table or enable extrapolation";
    throw TruncationError(msg.str());
  }
  return head + tail;
}

double DcpModel::zeta_dcp(int d) const { return density_sum(-rate_, d); }

double DcpModel::zeta_dcp_lower(int d) const {
  if (family_) return zeta_dcp(d);
  double head = 0.0;
  for (int n = static_cast<int>(table_.size()); n >= 1; --n) {
    head += std::exp(table_[n - 1] - rate_ * n - 0.5 * d * std::log(static_cast<double>(n)));
  }
  return head;
}

WeightSequence DcpModel::surrogate_weights(const SystemParams& params) const {
  std::vector<double> logs(static_cast<std::size_t>(params.N()));
  for (int n = 1; n <= params.N(); ++n) logs[n - 1] = log_q_n(params, n) + log_phi(n);
  return WeightSequence(std::move(logs), WeightProvenance::custom, rate_);
}

std::string DcpModel::describe() const {
  std::ostringstream out;
  if (family_) {
    out << "family c=" << family_->c << " eps=" << family_->eps << " gamma=" << family_->gamma;
  } else {
    out << "tabulated n<=" << table_.size() << (allow_extrapolation_ ? " extrapolated" : "");
  }
  out << " b=" << rate_;
  return out.str();
}

double ideal_mu(double rho, double beta, int d) {
  require_condensation_dimension(d);
  require_positive(rho, "rho");
  const double target = degeneracy(rho, beta, d);
  const double s = 0.5 * d;
  // rho lambda^d recomputed from a threshold density lands within rounding of zeta
  if (target >= riemann_zeta(s) * (1.0 - 8 * std::numeric_limits<double>::epsilon())) return 0.0;
  const double lo = std::min(std::log(target) - 1.0, -50.0);
  const double x = bisect_increasing([s](double v) { return polylog(s, std::exp(v)); }, target, lo, 0.0);
  return x / beta;
}

double ideal_free_energy_density(double rho, double beta, int d) {
  const double mu = ideal_mu(rho, beta, d);
  const double lambda_d = std::pow(thermal_wavelength(beta), d);
  return rho * mu - polylog(1.0 + 0.5 * d, std::exp(beta * mu)) / (beta * lambda_d);
}

ThermoPoint ideal_thermo_point(double rho, double beta, int d) {
  ThermoPoint p;
  p.rho = rho;
  p.beta = beta;
  p.d = d;
  p.mu = ideal_mu(rho, beta, d);
  p.beta_mu = beta * p.mu;
  p.rho_lambda_d = degeneracy(rho, beta, d);
  p.f0 = ideal_free_energy_density(rho, beta, d);
  p.critical_density = riemann_zeta(0.5 * d) / std::pow(thermal_wavelength(beta), d);
  p.condensate_fraction = condensate_fraction(rho, beta, d);
  return p;
}

double dcp_mu(double rho, double beta, const DcpModel& model, int d) {
  require_condensation_dimension(d);
  require_positive(rho, "rho");
  const double target = degeneracy(rho, beta, d);
  const double b = model.rate();
  // An uncertified saturation value is only needed when the target is not
  // already below the partial sum over the table.
  if (target >= model.zeta_dcp_lower(d) && target >= model.zeta_dcp(d)) return -b / beta;
  auto f = [&](double x) { return model.density_sum(x, d); };
  double width = 50.0;
  while (f(-b - width) >= target) {
    width *= 2.0;
    if (width > 1e6) throw NumericError("dcp_mu: could not bracket the chemical potential");
  }
  return bisect_increasing(f, target, -b - width, -b) / beta;
}

double dcp_critical_density(double beta, const DcpModel& model, int d) {
  require_condensation_dimension(d);
  return model.zeta_dcp(d) / std::pow(thermal_wavelength(beta), d);
}

double condensate_fraction(double rho, double beta, int d, const DcpModel* model) {
  require_condensation_dimension(d);
  require_positive(rho, "rho");
  const double zeta_c = model ? model->zeta_dcp(d) : riemann_zeta(0.5 * d);
  return std::max(0.0, 1.0 - zeta_c / degeneracy(rho, beta, d));
}

std::vector<ScanRow> finite_size_scan(double rho, double beta, int d, const std::vector<int>& N_list,
                                      const ScanOptions& options) {
  require_positive(rho, "rho");
  auto one = [&](int N) {
    const auto params = SystemParams::from_density(d, rho, N, beta);
    const auto weights = options.model ? options.model->surrogate_weights(params) : WeightSequence::ideal(params);
    const auto spectrum = cycle_density_spectrum(build_partition_table(params, weights));
    const auto agg = aggregate_macroscopic(spectrum, options.eps, options.band_eps);
    ScanRow row;
    row.N = N;
    row.L = params.L();
    row.macro_fraction = agg.macro_density / spectrum.rho;
    row.band_fraction = agg.band_density / spectrum.rho;
    double short_cycles = 0.0;
    for (int n = 1; n < agg.band_lower && n <= N; ++n) short_cycles += spectrum.fraction[n - 1];
    row.condensate_estimate = 1.0 - short_cycles;
    return row;
  };

  std::vector<ScanRow> rows;
  rows.reserve(N_list.size());
  if (!options.parallel || N_list.size() < 2) {
    for (int N : N_list) rows.push_back(one(N));
    return rows;
  }
  std::vector<std::future<ScanRow>> jobs;
  for (int N : N_list) jobs.push_back(std::async(std::launch::async, one, N));
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

}  // namespace bosecycles
