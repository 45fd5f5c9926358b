#include "bosecycles/system.hpp"

#include <cmath>
#include <sstream>

#include "bosecycles/errors.hpp"
#include "bosecycles/special_functions.hpp"

namespace bosecycles {

SystemParams::SystemParams(int d, double L, int N, double beta)
    : d_(d), L_(L), N_(N), beta_(beta) {
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("box side L must be positive and finite");
  if (N < 1) throw ArgumentError("particle number N must be >= 1");
  lambda_ = thermal_wavelength(beta);
  volume_ = std::pow(L_, d_);
  rho_ = static_cast<double>(N_) / volume_;
}

SystemParams SystemParams::from_box(int d, double L, int N, double beta) {
  return SystemParams(d, L, N, beta);
}

SystemParams SystemParams::from_density(int d, double rho, int N, double beta) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("density must be positive and finite");
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  return SystemParams(d, std::pow(static_cast<double>(N) / rho, 1.0 / d), N, beta);
}

SystemParams SystemParams::from_degeneracy(int d, double rho_lambda_d, int N, double beta) {
  if (!(rho_lambda_d > 0.0)) throw DomainError("rho*lambda^d must be positive");
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  const double rho = rho_lambda_d / std::pow(thermal_wavelength(beta), d);
  return from_density(d, rho, N, beta);
}

double SystemParams::degeneracy() const { return rho_ * std::pow(lambda_, d_); }

std::string SystemParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << d_ << " L=" << L_ << " N=" << N_ << " beta=" << beta_ << " lambda=" << lambda_
     << " rho=" << rho_ << " rho_lambda_d=" << degeneracy();
  return os.str();
}

}  // namespace bosecycles
