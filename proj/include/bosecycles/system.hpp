#pragma once

#include <string>

namespace bosecycles {

/// Particle number, box and temperature of a Bose gas on the d-torus of side L.
///
/// Reduced units hbar = m = 1 are used throughout, so the thermal wavelength is
/// lambda = sqrt(2 pi beta).  Only dimensionless combinations such as rho*lambda^d
/// and n*lambda^2/L^2 enter physical conclusions.
class SystemParams {
 public:
  static SystemParams from_box(int d, double L, int N, double beta);
  static SystemParams from_density(int d, double rho, int N, double beta);
  /// Density fixed through the degeneracy parameter rho*lambda^d.
  static SystemParams from_degeneracy(int d, double rho_lambda_d, int N, double beta);

  int d() const { return d_; }
  double L() const { return L_; }
  int N() const { return N_; }
  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  double rho() const { return rho_; }
  double volume() const { return volume_; }
  /// rho * lambda^d
  double degeneracy() const;

  std::string describe() const;

 private:
  SystemParams(int d, double L, int N, double beta);

  int d_;
  double L_;
  int N_;
  double beta_;
  double lambda_;
  double volume_;
  double rho_;
};

}  // namespace bosecycles
