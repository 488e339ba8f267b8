#pragma once

#include <complex>
#include <string>
#include <string_view>

namespace dmkp {

enum class DissipationKind { dmkp, burgers, none };

std::string_view to_string(DissipationKind kind);
DissipationKind dissipation_kind_from_string(std::string_view name);

/// Coefficients of (u_t + u_xxx + u u_x + alpha(u_xx + u_xxxx) + beta (u^2)_xx)_x + eps u_yy = 0.
struct ModelParams {
  double alpha = 1.0;
  double beta = 1.0;
  double epsilon = 1.0;  // +1 or -1
  DissipationKind dissipation = DissipationKind::dmkp;

  /// Throws ConfigError on a non-unit epsilon or non-positive alpha with dissipation on.
  void validate() const;
};

namespace presets {
/// Dissipation-modified KP, the full model.
ModelParams dmkp(double alpha = 1.0, double beta = 1.0, double epsilon = 1.0);
/// KP-Burgers: second-order dissipation, no (u^2)_xx term.
ModelParams kpb(double epsilon = 1.0);
/// Plain KP: no dissipation.
ModelParams kp(double epsilon = 1.0);
/// KdV-Kuramoto-Sivashinsky; meant for ny = 1 grids where eta vanishes.
ModelParams kdv_ks(double alpha = 1.0);
}  // namespace presets

/// Looks up a preset by name ("dmkp", "kpb", "kp", "kdv_ks").
ModelParams preset_by_name(std::string_view name, double alpha, double epsilon);

/// P(xi, eta) = xi^3 - eps eta^2 / xi, with P(0, eta) = 0.
double dispersion(double xi, double eta, const ModelParams& p);

/// Real decay rate: alpha (xi^4 - xi^2) for dmkp, alpha xi^2 for burgers, 0 otherwise.
double dissipation(double xi, const ModelParams& p);

/// Symbol of Lambda = (1/2) d_x + beta d_x^2.
std::complex<double> lambda_symbol(double xi, const ModelParams& p);

/// Modulus bound q(xi) = |xi| + xi^2.
double lambda_bound(double xi);

/// R(zeta, zeta1) = P(zeta1) + P(zeta2) - P(zeta), zeta2 = zeta - zeta1, in closed form.
/// Throws DegenerateFrequency when xi, xi1 or xi2 vanishes.
double resonance(double xi, double eta, double xi1, double eta1, const ModelParams& p);

/// M(xi, xi1) = rho(xi1) + rho(xi2) - rho(xi), closed form for dmkp.
double dissipation_gap(double xi, double xi1, const ModelParams& p);

}  // namespace dmkp
