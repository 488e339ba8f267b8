#pragma once

#include <functional>
#include <vector>

#include "dmkp/spectral.hpp"
#include "dmkp/symbols.hpp"

namespace dmkp {

/// Smooth bump: 1 on [-1, 1], 0 outside (-2, 2), and on 1 < |t| < 2 the
/// partition psi(2 - |t|) / (psi(2 - |t|) + psi(|t| - 1)), psi(r) = exp(-1/r).
double cutoff_theta(double t);

/// theta_T(t) = theta(t / T).
struct CutoffSpec {
  double scale = 1.0;
  double operator()(double t) const { return cutoff_theta(t / scale); }
};

/// Fields on a uniform time grid t_n = t0 + n dt, n = 0..size()-1.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<SpectralField> fields;

  std::size_t size() const noexcept { return fields.size(); }
  double time(std::size_t n) const noexcept { return t0 + dt * static_cast<double>(n); }
  const GridPtr& grid() const { return fields.front().grid; }
};

enum class TimeQuadrature { simpson, trapezoid };

struct DuhamelOptions {
  TimeQuadrature rule = TimeQuadrature::simpson;
  /// Multiply each integrand node by Lambda^(xi) first.
  bool apply_lambda = false;
};

/// t_n -> int_{t_0}^{t_n} W(t_n - s) w(s) ds for every node.
///
/// Per mode this is the quadrature of exp(-sL) w(s) in the transformed
/// variable, multiplied back by exp(t_n L), with L = iP - rho. The exponentials
/// are combined as exp((t_n - t_m) L) so nothing overflows. Composite Simpson
/// up to an even node, a closing 3/8 panel for odd n >= 3, and the three-point
/// start formula (5, 8, -1) h / 12 at n = 1. Needs at least three nodes.
Trajectory duhamel(const Trajectory& w, const ModelParams& params, DuhamelOptions options = {});

struct PicardResult {
  Trajectory trajectory;
  std::vector<double> residuals;  // sup over nodes of ||u^(k+1) - u^k||_L2
  bool converged = false;

  /// residuals[k+1] / residuals[k].
  std::vector<double> ratios() const;
};

struct PicardOptions {
  int max_iter = 50;
  double tol = 1e-10;
  /// Abort when this many consecutive residual ratios are >= 1.
  int divergence_patience = 3;
  /// Called with (iteration, residual) after every iteration.
  std::function<void(int, double)> on_iteration;
};

/// Fixed-point iteration u <- W(t) phi - duhamel(Lambda(u^2)) on [0, T]
/// with n_steps intervals, starting from u = W(t) phi.
/// Throws NonConvergence if the residual stops contracting or max_iter is hit.
PicardResult picard_solve(const SpectralField& phi, double T, int n_steps, const ModelParams& params,
                          PicardOptions options = {});

/// Sup over nodes of the L2 defect of u against W(t) phi - duhamel(Lambda(u^2)).
double duhamel_defect(const Trajectory& u, const SpectralField& phi, const ModelParams& params);

}  // namespace dmkp
