#pragma once

#include <functional>
#include <vector>

#include "dmkp/spectral.hpp"
#include "dmkp/symbols.hpp"

namespace dmkp {

/// W(t): multiplies each mode by exp(i t P(zeta) - |t| rho(xi)).
/// The |t| form makes negative t legal; it is not the inverse of W(|t|).
SpectralField apply_semigroup(const SpectralField& F, double t, const ModelParams& p);

/// U(t): multiplies each mode by exp(i t P(zeta)).
SpectralField apply_unitary(const SpectralField& F, double t, const ModelParams& p);

/// Exponent i P(zeta) - rho(xi) of the linear flow at storage index idx.
cplx linear_rate(const SpectralGrid& g, std::size_t idx, const ModelParams& p);

/// Multiplies each mode by Lambda^(xi).
SpectralField apply_lambda(SpectralField F, const ModelParams& p);

/// Lambda(u v): pointwise product, dealiased, Lambda applied, zero x-mode removed.
SpectralField bilinear_rhs(const SpectralField& u, const SpectralField& v, const ModelParams& p);

/// Lambda(u^2) for the Duhamel form u(t) = W(t) phi - int W(t - s) Lambda(u^2(s)) ds.
SpectralField nonlinear_rhs(const SpectralField& F, const ModelParams& p);

struct SimState {
  double time = 0.0;
  SpectralField field;
  ModelParams params;
  double dt = 0.0;
};

/// Integrating-factor RK4 on v(t) = exp(-t L) u(t), L = iP - rho.
/// The linear part is applied exactly; only -Lambda(u^2) is integrated by RK4.
class IfRk4Stepper {
 public:
  IfRk4Stepper(GridPtr grid, const ModelParams& params, double dt, bool nonlinear = true);

  /// Advances u by one step of size dt in place.
  void advance(SpectralField& u) const;

  double dt() const noexcept { return dt_; }

 private:
  SpectralField rhs(const SpectralField& u) const;

  GridPtr grid_;
  ModelParams params_;
  double dt_;
  bool nonlinear_;
  std::vector<cplx> half_;
  std::vector<cplx> full_;
};

/// One IF-RK4 step. Set nonlinear = false to advance only the linear flow.
/// Throws Instability if any coefficient becomes non-finite.
SimState step_ifrk4(const SimState& state, bool nonlinear = true);

using Observer = std::function<void(const SimState&)>;

struct SimulateOptions {
  int observe_every = 1;
  bool nonlinear = true;
};

/// Runs round(T/dt) steps from the projected, dealiased phi. The observer sees
/// the initial state and every observe_every-th state after it.
SimState simulate(const SpectralField& phi, double T, double dt, const ModelParams& params,
                  const Observer& observer = {}, SimulateOptions options = {});

/// Energy-balance monitor for the identity
///   d/dt (1/2)||u||^2 = -(2 pi)^-2 sum rho(xi) |u^|^2 dzeta,
/// which for dmkp reads -alpha(||u_xx||^2 - ||u_x||^2). The nonlinear term
/// (1/2)(u^2)_x contributes nothing; the (u^2)_xx term does, so the residual
/// is only expected to vanish at beta = 0.
class EnergyMonitor {
 public:
  struct Row {
    double t;
    double l2;
    double energy_lhs;     // finite-difference d/dt (1/2)||u||^2
    double energy_rhs;     // spectral right-hand side
    double residual;       // |lhs - rhs| / ||u||^2
    double growth_excess;  // d/dt ||u||^2 - (alpha/2)||u||^2, never positive
  };

  explicit EnergyMonitor(const ModelParams& params) : params_(params) {}

  /// Records one state; states must arrive at uniform spacing in time.
  void record(const SimState& state);

  /// Rows for every recorded state whose step index is a multiple of every.
  /// Uses the 5-point centred derivative, with 4th-order one-sided stencils
  /// at the first and last two samples. Needs at least five samples.
  std::vector<Row> rows(int every = 1) const;

  std::size_t size() const noexcept { return times_.size(); }

 private:
  ModelParams params_;
  std::vector<double> times_;
  std::vector<double> energy_;
  std::vector<double> rate_;
};

/// -(2 pi)^-2 sum rho |u^|^2 dzeta for one field.
double dissipation_rate(const SpectralField& F, const ModelParams& params);

}  // namespace dmkp
