#include "dmkp/propagator.hpp"

#include <cmath>
#include <numbers>

#include "dmkp/error.hpp"

namespace dmkp {

cplx linear_rate(const SpectralGrid& g, std::size_t idx, const ModelParams& p) {
  const double xi = g.xi(idx);
  return {-dissipation(xi, p), dispersion(xi, g.eta(idx), p)};
}

SpectralField apply_semigroup(const SpectralField& F, double t, const ModelParams& p) {
  SpectralField out(F);
  const auto& g = *F.grid;
  const double at = std::abs(t);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const double xi = g.xi(i);
    const double phase = t * dispersion(xi, g.eta(i), p);
    out.coeffs[i] *= std::exp(cplx{-at * dissipation(xi, p), phase});
  }
  return out;
}

SpectralField apply_unitary(const SpectralField& F, double t, const ModelParams& p) {
  SpectralField out(F);
  const auto& g = *F.grid;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const double phase = t * dispersion(g.xi(i), g.eta(i), p);
    out.coeffs[i] *= cplx{std::cos(phase), std::sin(phase)};
  }
  return out;
}

SpectralField apply_lambda(SpectralField F, const ModelParams& p) {
  const auto& g = *F.grid;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) F.coeffs[i] *= lambda_symbol(g.xi(i), p);
  return F;
}

SpectralField bilinear_rhs(const SpectralField& u, const SpectralField& v, const ModelParams& p) {
  SpectralField out = apply_lambda(dealiased_product(u, v), p);
  project_zero_x_mode_in_place(out);
  return out;
}

SpectralField nonlinear_rhs(const SpectralField& F, const ModelParams& p) {
  return bilinear_rhs(F, F, p);
}

IfRk4Stepper::IfRk4Stepper(GridPtr grid, const ModelParams& params, double dt, bool nonlinear)
    : grid_(std::move(grid)), params_(params), dt_(dt), nonlinear_(nonlinear) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("IfRk4Stepper: dt must be positive");
  const auto& g = *grid_;
  half_.resize(g.size());
  full_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx rate = linear_rate(g, i, params_);
    half_[i] = std::exp(0.5 * dt * rate);
    full_[i] = std::exp(dt * rate);
  }
}

SpectralField IfRk4Stepper::rhs(const SpectralField& u) const {
  SpectralField n = nonlinear_rhs(u, params_);
  n *= -1.0;
  return n;
}

void IfRk4Stepper::advance(SpectralField& u) const {
  const std::size_t n = u.coeffs.size();
  if (!nonlinear_) {
    for (std::size_t i = 0; i < n; ++i) u.coeffs[i] *= full_[i];
    return;
  }
  const double h = dt_;
  const SpectralField a = rhs(u);

  SpectralField stage(u.grid);
  stage.zero_x_mean = true;
  for (std::size_t i = 0; i < n; ++i) stage.coeffs[i] = half_[i] * (u.coeffs[i] + 0.5 * h * a.coeffs[i]);
  const SpectralField b = rhs(stage);

  for (std::size_t i = 0; i < n; ++i) stage.coeffs[i] = half_[i] * u.coeffs[i] + 0.5 * h * b.coeffs[i];
  const SpectralField c = rhs(stage);

  for (std::size_t i = 0; i < n; ++i) {
    stage.coeffs[i] = full_[i] * u.coeffs[i] + h * half_[i] * c.coeffs[i];
  }
  const SpectralField d = rhs(stage);

  for (std::size_t i = 0; i < n; ++i) {
    u.coeffs[i] = full_[i] * u.coeffs[i] +
                  (h / 6.0) * (full_[i] * a.coeffs[i] + 2.0 * half_[i] * (b.coeffs[i] + c.coeffs[i]) +
                               d.coeffs[i]);
  }
}

namespace {

void check_finite(const SpectralField& u, double time) {
  for (const auto& c : u.coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw Instability("non-finite coefficient after time step", time);
    }
  }
}

}  // namespace

SimState step_ifrk4(const SimState& state, bool nonlinear) {
  IfRk4Stepper stepper(state.field.grid, state.params, state.dt, nonlinear);
  SimState next = state;
  stepper.advance(next.field);
  next.time = state.time + state.dt;
  check_finite(next.field, next.time);
  return next;
}

SimState simulate(const SpectralField& phi, double T, double dt, const ModelParams& params,
                  const Observer& observer, SimulateOptions options) {
  if (!(T > 0.0) || !(dt > 0.0)) throw ConfigError("simulate: T and dt must be positive");
  if (options.observe_every < 1) throw ConfigError("simulate: observe_every must be >= 1");
  params.validate();
  const long steps = std::lround(T / dt);
  if (steps < 1) throw ConfigError("simulate: dt exceeds T");

  SimState state{0.0, project_zero_x_mode(dealias(phi)), params, dt};
  const IfRk4Stepper stepper(phi.grid, params, dt, options.nonlinear);
  if (observer) observer(state);
  for (long n = 1; n <= steps; ++n) {
    stepper.advance(state.field);
    state.time = static_cast<double>(n) * dt;
    check_finite(state.field, state.time);
    if (observer && n % options.observe_every == 0) observer(state);
  }
  return state;
}

double dissipation_rate(const SpectralField& F, const ModelParams& params) {
  const auto& g = *F.grid;
  double sum = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) sum += dissipation(g.xi(i), params) * std::norm(F.coeffs[i]);
  constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  return -sum * g.mode_measure() / four_pi_sq;
}

void EnergyMonitor::record(const SimState& state) {
  times_.push_back(state.time);
  energy_.push_back(0.5 * l2_norm_squared(state.field));
  rate_.push_back(dissipation_rate(state.field, params_));
}

std::vector<EnergyMonitor::Row> EnergyMonitor::rows(int every) const {
  const std::size_t n = times_.size();
  if (n < 5) throw ConfigError("EnergyMonitor: need at least five samples");
  if (every < 1) every = 1;
  const double h = (times_.back() - times_.front()) / static_cast<double>(n - 1);
  const auto& e = energy_;

  auto derivative = [&](std::size_t k) {
    if (k >= 2 && k + 2 < n) return (e[k - 2] - 8.0 * e[k - 1] + 8.0 * e[k + 1] - e[k + 2]) / (12.0 * h);
    if (k == 0) return (-25.0 * e[0] + 48.0 * e[1] - 36.0 * e[2] + 16.0 * e[3] - 3.0 * e[4]) / (12.0 * h);
    if (k == 1) return (-3.0 * e[0] - 10.0 * e[1] + 18.0 * e[2] - 6.0 * e[3] + e[4]) / (12.0 * h);
    const std::size_t m = n - 1;
    if (k == m) {
      return (25.0 * e[m] - 48.0 * e[m - 1] + 36.0 * e[m - 2] - 16.0 * e[m - 3] + 3.0 * e[m - 4]) / (12.0 * h);
    }
    return (3.0 * e[m] + 10.0 * e[m - 1] - 18.0 * e[m - 2] + 6.0 * e[m - 3] - e[m - 4]) / (12.0 * h);
  };

  // Largest growth rate of (1/2)||u||^2 per unit energy is -min rho.
  const double min_rho = params_.dissipation == DissipationKind::dmkp ? -0.25 * params_.alpha : 0.0;

  std::vector<Row> out;
  for (std::size_t k = 0; k < n; k += static_cast<std::size_t>(every)) {
    const double lhs = derivative(k);
    const double norm_sq = 2.0 * e[k];
    const double residual = norm_sq > 0.0 ? std::abs(lhs - rate_[k]) / norm_sq : std::abs(lhs - rate_[k]);
    out.push_back({times_[k], std::sqrt(norm_sq), lhs, rate_[k], residual,
                   2.0 * lhs + 2.0 * min_rho * norm_sq});
  }
  return out;
}

}  // namespace dmkp
