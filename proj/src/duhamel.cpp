#include "dmkp/duhamel.hpp"

#include <algorithm>
#include <cmath>

#include "dmkp/error.hpp"
#include "dmkp/propagator.hpp"

namespace dmkp {

double cutoff_theta(double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  auto psi = [](double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; };
  const double up = psi(2.0 - a);
  const double down = psi(a - 1.0);
  return up / (up + down);
}

namespace {

// exp(z) with the real part clamped so stiff modes underflow to zero
// instead of producing inf * 0.
cplx safe_exp(cplx z) {
  if (z.real() < -700.0) return 0.0;
  return std::exp(z);
}

}  // namespace

Trajectory duhamel(const Trajectory& w, const ModelParams& params, DuhamelOptions options) {
  const std::size_t count = w.size();
  if (count < 3) throw ConfigError("duhamel: need at least three time nodes");
  const auto& grid = w.grid();
  const auto& g = *grid;
  const double h = w.dt;

  Trajectory out;
  out.t0 = w.t0;
  out.dt = w.dt;
  out.fields.assign(count, SpectralField(grid));

  std::vector<cplx> node(count);
  std::vector<cplx> acc(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool any = false;
    const cplx lam = options.apply_lambda ? lambda_symbol(g.xi(i), params) : cplx{1.0};
    for (std::size_t n = 0; n < count; ++n) {
      node[n] = lam * w.fields[n].coeffs[i];
      any = any || node[n] != cplx{};
    }
    if (!any) continue;

    const cplx rate = linear_rate(g, i, params);
    const cplx e1 = safe_exp(h * rate);
    const cplx e2 = safe_exp(2.0 * h * rate);
    const cplx e3 = safe_exp(3.0 * h * rate);

    acc[0] = 0.0;
    if (options.rule == TimeQuadrature::trapezoid) {
      for (std::size_t n = 1; n < count; ++n) {
        acc[n] = e1 * acc[n - 1] + 0.5 * h * (e1 * node[n - 1] + node[n]);
      }
    } else {
      // exp(-hL) grows for dissipative modes; fall back to trapezoid on the
      // first interval when it would overflow.
      if (-h * rate.real() < 600.0) {
        const cplx back = std::exp(-h * rate);
        acc[1] = h / 12.0 * (5.0 * e1 * node[0] + 8.0 * node[1] - back * node[2]);
      } else {
        acc[1] = 0.5 * h * (e1 * node[0] + node[1]);
      }
      for (std::size_t n = 2; n < count; ++n) {
        if (n % 2 == 0) {
          acc[n] = e2 * acc[n - 2] + h / 3.0 * (e2 * node[n - 2] + 4.0 * e1 * node[n - 1] + node[n]);
        } else {
          acc[n] = e3 * acc[n - 3] +
                   3.0 * h / 8.0 * (e3 * node[n - 3] + 3.0 * e2 * node[n - 2] + 3.0 * e1 * node[n - 1] + node[n]);
        }
      }
    }
    for (std::size_t n = 0; n < count; ++n) out.fields[n].coeffs[i] = acc[n];
  }
  const bool zero_mean = std::all_of(w.fields.begin(), w.fields.end(), [](const auto& f) { return f.zero_x_mean; });
  for (auto& f : out.fields) f.zero_x_mean = zero_mean;
  return out;
}

std::vector<double> PicardResult::ratios() const {
  std::vector<double> out;
  for (std::size_t k = 1; k < residuals.size(); ++k) {
    out.push_back(residuals[k - 1] > 0.0 ? residuals[k] / residuals[k - 1] : 0.0);
  }
  return out;
}

namespace {

Trajectory free_evolution(const SpectralField& phi, double T, int n_steps, const ModelParams& params) {
  Trajectory lin;
  lin.t0 = 0.0;
  lin.dt = T / n_steps;
  lin.fields.reserve(n_steps + 1);
  for (int n = 0; n <= n_steps; ++n) lin.fields.push_back(apply_semigroup(phi, lin.time(n), params));
  return lin;
}

Trajectory picard_map(const Trajectory& u, const Trajectory& lin, const ModelParams& params) {
  Trajectory forcing;
  forcing.t0 = u.t0;
  forcing.dt = u.dt;
  forcing.fields.reserve(u.size());
  for (const auto& f : u.fields) forcing.fields.push_back(nonlinear_rhs(f, params));
  Trajectory next = duhamel(forcing, params);
  for (std::size_t n = 0; n < next.size(); ++n) {
    next.fields[n] = lin.fields[n] - next.fields[n];
    next.fields[n].zero_x_mean = true;
  }
  return next;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  double sup = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) sup = std::max(sup, l2_distance(a.fields[n], b.fields[n]));
  return sup;
}

}  // namespace

PicardResult picard_solve(const SpectralField& phi, double T, int n_steps, const ModelParams& params,
                          PicardOptions options) {
  if (!(T > 0.0)) throw ConfigError("picard_solve: T must be positive");
  if (n_steps < 2) throw ConfigError("picard_solve: need at least two time steps");
  if (options.max_iter < 1) throw ConfigError("picard_solve: max_iter must be >= 1");
  params.validate();

  const SpectralField data = project_zero_x_mode(dealias(phi));
  const Trajectory lin = free_evolution(data, T, n_steps, params);

  PicardResult result;
  Trajectory current = lin;
  int rising = 0;
  for (int k = 0; k < options.max_iter; ++k) {
    Trajectory next = picard_map(current, lin, params);
    const double res = sup_distance(next, current);
    if (!std::isfinite(res)) throw NonConvergence("picard_solve: residual became non-finite");
    result.residuals.push_back(res);
    if (options.on_iteration) options.on_iteration(k, res);
    current = std::move(next);
    if (res < options.tol) {
      result.converged = true;
      break;
    }
    const std::size_t m = result.residuals.size();
    if (m >= 2 && res >= result.residuals[m - 2]) {
      if (++rising >= options.divergence_patience) {
        throw NonConvergence("picard_solve: residual ratio >= 1, outside the contraction ball; shrink T or data");
      }
    } else {
      rising = 0;
    }
  }
  if (!result.converged) {
    throw NonConvergence("picard_solve: no convergence after " + std::to_string(options.max_iter) +
                         " iterations; shrink T or data");
  }
  result.trajectory = std::move(current);
  return result;
}

double duhamel_defect(const Trajectory& u, const SpectralField& phi, const ModelParams& params) {
  const SpectralField data = project_zero_x_mode(dealias(phi));
  const int n_steps = static_cast<int>(u.size()) - 1;
  const Trajectory lin = free_evolution(data, u.dt * n_steps, n_steps, params);
  return sup_distance(picard_map(u, lin, params), u);
}

}  // namespace dmkp
