#include "dmkp/illposed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dmkp/error.hpp"
#include "dmkp/norms.hpp"
#include "dmkp/quadrature.hpp"

namespace dmkp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(z) - 1 without cancellation for small |z|.
cplx expm1c(cplx z) {
  const double s = std::sin(0.5 * z.imag());
  return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

cplx kernel_core(double t, double rho, double rho1, double rho2, double r, double m, double tol) {
  if (t == 0.0) return 0.0;
  const cplx d{-m, r};
  const double mod = std::abs(d);
  // The relative test alone would pick the series for large |M| + |R| and
  // t |D| of order one; the cubic remainder is only negligible for small t |D|.
  if (mod < tol * (1.0 + std::abs(m) + std::abs(r)) && t * mod < 1e-3) {
    const cplx z = t * d;
    return t * std::exp(-t * rho) * (1.0 + z / 2.0 + z * z / 6.0);
  }
  if (t * mod < 1.0) return std::exp(-t * rho) * expm1c(t * d) / d;
  return (std::exp(-t * (rho1 + rho2)) * std::polar(1.0, t * r) - std::exp(-t * rho)) / d;
}

// Everything in a second iterate that depends on zeta alone.
struct OuterMode {
  Freq zeta;
  double rho;
  double t;
};

cplx kernel_at(const OuterMode& o, Freq z1, const ModelParams& params, double tol) {
  const double r = resonance(o.zeta.xi, o.zeta.eta, z1.xi, z1.eta, params);
  const double m = dissipation_gap(o.zeta.xi, z1.xi, params);
  const double rho1 = dissipation(z1.xi, params);
  const double rho2 = dissipation(o.zeta.xi - z1.xi, params);
  return kernel_core(o.t, o.rho, rho1, rho2, r, m, tol);
}

// -Lambda^(xi) (2 pi)^-2 e^{itP(zeta)}.
cplx outer_factor(Freq zeta, double t, const ModelParams& params) {
  const cplx lam = lambda_symbol(zeta.xi, params);
  return -lam / (kTwoPi * kTwoPi) * std::polar(1.0, t * dispersion(zeta.xi, zeta.eta, params));
}

// Sum over ordered pairs of int_{S cap (zeta - S')} K dzeta1, unit amplitude.
cplx pair_integral(Freq zeta, const std::array<SignedRect, 4>& pieces, double t, const ModelParams& params, int mx,
                   int my, double tol) {
  const OuterMode o{zeta, dissipation(zeta.xi, params), t};
  const GaussRule& gx = gauss_legendre(mx);
  const GaussRule& gy = gauss_legendre(my);
  cplx sum = 0.0;
  for (const auto& s : pieces) {
    for (const auto& s2 : pieces) {
      const Rect cell = intersect(s.region(), reflect_about(zeta, s2.region()));
      if (cell.empty()) continue;
      const double hx = 0.5 * (cell.x1 - cell.x0), cx = 0.5 * (cell.x1 + cell.x0);
      const double hy = 0.5 * (cell.y1 - cell.y0), cy = 0.5 * (cell.y1 + cell.y0);
      cplx part = 0.0;
      for (int i = 0; i < mx; ++i) {
        const double x = cx + hx * gx.nodes[i];
        cplx row = 0.0;
        for (int j = 0; j < my; ++j) row += gy.weights[j] * kernel_at(o, {x, cy + hy * gy.nodes[j]}, params, tol);
        part += gx.weights[i] * row;
      }
      sum += part * hx * hy;
    }
  }
  return sum;
}

double bracket_integral(double x0, double x1, double s) {
  // int_{x0}^{x1} (1 + |x|)^{2s} dx for an interval not containing 0.
  if (x1 <= 0.0) return bracket_integral(-x1, -x0, s);
  const double p = 2.0 * s + 1.0;
  if (std::abs(p) < 1e-14) return std::log1p(x1) - std::log1p(x0);
  return (std::pow(1.0 + x1, p) - std::pow(1.0 + x0, p)) / p;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

Rect intersect(const Rect& a, const Rect& b) {
  return {std::max(a.x0, b.x0), std::min(a.x1, b.x1), std::max(a.y0, b.y0), std::min(a.y1, b.y1)};
}

Rect minkowski_sum(const Rect& a, const Rect& b) { return {a.x0 + b.x0, a.x1 + b.x1, a.y0 + b.y0, a.y1 + b.y1}; }

Rect reflect_about(Freq z, const Rect& b) { return {z.xi - b.x1, z.xi - b.x0, z.eta - b.y1, z.eta - b.y0}; }

double RectangleData::amplitude() const { return 0.5 * std::pow(N, -1.5 - s); }

Rect RectangleData::a_rect() const { return {N / 2.0, N, -6.0 * N * N, 6.0 * N * N}; }

Rect RectangleData::b_rect() const { return {N, 2.0 * N, 2.0 * N * N, 3.0 * N * N}; }

std::array<SignedRect, 4> RectangleData::pieces() const {
  return {SignedRect{a_rect(), 1}, SignedRect{b_rect(), 1}, SignedRect{a_rect(), -1}, SignedRect{b_rect(), -1}};
}

double RectangleData::value(Freq z) const {
  for (const auto& p : pieces()) {
    if (p.contains(z)) return amplitude();
  }
  return 0.0;
}

double phi_norm(const RectangleData& rect) {
  const double a = rect.amplitude();
  double sum = 0.0;
  for (const auto& p : rect.pieces()) {
    const Rect r = p.region();
    sum += a * a * (r.y1 - r.y0) * bracket_integral(r.x0, r.x1, rect.s);
  }
  return std::sqrt(sum);
}

SpectralField phi_n_field(const GridPtr& grid, const RectangleData& rect) {
  const auto& g = *grid;
  if (g.ny() == 1) throw ConfigError("phi_n_field: needs a two-dimensional grid");
  const double xmax = 0.5 * g.nx() * g.dxi();
  const double ymax = 0.5 * g.ny() * g.deta();
  if (!(xmax > 2.0 * rect.N) || !(ymax > 6.0 * rect.N * rect.N)) {
    throw ConfigError("phi_n_field: grid band does not contain the support of phi_N");
  }
  SpectralField f(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    f.coeffs[i] = rect.value({g.xi(i), g.eta(i)});
  }
  f.zero_x_mean = true;
  return f;
}

void ScanConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("scan: eps must lie in (0, 1)");
  if (std::min({outer_xi, outer_eta, inner_xi, inner_eta}) < 8) throw ConfigError("scan: quadrature orders must be >= 8");
  if (!(singular_tol > 0.0)) throw ConfigError("scan: singular_tol must be positive");
  if (s_values.empty()) throw ConfigError("scan: empty s list");
  for (double n : n_values) {
    if (!(n >= 8.0)) throw ConfigError("scan: every N must be >= 8");
  }
}

double time_schedule(double N, double eps) { return std::pow(N, -4.0 - eps); }

cplx kernel(Freq zeta, Freq zeta1, double t, const ModelParams& params, double singular_tol) {
  const OuterMode o{zeta, dissipation(zeta.xi, params), t};
  return kernel_at(o, zeta1, params, singular_tol);
}

cplx second_iterate_mode(Freq zeta, const RectangleData& rect, double t, const ModelParams& params, int m_xi,
                         int m_eta, double singular_tol) {
  const double a = rect.amplitude();
  const cplx inner = pair_integral(zeta, rect.pieces(), t, params, m_xi, m_eta, singular_tol);
  if (inner == cplx{}) return 0.0;
  return a * a * outer_factor(zeta, t, params) * inner;
}

cplx second_iterate_lattice(Freq zeta, const RectangleData& rect, double t, const ModelParams& params, double dxi,
                            double deta, double singular_tol) {
  if (!(dxi > 0.0) || !(deta > 0.0)) throw ConfigError("second_iterate_lattice: spacing must be positive");
  const auto pieces = rect.pieces();
  const OuterMode o{zeta, dissipation(zeta.xi, params), t};
  cplx sum = 0.0;
  for (const auto& s : pieces) {
    for (const auto& s2 : pieces) {
      const Rect box = intersect(s.region(), reflect_about(zeta, s2.region()));
      if (box.x1 < box.x0 || box.y1 < box.y0) continue;
      const long j0 = static_cast<long>(std::floor(box.x0 / dxi)) - 1;
      const long j1 = static_cast<long>(std::ceil(box.x1 / dxi)) + 1;
      const long k0 = static_cast<long>(std::floor(box.y0 / deta)) - 1;
      const long k1 = static_cast<long>(std::ceil(box.y1 / deta)) + 1;
      for (long j = j0; j <= j1; ++j) {
        for (long k = k0; k <= k1; ++k) {
          const Freq z1{j * dxi, k * deta};
          const Freq z2{zeta.xi - z1.xi, zeta.eta - z1.eta};
          if (!s.contains(z1) || !s2.contains(z2)) continue;
          sum += kernel_at(o, z1, params, singular_tol);
        }
      }
    }
  }
  if (sum == cplx{}) return 0.0;
  const double a = rect.amplitude();
  return a * a * outer_factor(zeta, t, params) * sum * dxi * deta;
}

double k_zeta_measure(Freq zeta, const RectangleData& rect) {
  const Rect a = rect.a_rect();
  const Rect b = rect.b_rect();
  return intersect(b, reflect_about(zeta, a)).area() + intersect(a, reflect_about(zeta, b)).area();
}

KZetaStats k_zeta_stats(const RectangleData& rect, double eps, const ModelParams& params, int samples) {
  if (samples < 2) throw ConfigError("k_zeta_stats: need at least two samples per axis");
  const double N = rect.N;
  const double t = time_schedule(N, eps);
  const Rect a = rect.a_rect();
  const Rect b = rect.b_rect();
  KZetaStats out;
  for (int i = 0; i < samples; ++i) {
    const double xi = 1.5 * N + 1.5 * N * (i + 0.5) / samples;
    out.min_decay = std::min(out.min_decay, std::exp(-t * dissipation(xi, params)));
    for (int j = 0; j < samples; ++j) {
      const Freq zeta{xi, -4.0 * N * N + 13.0 * N * N * (j + 0.5) / samples};
      const Rect k = intersect(b, reflect_about(zeta, a));
      if (k.empty()) continue;
      for (int p = 0; p < samples; ++p) {
        for (int q = 0; q < samples; ++q) {
          const Freq z1{k.x0 + (k.x1 - k.x0) * (p + 0.5) / samples, k.y0 + (k.y1 - k.y0) * (q + 0.5) / samples};
          out.max_m = std::max(out.max_m, std::abs(dissipation_gap(zeta.xi, z1.xi, params)));
          out.max_r = std::max(out.max_r, std::abs(resonance(zeta.xi, zeta.eta, z1.xi, z1.eta, params)));
        }
      }
    }
  }
  return out;
}

IterateProfile::IterateProfile(double N, double eps, const ModelParams& params, const ScanConfig& config)
    : n_(N), t_(time_schedule(N, eps)) {
  if (!(N >= 8.0)) throw ConfigError("iterate_norm: N must be >= 8");
  config.validate();
  const RectangleData rect{N, 0.0};
  const auto pieces = rect.pieces();

  // Breakpoints: every edge sum of every pair, so that the intersection
  // bounds are linear in zeta inside each cell, plus a geometric grading
  // toward xi = 0 where the modulus of the kernel varies fastest.
  std::vector<double> xs{0.0};
  std::vector<double> ys;
  std::vector<Rect> sums;
  for (const auto& s : pieces) {
    for (const auto& s2 : pieces) {
      const Rect r1 = s.region();
      const Rect r2 = s2.region();
      sums.push_back(minkowski_sum(r1, r2));
      for (double u : {r1.x0, r1.x1}) {
        for (double v : {r2.x0, r2.x1}) {
          if (u + v >= 0.0) xs.push_back(u + v);
        }
      }
      for (double u : {r1.y0, r1.y1}) {
        for (double v : {r2.y0, r2.y1}) ys.push_back(u + v);
      }
    }
  }
  xs = sorted_unique(xs);
  for (double g = xs[1] / 2.0; g > 0.05; g /= 2.0) xs.push_back(g);
  xs = sorted_unique(xs);
  ys = sorted_unique(ys);

  const GaussRule& gx = gauss_legendre(config.outer_xi);
  const GaussRule& gy = gauss_legendre(config.outer_eta);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const Rect cell{xs[i], xs[i + 1], ys[j], ys[j + 1]};
      const Freq centre{0.5 * (cell.x0 + cell.x1), 0.5 * (cell.y0 + cell.y1)};
      const bool inside = std::any_of(sums.begin(), sums.end(), [&](const Rect& r) {
        return centre.xi > r.x0 && centre.xi < r.x1 && centre.eta > r.y0 && centre.eta < r.y1;
      });
      if (!inside) continue;
      const double hx = 0.5 * (cell.x1 - cell.x0);
      const double hy = 0.5 * (cell.y1 - cell.y0);
      for (int p = 0; p < config.outer_xi; ++p) {
        for (int q = 0; q < config.outer_eta; ++q) {
          const Freq zeta{centre.xi + hx * gx.nodes[p], centre.eta + hy * gy.nodes[q]};
          const cplx inner =
              pair_integral(zeta, pieces, t_, params, config.inner_xi, config.inner_eta, config.singular_tol);
          const double mod2 = std::norm(outer_factor(zeta, t_, params) * inner);
          if (!std::isfinite(mod2)) {
            std::ostringstream msg;
            msg << "iterate_norm: non-finite integrand at zeta = (" << zeta.xi << ", " << zeta.eta << ")";
            throw NumericalError(msg.str());
          }
          xi_.push_back(zeta.xi);
          mass_.push_back(2.0 * hx * hy * gx.weights[p] * gy.weights[q] * mod2);
        }
      }
    }
  }
}

double IterateProfile::norm(double s) const {
  const double a = 0.5 * std::pow(n_, -1.5 - s);
  double sum = 0.0;
  for (std::size_t i = 0; i < xi_.size(); ++i) sum += std::pow(1.0 + xi_[i], 2.0 * s) * mass_[i];
  return a * a * std::sqrt(sum);
}

double iterate_norm(double N, double s, double eps, const ModelParams& params, const ScanConfig& config) {
  return IterateProfile(N, eps, params, config).norm(s);
}

double phi_bilinear_ratio(double N, double s1, double delta, const ModelParams& params, PhiProbeGrid pg) {
  const double two_pi = 2.0 * std::numbers::pi;
  const GridPtr grid = build_grid(pg.nx, pg.ny, two_pi * 8.0 / N, two_pi * 4.0 / (N * N));
  const SpectralField phi = phi_n_field(grid, RectangleData{N, s1});
  const double T = std::pow(N, -4.0) / 16.0;
  const double dt = 2.5 * T / pg.half_nodes;
  const SpaceTimeField u = windowed_free_wave(phi, T, 0.5 * T, dt, params);
  std::vector<double> ratios;
  probe_bilinear_estimate({u}, {u}, s1, 0.0, delta, T, params, &ratios);
  if (ratios.empty()) throw NumericalError("phi_bilinear_ratio: vanishing data");
  return ratios.front();
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("fit: size mismatch");
  if (x.size() < 4) throw ConfigError("fit: need at least 4 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("fit: non-positive value on a log scale");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw ConfigError("fit: all N equal");
  return sxy / sxx;
}

ScanResult scan_and_fit(const ScanConfig& config, const ModelParams& params) {
  config.validate();
  if (config.n_values.size() < 4) throw ConfigError("scan: need at least 4 values of N");
  ScanResult result;
  std::map<double, std::vector<double>> norms;
  for (double N : config.n_values) {
    const IterateProfile profile(N, config.eps, params, config);
    for (double s : config.s_values) {
      ScanRow row{N, s, config.eps, profile.norm(s), phi_norm(RectangleData{N, s})};
      norms[s].push_back(row.norm);
      result.rows.push_back(row);
    }
  }
  for (const auto& [s, ys] : norms) result.slopes[s] = fit_loglog_slope(config.n_values, ys);
  return result;
}

}  // namespace dmkp
