#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "dmkp/spectral.hpp"
#include "dmkp/symbols.hpp"

namespace dmkp {

struct Freq {
  double xi = 0.0;
  double eta = 0.0;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in frequency space.
struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  bool empty() const noexcept { return !(x1 > x0) || !(y1 > y0); }
  double area() const noexcept { return empty() ? 0.0 : (x1 - x0) * (y1 - y0); }
  /// Half-open membership [x0, x1) x [y0, y1).
  bool contains(Freq z) const noexcept { return z.xi >= x0 && z.xi < x1 && z.eta >= y0 && z.eta < y1; }
  Rect negated() const noexcept { return {-x1, -x0, -y1, -y0}; }
};

Rect intersect(const Rect& a, const Rect& b);
/// Minkowski sum {p + q : p in a, q in b}.
Rect minkowski_sum(const Rect& a, const Rect& b);
/// {z - q : q in b}.
Rect reflect_about(Freq z, const Rect& b);

/// One support piece of phi_N. Lattice membership is tested on sign * zeta
/// against the half-open base rectangle so that reflected pieces stay the
/// exact mirror images of the positive ones.
struct SignedRect {
  Rect base;
  int sign = 1;

  Rect region() const noexcept { return sign > 0 ? base : base.negated(); }
  bool contains(Freq z) const noexcept { return base.contains({sign * z.xi, sign * z.eta}); }
};

/// The data family phi_N: real part of the one-sided datum, i.e. amplitude
/// N^{-3/2-s} / 2 on A_N, B_N, -A_N, -B_N.
struct RectangleData {
  double N = 16.0;
  double s = -0.75;

  double amplitude() const;
  Rect a_rect() const;  // [N/2, N] x [-6N^2, 6N^2]
  Rect b_rect() const;  // [N, 2N] x [2N^2, 3N^2]
  std::array<SignedRect, 4> pieces() const;
  /// phi_N^ at a lattice point (0 outside the support).
  double value(Freq z) const;
};

/// ||phi_N||_{H^{s,0}} of the continuous datum, closed form.
double phi_norm(const RectangleData& rect);

/// phi_N sampled on a grid. The grid must hold the support strictly inside
/// its Nyquist band; throws ConfigError otherwise.
SpectralField phi_n_field(const GridPtr& grid, const RectangleData& rect);

struct ScanConfig {
  std::vector<double> n_values{16, 32, 64, 128};
  std::vector<double> s_values{-0.75, -0.25};
  double eps = 0.1;
  int outer_xi = 8;
  int outer_eta = 8;
  int inner_xi = 8;
  int inner_eta = 8;
  double singular_tol = 1e-6;

  /// Throws ConfigError unless 0 < eps < 1 and every order is >= 8.
  void validate() const;
};

/// t_N = N^{-4-eps}.
double time_schedule(double N, double eps);

/// (exp(-t(rho1 + rho2)) exp(itR) - exp(-t rho)) / D with D = iR - M, the
/// exact value of exp(-t rho) int_0^t exp(t'(iR - M)) dt'. Near D = 0 the
/// series t exp(-t rho)(1 + tD/2 + t^2 D^2 / 6) is used (when also t|D| < 1e-3).
/// Throws DegenerateFrequency when xi, xi1 or xi2 vanishes.
std::complex<double> kernel(Freq zeta, Freq zeta1, double t, const ModelParams& params,
                            double singular_tol = 1e-6);

/// u2^(zeta, t) = -Lambda^(xi) (2 pi)^-2 e^{itP(zeta)} sum over ordered pairs
/// (S, S') of amp^2 int_{S cap (zeta - S')} K dzeta1, Gauss-Legendre of orders
/// (m_xi, m_eta) on each intersection.
std::complex<double> second_iterate_mode(Freq zeta, const RectangleData& rect, double t, const ModelParams& params,
                                         int m_xi = 8, int m_eta = 8, double singular_tol = 1e-6);

/// Same sum with the zeta1-integral replaced by a lattice sum of spacing
/// (dxi, deta) and half-open membership, matching phi_n_field on a grid.
std::complex<double> second_iterate_lattice(Freq zeta, const RectangleData& rect, double t, const ModelParams& params,
                                            double dxi, double deta, double singular_tol = 1e-6);

/// |k_zeta|: measure of {zeta1 in B_N, zeta - zeta1 in A_N} plus the swapped pair.
double k_zeta_measure(Freq zeta, const RectangleData& rect);

/// Sampled maxima of |M| and |R| over zeta in [3N/2, 3N] x [-4N^2, 9N^2]
/// and zeta1 in k_zeta, plus the smallest exp(-t_N rho(xi)) seen there.
struct KZetaStats {
  double max_m = 0.0;
  double max_r = 0.0;
  double min_decay = 1.0;
};
KZetaStats k_zeta_stats(const RectangleData& rect, double eps, const ModelParams& params, int samples = 12);

/// |u2^|^2 at unit amplitude on the outer quadrature nodes, xi > 0 half only.
/// The H^{s,0} norm for any s follows by reweighting.
class IterateProfile {
 public:
  IterateProfile(double N, double eps, const ModelParams& params, const ScanConfig& config);

  double N() const noexcept { return n_; }
  double t() const noexcept { return t_; }
  std::size_t nodes() const noexcept { return xi_.size(); }
  /// ||u_{2,N}(t_N)||_{H^{s,0}} for phi_N with regularity index s.
  double norm(double s) const;

 private:
  double n_;
  double t_;
  std::vector<double> xi_;
  std::vector<double> mass_;  // weight * |u2^|^2, already doubled for xi < 0
};

/// Convenience wrapper: builds the profile and evaluates one s. Needs N >= 8.
double iterate_norm(double N, double s, double eps, const ModelParams& params, const ScanConfig& config);

struct ScanRow {
  double N = 0.0;
  double s = 0.0;
  double eps = 0.0;
  double norm = 0.0;
  double phi_norm = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::map<double, double> slopes;  // s -> fitted slope
};

/// ||Lambda(u u)||_{X^{-1/2+delta, s1-4delta, 0}} / ||u||^2_{X^{1/2,s1,0}} for
/// u = theta_T(t) W(t) phi_N with T = N^-4 / 16, on a lattice of spacing
/// (N/8, N^2/4) that holds the support of phi_N.
struct PhiProbeGrid {
  int nx = 96;
  int ny = 80;
  int half_nodes = 256;  // nodes on (0, 2.5 T]
};
double phi_bilinear_ratio(double N, double s1, double delta, const ModelParams& params, PhiProbeGrid grid = {});

/// Least-squares slope of log y against log x. Throws ConfigError below 4 points.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Profiles every N once, evaluates every s, fits one slope per s.
ScanResult scan_and_fit(const ScanConfig& config, const ModelParams& params);

}  // namespace dmkp
