#pragma once

#include <functional>
#include <vector>

#include "dmkp/duhamel.hpp"
#include "dmkp/spectral.hpp"
#include "dmkp/symbols.hpp"

namespace dmkp {

/// Exponents (b, s1, s2) of X^{b,s1,s2}; H^{s1,s2} uses s1, s2 only.
struct NormSpec {
  double b = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// <x> = 1 + |x|.
inline double bracket(double x) { return 1.0 + (x < 0.0 ? -x : x); }

/// A trajectory on a symmetric window [-T_w, T_w] prepared for time transforms.
/// Bourgain norms need window_applied, i.e. compact support inside the window.
struct SpaceTimeField {
  Trajectory trajectory;
  int pad_factor = 4;
  bool window_applied = false;
};

/// Zero trajectory on [-half_width, half_width] with step dt; half_width is
/// rounded to a whole number of steps so that t = 0 is a node.
SpaceTimeField make_window(const GridPtr& grid, double half_width, double dt, int pad_factor = 4);

/// Multiplies node n by cutoff(t_n) and marks the field windowed.
void apply_window(SpaceTimeField& f, const CutoffSpec& cutoff);

/// Index of the node at t = 0.
std::size_t zero_node(const SpaceTimeField& f);

/// ||<xi>^s1 <eta>^s2 u^||_{L2(dxi deta)}. With s1 = s2 = 0 this is
/// 2 pi ||u||_{L2}.
double sobolev_norm(const SpectralField& F, double s1, double s2);

/// X^{b,s1,s2} norm with <i sigma + rho> = 1 + sqrt(sigma^2 + rho^2),
/// sigma = tau - P(zeta). The time transform f^(tau) = int f(t) e^{-i t tau} dt
/// is taken on the zero-padded window after demodulating by U(-t), so sigma
/// is the transform variable directly. The padded length is pad_factor times
/// the node count, rounded up to a 7-smooth FFT size. With b = 0 the result is
/// sqrt(2 pi int ||f(t)||^2_{H^{s1,s2}} dt).
/// Throws ConfigError on an unwindowed field or pad_factor < 4.
double bourgain_norm(const SpaceTimeField& f, const NormSpec& spec, const ModelParams& params);

/// ||<i tau + rho(xi)>^b w^(tau, zeta)||_{L2_tau} at the lattice mode nearest
/// (xi, eta). No sigma shift. Throws ConfigError if (xi, eta) is not a grid mode.
double time_sobolev_at_mode(const SpaceTimeField& f, double xi, double eta, double b, const ModelParams& params);

/// U(-t_n) applied node by node; keeps the window flag.
SpaceTimeField demodulate(const SpaceTimeField& f, const ModelParams& params);

/// The two sides of ||f||_X ~ ||U(-t) f||_{H^b_t H^{s1,s2}} + ||f||_{L2_t H^{s1+k b, s2}}.
struct EquivalenceTerms {
  double bourgain = 0.0;
  double dispersive = 0.0;      // ||U(-t) f||_{H^b_t H^{s1,s2}}
  double sobolev_4b = 0.0;      // ||f||_{L2_t H^{s1+4b,s2}}
  double sobolev_2b = 0.0;      // ||f||_{L2_t H^{s1+2b,s2}}

  double ratio_4b() const { return bourgain / (dispersive + sobolev_4b); }
  double ratio_2b() const { return bourgain / (dispersive + sobolev_2b); }
};

/// L2_t terms use physical time integration times sqrt(2 pi), independent of
/// the padded transform.
EquivalenceTerms equivalence_terms(const SpaceTimeField& f, const NormSpec& spec, const ModelParams& params);

struct RatioStats {
  std::size_t count = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

RatioStats summarize(std::vector<double> ratios);

/// ||theta(t) W(t) phi||_{X^{1/2,s1,s2}} / ||phi||_{H^{s1,s2}} over the
/// ensemble on [-half_window, half_window]; zero data are skipped.
/// spec.b must be 1/2 and half_window >= 2.
RatioStats probe_linear_estimate(const std::vector<SpectralField>& phis, const NormSpec& spec,
                                 const ModelParams& params, double half_window, double dt,
                                 std::vector<double>* ratios = nullptr);

/// theta(t) chi_{t >= 0} int_0^t W(t - s) w(s) ds, built on w's window.
SpaceTimeField retarded_duhamel(const SpaceTimeField& w, const ModelParams& params);

/// Ensemble member e on demand, so large ensembles never sit in memory at once.
using FieldSource = std::function<SpaceTimeField(std::size_t)>;

/// ||theta chi int_0^t W(t-s) w ds||_{X^{1/2,s1,s2}} / ||w||_{X^{-1/2+delta, s1-4delta, s2}}.
/// Requires 0 < delta <= 1/2.
RatioStats probe_retarded_estimate(std::size_t count, const FieldSource& ws, const NormSpec& spec, double delta,
                                   const ModelParams& params, std::vector<double>* ratios = nullptr);
RatioStats probe_retarded_estimate(const std::vector<SpaceTimeField>& ws, const NormSpec& spec, double delta,
                                   const ModelParams& params, std::vector<double>* ratios = nullptr);

/// Lambda(u v) node by node.
SpaceTimeField bilinear_field(const SpaceTimeField& u, const SpaceTimeField& v, const ModelParams& params);

/// ||Lambda(u v)||_{X^{-1/2+delta, s1-4delta, s2}} / (||u||_{X^{1/2,s1,s2}} ||v||_{X^{1/2,s1,s2}}).
/// u and v must be windowed and vanish outside [-2T, 2T].
RatioStats probe_bilinear_estimate(std::size_t count, const FieldSource& us, const FieldSource& vs, double s1,
                                   double s2, double delta, double T, const ModelParams& params,
                                   std::vector<double>* ratios = nullptr);
RatioStats probe_bilinear_estimate(const std::vector<SpaceTimeField>& us, const std::vector<SpaceTimeField>& vs,
                                   double s1, double s2, double delta, double T, const ModelParams& params,
                                   std::vector<double>* ratios = nullptr);

/// theta_T(t) W(t) phi on a window of half-width 2T + margin.
SpaceTimeField windowed_free_wave(const SpectralField& phi, double T, double margin, double dt,
                                  const ModelParams& params, int pad_factor = 4);

}  // namespace dmkp
