#include "dmkp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "dmkp/error.hpp"
#include "dmkp/propagator.hpp"

namespace dmkp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_windowed(const SpaceTimeField& f, const char* where) {
  if (!f.window_applied) throw ConfigError(std::string(where) + ": field must be windowed first");
  if (f.pad_factor < 4) throw ConfigError(std::string(where) + ": pad_factor must be >= 4");
  if (f.trajectory.size() < 2) throw ConfigError(std::string(where) + ": need at least two time nodes");
}

// Smallest 2^a 3^b 5^c 7^d >= n; FFTW is slow on lengths with large prime factors.
std::size_t smooth_length(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::size_t padded_length(const SpaceTimeField& f) {
  return smooth_length(f.trajectory.size() * static_cast<std::size_t>(f.pad_factor));
}

// Collects the time series of one mode; returns false when it is identically zero.
bool mode_series(const Trajectory& traj, std::size_t idx, std::vector<cplx>& out) {
  bool any = false;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out[n] = traj.fields[n].coeffs[idx];
    any = any || out[n] != cplx{};
  }
  return any;
}

// Time-frequency weights w(sigma) = (1 + sqrt(sigma^2 + rho^2))^{2b}, or
// <sigma>^{2b} for the dispersive term (rho ignored).
enum class WeightKind { modulated, bracket };

double weight_value(WeightKind kind, double sigma, double rho, double b) {
  if (b == 0.0) return 1.0;
  const double base = kind == WeightKind::modulated ? 1.0 + std::hypot(sigma, rho) : bracket(sigma);
  return std::pow(base, 2.0 * b);
}

// Fine sigma grid per padded point; w has a kink where sigma = rho = 0, so its
// cosine coefficients are only second-order accurate in the sigma spacing.
constexpr std::size_t kWeightRefine = 16;

struct WeightKey {
  WeightKind kind;
  double rho;
  double b;
  std::size_t count;
  double dt;
  std::size_t fine;
  auto operator<=>(const WeightKey&) const = default;
};

// w^_m = int_{-pi/dt}^{pi/dt} w(sigma) cos(sigma m dt) dsigma for m < count,
// by the periodic trapezoid rule on `fine` points. Cached: probes revisit the
// same (rho, b) once per grid column and ensemble member.
std::shared_ptr<const std::vector<double>> weight_transform(const WeightKey& key) {
  static std::mutex mutex;
  static std::map<WeightKey, std::shared_ptr<const std::vector<double>>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const std::size_t q = key.fine;
  const double dsigma = kTwoPi / (static_cast<double>(q) * key.dt);
  std::vector<cplx> samples(q);
  for (std::size_t k = 0; k < q; ++k) {
    const long signed_k = k < q / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(q);
    samples[k] = weight_value(key.kind, dsigma * static_cast<double>(signed_k), key.rho, key.b);
  }
  dft_1d_forward(samples);
  auto out = std::make_shared<std::vector<double>>(key.count);
  for (std::size_t m = 0; m < key.count; ++m) (*out)[m] = samples[m].real() * dsigma;

  std::lock_guard lock(mutex);
  if (cache.size() > 512) cache.clear();
  cache.emplace(key, out);
  return out;
}

// int w(sigma) |f^(sigma)|^2 dsigma with f^(sigma) = dt sum_n f_n e^{-i sigma t_n}.
// |f^|^2 is a trigonometric polynomial with coefficients dt^2 a_m, a_m the
// autocorrelation of the series, which the zero-padded FFT gives exactly;
// the integral is then dt^2 sum_m a_m w^_m.
double transformed_mass(std::vector<cplx>& series, std::size_t padded_len, double dt, WeightKind kind, double rho,
                        double b) {
  const std::size_t count = series.size();
  series.resize(padded_len, cplx{});
  dft_1d_forward(series);
  for (auto& c : series) c = std::norm(c);
  dft_1d_forward(series);
  const auto w = weight_transform({kind, rho, b, count, dt, kWeightRefine * padded_len});
  // the second transform is a backward one up to conjugation, so a_m = conj(series[m]) / P
  double sum = series[0].real() * (*w)[0];
  for (std::size_t m = 1; m < count; ++m) sum += 2.0 * series[m].real() * (*w)[m];
  series.resize(count);
  return sum * dt * dt / static_cast<double>(padded_len);
}

double spatial_weight_sq(double xi, double eta, double s1, double s2) {
  return std::pow(bracket(xi), 2.0 * s1) * std::pow(bracket(eta), 2.0 * s2);
}

}  // namespace

SpaceTimeField make_window(const GridPtr& grid, double half_width, double dt, int pad_factor) {
  if (!(dt > 0.0) || !(half_width > 0.0)) throw ConfigError("make_window: half_width and dt must be positive");
  const long half = std::lround(half_width / dt);
  if (half < 1) throw ConfigError("make_window: window shorter than one step");
  SpaceTimeField f;
  f.pad_factor = pad_factor;
  f.trajectory.dt = dt;
  f.trajectory.t0 = -static_cast<double>(half) * dt;
  f.trajectory.fields.assign(static_cast<std::size_t>(2 * half + 1), SpectralField(grid));
  return f;
}

void apply_window(SpaceTimeField& f, const CutoffSpec& cutoff) {
  auto& traj = f.trajectory;
  for (std::size_t n = 0; n < traj.size(); ++n) traj.fields[n] *= cutoff(traj.time(n));
  f.window_applied = true;
}

std::size_t zero_node(const SpaceTimeField& f) {
  const auto& traj = f.trajectory;
  const long n = std::lround(-traj.t0 / traj.dt);
  if (n < 0 || static_cast<std::size_t>(n) >= traj.size() || std::abs(traj.time(n)) > 1e-9 * traj.dt) {
    throw ConfigError("zero_node: t = 0 is not a node of the window");
  }
  return static_cast<std::size_t>(n);
}

double sobolev_norm(const SpectralField& F, double s1, double s2) {
  const auto& g = *F.grid;
  double sum = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    if (F.coeffs[i] == cplx{}) continue;
    sum += spatial_weight_sq(g.xi(i), g.eta(i), s1, s2) * std::norm(F.coeffs[i]);
  }
  return std::sqrt(sum * g.mode_measure());
}

double bourgain_norm(const SpaceTimeField& f, const NormSpec& spec, const ModelParams& params) {
  require_windowed(f, "bourgain_norm");
  const auto& traj = f.trajectory;
  const auto& g = *traj.grid();
  const std::size_t padded = padded_length(f);
  std::vector<cplx> series(traj.size());
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mode_series(traj, i, series)) continue;
    const double xi = g.xi(i);
    const double p = dispersion(xi, g.eta(i), params);
    const double rho = dissipation(xi, params);
    for (std::size_t n = 0; n < series.size(); ++n) {
      const double phase = -traj.time(n) * p;
      series[n] *= cplx{std::cos(phase), std::sin(phase)};
    }
    const double mass = transformed_mass(series, padded, traj.dt, WeightKind::modulated, rho, spec.b);
    total += spatial_weight_sq(xi, g.eta(i), spec.s1, spec.s2) * mass;
  }
  return std::sqrt(total * g.mode_measure());
}

double time_sobolev_at_mode(const SpaceTimeField& f, double xi, double eta, double b, const ModelParams& params) {
  require_windowed(f, "time_sobolev_at_mode");
  const auto& traj = f.trajectory;
  const auto& g = *traj.grid();
  const double jf = xi / g.dxi();
  const double kf = eta / g.deta();
  const long j = std::lround(jf);
  const long k = std::lround(kf);
  const bool on_lattice = std::abs(jf - j) < 1e-9 * std::max(1.0, std::abs(jf)) &&
                          std::abs(kf - k) < 1e-9 * std::max(1.0, std::abs(kf));
  const bool in_range = 2 * std::abs(j) <= g.nx() && (g.ny() == 1 ? k == 0 : 2 * std::abs(k) <= g.ny());
  if (!on_lattice || !in_range) throw ConfigError("time_sobolev_at_mode: zeta is not a grid mode");
  const std::size_t idx = g.index(g.col_of_mode(static_cast<int>(j)), g.row_of_mode(static_cast<int>(k)));

  std::vector<cplx> series(traj.size());
  if (!mode_series(traj, idx, series)) return 0.0;
  const double rho = dissipation(g.xi(idx), params);
  const std::size_t padded = padded_length(f);
  const double mass = transformed_mass(series, padded, traj.dt, WeightKind::modulated, rho, b);
  return std::sqrt(mass);
}

SpaceTimeField demodulate(const SpaceTimeField& f, const ModelParams& params) {
  SpaceTimeField out = f;
  auto& traj = out.trajectory;
  for (std::size_t n = 0; n < traj.size(); ++n) traj.fields[n] = apply_unitary(traj.fields[n], -traj.time(n), params);
  return out;
}

EquivalenceTerms equivalence_terms(const SpaceTimeField& f, const NormSpec& spec, const ModelParams& params) {
  require_windowed(f, "equivalence_terms");
  EquivalenceTerms terms;
  terms.bourgain = bourgain_norm(f, spec, params);

  const auto& traj = f.trajectory;
  const auto& g = *traj.grid();
  const std::size_t padded = padded_length(f);
  std::vector<cplx> series(traj.size());
  double dispersive = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mode_series(traj, i, series)) continue;
    const double p = dispersion(g.xi(i), g.eta(i), params);
    for (std::size_t n = 0; n < series.size(); ++n) {
      const double phase = -traj.time(n) * p;
      series[n] *= cplx{std::cos(phase), std::sin(phase)};
    }
    const double mass = transformed_mass(series, padded, traj.dt, WeightKind::bracket, 0.0, spec.b);
    dispersive += spatial_weight_sq(g.xi(i), g.eta(i), spec.s1, spec.s2) * mass;
  }
  terms.dispersive = std::sqrt(dispersive * g.mode_measure());

  double sum4 = 0.0;
  double sum2 = 0.0;
  for (const auto& field : traj.fields) {
    sum4 += std::pow(sobolev_norm(field, spec.s1 + 4.0 * spec.b, spec.s2), 2);
    sum2 += std::pow(sobolev_norm(field, spec.s1 + 2.0 * spec.b, spec.s2), 2);
  }
  terms.sobolev_4b = std::sqrt(kTwoPi * traj.dt * sum4);
  terms.sobolev_2b = std::sqrt(kTwoPi * traj.dt * sum2);
  return terms;
}

RatioStats summarize(std::vector<double> ratios) {
  RatioStats s;
  s.count = ratios.size();
  if (ratios.empty()) return s;
  std::sort(ratios.begin(), ratios.end());
  s.min = ratios.front();
  s.max = ratios.back();
  const std::size_t m = ratios.size() / 2;
  s.median = ratios.size() % 2 == 1 ? ratios[m] : 0.5 * (ratios[m - 1] + ratios[m]);
  return s;
}

SpaceTimeField windowed_free_wave(const SpectralField& phi, double T, double margin, double dt,
                                  const ModelParams& params, int pad_factor) {
  SpaceTimeField f = make_window(phi.grid, 2.0 * T + margin, dt, pad_factor);
  auto& traj = f.trajectory;
  const CutoffSpec cutoff{T};
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double t = traj.time(n);
    const double c = cutoff(t);
    if (c == 0.0) continue;
    traj.fields[n] = apply_semigroup(phi, t, params);
    traj.fields[n] *= c;
  }
  f.window_applied = true;
  return f;
}

RatioStats probe_linear_estimate(const std::vector<SpectralField>& phis, const NormSpec& spec,
                                 const ModelParams& params, double half_window, double dt,
                                 std::vector<double>* ratios) {
  if (spec.b != 0.5) throw ConfigError("probe_linear_estimate: spec.b must be 1/2");
  if (half_window < 2.0) throw ConfigError("probe_linear_estimate: window must contain supp theta");
  std::vector<double> out;
  for (const auto& phi : phis) {
    const double rhs = sobolev_norm(phi, spec.s1, spec.s2);
    if (rhs == 0.0) continue;
    const SpaceTimeField f = windowed_free_wave(phi, 1.0, half_window - 2.0, dt, params);
    out.push_back(bourgain_norm(f, spec, params) / rhs);
  }
  if (ratios) *ratios = out;
  return summarize(std::move(out));
}

SpaceTimeField retarded_duhamel(const SpaceTimeField& w, const ModelParams& params) {
  const std::size_t z = zero_node(w);
  const auto& traj = w.trajectory;
  Trajectory forward_part;
  forward_part.t0 = 0.0;
  forward_part.dt = traj.dt;
  forward_part.fields.assign(traj.fields.begin() + static_cast<long>(z), traj.fields.end());
  const Trajectory integral = duhamel(forward_part, params);

  SpaceTimeField out;
  out.pad_factor = w.pad_factor;
  out.trajectory.t0 = traj.t0;
  out.trajectory.dt = traj.dt;
  out.trajectory.fields.assign(traj.size(), SpectralField(traj.grid()));
  for (std::size_t n = 0; n < integral.size(); ++n) {
    SpectralField f = integral.fields[n];
    f *= cutoff_theta(integral.time(n));
    out.trajectory.fields[z + n] = std::move(f);
  }
  out.window_applied = true;
  return out;
}

RatioStats probe_retarded_estimate(std::size_t count, const FieldSource& ws, const NormSpec& spec, double delta,
                                   const ModelParams& params, std::vector<double>* ratios) {
  if (!(delta > 0.0) || delta > 0.5) throw ConfigError("probe_retarded_estimate: need 0 < delta <= 1/2");
  const NormSpec lhs_spec{0.5, spec.s1, spec.s2};
  const NormSpec rhs_spec{-0.5 + delta, spec.s1 - 4.0 * delta, spec.s2};
  std::vector<double> out;
  for (std::size_t e = 0; e < count; ++e) {
    const SpaceTimeField w = ws(e);
    const double rhs = bourgain_norm(w, rhs_spec, params);
    if (rhs == 0.0) continue;
    out.push_back(bourgain_norm(retarded_duhamel(w, params), lhs_spec, params) / rhs);
  }
  if (ratios) *ratios = out;
  return summarize(std::move(out));
}

RatioStats probe_retarded_estimate(const std::vector<SpaceTimeField>& ws, const NormSpec& spec, double delta,
                                   const ModelParams& params, std::vector<double>* ratios) {
  return probe_retarded_estimate(
      ws.size(), [&](std::size_t e) { return ws[e]; }, spec, delta, params, ratios);
}

SpaceTimeField bilinear_field(const SpaceTimeField& u, const SpaceTimeField& v, const ModelParams& params) {
  const auto& tu = u.trajectory;
  const auto& tv = v.trajectory;
  if (tu.size() != tv.size() || tu.dt != tv.dt || tu.t0 != tv.t0) {
    throw ConfigError("bilinear_field: time grids differ");
  }
  SpaceTimeField out;
  out.pad_factor = u.pad_factor;
  out.trajectory.t0 = tu.t0;
  out.trajectory.dt = tu.dt;
  out.trajectory.fields.reserve(tu.size());
  for (std::size_t n = 0; n < tu.size(); ++n) out.trajectory.fields.push_back(bilinear_rhs(tu.fields[n], tv.fields[n], params));
  out.window_applied = u.window_applied && v.window_applied;
  return out;
}

namespace {

void require_support(const SpaceTimeField& f, double T) {
  const auto& traj = f.trajectory;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    if (std::abs(traj.time(n)) <= 2.0 * T + 1e-12) continue;
    for (const auto& c : traj.fields[n].coeffs) {
      if (c != cplx{}) throw ConfigError("probe_bilinear_estimate: data not supported in [-2T, 2T]");
    }
  }
}

}  // namespace

RatioStats probe_bilinear_estimate(std::size_t count, const FieldSource& us, const FieldSource& vs, double s1,
                                   double s2, double delta, double T, const ModelParams& params,
                                   std::vector<double>* ratios) {
  const NormSpec in_spec{0.5, s1, s2};
  const NormSpec out_spec{-0.5 + delta, s1 - 4.0 * delta, s2};
  std::vector<double> out;
  for (std::size_t e = 0; e < count; ++e) {
    const SpaceTimeField u = us(e);
    const SpaceTimeField v = vs(e);
    require_support(u, T);
    require_support(v, T);
    const double nu = bourgain_norm(u, in_spec, params);
    const double nv = bourgain_norm(v, in_spec, params);
    if (nu == 0.0 || nv == 0.0) continue;
    const double lhs = bourgain_norm(bilinear_field(u, v, params), out_spec, params);
    out.push_back(lhs / (nu * nv));
  }
  if (ratios) *ratios = out;
  return summarize(std::move(out));
}

RatioStats probe_bilinear_estimate(const std::vector<SpaceTimeField>& us, const std::vector<SpaceTimeField>& vs,
                                   double s1, double s2, double delta, double T, const ModelParams& params,
                                   std::vector<double>* ratios) {
  if (us.size() != vs.size()) throw ConfigError("probe_bilinear_estimate: ensembles differ in size");
  return probe_bilinear_estimate(
      us.size(), [&](std::size_t e) { return us[e]; }, [&](std::size_t e) { return vs[e]; }, s1, s2, delta, T,
      params, ratios);
}

}  // namespace dmkp
