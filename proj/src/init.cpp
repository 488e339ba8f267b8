#include "dmkp/init.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dmkp/error.hpp"
#include "dmkp/io.hpp"

namespace dmkp {

namespace {

double nearest_image(double d, double period) { return d - period * std::round(d / period); }

}  // namespace

SpectralField gaussian_field(const GridPtr& grid, double amplitude, double width) {
  if (!(width > 0.0)) throw ConfigError("gaussian: width must be positive");
  const auto& g = *grid;
  RealField f(grid);
  const double cx = 0.5 * g.lx();
  const double cy = 0.5 * g.ly();
  for (int row = 0; row < g.ny(); ++row) {
    const double dy = g.ny() == 1 ? 0.0 : nearest_image(g.y_at(row) - cy, g.ly());
    for (int col = 0; col < g.nx(); ++col) {
      const double dx = nearest_image(g.x_at(col) - cx, g.lx());
      f.at(col, row) = amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
    }
  }
  return forward(f);
}

SpectralField random_field(const GridPtr& grid, std::uint64_t seed, double slope, int band, double amplitude) {
  const auto& g = *grid;
  const int bx = band > 0 ? band : g.nx() / 3;
  const int by = g.ny() == 1 ? 0 : (band > 0 ? band : g.ny() / 3);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralField f(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int j = g.mode_x(g.col_of(i));
    const int k = g.mode_y(g.row_of(i));
    const double re = normal(rng);
    const double im = normal(rng);
    if (j == 0 || std::abs(j) > bx || std::abs(k) > by || !g.kept(i)) continue;
    f.coeffs[i] = cplx{re, im} * std::pow(1.0 + std::abs(j) + std::abs(k), slope);
  }
  symmetrize_in_place(f);
  const double norm = l2_norm(f);
  if (norm > 0.0) f *= amplitude / norm;
  f.zero_x_mean = true;
  return f;
}

SpectralField single_mode_field(const GridPtr& grid, int j, int k, double amplitude) {
  const auto& g = *grid;
  if (2 * std::abs(j) >= g.nx() || (g.ny() == 1 ? k != 0 : 2 * std::abs(k) >= g.ny())) {
    throw ConfigError("single_mode: mode outside the grid band");
  }
  SpectralField f(grid);
  const double c = 0.5 * amplitude * g.lx() * g.ly();
  f.mode(j, k) += c;
  f.mode(-j, -k) += c;
  f.zero_x_mean = j != 0;
  return f;
}

SpectralField make_initial(const GridPtr& grid, const InitSpec& spec) {
  if (spec.kind == "gaussian") return gaussian_field(grid, spec.amplitude, spec.width);
  if (spec.kind == "random") return random_field(grid, spec.seed, spec.spectrum_slope, spec.band, spec.amplitude);
  if (spec.kind == "single_mode") return single_mode_field(grid, spec.j, spec.k, spec.amplitude);
  if (spec.kind == "phiN") return phi_n_field(grid, RectangleData{spec.N, spec.s});
  if (spec.kind == "file") {
    const Snapshot snap = read_fld1(spec.path);
    const auto& g = *grid;
    const auto& h = *snap.field.grid;
    if (h.nx() != g.nx() || h.ny() != g.ny() || h.lx() != g.lx() || h.ly() != g.ly()) {
      throw ConfigError("init file: snapshot grid does not match the configured grid");
    }
    RealField f(grid);
    f.values = snap.field.values;
    return forward(f);
  }
  throw ConfigError("init: unknown kind '" + spec.kind + "'");
}

}  // namespace dmkp
