#pragma once

#include <cstdint>
#include <string>

#include "dmkp/illposed.hpp"
#include "dmkp/spectral.hpp"

namespace dmkp {

/// A * exp(-|z - c|^2 / (2 w^2)) around the domain centre, using the nearest
/// periodic image. Needs w well below the box size to be smooth across edges.
SpectralField gaussian_field(const GridPtr& grid, double amplitude, double width);

/// Real random field on the modes |j|, |k| <= band (0 means the 2/3 band),
/// j != 0, with Gaussian coefficients scaled by (1 + |j| + |k|)^slope and the
/// total L2 norm set to amplitude. Deterministic for a given seed.
SpectralField random_field(const GridPtr& grid, std::uint64_t seed, double slope, int band, double amplitude);

/// amplitude * cos(xi_j x + eta_k y).
SpectralField single_mode_field(const GridPtr& grid, int j, int k, double amplitude);

struct InitSpec {
  std::string kind = "gaussian";  // gaussian | random | single_mode | phiN | file
  double amplitude = 1.0;
  double width = 1.0;
  std::uint64_t seed = 0;
  double spectrum_slope = -2.0;
  int band = 0;
  int j = 1;
  int k = 0;
  double N = 8.0;
  double s = -0.75;
  std::string path;
};

/// Builds the initial field on grid. file data must match the grid size.
SpectralField make_initial(const GridPtr& grid, const InitSpec& spec);

}  // namespace dmkp
