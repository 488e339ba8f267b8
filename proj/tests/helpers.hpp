#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "dmkp/spectral.hpp"

namespace testing {

// Real random field: random physical samples, transformed.
inline dmkp::SpectralField random_physical(const dmkp::GridPtr& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  dmkp::RealField f(g);
  for (auto& v : f.values) v = n01(rng);
  return dmkp::forward(f);
}

inline double max_abs_diff(const dmkp::SpectralField& a, const dmkp::SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
  return m;
}

inline double max_abs(const dmkp::SpectralField& a) {
  double m = 0.0;
  for (auto c : a.coeffs) m = std::max(m, std::abs(c));
  return m;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
