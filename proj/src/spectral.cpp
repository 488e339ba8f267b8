#include "dmkp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "dmkp/error.hpp"

namespace dmkp {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

class FftPlan {
 public:
  FftPlan(int ny, int nx, int sign) {
    std::vector<cplx> scratch(static_cast<std::size_t>(nx) * ny);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(ny, nx, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw NumericalError("fftw: could not create plan");
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(std::span<cplx> data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, buf, buf);
  }

 private:
  fftw_plan plan_ = nullptr;
};

SpectralGrid::SpectralGrid(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  dxi_ = two_pi / lx_;
  deta_ = two_pi / ly_;
  xi_.resize(nx_);
  eta_.resize(ny_);
  for (int c = 0; c < nx_; ++c) xi_[c] = dxi_ * mode_x(c);
  for (int r = 0; r < ny_; ++r) eta_[r] = deta_ * mode_y(r);

  mask_.assign(size(), 0);
  for (int r = 0; r < ny_; ++r) {
    for (int c = 0; c < nx_; ++c) {
      const bool keep = 3 * std::abs(mode_x(c)) <= nx_ && 3 * std::abs(mode_y(r)) <= ny_;
      mask_[index(c, r)] = keep ? 1 : 0;
    }
  }
  forward_plan_ = std::make_unique<FftPlan>(ny_, nx_, FFTW_FORWARD);
  backward_plan_ = std::make_unique<FftPlan>(ny_, nx_, FFTW_BACKWARD);
}

SpectralGrid::~SpectralGrid() = default;

bool SpectralGrid::is_nyquist(std::size_t idx) const noexcept {
  const int c = col_of(idx);
  const int r = row_of(idx);
  return (nx_ % 2 == 0 && c == nx_ / 2) || (ny_ > 1 && ny_ % 2 == 0 && r == ny_ / 2);
}

std::size_t SpectralGrid::conjugate_index(std::size_t idx) const noexcept {
  const int c = col_of(idx);
  const int r = row_of(idx);
  return index((nx_ - c) % nx_, (ny_ - r) % ny_);
}

void SpectralGrid::dft_forward(std::span<cplx> data) const { forward_plan_->execute(data); }
void SpectralGrid::dft_backward(std::span<cplx> data) const { backward_plan_->execute(data); }

GridPtr build_grid(int nx, int ny, double lx, double ly) {
  if (nx < 2 || nx % 2 != 0) {
    throw ConfigError("build_grid: nx must be even and >= 2, got " + std::to_string(nx));
  }
  if (ny != 1 && (ny < 2 || ny % 2 != 0)) {
    throw ConfigError("build_grid: ny must be 1 or even and >= 2, got " + std::to_string(ny));
  }
  if (!std::isfinite(lx) || !std::isfinite(ly) || lx <= 0.0 || ly <= 0.0) {
    throw ConfigError("build_grid: periods must be finite and positive");
  }
  return std::make_shared<const SpectralGrid>(nx, ny, lx, ly);
}

namespace {

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (!a || !b) throw ConfigError(std::string(where) + ": field has no grid");
  if (a == b) return;
  if (a->nx() != b->nx() || a->ny() != b->ny() || a->lx() != b->lx() || a->ly() != b->ly()) {
    throw ConfigError(std::string(where) + ": grid mismatch");
  }
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid, other.grid, "SpectralField +=");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
  zero_x_mean = zero_x_mean && other.zero_x_mean;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid, other.grid, "SpectralField -=");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= other.coeffs[i];
  zero_x_mean = zero_x_mean && other.zero_x_mean;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx scale) {
  for (auto& c : coeffs) c *= scale;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx scale, SpectralField a) { return a *= scale; }

SpectralField forward(const RealField& f) {
  if (!f.grid) throw ConfigError("forward: field has no grid");
  const auto& g = *f.grid;
  if (f.values.size() != g.size()) throw ConfigError("forward: sample count does not match grid");
  SpectralField out(f.grid);
  std::copy(f.values.begin(), f.values.end(), out.coeffs.begin());
  g.dft_forward(out.coeffs);
  const double weight = g.lx() * g.ly() / static_cast<double>(g.size());
  for (auto& c : out.coeffs) c *= weight;
  return out;
}

RealField inverse(const SpectralField& F) {
  if (!F.grid) throw ConfigError("inverse: field has no grid");
  const auto& g = *F.grid;
  if (F.coeffs.size() != g.size()) throw ConfigError("inverse: coefficient count does not match grid");
  std::vector<cplx> work(F.coeffs);
  g.dft_backward(work);
  RealField out(F.grid);
  const double weight = 1.0 / (g.lx() * g.ly());
  for (std::size_t i = 0; i < work.size(); ++i) out.values[i] = work[i].real() * weight;
  return out;
}

void dealias_in_place(SpectralField& F) {
  const auto& g = *F.grid;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    if (!g.kept(i)) F.coeffs[i] = 0.0;
  }
}

SpectralField dealias(SpectralField F) {
  dealias_in_place(F);
  return F;
}

void project_zero_x_mode_in_place(SpectralField& F) {
  const auto& g = *F.grid;
  for (int r = 0; r < g.ny(); ++r) F.coeffs[g.index(0, r)] = 0.0;
  F.zero_x_mean = true;
}

SpectralField project_zero_x_mode(SpectralField F) {
  project_zero_x_mode_in_place(F);
  return F;
}

void symmetrize_in_place(SpectralField& F) {
  const auto& g = *F.grid;
  std::vector<cplx> out(F.coeffs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.5 * (F.coeffs[i] + std::conj(F.coeffs[g.conjugate_index(i)]));
  }
  F.coeffs = std::move(out);
}

double conjugate_symmetry_defect(const SpectralField& F) {
  const auto& g = *F.grid;
  double scale = 0.0;
  double defect = 0.0;
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    scale = std::max(scale, std::abs(F.coeffs[i]));
    defect = std::max(defect, std::abs(F.coeffs[g.conjugate_index(i)] - std::conj(F.coeffs[i])));
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

double l2_norm_squared(const SpectralField& F) {
  double sum = 0.0;
  for (const auto& c : F.coeffs) sum += std::norm(c);
  constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  return sum * F.grid->mode_measure() / four_pi_sq;
}

double l2_norm(const SpectralField& F) { return std::sqrt(l2_norm_squared(F)); }

double l2_norm_squared(const RealField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v * v;
  const auto& g = *f.grid;
  return sum * g.lx() * g.ly() / static_cast<double>(g.size());
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "l2_distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) sum += std::norm(a.coeffs[i] - b.coeffs[i]);
  constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  return std::sqrt(sum * a.grid->mode_measure() / four_pi_sq);
}

void dft_1d_forward(std::span<cplx> data) {
  static std::map<std::size_t, fftw_plan> plans;
  const std::size_t n = data.size();
  if (n == 0) return;
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    auto it = plans.find(n);
    if (it == plans.end()) {
      std::vector<cplx> scratch(n);
      auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
      plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
      if (plan == nullptr) throw NumericalError("fftw: could not create 1d plan");
      plans.emplace(n, plan);
    } else {
      plan = it->second;
    }
  }
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

SpectralField dealiased_product(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid, v.grid, "dealiased_product");
  const auto& g = *u.grid;
  std::vector<cplx> a(u.coeffs), b(v.coeffs);
  g.dft_backward(a);
  g.dft_backward(b);
  // Both inverse transforms carry 1/(lx ly); forward carries lx ly / (nx ny).
  const double inv_area = 1.0 / (g.lx() * g.ly());
  const double weight = inv_area * inv_area * g.lx() * g.ly() / static_cast<double>(g.size());
  SpectralField out(u.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.coeffs[i] = a[i].real() * b[i].real();
  g.dft_forward(out.coeffs);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    out.coeffs[i] = g.kept(i) ? out.coeffs[i] * weight : cplx{};
  }
  return out;
}

SpectralField padded_product(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid, v.grid, "padded_product");
  const auto& g = *u.grid;
  const int px = 3 * g.nx() / 2 + (3 * g.nx() / 2) % 2;
  const int py = g.ny() == 1 ? 1 : 3 * g.ny() / 2 + (3 * g.ny() / 2) % 2;
  auto big = build_grid(px, py, g.lx(), g.ly());

  auto lift = [&](const SpectralField& f) {
    SpectralField out(big);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
      if (!g.kept(i)) continue;
      const int j = g.mode_x(g.col_of(i));
      const int k = g.mode_y(g.row_of(i));
      out.mode(j, k) = f.coeffs[i];
    }
    return out;
  };
  const RealField a = inverse(lift(u));
  const RealField b = inverse(lift(v));
  RealField prod(big);
  for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = a.values[i] * b.values[i];
  const SpectralField wide = forward(prod);

  SpectralField out(u.grid);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    if (!g.kept(i)) continue;
    out.coeffs[i] = wide.mode(g.mode_x(g.col_of(i)), g.mode_y(g.row_of(i)));
  }
  return out;
}

}  // namespace dmkp
