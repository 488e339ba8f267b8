#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace dmkp {

using cplx = std::complex<double>;

class FftPlan;

/// Periodic nx-by-ny grid on [0, lx) x [0, ly).
///
/// Storage is row-major with y outer and x inner, for both physical samples
/// and Fourier coefficients. Spectral arrays are kept in FFT order: column c
/// carries the signed mode j = c for c < nx/2 and j = c - nx otherwise, so the
/// unpaired Nyquist mode j = -nx/2 sits at column nx/2. The grid is immutable
/// once built and is shared between fields through GridPtr.
class SpectralGrid {
 public:
  SpectralGrid(int nx, int ny, double lx, double ly);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

  std::size_t index(int col, int row) const noexcept {
    return static_cast<std::size_t>(row) * nx_ + col;
  }
  int col_of(std::size_t idx) const noexcept { return static_cast<int>(idx % nx_); }
  int row_of(std::size_t idx) const noexcept { return static_cast<int>(idx / nx_); }

  /// Signed mode numbers of a column / row.
  int mode_x(int col) const noexcept { return col < (nx_ + 1) / 2 ? col : col - nx_; }
  int mode_y(int row) const noexcept { return row < (ny_ + 1) / 2 ? row : row - ny_; }

  /// Column / row holding a signed mode (modes are taken modulo the grid).
  int col_of_mode(int j) const noexcept { return ((j % nx_) + nx_) % nx_; }
  int row_of_mode(int k) const noexcept { return ((k % ny_) + ny_) % ny_; }

  double dxi() const noexcept { return dxi_; }
  double deta() const noexcept { return deta_; }
  /// Area element of the frequency lattice, dxi * deta.
  double mode_measure() const noexcept { return dxi_ * deta_; }

  double xi_at(int col) const noexcept { return xi_[col]; }
  double eta_at(int row) const noexcept { return eta_[row]; }
  double xi(std::size_t idx) const noexcept { return xi_[col_of(idx)]; }
  double eta(std::size_t idx) const noexcept { return eta_[row_of(idx)]; }
  std::span<const double> xi_values() const noexcept { return xi_; }
  std::span<const double> eta_values() const noexcept { return eta_; }

  bool is_nyquist(std::size_t idx) const noexcept;
  /// 2/3-rule mask: keeps |j| <= nx/3 and |k| <= ny/3.
  bool kept(std::size_t idx) const noexcept { return mask_[idx] != 0; }

  /// Storage index of the mode -zeta.
  std::size_t conjugate_index(std::size_t idx) const noexcept;

  /// Physical sample positions.
  double x_at(int col) const noexcept { return lx_ * col / nx_; }
  double y_at(int row) const noexcept { return ly_ * row / ny_; }

  /// Unnormalized in-place DFTs (sign -1 forward, +1 backward).
  void dft_forward(std::span<cplx> data) const;
  void dft_backward(std::span<cplx> data) const;

 private:
  int nx_, ny_;
  double lx_, ly_;
  double dxi_, deta_;
  std::vector<double> xi_, eta_;
  std::vector<std::uint8_t> mask_;
  std::unique_ptr<FftPlan> forward_plan_;
  std::unique_ptr<FftPlan> backward_plan_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Validates the sizes and builds a shared grid. nx must be even and >= 2;
/// ny must be even and >= 2, or exactly 1 for the one-dimensional case.
GridPtr build_grid(int nx, int ny, double lx, double ly);

struct RealField {
  GridPtr grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
  double& at(int col, int row) { return values[grid->index(col, row)]; }
  double at(int col, int row) const { return values[grid->index(col, row)]; }
};

/// Fourier coefficients u^(xi_j, eta_k) of a real field.
struct SpectralField {
  GridPtr grid;
  std::vector<cplx> coeffs;
  bool zero_x_mean = false;

  SpectralField() = default;
  explicit SpectralField(GridPtr g) : grid(std::move(g)), coeffs(grid->size()) {}

  cplx& mode(int j, int k) { return coeffs[grid->index(grid->col_of_mode(j), grid->row_of_mode(k))]; }
  cplx mode(int j, int k) const {
    return coeffs[grid->index(grid->col_of_mode(j), grid->row_of_mode(k))];
  }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx scale);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx scale, SpectralField a);

/// Quadrature approximation of the continuous transform
/// u^(zeta) = int u(z) exp(-i z.zeta) dz.
SpectralField forward(const RealField& f);
/// Inverse of forward: u(z) = (lx ly)^-1 sum u^(zeta) exp(+i z.zeta).
RealField inverse(const SpectralField& F);

/// Zeroes every coefficient outside the 2/3 mask (including Nyquist modes).
SpectralField dealias(SpectralField F);
void dealias_in_place(SpectralField& F);

/// Zeroes the xi = 0 column and sets the zero-x-mean flag.
SpectralField project_zero_x_mode(SpectralField F);
void project_zero_x_mode_in_place(SpectralField& F);

/// Replaces F by (F(zeta) + conj F(-zeta)) / 2.
void symmetrize_in_place(SpectralField& F);

/// Largest deviation |F(-zeta) - conj F(zeta)|, relative to max |F|.
double conjugate_symmetry_defect(const SpectralField& F);

/// Squared physical L2 norm via Parseval: (2 pi)^-2 sum |u^|^2 dxi deta.
double l2_norm_squared(const SpectralField& F);
double l2_norm(const SpectralField& F);
/// Discrete physical L2 norm squared, (lx ly)/(nx ny) sum |u|^2.
double l2_norm_squared(const RealField& f);

/// L2 norm of a difference of two fields on the same grid.
double l2_distance(const SpectralField& a, const SpectralField& b);

/// Unnormalized forward 1D DFT (sign -1) in place; plans are cached per length.
void dft_1d_forward(std::span<cplx> data);

/// Quadratic product of two fields, dealiased: (uv)^ restricted to the mask.
SpectralField dealiased_product(const SpectralField& u, const SpectralField& v);

/// Product of two fields computed on a 3/2 zero-padded grid and truncated back
/// to the 2/3 mask of the input grid. Test oracle for dealiased_product.
SpectralField padded_product(const SpectralField& u, const SpectralField& v);

}  // namespace dmkp
