#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace schatten {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Periodic box [-L/2, L/2)^d sampled with n points per axis.
///
/// Storage is row-major over axes (axis 0 slowest). Frequencies are stored in
/// FFT order: storage index k on an axis carries the lattice index k for
/// k < n/2 and k - n otherwise, so the Nyquist index sits on the negative side.
class Grid {
 public:
  Grid(int dim, int n, double length);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  double frequency_step() const noexcept;
  /// h^d, the quadrature weight of one grid cell.
  double cell_volume() const noexcept;
  /// L^d.
  double volume() const noexcept;
  std::size_t size() const noexcept { return size_; }

  int signed_index(int k) const noexcept { return k < n_ / 2 ? k : k - n_; }
  std::array<int, 3> axis_indices(std::size_t flat) const noexcept;
  std::size_t flat_index(const std::array<int, 3>& idx) const noexcept;

  Vec3 position(std::size_t flat) const noexcept;
  Vec3 frequency(std::size_t flat) const noexcept;
  double frequency_norm2(std::size_t flat) const noexcept;
  /// Signed lattice indices (j_0, .., j_{d-1}) of the frequency at `flat`.
  std::array<int, 3> lattice_index(std::size_t flat) const noexcept;
  /// Storage index of the frequency -xi (mod the lattice).
  std::size_t negated(std::size_t flat) const noexcept;
  /// Storage index of xi_a + xi_b wrapped onto the lattice.
  std::size_t wrapped_sum(std::size_t a, std::size_t b) const noexcept;
  /// Storage index of xi_a - xi_b wrapped onto the lattice.
  std::size_t wrapped_difference(std::size_t a, std::size_t b) const noexcept;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_;
  int n_;
  double length_;
  std::size_t size_;
};

Grid make_grid(int dim, int n, double length);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// A complex function sampled on a grid.
struct Field {
  Grid grid;
  std::vector<cplx> values;

  explicit Field(const Grid& g) : grid(g), values(g.size()) {}
  Field(const Grid& g, std::vector<cplx> v);

  std::size_t size() const noexcept { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  static Field from_function(const Grid& g, const std::function<cplx(const Vec3&)>& fn);
};

/// <f, g> = h^d sum conj(f) g.
cplx inner(const Field& f, const Field& g);
double l2_norm(const Field& f);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx c, const Field& a);
/// Pointwise product.
Field pointwise(const Field& a, const Field& b);
double max_abs_difference(const Field& a, const Field& b);
double max_imag(const Field& f);

/// Symbol m(xi) on the frequency lattice (FFT storage order).
struct FourierMultiplier {
  Grid grid;
  std::vector<cplx> symbol;

  FourierMultiplier(const Grid& g, std::vector<cplx> s);

  static FourierMultiplier identity(const Grid& g);
  static FourierMultiplier from_function(const Grid& g,
                                         const std::function<cplx(const Vec3&)>& fn);
  /// <xi>^s = (1 + |xi|^2)^{s/2}.
  static FourierMultiplier bessel(const Grid& g, double s);
  /// Symbol of U(t) = exp(i t Laplacian), i.e. exp(-i t |xi|^2).
  static FourierMultiplier free_propagator(const Grid& g, double t);

  /// m(-xi), the symbol acting on the row index of a kernel.
  FourierMultiplier reflected() const;
  FourierMultiplier conj() const;
};

FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b);

/// Forward transform with weight h^d and exp(-i xi.x), x measured from -L/2.
std::vector<cplx> fourier_transform(const Field& u);
/// Inverse of fourier_transform (weight 1/L^d).
Field inverse_fourier_transform(const Grid& g, std::span<const cplx> hat);

Field apply_multiplier(const FourierMultiplier& m, const Field& u);
Field free_propagate(const Field& u, double t);
/// w * rho on the torus, evaluated as w_hat(xi) rho_hat(xi).
Field convolve_potential(const FourierMultiplier& w_hat, const Field& rho);

/// Convolution kernel of the multiplier, k_m(z) = L^{-d} sum_xi m(xi) exp(i xi.z),
/// indexed by displacement: entry k holds z = (k_0 h, .., k_{d-1} h) mod L.
/// The kernel of the operator is K(x, y) = k_m(x - y).
std::vector<cplx> multiplier_kernel(const FourierMultiplier& m);

}  // namespace schatten
