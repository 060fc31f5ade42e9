#include "schatten/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "schatten/fft.hpp"

namespace schatten {

Grid::Grid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid: points per axis must be a power of two >= 8, got " +
                                std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid: box length must be positive");
  size_ = 1;
  for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(n);
}

Grid make_grid(int dim, int n, double length) { return Grid(dim, n, length); }

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

double Grid::frequency_step() const noexcept { return 2.0 * std::numbers::pi / length_; }

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

double Grid::volume() const noexcept { return std::pow(length_, dim_); }

std::array<int, 3> Grid::axis_indices(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t Grid::flat_index(const std::array<int, 3>& idx) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int k = ((idx[a] % n_) + n_) % n_;
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(k);
  }
  return flat;
}

Vec3 Grid::position(std::size_t flat) const noexcept {
  const auto idx = axis_indices(flat);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = -0.5 * length_ + idx[a] * spacing();
  return x;
}

std::array<int, 3> Grid::lattice_index(std::size_t flat) const noexcept {
  auto idx = axis_indices(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = signed_index(idx[a]);
  return idx;
}

Vec3 Grid::frequency(std::size_t flat) const noexcept {
  const auto j = lattice_index(flat);
  Vec3 xi{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) xi[a] = j[a] * frequency_step();
  return xi;
}

double Grid::frequency_norm2(std::size_t flat) const noexcept {
  const auto xi = frequency(flat);
  return xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
}

std::size_t Grid::negated(std::size_t flat) const noexcept {
  auto idx = axis_indices(flat);
  for (int a = 0; a < dim_; ++a) idx[a] = -idx[a];
  return flat_index(idx);
}

std::size_t Grid::wrapped_sum(std::size_t a, std::size_t b) const noexcept {
  auto ia = axis_indices(a);
  const auto ib = axis_indices(b);
  for (int k = 0; k < dim_; ++k) ia[k] += ib[k];
  return flat_index(ia);
}

std::size_t Grid::wrapped_difference(std::size_t a, std::size_t b) const noexcept {
  auto ia = axis_indices(a);
  const auto ib = axis_indices(b);
  for (int k = 0; k < dim_; ++k) ia[k] -= ib[k];
  return flat_index(ia);
}

Field::Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("field: length does not match grid");
}

Field Field::from_function(const Grid& g, const std::function<cplx(const Vec3&)>& fn) {
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = fn(g.position(i));
  return f;
}

cplx inner(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid, "inner");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::conj(f.values[i]) * g.values[i];
  return acc * f.grid.cell_volume();
}

double l2_norm(const Field& f) {
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return std::sqrt(acc * f.grid.cell_volume());
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "field add");
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r.values[i] = a.values[i] + b.values[i];
  return r;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "field subtract");
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r.values[i] = a.values[i] - b.values[i];
  return r;
}

Field operator*(cplx c, const Field& a) {
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r.values[i] = c * a.values[i];
  return r;
}

Field pointwise(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "pointwise");
  Field r(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) r.values[i] = a.values[i] * b.values[i];
  return r;
}

double max_abs_difference(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double max_imag(const Field& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v.imag()));
  return m;
}

FourierMultiplier::FourierMultiplier(const Grid& g, std::vector<cplx> s)
    : grid(g), symbol(std::move(s)) {
  if (symbol.size() != grid.size())
    throw std::invalid_argument("multiplier: symbol length does not match grid");
}

FourierMultiplier FourierMultiplier::identity(const Grid& g) {
  return FourierMultiplier(g, std::vector<cplx>(g.size(), cplx{1.0, 0.0}));
}

FourierMultiplier FourierMultiplier::from_function(const Grid& g,
                                                   const std::function<cplx(const Vec3&)>& fn) {
  std::vector<cplx> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = fn(g.frequency(i));
  return FourierMultiplier(g, std::move(s));
}

FourierMultiplier FourierMultiplier::bessel(const Grid& g, double s) {
  std::vector<cplx> sym(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sym[i] = std::pow(1.0 + g.frequency_norm2(i), 0.5 * s);
  return FourierMultiplier(g, std::move(sym));
}

FourierMultiplier FourierMultiplier::free_propagator(const Grid& g, double t) {
  std::vector<cplx> sym(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sym[i] = std::polar(1.0, -t * g.frequency_norm2(i));
  return FourierMultiplier(g, std::move(sym));
}

FourierMultiplier FourierMultiplier::reflected() const {
  std::vector<cplx> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = symbol[grid.negated(i)];
  return FourierMultiplier(grid, std::move(s));
}

FourierMultiplier FourierMultiplier::conj() const {
  std::vector<cplx> s(symbol);
  for (auto& v : s) v = std::conj(v);
  return FourierMultiplier(grid, std::move(s));
}

FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_grid(a.grid, b.grid, "multiplier product");
  std::vector<cplx> s(a.grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.symbol[i] * b.symbol[i];
  return FourierMultiplier(a.grid, std::move(s));
}

namespace {

// exp(-i xi.x_0) with x_0 = -L/2 reduces to (-1)^{sum of axis indices}.
double origin_phase(const Grid& g, std::size_t flat) {
  const auto idx = g.axis_indices(flat);
  const int parity = (idx[0] + idx[1] + idx[2]) & 1;
  return parity ? -1.0 : 1.0;
}

}  // namespace

std::vector<cplx> fourier_transform(const Field& u) {
  const Grid& g = u.grid;
  std::vector<cplx> hat(u.values);
  fft::transform(g, hat, -1);
  const double w = g.cell_volume();
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= w * origin_phase(g, i);
  return hat;
}

Field inverse_fourier_transform(const Grid& g, std::span<const cplx> hat) {
  if (hat.size() != g.size()) throw std::invalid_argument("inverse transform: length mismatch");
  std::vector<cplx> v(hat.begin(), hat.end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= origin_phase(g, i);
  fft::transform(g, v, +1);
  const double w = 1.0 / g.volume();
  for (auto& x : v) x *= w;
  return Field(g, std::move(v));
}

Field apply_multiplier(const FourierMultiplier& m, const Field& u) {
  require_same_grid(m.grid, u.grid, "apply_multiplier");
  std::vector<cplx> v(u.values);
  fft::transform(u.grid, v, -1);
  const double w = 1.0 / static_cast<double>(u.grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= m.symbol[i] * w;
  fft::transform(u.grid, v, +1);
  return Field(u.grid, std::move(v));
}

Field free_propagate(const Field& u, double t) {
  if (t == 0.0) return u;
  return apply_multiplier(FourierMultiplier::free_propagator(u.grid, t), u);
}

Field convolve_potential(const FourierMultiplier& w_hat, const Field& rho) {
  return apply_multiplier(w_hat, rho);
}

std::vector<cplx> multiplier_kernel(const FourierMultiplier& m) {
  std::vector<cplx> k(m.symbol);
  fft::transform(m.grid, k, +1);
  const double w = 1.0 / m.grid.volume();
  for (auto& v : k) v *= w;
  return k;
}

}  // namespace schatten
