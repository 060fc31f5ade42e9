#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "schatten/grid.hpp"

using namespace schatten;

TEST_CASE("make_grid validates its arguments") {
  CHECK_THROWS_AS(make_grid(4, 16, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 12, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 16, 0.0), std::invalid_argument);

  const auto g = make_grid(1, 64, 2 * std::numbers::pi);
  CHECK(g.spacing() == doctest::Approx(2 * std::numbers::pi / 64));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.frequency(k)[0] == doctest::Approx(g.signed_index(int(k))));
  CHECK(g.frequency(32)[0] == -32.0);  // Nyquist on the negative side

  CHECK(make_grid(2, 32, 10).size() == 1024);
  const auto g3 = make_grid(3, 16, 8);
  CHECK(g3.size() == 4096);
  CHECK(g3.frequency_step() == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("index arithmetic round-trips") {
  const auto g = make_grid(3, 8, 3.0);
  for (std::size_t k = 0; k < g.size(); k += 7) {
    CHECK(g.flat_index(g.axis_indices(k)) == k);
    CHECK(g.negated(g.negated(k)) == k);
    CHECK(g.wrapped_difference(g.wrapped_sum(k, 5), 5) == k);
  }
}

TEST_CASE("free_propagate matches the closed-form Gaussian") {
  const auto g = make_grid(1, 256, 40.0);
  const auto u0 = Field::from_function(g, [](const Vec3& x) { return cplx(std::exp(-x[0] * x[0] / 2)); });
  CHECK(max_abs_difference(free_propagate(u0, 0.0), u0) == 0.0);
  const double t = 0.5;
  const auto ut = free_propagate(u0, t);
  // exp(i t Laplacian) exp(-x^2/2) = (1+2it)^{-1/2} exp(-x^2 / (2(1+2it)))
  const cplx a(1.0, 2 * t);
  const auto exact = Field::from_function(g, [&](const Vec3& x) { return std::exp(-x[0] * x[0] / (2.0 * a)) / std::sqrt(a); });
  CHECK(max_abs_difference(ut, exact) < 1e-8);
}

TEST_CASE("free propagation is unitary and a group") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-2.0, 2.0);
  for (int dim = 1; dim <= 3; ++dim) {
    const auto g = make_grid(dim, dim == 3 ? 8 : 16, 7.0);
    for (int trial = 0; trial < 100 / 3 + 1; ++trial) {
      const auto u = testutil::random_field(g, rng);
      const double t = ut(rng);
      const double s = ut(rng);
      const double nu = l2_norm(u);
      CHECK(std::abs(l2_norm(free_propagate(u, t)) - nu) <= 1e-12 * nu);
      const auto lhs = free_propagate(free_propagate(u, s), t);
      CHECK(l2_norm(lhs - free_propagate(u, t + s)) <= 1e-12 * nu);
      CHECK(l2_norm(free_propagate(free_propagate(u, t), -t) - u) <= 1e-12 * nu);
    }
  }
}

TEST_CASE("Fourier transform conventions") {
  const auto g = make_grid(2, 16, 5.0);
  std::mt19937_64 rng(3);
  const auto u = testutil::random_field(g, rng);
  const auto hat = fourier_transform(u);
  // direct sum with exp(-i xi.x) and weight h^d
  for (std::size_t k : {std::size_t{0}, std::size_t{17}, std::size_t{200}}) {
    const auto xi = g.frequency(k);
    cplx acc{};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto x = g.position(j);
      acc += std::exp(cplx(0, -(xi[0] * x[0] + xi[1] * x[1]))) * u[j];
    }
    acc *= g.cell_volume();
    CHECK(std::abs(acc - hat[k]) < 1e-10 * std::abs(acc) + 1e-12);
  }
  CHECK(max_abs_difference(inverse_fourier_transform(g, hat), u) < 1e-12);
  // Plancherel: ||u||^2 = L^{-d} sum |u_hat|^2
  double s = 0;
  for (const auto& v : hat) s += std::norm(v);
  CHECK(std::sqrt(s / g.volume()) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
}

TEST_CASE("apply_multiplier identities") {
  std::mt19937_64 rng(5);
  const auto g = make_grid(2, 16, 9.0);
  const auto u = testutil::random_field(g, rng);
  CHECK(max_abs_difference(apply_multiplier(FourierMultiplier::identity(g), u), u) < 1e-13);
  const auto up = FourierMultiplier::bessel(g, 0.75);
  const auto dn = FourierMultiplier::bessel(g, -0.75);
  CHECK(max_abs_difference(apply_multiplier(dn, apply_multiplier(up, u)), u) < 1e-12);

  const auto m1 = FourierMultiplier::from_function(g, [](const Vec3& xi) { return cplx(std::cos(xi[0]), xi[1]); });
  const auto m2 = FourierMultiplier::free_propagator(g, 0.3);
  const auto lhs = apply_multiplier(m1, apply_multiplier(m2, u));
  CHECK(max_abs_difference(lhs, apply_multiplier(m1 * m2, u)) < 1e-12);

  // Column of the operator kernel: point mass maps to h^{-d}-free inverse transform of the symbol.
  const auto fsym = FourierMultiplier::from_function(g, [](const Vec3& xi) { return cplx(std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / 2)); });
  Field delta(g);
  const std::size_t y = 37;
  delta[y] = 1.0 / g.cell_volume();
  const auto col = apply_multiplier(fsym, delta);
  for (std::size_t x = 0; x < g.size(); x += 13) {
    const auto px = g.position(x);
    const auto py = g.position(y);
    cplx acc{};
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto xi = g.frequency(k);
      acc += fsym.symbol[k] * std::exp(cplx(0, xi[0] * (px[0] - py[0]) + xi[1] * (px[1] - py[1])));
    }
    acc /= g.volume();
    CHECK(std::abs(col[x] - acc) < 1e-12);
  }
}

TEST_CASE("convolve_potential against direct circular convolution") {
  std::mt19937_64 rng(9);
  const auto g = make_grid(2, 16, 6.0);
  const auto rho = testutil::random_real_field(g, rng);
  CHECK(max_abs_difference(convolve_potential(FourierMultiplier::identity(g), rho), rho) < 1e-13);

  Field c(g);
  for (auto& v : c.values) v = 2.5;
  const auto wg = FourierMultiplier::from_function(g, [](const Vec3& xi) { return cplx(std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]))); });
  const auto cc = convolve_potential(wg, c);
  for (const auto& v : cc.values) CHECK(std::abs(v - 2.5) < 1e-13);

  // w(z) = L^{-d} sum w_hat(xi) e^{i xi z}; (w*rho)(x) = h^d sum_y w(x-y) rho(y)
  const auto wk = multiplier_kernel(wg);
  const auto fast = convolve_potential(wg, rho);
  CHECK(max_imag(fast) < 1e-10);
  for (std::size_t x = 0; x < g.size(); ++x) {
    cplx acc{};
    for (std::size_t y = 0; y < g.size(); ++y) acc += wk[g.wrapped_difference(x, y)] * rho[y];
    acc *= g.cell_volume();
    CHECK(std::abs(acc - fast[x]) < 1e-10);
  }
}
