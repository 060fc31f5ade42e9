#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "schatten/strichartz.hpp"

using namespace schatten;
using namespace schatten::lab;
using testutil::rel;

namespace {

ExperimentConfig small_singular() {
  ExperimentConfig cfg;
  cfg.d = 1;
  cfg.n = 32;
  cfg.L = 16.0;
  cfg.initial.rank = 3;
  cfg.samples = 100;
  cfg.steps = 16;
  cfg.T = 0.5;
  cfg.r_list = {2, 4, 8};
  cfg.resamples = 50;
  cfg.family_g = SubgaussianFamily::gaussian(1.0, 21);
  cfg.family_l = SubgaussianFamily::rademacher(22);
  return cfg;
}

ExperimentConfig small_full() {
  auto cfg = small_singular();
  cfg.d = 2;
  cfg.n = 16;
  cfg.L = 8.0;
  cfg.p = Rational(2);
  cfg.q = Rational(2);
  cfg.q_hat = Rational(4);
  cfg.steps = 8;
  return cfg;
}

}  // namespace

TEST_CASE("initial data") {
  const Grid g = make_grid(1, 64, 20.0);
  InitialData spec;
  spec.rank = 4;
  const auto a = make_initial_operator(g, spec, 3);
  CHECK(a.rank() == 4);
  CHECK(hermiticity_defect(to_dense(a)) < 1e-12);
  // weights 1/n on normalized packets: trace = sum 1/n
  CHECK(std::abs(trace(a).real() - (1.0 + 0.5 + 1.0 / 3 + 0.25)) < 1e-10);
  const auto b = make_initial_operator(g, spec, 3);
  CHECK((to_dense(a).kernel - to_dense(b).kernel).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rel(l2_norm(make_initial_function(g, spec, 3)), 1.0) < 1e-12);

  spec.shape = InitialShape::zero;
  CHECK(make_initial_operator(g, spec, 3).rank() == 0);
  spec.shape = InitialShape::mode;
  CHECK_THROWS_AS(make_initial_operator(g, spec, 3), std::invalid_argument);  // 2*pi/20 is not an integer
  const Grid unit = make_grid(1, 32, 2.0 * M_PI);
  CHECK(rel(trace(make_initial_operator(unit, spec, 0)).real(), 1.0) < 1e-12);
  CHECK(parse_shape(to_string(InitialShape::packets)) == InitialShape::packets);
  CHECK_THROWS_AS(parse_shape("blob"), std::invalid_argument);
}

TEST_CASE("Gaussian absolute moments") {
  CHECK(rel(gaussian_abs_moment(2.0), 1.0) < 1e-14);
  CHECK(rel(gaussian_abs_moment(1.0), std::sqrt(2.0 / M_PI)) < 1e-14);
  CHECK(rel(gaussian_abs_moment(4.0, 4.0), 2.0 * std::pow(3.0, 0.25)) < 1e-14);
}

TEST_CASE("singular harness matches the operator-level path") {
  auto cfg = small_singular();
  auto res = run_singular(cfg);
  REQUIRE(res.samples.size() == 100);
  for (std::size_t m : {0, 1, 17, 99}) CHECK(rel(res.samples[m], singular_sample_reference(cfg, m)) < 1e-10);
  CHECK(res.alpha == 2.0);
  CHECK(res.table.rows.size() == 3);

  // Sobolev-conjugated variant (d = 2, sigma = 1/2, p = 4, q = 2)
  auto c2 = small_singular();
  c2.d = 2;
  c2.n = 16;
  c2.L = 8.0;
  c2.sigma = Rational(1, 2);
  c2.steps = 8;
  auto r2 = run_singular(c2);
  for (std::size_t m : {0, 5}) CHECK(rel(r2.samples[m], singular_sample_reference(c2, m)) < 1e-10);
}

TEST_CASE("full harness matches the operator-level path") {
  auto cfg = small_full();
  auto res = run_full(cfg);
  for (std::size_t m : {0, 3, 99}) CHECK(rel(res.samples[m], full_sample_reference(cfg, m)) < 1e-10);
}

TEST_CASE("worker count does not change the samples") {
  auto cfg = small_singular();
  cfg.workers = 1;
  const auto a = run_singular(cfg);
  cfg.workers = 3;
  const auto b = run_singular(cfg);
  CHECK(a.samples == b.samples);
  CHECK(to_csv(a.table) == to_csv(b.table));
  auto f = small_full();
  f.workers = 1;
  const auto c = run_full(f);
  f.workers = 2;
  CHECK(c.samples == run_full(f).samples);
}

TEST_CASE("degenerate randomization collapses to deterministic values") {
  auto cfg = small_singular();
  cfg.family_g = SubgaussianFamily::constant(1.0);
  const auto det = run_singular(cfg);
  for (double x : det.samples) CHECK(x == det.samples[0]);
  CHECK(det.table.fit.slope == doctest::Approx(0.0).epsilon(1e-12));
  // rank one: X = |g| X_det
  cfg.initial.rank = 1;
  const double base = run_singular(cfg).samples[0];
  cfg.family_g = SubgaussianFamily::gaussian(1.0, 5);
  const auto rnd = run_singular(cfg);
  for (std::size_t m = 0; m < 10; ++m) {
    const double g = sample_coefficients(cfg.family_g, 1, coefficient_stream(m))[0];
    CHECK(rel(rnd.samples[m], std::abs(g) * base) < 1e-12);
  }
}

TEST_CASE("single-cell collapse of the full and function harnesses") {
  auto cfg = small_full();
  cfg.d = 1;
  cfg.n = 32;
  cfg.L = 2.0 * M_PI;
  cfg.initial.shape = InitialShape::mode;
  cfg.initial.mode = {2, 0, 0};
  cfg.p = Rational(4);
  cfg.q = Rational(2);
  cfg.family_g = SubgaussianFamily::constant(1.0);
  cfg.family_l = SubgaussianFamily::constant(1.0);
  auto fcfg = cfg;  // Strichartz pair for the function harness
  fcfg.p = Rational(8);
  fcfg.q = Rational(4);
  const double c_full = run_full(cfg).samples[0];
  const double c_fun = run_function(fcfg).samples[0];
  CHECK(c_full > 0.0);

  cfg.family_g = SubgaussianFamily::gaussian(1.0, 31);
  cfg.family_l = SubgaussianFamily::gaussian(1.0, 32);
  fcfg.family_l = cfg.family_l;
  const auto full = run_full(cfg);
  const auto fun = run_function(fcfg);
  const PartitionOfUnity pou(make_grid(1, 32, 2.0 * M_PI));
  const auto cell = pou.cell_index({2, 0, 0});
  for (std::size_t m = 0; m < 10; ++m) {
    const double g = sample_coefficients(cfg.family_g, 1, coefficient_stream(m))[0];
    const double l = sample_coefficients(cfg.family_l, pou.cell_count(), wiener_stream(m))[cell];
    CHECK(rel(full.samples[m], std::abs(g) * l * l * c_full) < 1e-10);
    CHECK(rel(fun.samples[m], std::abs(l) * c_fun) < 1e-10);
  }
}

TEST_CASE("harness validation") {
  auto cfg = small_singular();
  cfg.samples = 0;
  CHECK_THROWS_AS(run_singular(cfg), std::invalid_argument);
  cfg = small_singular();
  cfg.q = Rational(4);
  CHECK_THROWS_WITH_AS(run_singular(cfg), doctest::Contains("scaling"), std::invalid_argument);
  cfg = small_singular();
  cfg.r_list = {2};
  CHECK_THROWS_AS(run_singular(cfg), std::invalid_argument);
  auto f = small_full();
  f.q_hat = Rational(1);
  CHECK_THROWS_AS(run_full(f), std::invalid_argument);
  f = small_full();
  f.L = 4.0;
  CHECK_THROWS_AS(run_full(f), std::invalid_argument);
}

TEST_CASE("key estimate probe") {
  KeyEstimateConfig cfg;
  cfg.instances = 4;
  cfg.n = 32;
  cfg.steps = 16;
  const auto res = key_estimate_probe(cfg);
  CHECK(res.nu == doctest::Approx(2.0));  // 1/nu = (2 - 3/2)/1
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    CHECK(std::isfinite(res.ratios[i]));
    CHECK(res.ratios[i] > 0.0);
    CHECK(std::abs(res.ratios[i] - res.ratios_refined[i]) < 0.05 * res.ratios[i]);
  }

  // V = 0 gives a zero left side; constant V = c gives |c| T ||Q0||
  const Grid g = make_grid(1, 32, 12.0);
  InitialData spec;
  spec.rank = 2;
  const auto q0 = make_initial_operator(g, spec, 1);
  std::vector<Field> zero(9, Field(g));
  CHECK(key_estimate_lhs(zero, q0, 0.5, 2.0) == 0.0);
  std::vector<Field> c(9, Field(g, std::vector<cplx>(g.size(), 3.0)));
  CHECK(rel(key_estimate_lhs(c, q0, 0.5, 2.0), 1.5 * schatten_norm(q0, 2.0).value) < 1e-10);

  cfg.mu = Rational(3, 2);
  CHECK_THROWS_AS(key_estimate_probe(cfg), std::invalid_argument);
}
