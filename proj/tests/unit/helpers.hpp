#pragma once

#include <random>

#include "schatten/linop.hpp"

namespace testutil {

using schatten::cplx;

inline schatten::Field random_field(const schatten::Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  schatten::Field f(g);
  for (auto& v : f.values) v = {nd(rng), nd(rng)};
  return f;
}

inline schatten::Field random_real_field(const schatten::Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  schatten::Field f(g);
  for (auto& v : f.values) v = nd(rng);
  return f;
}

inline schatten::LowRankOperator random_lowrank(const schatten::Grid& g, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXcd c(rank);
  Eigen::MatrixXcd u(n, rank), v(n, rank);
  for (int k = 0; k < rank; ++k) c(k) = {nd(rng), nd(rng)};
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = {nd(rng), nd(rng)};
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = {nd(rng), nd(rng)};
  return schatten::LowRankOperator(g, c, u, v);
}

inline schatten::LowRankOperator random_hermitian_lowrank(const schatten::Grid& g, int rank,
                                                          std::mt19937_64& rng) {
  auto a = random_lowrank(g, rank, rng);
  for (int k = 0; k < rank; ++k) a.coeffs(k) = a.coeffs(k).real();
  a.right = a.left;
  return a;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testutil
