#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "schatten/grid.hpp"

namespace schatten {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Provenance of one random draw applied to an operator.
struct DrawRecord {
  std::string role;    // "singular", "wiener", ...
  std::string family;  // e.g. "gaussian(1)"
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// A = sum_n c_n |u_n><v_n| with u_n, v_n stored as the columns of `left`, `right`.
struct LowRankOperator {
  Grid grid;
  Eigen::VectorXcd coeffs;
  Eigen::MatrixXcd left;
  Eigen::MatrixXcd right;
  std::vector<DrawRecord> draws;

  explicit LowRankOperator(const Grid& g);
  LowRankOperator(const Grid& g, Eigen::VectorXcd c, Eigen::MatrixXcd u, Eigen::MatrixXcd v);

  Eigen::Index rank() const noexcept { return coeffs.size(); }
  Field left_field(Eigen::Index n) const;
  Field right_field(Eigen::Index n) const;

  static LowRankOperator rank_one(cplx c, const Field& u, const Field& v);
};

/// (A f)(x) = h^d sum_y K(x, y) f(y).
struct DenseOperator {
  Grid grid;
  Eigen::MatrixXcd kernel;

  explicit DenseOperator(const Grid& g);
  DenseOperator(const Grid& g, Eigen::MatrixXcd k);
};

struct SchattenReport {
  double alpha = 2.0;
  double value = 0.0;
  std::vector<double> singular_values;  // descending
};

Eigen::Map<const Eigen::VectorXcd> as_vector(const Field& f);

DenseOperator to_dense(const LowRankOperator& a);
/// Kernel of the translation-invariant operator m(-i grad).
DenseOperator multiplier_operator(const FourierMultiplier& m);

Field density(const LowRankOperator& a);
Field density(const DenseOperator& a);
cplx trace(const LowRankOperator& a);
cplx trace(const DenseOperator& a);

/// (sum s^alpha)^{1/alpha}, or max s when alpha is infinite.
double schatten_value(const std::vector<double>& singular_values, double alpha);
SchattenReport schatten_from_singular_values(std::vector<double> sv, double alpha);
void require_schatten_exponent(double alpha, double minimum = 1.0);

/// Singular values from weighted QR of both factor families and the small core.
SchattenReport schatten_norm(const LowRankOperator& a, double alpha);
/// Singular values of h^d K.
SchattenReport schatten_norm(const DenseOperator& a, double alpha);

SchattenReport sobolev_schatten_norm(const LowRankOperator& a, double s, double alpha);
SchattenReport sobolev_schatten_norm(const DenseOperator& a, double s, double alpha);

/// Kernel of M_left A M_right for two Fourier multipliers.
DenseOperator sandwich_multipliers(const FourierMultiplier& m_left, const DenseOperator& a,
                                   const FourierMultiplier& m_right);

/// U(t) A U(t)^*.
LowRankOperator conjugate_free(const LowRankOperator& a, double t);
DenseOperator conjugate_free(const DenseOperator& a, double t);

/// Applies the multiplier to every left and right factor: M A M^*.
LowRankOperator conjugate_factors(const FourierMultiplier& m, const LowRankOperator& a);

LowRankOperator multiply_left(const Field& v, const LowRankOperator& a);
LowRankOperator multiply_right(const LowRankOperator& a, const Field& v);
DenseOperator multiply_left(const Field& v, const DenseOperator& a);
DenseOperator multiply_right(const DenseOperator& a, const Field& v);
/// [V, A] = V A - A V for a multiplication operator V.
LowRankOperator commutator(const Field& v, const LowRankOperator& a);
DenseOperator commutator(const Field& v, const DenseOperator& a);
/// Kernel (V(x) - V(y)) k_m(x - y) of [V, m(-i grad)].
DenseOperator commutator_with_multiplier(const Field& v, const FourierMultiplier& m);

struct SandwichBound {
  double value = 0.0;  // ||f(x) g(-i grad)||_{S^alpha}
  double bound = 0.0;  // ||f||_{L^alpha} (L^{-d} sum |g|^alpha)^{1/alpha}
};
/// Schatten norm of f(x) g(-i grad) with the torus form of the Kato-Seiler-Simon bound.
SandwichBound multiplier_sandwich_schatten(const Field& f, const FourierMultiplier& g, double alpha);

/// Eigenvalues of h^d K in descending order; rejects non-Hermitian kernels.
std::vector<double> spectrum_hermitian(const DenseOperator& a);

LowRankOperator add(const LowRankOperator& a, const LowRankOperator& b);
DenseOperator add(const DenseOperator& a, const DenseOperator& b);
LowRankOperator scale(cplx c, const LowRankOperator& a);
DenseOperator scale(cplx c, const DenseOperator& a);
LowRankOperator adjoint(const LowRankOperator& a);
DenseOperator adjoint(const DenseOperator& a);
LowRankOperator compose(const LowRankOperator& a, const LowRankOperator& b);
DenseOperator compose(const DenseOperator& a, const DenseOperator& b);

/// Truncated SVD of the core: keeps the fewest terms whose discarded tail has
/// Hilbert-Schmidt norm <= tol * ||A||_{S^2}. The result is in singular-value form
/// (non-negative coefficients, orthonormal factor families).
LowRankOperator recompress(const LowRankOperator& a, double tol);
LowRankOperator svd_form(const LowRankOperator& a);

double hilbert_schmidt_norm(const DenseOperator& a);
double hilbert_schmidt_distance(const DenseOperator& a, const DenseOperator& b);
double hermiticity_defect(const LowRankOperator& a);
double hermiticity_defect(const DenseOperator& a);
/// (A + A^*) / 2.
DenseOperator hermitian_part(const DenseOperator& a);

}  // namespace schatten
