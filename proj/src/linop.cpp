#include "schatten/linop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "schatten/fft.hpp"

namespace schatten {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

LowRankOperator::LowRankOperator(const Grid& g)
    : grid(g),
      coeffs(0),
      left(static_cast<Index>(g.size()), 0),
      right(static_cast<Index>(g.size()), 0) {}

LowRankOperator::LowRankOperator(const Grid& g, VectorXcd c, MatrixXcd u, MatrixXcd v)
    : grid(g), coeffs(std::move(c)), left(std::move(u)), right(std::move(v)) {
  const auto n = static_cast<Index>(g.size());
  if (left.rows() != n || right.rows() != n)
    throw std::invalid_argument("low-rank operator: factor length does not match grid");
  if (left.cols() != coeffs.size() || right.cols() != coeffs.size())
    throw std::invalid_argument("low-rank operator: coefficient and factor counts differ");
}

Field LowRankOperator::left_field(Index n) const {
  std::vector<cplx> v(left.col(n).data(), left.col(n).data() + left.rows());
  return Field(grid, std::move(v));
}

Field LowRankOperator::right_field(Index n) const {
  std::vector<cplx> v(right.col(n).data(), right.col(n).data() + right.rows());
  return Field(grid, std::move(v));
}

LowRankOperator LowRankOperator::rank_one(cplx c, const Field& u, const Field& v) {
  require_same_grid(u.grid, v.grid, "rank_one");
  VectorXcd coeffs(1);
  coeffs(0) = c;
  return LowRankOperator(u.grid, coeffs, as_vector(u), as_vector(v));
}

DenseOperator::DenseOperator(const Grid& g)
    : grid(g),
      kernel(MatrixXcd::Zero(static_cast<Index>(g.size()), static_cast<Index>(g.size()))) {}

DenseOperator::DenseOperator(const Grid& g, MatrixXcd k) : grid(g), kernel(std::move(k)) {
  const auto n = static_cast<Index>(g.size());
  if (kernel.rows() != n || kernel.cols() != n)
    throw std::invalid_argument("dense operator: kernel shape does not match grid");
}

Eigen::Map<const VectorXcd> as_vector(const Field& f) {
  return Eigen::Map<const VectorXcd>(f.values.data(), static_cast<Index>(f.values.size()));
}

namespace {

VectorXcd apply_multiplier_vec(const FourierMultiplier& m, const VectorXcd& v) {
  std::vector<cplx> buf(v.data(), v.data() + v.size());
  fft::transform(m.grid, buf, -1);
  const double w = 1.0 / static_cast<double>(m.grid.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= m.symbol[i] * w;
  fft::transform(m.grid, buf, +1);
  return Eigen::Map<VectorXcd>(buf.data(), v.size());
}

MatrixXcd apply_multiplier_columns(const FourierMultiplier& m, const MatrixXcd& f) {
  MatrixXcd out(f.rows(), f.cols());
  for (Index j = 0; j < f.cols(); ++j) out.col(j) = apply_multiplier_vec(m, f.col(j));
  return out;
}

// Triangular factor of the weighted QR of the columns of f.
MatrixXcd weighted_r_factor(const MatrixXcd& f, double weight) {
  const Index k = std::min(f.rows(), f.cols());
  Eigen::HouseholderQR<MatrixXcd> qr(f * std::sqrt(weight));
  MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return r;
}

std::vector<double> to_sorted(const Eigen::VectorXd& s) {
  std::vector<double> out(s.data(), s.data() + s.size());
  for (auto& v : out) v = std::max(v, 0.0);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> core_singular_values(const LowRankOperator& a) {
  if (a.rank() == 0) return {};
  const double w = a.grid.cell_volume();
  const MatrixXcd ru = weighted_r_factor(a.left, w);
  const MatrixXcd rv = weighted_r_factor(a.right, w);
  const MatrixXcd core = ru * a.coeffs.asDiagonal() * rv.adjoint();
  Eigen::BDCSVD<MatrixXcd> svd(core);
  return to_sorted(svd.singularValues());
}

}  // namespace

DenseOperator to_dense(const LowRankOperator& a) {
  MatrixXcd k = a.left * a.coeffs.asDiagonal() * a.right.adjoint();
  return DenseOperator(a.grid, std::move(k));
}

DenseOperator multiplier_operator(const FourierMultiplier& m) {
  const Grid& g = m.grid;
  const auto kern = multiplier_kernel(m);
  const auto n = static_cast<Index>(g.size());
  MatrixXcd k(n, n);
  for (Index y = 0; y < n; ++y)
    for (Index x = 0; x < n; ++x)
      k(x, y) = kern[g.wrapped_difference(static_cast<std::size_t>(x), static_cast<std::size_t>(y))];
  return DenseOperator(g, std::move(k));
}

Field density(const LowRankOperator& a) {
  Field rho(a.grid);
  for (Index n = 0; n < a.rank(); ++n) {
    const cplx c = a.coeffs(n);
    for (Index x = 0; x < a.left.rows(); ++x)
      rho.values[static_cast<std::size_t>(x)] += c * a.left(x, n) * std::conj(a.right(x, n));
  }
  return rho;
}

Field density(const DenseOperator& a) {
  Field rho(a.grid);
  for (Index x = 0; x < a.kernel.rows(); ++x) rho.values[static_cast<std::size_t>(x)] = a.kernel(x, x);
  return rho;
}

cplx trace(const LowRankOperator& a) {
  cplx t{0.0, 0.0};
  for (Index n = 0; n < a.rank(); ++n) t += a.coeffs(n) * a.right.col(n).dot(a.left.col(n));
  return t * a.grid.cell_volume();
}

cplx trace(const DenseOperator& a) { return a.kernel.trace() * a.grid.cell_volume(); }

void require_schatten_exponent(double alpha, double minimum) {
  if (std::isnan(alpha) || alpha < minimum)
    throw std::invalid_argument("Schatten exponent must be >= " + std::to_string(minimum));
}

double schatten_value(const std::vector<double>& sv, double alpha) {
  require_schatten_exponent(alpha);
  if (sv.empty()) return 0.0;
  const double top = *std::max_element(sv.begin(), sv.end());
  if (top == 0.0) return 0.0;
  if (std::isinf(alpha)) return top;
  double acc = 0.0;
  for (double s : sv) acc += std::pow(s / top, alpha);
  return top * std::pow(acc, 1.0 / alpha);
}

SchattenReport schatten_from_singular_values(std::vector<double> sv, double alpha) {
  std::sort(sv.begin(), sv.end(), std::greater<>());
  SchattenReport r;
  r.alpha = alpha;
  r.value = schatten_value(sv, alpha);
  r.singular_values = std::move(sv);
  return r;
}

SchattenReport schatten_norm(const LowRankOperator& a, double alpha) {
  require_schatten_exponent(alpha);
  return schatten_from_singular_values(core_singular_values(a), alpha);
}

SchattenReport schatten_norm(const DenseOperator& a, double alpha) {
  require_schatten_exponent(alpha);
  Eigen::BDCSVD<MatrixXcd> svd(a.kernel * a.grid.cell_volume());
  return schatten_from_singular_values(to_sorted(svd.singularValues()), alpha);
}

SchattenReport sobolev_schatten_norm(const LowRankOperator& a, double s, double alpha) {
  if (s == 0.0) return schatten_norm(a, alpha);
  return schatten_norm(conjugate_factors(FourierMultiplier::bessel(a.grid, s), a), alpha);
}

SchattenReport sobolev_schatten_norm(const DenseOperator& a, double s, double alpha) {
  if (s == 0.0) return schatten_norm(a, alpha);
  const auto b = FourierMultiplier::bessel(a.grid, s);
  return schatten_norm(sandwich_multipliers(b, a, b), alpha);
}

DenseOperator sandwich_multipliers(const FourierMultiplier& m_left, const DenseOperator& a,
                                   const FourierMultiplier& m_right) {
  require_same_grid(m_left.grid, a.grid, "sandwich_multipliers");
  require_same_grid(m_right.grid, a.grid, "sandwich_multipliers");
  const Grid& g = a.grid;
  const auto n = static_cast<Index>(g.size());
  MatrixXcd k = a.kernel;
  std::span<cplx> buf(k.data(), static_cast<std::size_t>(k.size()));
  fft::transform_kernel(g, buf, -1);
  // Row index y transforms with exp(-i eta y); the right factor acts through m(-eta).
  const auto right = m_right.reflected();
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (Index y = 0; y < n; ++y) {
    const cplx ry = right.symbol[static_cast<std::size_t>(y)] * norm;
    for (Index x = 0; x < n; ++x) k(x, y) *= m_left.symbol[static_cast<std::size_t>(x)] * ry;
  }
  fft::transform_kernel(g, buf, +1);
  return DenseOperator(g, std::move(k));
}

LowRankOperator conjugate_free(const LowRankOperator& a, double t) {
  if (t == 0.0) return a;
  return conjugate_factors(FourierMultiplier::free_propagator(a.grid, t), a);
}

DenseOperator conjugate_free(const DenseOperator& a, double t) {
  if (t == 0.0) return a;
  const auto u = FourierMultiplier::free_propagator(a.grid, t);
  return sandwich_multipliers(u, a, u.conj());
}

LowRankOperator conjugate_factors(const FourierMultiplier& m, const LowRankOperator& a) {
  require_same_grid(m.grid, a.grid, "conjugate_factors");
  LowRankOperator out(a.grid, a.coeffs, apply_multiplier_columns(m, a.left),
                      apply_multiplier_columns(m, a.right));
  out.draws = a.draws;
  return out;
}

namespace {

Eigen::VectorXcd field_vec(const Field& v) { return as_vector(v); }

}  // namespace

LowRankOperator multiply_left(const Field& v, const LowRankOperator& a) {
  require_same_grid(v.grid, a.grid, "multiply_left");
  MatrixXcd u = field_vec(v).asDiagonal() * a.left;
  return LowRankOperator(a.grid, a.coeffs, std::move(u), a.right);
}

LowRankOperator multiply_right(const LowRankOperator& a, const Field& v) {
  require_same_grid(v.grid, a.grid, "multiply_right");
  MatrixXcd r = field_vec(v).conjugate().asDiagonal() * a.right;
  return LowRankOperator(a.grid, a.coeffs, a.left, std::move(r));
}

DenseOperator multiply_left(const Field& v, const DenseOperator& a) {
  require_same_grid(v.grid, a.grid, "multiply_left");
  MatrixXcd k = field_vec(v).asDiagonal() * a.kernel;
  return DenseOperator(a.grid, std::move(k));
}

DenseOperator multiply_right(const DenseOperator& a, const Field& v) {
  require_same_grid(v.grid, a.grid, "multiply_right");
  MatrixXcd k = a.kernel * field_vec(v).asDiagonal();
  return DenseOperator(a.grid, std::move(k));
}

LowRankOperator commutator(const Field& v, const LowRankOperator& a) {
  return add(multiply_left(v, a), scale(-1.0, multiply_right(a, v)));
}

DenseOperator commutator(const Field& v, const DenseOperator& a) {
  require_same_grid(v.grid, a.grid, "commutator");
  const auto n = a.kernel.rows();
  MatrixXcd k(n, n);
  for (Index y = 0; y < n; ++y) {
    const cplx vy = v.values[static_cast<std::size_t>(y)];
    for (Index x = 0; x < n; ++x) k(x, y) = (v.values[static_cast<std::size_t>(x)] - vy) * a.kernel(x, y);
  }
  return DenseOperator(a.grid, std::move(k));
}

DenseOperator commutator_with_multiplier(const Field& v, const FourierMultiplier& m) {
  require_same_grid(v.grid, m.grid, "commutator_with_multiplier");
  return commutator(v, multiplier_operator(m));
}

SandwichBound multiplier_sandwich_schatten(const Field& f, const FourierMultiplier& g, double alpha) {
  require_same_grid(f.grid, g.grid, "multiplier_sandwich_schatten");
  require_schatten_exponent(alpha, 2.0);
  const DenseOperator op = multiply_left(f, multiplier_operator(g));
  SandwichBound out;
  out.value = schatten_norm(op, alpha).value;
  const Grid& grid = f.grid;
  double f_norm = 0.0;
  double g_norm = 0.0;
  if (std::isinf(alpha)) {
    for (const auto& x : f.values) f_norm = std::max(f_norm, std::abs(x));
    for (const auto& x : g.symbol) g_norm = std::max(g_norm, std::abs(x));
  } else {
    for (const auto& x : f.values) f_norm += std::pow(std::abs(x), alpha);
    for (const auto& x : g.symbol) g_norm += std::pow(std::abs(x), alpha);
    f_norm = std::pow(f_norm * grid.cell_volume(), 1.0 / alpha);
    g_norm = std::pow(g_norm / grid.volume(), 1.0 / alpha);
  }
  out.bound = f_norm * g_norm;
  return out;
}

std::vector<double> spectrum_hermitian(const DenseOperator& a) {
  const double scale_ref = a.kernel.norm();
  if ((a.kernel - a.kernel.adjoint()).norm() > 1e-8 * std::max(scale_ref, 1e-300))
    throw std::invalid_argument("spectrum_hermitian: operator is not Hermitian");
  const MatrixXcd h = 0.5 * (a.kernel + a.kernel.adjoint()) * a.grid.cell_volume();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

LowRankOperator add(const LowRankOperator& a, const LowRankOperator& b) {
  require_same_grid(a.grid, b.grid, "add");
  const Index ra = a.rank();
  const Index rb = b.rank();
  VectorXcd c(ra + rb);
  c << a.coeffs, b.coeffs;
  MatrixXcd u(a.left.rows(), ra + rb);
  u << a.left, b.left;
  MatrixXcd v(a.right.rows(), ra + rb);
  v << a.right, b.right;
  return LowRankOperator(a.grid, std::move(c), std::move(u), std::move(v));
}

DenseOperator add(const DenseOperator& a, const DenseOperator& b) {
  require_same_grid(a.grid, b.grid, "add");
  return DenseOperator(a.grid, a.kernel + b.kernel);
}

LowRankOperator scale(cplx c, const LowRankOperator& a) {
  LowRankOperator out(a.grid, a.coeffs * c, a.left, a.right);
  out.draws = a.draws;
  return out;
}

DenseOperator scale(cplx c, const DenseOperator& a) { return DenseOperator(a.grid, a.kernel * c); }

LowRankOperator adjoint(const LowRankOperator& a) {
  return LowRankOperator(a.grid, a.coeffs.conjugate(), a.right, a.left);
}

DenseOperator adjoint(const DenseOperator& a) { return DenseOperator(a.grid, a.kernel.adjoint()); }

LowRankOperator compose(const LowRankOperator& a, const LowRankOperator& b) {
  require_same_grid(a.grid, b.grid, "compose");
  // A B = sum_m d_m (sum_n c_n <v_n, x_m> u_n) <y_m|.
  const MatrixXcd gram = a.right.adjoint() * b.left * a.grid.cell_volume();
  MatrixXcd u = a.left * a.coeffs.asDiagonal() * gram;
  return LowRankOperator(a.grid, b.coeffs, std::move(u), b.right);
}

DenseOperator compose(const DenseOperator& a, const DenseOperator& b) {
  require_same_grid(a.grid, b.grid, "compose");
  return DenseOperator(a.grid, a.kernel * b.kernel * a.grid.cell_volume());
}

LowRankOperator recompress(const LowRankOperator& a, double tol) {
  if (tol < 0.0) throw std::invalid_argument("recompress: tolerance must be non-negative");
  if (a.rank() == 0) return a;
  const double w = a.grid.cell_volume();
  const double sw = std::sqrt(w);
  Eigen::HouseholderQR<MatrixXcd> qu(a.left * sw);
  Eigen::HouseholderQR<MatrixXcd> qv(a.right * sw);
  const Index ku = std::min(a.left.rows(), a.left.cols());
  const Index kv = std::min(a.right.rows(), a.right.cols());
  const MatrixXcd ru = qu.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
  const MatrixXcd rv = qv.matrixQR().topRows(kv).triangularView<Eigen::Upper>();
  const MatrixXcd core = ru * a.coeffs.asDiagonal() * rv.adjoint();
  Eigen::BDCSVD<MatrixXcd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  double total = s.squaredNorm();
  // Smallest k whose discarded tail satisfies the bound.
  Index keep = s.size();
  double tail = 0.0;
  const double budget = tol * tol * total;
  while (keep > 0) {
    const double next = tail + s(keep - 1) * s(keep - 1);
    if (next > budget || (tol == 0.0 && s(keep - 1) > 0.0)) break;
    tail = next;
    --keep;
  }
  const MatrixXcd qu_thin = qu.householderQ() * MatrixXcd::Identity(a.left.rows(), ku);
  const MatrixXcd qv_thin = qv.householderQ() * MatrixXcd::Identity(a.right.rows(), kv);
  MatrixXcd u = qu_thin * svd.matrixU().leftCols(keep) / sw;
  MatrixXcd v = qv_thin * svd.matrixV().leftCols(keep) / sw;
  VectorXcd c = s.head(keep).cast<cplx>();
  LowRankOperator out(a.grid, std::move(c), std::move(u), std::move(v));
  out.draws = a.draws;
  return out;
}

LowRankOperator svd_form(const LowRankOperator& a) { return recompress(a, 0.0); }

double hilbert_schmidt_norm(const DenseOperator& a) { return a.kernel.norm() * a.grid.cell_volume(); }

double hilbert_schmidt_distance(const DenseOperator& a, const DenseOperator& b) {
  require_same_grid(a.grid, b.grid, "hilbert_schmidt_distance");
  return (a.kernel - b.kernel).norm() * a.grid.cell_volume();
}

double hermiticity_defect(const LowRankOperator& a) {
  return schatten_norm(add(a, scale(-1.0, adjoint(a))), 2.0).value;
}

double hermiticity_defect(const DenseOperator& a) {
  return (a.kernel - a.kernel.adjoint()).norm() * a.grid.cell_volume();
}

DenseOperator hermitian_part(const DenseOperator& a) {
  return DenseOperator(a.grid, 0.5 * (a.kernel + a.kernel.adjoint()));
}

}  // namespace schatten
