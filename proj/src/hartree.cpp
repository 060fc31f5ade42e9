#include "schatten/hartree.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "schatten/fft.hpp"

namespace schatten::hartree {

using Eigen::Index;
using Eigen::MatrixXcd;

namespace {

constexpr cplx kI{0.0, 1.0};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

DenseOperator zero_operator(const Grid& g) {
  const auto n = static_cast<Index>(g.size());
  return DenseOperator(g, MatrixXcd::Zero(n, n));
}

std::vector<double> node_times(double T, std::size_t steps) { return uniform_times(0.0, T, steps); }

std::size_t step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("time horizon and step must be positive");
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("time horizon must be a multiple of the step");
  return static_cast<std::size_t>(steps);
}

std::vector<Field> aux_fields(Scheme s, const Background& bg, const std::vector<Field>& rho) {
  if (s != Scheme::d3) return rho;
  std::vector<Field> out;
  out.reserve(rho.size());
  for (const auto& r : rho) out.push_back(potential_from_density(bg, r));
  return out;
}

std::vector<Field> densities(const std::vector<DenseOperator>& q) {
  std::vector<Field> out;
  out.reserve(q.size());
  for (const auto& op : q) out.push_back(density(op));
  return out;
}

}  // namespace

Background make_background(const Grid& g, const std::string& f_kind, double f_amplitude, const std::string& w_kind,
                           double w_strength, double f_width) {
  if (!std::isfinite(f_amplitude) || !std::isfinite(w_strength))
    throw std::invalid_argument("background: amplitudes must be finite");
  if (!(f_width > 0.0)) throw std::invalid_argument("background: width must be positive");
  std::vector<cplx> f(g.size());
  std::vector<cplx> w(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double k2 = g.frequency_norm2(j);
    if (f_kind == "fermi-sea")
      f[j] = k2 <= 1.0 ? f_amplitude : 0.0;
    else if (f_kind == "gaussian")
      f[j] = f_amplitude * std::exp(-k2 / (f_width * f_width));
    else if (f_kind != "zero")
      throw std::invalid_argument("unknown momentum distribution: " + f_kind);
    if (w_kind == "delta")
      w[j] = w_strength;
    else if (w_kind == "gaussian")
      w[j] = w_strength * std::exp(-0.5 * k2);
    else if (w_kind != "zero")
      throw std::invalid_argument("unknown interaction: " + w_kind);
  }
  Background bg{FourierMultiplier(g, std::move(f)), FourierMultiplier(g, std::move(w)), f_kind, w_kind};
  validate_background(bg);
  return bg;
}

void validate_background(const Background& bg) {
  require_same_grid(bg.f.grid, bg.w_hat.grid, "background");
  const Grid& g = bg.f.grid;
  double w_max = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!finite(bg.f.symbol[j]) || !finite(bg.w_hat.symbol[j]))
      throw std::invalid_argument("background: f and w_hat must be bounded");
    if (bg.f.symbol[j].imag() != 0.0) throw std::invalid_argument("background: f must be real");
    w_max = std::max(w_max, std::abs(bg.w_hat.symbol[j]));
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx a = bg.w_hat.symbol[j];
    const cplx b = std::conj(bg.w_hat.symbol[g.negated(j)]);
    if (std::abs(a - b) > 1e-12 * std::max(1.0, w_max))
      throw std::invalid_argument("background: w must be real (w_hat(-xi) = conj w_hat(xi))");
  }
}

double background_density(const Background& bg) { return multiplier_kernel(bg.f)[0].real(); }

StationarityReport stationarity_residual(const Background& bg, std::size_t max_probes) {
  validate_background(bg);
  const Grid& g = bg.f.grid;
  const Field rho(g, std::vector<cplx>(g.size(), background_density(bg)));
  const Field v0 = potential_from_density(bg, rho);
  std::vector<cplx> lap(g.size());
  double k2_max = 0.0;
  double f_max = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    lap[j] = g.frequency_norm2(j);
    k2_max = std::max(k2_max, lap[j].real());
    f_max = std::max(f_max, std::abs(bg.f.symbol[j]));
  }
  const FourierMultiplier neg_lap(g, std::move(lap));
  const auto h = [&](const Field& u) { return apply_multiplier(neg_lap, u) + pointwise(v0, u); };

  StationarityReport out;
  double v_max = 0.0;
  for (const auto& z : v0.values) v_max = std::max(v_max, std::abs(z));
  out.scale = f_max * (k2_max + v_max);
  const std::size_t stride = std::max<std::size_t>(1, g.size() / std::max<std::size_t>(1, max_probes));
  for (std::size_t j = 0; j < g.size(); j += stride) {
    const auto xi = g.frequency(j);
    const Field e = Field::from_function(g, [&](const Vec3& x) {
      return std::exp(kI * (xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]));
    });
    const Field r = h(apply_multiplier(bg.f, e)) - apply_multiplier(bg.f, h(e));
    out.residual = std::max(out.residual, l2_norm(r) / l2_norm(e));
    ++out.probes;
  }
  return out;
}

DenseOperator laplacian_commutator(const DenseOperator& q) {
  const Grid& g = q.grid;
  const auto n = static_cast<Index>(g.size());
  MatrixXcd k = q.kernel;
  std::span<cplx> buf(k.data(), static_cast<std::size_t>(k.size()));
  fft::transform_kernel(g, buf, -1);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (Index y = 0; y < n; ++y) {
    const double ky = g.frequency_norm2(g.negated(static_cast<std::size_t>(y)));
    for (Index x = 0; x < n; ++x) k(x, y) *= (g.frequency_norm2(static_cast<std::size_t>(x)) - ky) * norm;
  }
  fft::transform_kernel(g, buf, +1);
  return DenseOperator(g, std::move(k));
}

std::vector<DenseOperator> duhamel_series(const std::vector<Field>& v, const std::vector<DenseOperator>& a,
                                          double dt) {
  if (v.empty()) throw std::invalid_argument("duhamel_series: no time nodes");
  if (a.size() != 1 && a.size() != v.size())
    throw std::invalid_argument("duhamel_series: one operator per node or a single operator required");
  const Grid& g = v.front().grid;
  const auto at = [&](std::size_t k) -> const DenseOperator& { return a.size() == 1 ? a[0] : a[k]; };
  const auto u = FourierMultiplier::free_propagator(g, dt);
  const auto uc = u.conj();

  // S_k = U S_{k-1} U^* + C_k with S_0 = C_0 / 2, so dt (S_k - C_k / 2) is the trapezoid sum.
  std::vector<DenseOperator> out;
  out.reserve(v.size());
  out.push_back(zero_operator(g));
  DenseOperator s = commutator(v[0], at(0));
  s.kernel *= 0.5;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const DenseOperator c = commutator(v[k], at(k));
    s = sandwich_multipliers(u, s, uc);
    s.kernel += c.kernel;
    out.emplace_back(g, (-kI * dt) * (s.kernel - 0.5 * c.kernel));
  }
  return out;
}

std::vector<LowRankOperator> duhamel_series(const std::vector<Field>& v, const std::vector<LowRankOperator>& a,
                                            double dt, Index rank_cap, double tol) {
  if (v.empty()) throw std::invalid_argument("duhamel_series: no time nodes");
  if (a.size() != 1 && a.size() != v.size())
    throw std::invalid_argument("duhamel_series: one operator per node or a single operator required");
  const Grid& g = v.front().grid;
  const auto at = [&](std::size_t k) -> const LowRankOperator& { return a.size() == 1 ? a[0] : a[k]; };
  if (rank_cap <= 0) rank_cap = std::max<Index>(4, 4 * a[0].rank());
  const auto u = FourierMultiplier::free_propagator(g, dt);

  std::vector<LowRankOperator> out;
  out.reserve(v.size());
  out.emplace_back(g);
  LowRankOperator s = scale(0.5, commutator(v[0], at(0)));
  for (std::size_t k = 1; k < v.size(); ++k) {
    const LowRankOperator c = commutator(v[k], at(k));
    s = add(conjugate_factors(u, s), c);
    if (s.rank() > rank_cap) s = recompress(s, tol);
    out.push_back(recompress(scale(-kI * dt, add(s, scale(-0.5, c))), tol));
  }
  return out;
}

Scheme default_scheme(int d) {
  switch (d) {
    case 1: return Scheme::d1;
    case 2: return Scheme::d2;
    case 3: return Scheme::d3;
    default: throw std::invalid_argument("dimension must be 1, 2 or 3");
  }
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::d1: return "d1";
    case Scheme::d2: return "d2";
    case Scheme::d3: return "d3";
  }
  return "d1";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "d1") return Scheme::d1;
  if (text == "d2") return Scheme::d2;
  if (text == "d3") return Scheme::d3;
  throw std::invalid_argument("unknown scheme: " + text);
}

double aux_norm(Scheme s, const std::vector<Field>& aux, double dt) {
  std::vector<double> per(aux.size());
  for (std::size_t k = 0; k < aux.size(); ++k) {
    per[k] = lebesgue_norm(aux[k], 2.0);
    if (s == Scheme::d3) per[k] += lebesgue_norm(aux[k], kInfinity);
  }
  return time_norm(per, dt, s == Scheme::d1 ? 4.0 : 2.0);
}

void require_dense_size(const Grid& g) {
  if (g.size() > kDenseLimit)
    throw std::invalid_argument("grid too large for dense kernels (N = " + std::to_string(g.size()) +
                                " > " + std::to_string(kDenseLimit) + ")");
}

Field potential_from_density(const Background& bg, const Field& rho) { return convolve_potential(bg.w_hat, rho); }

double contraction_factor(const std::vector<double>& deltas, double noise_floor) {
  double worst = 0.0;
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (deltas[i - 1] > noise_floor) worst = std::max(worst, deltas[i] / deltas[i - 1]);
  return worst;
}

HartreeRun picard_solve(const DenseOperator& q0_in, const Background& bg, const PicardOptions& opt) {
  validate_background(bg);
  require_same_grid(q0_in.grid, bg.f.grid, "picard_solve");
  require_dense_size(q0_in.grid);
  const Grid& g = q0_in.grid;
  const double q0_norm = hilbert_schmidt_norm(q0_in);
  if (hermiticity_defect(q0_in) > 1e-8 * std::max(1.0, q0_norm))
    throw std::invalid_argument("picard_solve: initial operator must be self-adjoint");
  if (!(opt.tol > 0.0) || opt.max_iterations < 1) throw std::invalid_argument("picard_solve: bad iteration options");
  const DenseOperator q0 = hermitian_part(q0_in);
  const std::vector<DenseOperator> gamma{multiplier_operator(bg.f)};
  const double tol = opt.tol * std::max(1.0, q0_norm);
  const double noise = 1e3 * tol;

  // halving acts on the step count (rounded down) so T stays a multiple of dt
  const std::size_t initial_steps = step_count(opt.T, opt.dt);
  for (int halving = 0; halving <= opt.max_halvings; ++halving) {
    const std::size_t steps = initial_steps >> halving;
    if (steps < 4) break;
    const double T = static_cast<double>(steps) * opt.dt;
    const auto times = node_times(T, steps);
    std::vector<DenseOperator> free;
    free.reserve(times.size());
    for (double t : times) free.push_back(conjugate_free(q0, t));

    std::vector<DenseOperator> q = free;
    std::vector<Field> rho = densities(q);
    std::vector<Field> aux = aux_fields(opt.scheme, bg, rho);
    const double radius = 2.0 * (q0_norm + aux_norm(opt.scheme, aux, opt.dt));
    std::vector<double> deltas;
    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
      std::vector<Field> v;
      v.reserve(rho.size());
      for (const auto& r : rho) v.push_back(potential_from_density(bg, r));
      const auto dq = duhamel_series(v, q, opt.dt);
      const auto dg = duhamel_series(v, gamma, opt.dt);
      std::vector<DenseOperator> next;
      next.reserve(q.size());
      double op_delta = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        next.emplace_back(g, free[k].kernel + dq[k].kernel + dg[k].kernel);
        op_delta = std::max(op_delta, hilbert_schmidt_distance(next[k], q[k]));
      }
      auto next_rho = densities(next);
      auto next_aux = aux_fields(opt.scheme, bg, next_rho);
      std::vector<Field> diff;
      diff.reserve(aux.size());
      for (std::size_t k = 0; k < aux.size(); ++k) diff.push_back(next_aux[k] - aux[k]);
      const double delta = op_delta + aux_norm(opt.scheme, diff, opt.dt);
      if (!std::isfinite(delta)) throw NumericFailure("picard iteration produced non-finite values");
      deltas.push_back(delta);
      q = std::move(next);
      rho = std::move(next_rho);
      aux = std::move(next_aux);
      if (delta <= tol) {
        converged = true;
        break;
      }
      if (deltas.size() >= 2 && deltas[deltas.size() - 2] > noise &&
          delta > opt.contraction_limit * deltas[deltas.size() - 2])
        break;
    }
    if (!converged) continue;

    HartreeRun run(g);
    run.times = times;
    run.T = T;
    run.dt = opt.dt;
    run.q = std::move(q);
    run.rho = std::move(rho);
    for (const auto& r : run.rho) run.v.push_back(potential_from_density(bg, r));
    run.deltas = std::move(deltas);
    run.iterations = static_cast<int>(run.deltas.size());
    run.R = radius;
    run.halvings = halving;
    run.status = "converged";
    return run;
  }
  throw NumericFailure("picard iteration did not contract at step " + std::to_string(opt.dt) +
                       " after " + std::to_string(opt.max_halvings) + " halvings of T");
}

HartreeRun dense_rk4_oracle(const DenseOperator& q0, const Background& bg, double T, double dt) {
  validate_background(bg);
  require_same_grid(q0.grid, bg.f.grid, "dense_rk4_oracle");
  require_dense_size(q0.grid);
  const Grid& g = q0.grid;
  const std::size_t steps = step_count(T, dt);
  const DenseOperator gamma = multiplier_operator(bg.f);
  const auto rhs = [&](const MatrixXcd& k) {
    const DenseOperator qk(g, k);
    const Field v = potential_from_density(bg, density(qk));
    MatrixXcd out = laplacian_commutator(qk).kernel;
    out += commutator(v, DenseOperator(g, k + gamma.kernel)).kernel;
    return MatrixXcd(-kI * out);
  };

  HartreeRun run(g);
  run.times = node_times(T, steps);
  run.T = T;
  run.dt = dt;
  MatrixXcd k = q0.kernel;
  run.q.emplace_back(g, k);
  for (std::size_t s = 0; s < steps; ++s) {
    const MatrixXcd k1 = rhs(k);
    const MatrixXcd k2 = rhs(k + 0.5 * dt * k1);
    const MatrixXcd k3 = rhs(k + 0.5 * dt * k2);
    const MatrixXcd k4 = rhs(k + dt * k3);
    k += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!k.allFinite()) throw NumericFailure("rk4 oracle produced non-finite values");
    run.q.emplace_back(g, k);
  }
  run.rho = densities(run.q);
  for (const auto& r : run.rho) run.v.push_back(potential_from_density(bg, r));
  run.status = "integrated";
  return run;
}

PipelineResult randomized_lwp_pipeline(const LowRankOperator& q0, const Background& bg, const PipelineOptions& opt) {
  const Grid& g = q0.grid;
  const int d = g.dim();
  const double sigma = d == 1 ? 0.0 : opt.epsilon;
  if (d > 1 && !(opt.epsilon > 0.0)) throw std::invalid_argument("pipeline: epsilon must be positive for d >= 2");
  std::unique_ptr<PartitionOfUnity> pou;
  if (opt.kind == RandomizationKind::full) pou = std::make_unique<PartitionOfUnity>(g);
  const auto qr = sobolev_conjugated_randomize(q0, sigma, opt.kind, opt.family_g, opt.family_l, pou.get(),
                                               2 * opt.draw, 2 * opt.draw + 1);

  const std::size_t steps = step_count(opt.picard.T, opt.picard.dt);
  const auto times = node_times(opt.picard.T, steps);
  std::vector<double> per(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Field rho = density(conjugate_free(qr, times[k]));
    if (d == 1) {
      per[k] = lebesgue_norm(rho, 2.0);
    } else {
      const Field v = potential_from_density(bg, rho);
      per[k] = lebesgue_norm(v, 2.0) + lebesgue_norm(v, kInfinity);
    }
  }

  PipelineResult out(g);
  out.draws = qr.draws;
  if (d == 1) {
    out.data_norm = time_norm(per, opt.picard.dt, 4.0);
    out.data_norm_name = "L4_t L2_x rho";
  } else if (d == 2) {
    out.data_norm = time_norm(per, opt.picard.dt, 4.0);
    out.data_norm_name = "L4_t (L2 cap Linf)_x w*rho";
  } else {
    out.data_norm = time_norm(per, opt.picard.dt, 2.0);
    out.data_norm_name = "L2_t (L2 cap Linf)_x w*rho";
  }
  auto dense = to_dense(qr);
  out.run = picard_solve(dense, bg, opt.picard);
  return out;
}

}  // namespace schatten::hartree
