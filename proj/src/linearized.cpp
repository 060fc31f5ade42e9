#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "schatten/fft.hpp"
#include "schatten/hartree.hpp"

namespace schatten::hartree {

using Eigen::Index;
using Eigen::MatrixXcd;

namespace {

constexpr cplx kI{0.0, 1.0};

std::size_t steps_for(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("time horizon and step must be positive");
  const double steps = std::round(T / dt);
  if (std::abs(T / dt - steps) > 1e-9 * std::max(1.0, T / dt))
    throw std::invalid_argument("time horizon must be a multiple of the step");
  return static_cast<std::size_t>(steps);
}

double l2_time_space(const std::vector<Field>& u, double dt) {
  std::vector<double> per(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) per[k] = lebesgue_norm(u[k], 2.0);
  return time_norm(per, dt, 2.0);
}

double max_frame_norm(const std::vector<Field>& u) {
  double m = 0.0;
  for (const auto& f : u) m = std::max(m, l2_norm(f));
  return m;
}

std::vector<Field> march_direct(const std::vector<Field>& source, const Background& bg, double dt,
                                std::vector<DenseOperator>* duhamel, double limit, double source_max) {
  const Grid& g = bg.f.grid;
  require_dense_size(g);
  const DenseOperator gamma = multiplier_operator(bg.f);
  const auto u = FourierMultiplier::free_propagator(g, dt);
  const auto uc = u.conj();
  std::vector<Field> rho;
  rho.reserve(source.size());
  rho.push_back(source[0]);
  DenseOperator c = commutator(potential_from_density(bg, rho[0]), gamma);
  DenseOperator s(g, 0.5 * c.kernel);
  if (duhamel) duhamel->emplace_back(g, MatrixXcd::Zero(c.kernel.rows(), c.kernel.cols()));
  for (std::size_t k = 1; k < source.size(); ++k) {
    // The new commutator [V_k, gamma_f] has zero diagonal, so L_1 at t_k only sees earlier nodes.
    DenseOperator p = sandwich_multipliers(u, s, uc);
    const Field l1 = (kI * dt) * density(p);
    rho.push_back(source[k] - l1);
    if (!(l2_norm(rho.back()) <= limit * std::max(source_max, 1e-300)))
      throw NumericFailure("linearized solve diverged at t = " + std::to_string(static_cast<double>(k) * dt));
    c = commutator(potential_from_density(bg, rho.back()), gamma);
    p.kernel += c.kernel;
    s = std::move(p);
    if (duhamel) duhamel->emplace_back(g, (-kI * dt) * (s.kernel - 0.5 * c.kernel));
  }
  return rho;
}

std::vector<Field> march_fourier(const std::vector<Field>& source, const Background& bg, double dt, double c0,
                                 double limit, double source_max) {
  const Grid& g = bg.f.grid;
  const std::size_t K = source.size();
  const auto table = l1_fourier_table(bg, dt, K - 1);
  std::vector<std::vector<cplx>> s_hat(K);
  for (std::size_t k = 0; k < K; ++k) {
    s_hat[k] = source[k].values;
    fft::transform(g, s_hat[k], -1);
  }
  std::vector<std::vector<cplx>> r_hat(K, std::vector<cplx>(g.size()));
  for (std::size_t xi = 0; xi < g.size(); ++xi) {
    const double k2 = g.frequency_norm2(xi);
    const cplx wf = c0 * bg.w_hat.symbol[xi];
    std::vector<double> sines(K);
    for (std::size_t m = 0; m < K; ++m) sines[m] = std::sin(static_cast<double>(m) * dt * k2);
    for (std::size_t k = 0; k < K; ++k) {
      cplx sum{0.0, 0.0};
      for (std::size_t j = 0; j < k; ++j)
        sum += (j == 0 ? 0.5 * dt : dt) * sines[k - j] * table[k - j][xi] * r_hat[j][xi];
      r_hat[k][xi] = s_hat[k][xi] - wf * sum;
    }
  }
  std::vector<Field> rho;
  rho.reserve(K);
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (std::size_t k = 0; k < K; ++k) {
    fft::transform(g, r_hat[k], +1);
    for (auto& z : r_hat[k]) z *= inv_n;
    rho.emplace_back(g, std::move(r_hat[k]));
    const double n = l2_norm(rho.back());
    if (!(n <= limit * std::max(source_max, 1e-300)))
      throw NumericFailure("linearized solve diverged at t = " + std::to_string(static_cast<double>(k) * dt));
  }
  return rho;
}

double schatten_of_singular_squares(std::vector<double> s2, double alpha) {
  std::vector<double> sv(s2.size());
  for (std::size_t i = 0; i < s2.size(); ++i) sv[i] = std::sqrt(std::max(0.0, s2[i]));
  return schatten_value(sv, alpha);
}

double schatten_of_matrix(const MatrixXcd& x, double alpha) {
  if (x.size() == 0) return 0.0;
  const MatrixXcd gram = x.rows() >= x.cols() ? MatrixXcd(x.adjoint() * x) : MatrixXcd(x * x.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  std::vector<double> s2(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Index i = 0; i < es.eigenvalues().size(); ++i) s2[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return schatten_of_singular_squares(std::move(s2), alpha);
}

std::vector<std::size_t> ladder_nodes(const std::vector<double>& ladder, double dt, std::size_t frames) {
  if (ladder.size() < 2) throw std::invalid_argument("scattering ladder needs at least two times");
  std::vector<std::size_t> nodes;
  for (double t : ladder) {
    const double r = t / dt;
    const double k = std::round(r);
    if (t < 0.0 || std::abs(r - k) > 1e-9 * std::max(1.0, r))
      throw std::invalid_argument("scattering ladder times must be nonnegative multiples of the step");
    if (static_cast<std::size_t>(k) >= frames) throw std::invalid_argument("scattering ladder exceeds the run");
    if (!nodes.empty() && static_cast<std::size_t>(k) <= nodes.back())
      throw std::invalid_argument("scattering ladder must be increasing");
    nodes.push_back(static_cast<std::size_t>(k));
  }
  return nodes;
}

void finish_report(ScatteringReport& rep, double decay_limit) {
  double largest = 0.0;
  for (const auto& p : rep.ladder) largest = std::max(largest, p.distance);
  rep.worst_ratio = 0.0;
  if (largest == 0.0) {
    rep.cauchy_consistent = true;
    rep.verdict = "trivial";
    return;
  }
  for (std::size_t i = 1; i < rep.ladder.size(); ++i)
    rep.worst_ratio = std::max(rep.worst_ratio, rep.ladder[i].distance / rep.ladder[i - 1].distance);
  rep.cauchy_consistent = rep.ladder.size() >= 2 && rep.worst_ratio <= decay_limit;
  rep.verdict = rep.cauchy_consistent ? "cauchy-consistent" : "not-decaying";
}

double default_alpha(int d) { return d == 1 ? kInfinity : 2.0 * d / (d - 1.0); }

}  // namespace

LinearizedRun linearized_solve(const LowRankOperator& q0, const Background& bg, const LinearizedOptions& opt) {
  validate_background(bg);
  require_same_grid(q0.grid, bg.f.grid, "linearized_solve");
  const Grid& g = q0.grid;
  const std::size_t steps = steps_for(opt.T, opt.dt);
  const auto times = uniform_times(0.0, opt.T, steps);

  LinearizedRun out(g);
  out.source.reserve(times.size());
  for (double t : times) out.source.push_back(density(conjugate_free(q0, t)));
  const double source_max = max_frame_norm(out.source);

  std::vector<DenseOperator> dg;
  std::vector<Field> rho;
  if (opt.path == L1Path::direct) {
    rho = march_direct(out.source, bg, opt.dt, opt.reconstruct ? &dg : nullptr, opt.divergence_limit, source_max);
  } else {
    if (!std::isfinite(opt.c0)) throw std::invalid_argument("L1 Fourier path: constant c0 is not calibrated");
    rho = march_fourier(out.source, bg, opt.dt, opt.c0, opt.divergence_limit, source_max);
  }

  HartreeRun& run = out.run;
  run.times = times;
  run.T = opt.T;
  run.dt = opt.dt;
  run.rho = std::move(rho);
  for (const auto& r : run.rho) run.v.push_back(potential_from_density(bg, r));
  if (opt.reconstruct) {
    require_dense_size(g);
    if (dg.empty()) dg = duhamel_series(run.v, std::vector<DenseOperator>{multiplier_operator(bg.f)}, opt.dt);
    const DenseOperator q0d = to_dense(q0);
    for (std::size_t k = 0; k < times.size(); ++k)
      run.q.emplace_back(g, conjugate_free(q0d, times[k]).kernel + dg[k].kernel);
  }
  out.growth = source_max > 0.0 ? max_frame_norm(run.rho) / source_max : 0.0;
  out.residual = linearized_residual(run.rho, out.source, bg, opt.dt, opt.path, opt.c0);
  run.status = "solved";
  return out;
}

double linearized_residual(const std::vector<Field>& rho, const std::vector<Field>& source, const Background& bg,
                           double dt, L1Path path, double c0) {
  if (rho.size() != source.size()) throw std::invalid_argument("linearized_residual: frame count mismatch");
  const auto l1 = path == L1Path::direct ? l1_apply_direct(rho, bg, dt) : l1_apply_fourier(rho, bg, dt, c0);
  std::vector<Field> r;
  r.reserve(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) r.push_back(rho[k] + l1[k] - source[k]);
  const double ref = l2_time_space(source, dt);
  return ref > 0.0 ? l2_time_space(r, dt) / ref : l2_time_space(r, dt);
}

ScatteringReport scattering_diagnostic(const std::vector<Field>& rho, const Background& bg, double dt,
                                       const std::vector<double>& ladder_times, double alpha, double decay_limit,
                                       double support_threshold) {
  validate_background(bg);
  if (rho.empty()) throw std::invalid_argument("scattering: no density frames");
  const Grid& g = bg.f.grid;
  const auto nodes = ladder_nodes(ladder_times, dt, rho.size());
  ScatteringReport rep;
  rep.alpha = alpha > 0.0 ? alpha : default_alpha(g.dim());
  require_schatten_exponent(rep.alpha, 2.0);

  const std::size_t N = g.size();
  double f_max = 0.0;
  for (const auto& z : bg.f.symbol) f_max = std::max(f_max, std::abs(z));
  std::vector<std::size_t> support;
  std::vector<int> position(N, -1);
  for (std::size_t p = 0; p < N; ++p)
    if (f_max > 0.0 && std::abs(bg.f.symbol[p]) > support_threshold * f_max) {
      position[p] = static_cast<int>(support.size());
      support.push_back(p);
    }
  std::vector<double> k2(N);
  for (std::size_t p = 0; p < N; ++p) k2[p] = g.frequency_norm2(p);

  // V_hat(tau_j, eta) / L^d in the continuum normalization of the plane-wave basis.
  std::vector<std::vector<cplx>> v_hat;
  v_hat.reserve(nodes.back() + 1);
  for (std::size_t j = 0; j <= nodes.back(); ++j) {
    auto s = fourier_transform(potential_from_density(bg, rho[j]));
    for (auto& z : s) z /= g.volume();
    v_hat.push_back(std::move(s));
  }

  // X_{qp} = -i sum_j w_j exp(i tau_j (|q|^2 - |p|^2)) (f(p) - f(q)) V_hat_j(q - p).
  const auto entry = [&](std::size_t q, std::size_t p, std::size_t a, std::size_t b) {
    const cplx df = bg.f.symbol[p] - bg.f.symbol[q];
    if (df == cplx{0.0, 0.0}) return cplx{0.0, 0.0};
    const double omega = k2[q] - k2[p];
    const std::size_t eta = g.wrapped_difference(q, p);
    cplx z = std::polar(1.0, omega * static_cast<double>(a) * dt);
    const cplx step = std::polar(1.0, omega * dt);
    cplx sum{0.0, 0.0};
    for (std::size_t j = a; j <= b; ++j) {
      const double w = (j == a || j == b) ? 0.5 * dt : dt;
      sum += w * z * v_hat[j][eta];
      z *= step;
    }
    return -kI * df * sum;
  };

  const std::size_t m = support.size();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const std::size_t a = nodes[i - 1];
    const std::size_t b = nodes[i];
    double dist = 0.0;
    if (m == 0) {
      dist = 0.0;
    } else if (2 * m >= N) {
      MatrixXcd x(static_cast<Index>(N), static_cast<Index>(N));
      for (std::size_t p = 0; p < N; ++p)
        for (std::size_t q = 0; q < N; ++q) x(static_cast<Index>(q), static_cast<Index>(p)) = entry(q, p, a, b);
      dist = schatten_of_matrix(x, rep.alpha);
    } else {
      // X = A E_S^T + E_S B with A = X[:, S] and B = X[S, :] restricted to columns outside S.
      const auto M = static_cast<Index>(m);
      MatrixXcd left = MatrixXcd::Zero(static_cast<Index>(N), 2 * M);
      MatrixXcd right = MatrixXcd::Zero(static_cast<Index>(N), 2 * M);
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t p = support[c];
        for (std::size_t q = 0; q < N; ++q) left(static_cast<Index>(q), static_cast<Index>(c)) = entry(q, p, a, b);
        right(static_cast<Index>(p), static_cast<Index>(c)) = 1.0;
        const std::size_t q = support[c];
        left(static_cast<Index>(q), M + static_cast<Index>(c)) = 1.0;
        for (std::size_t pp = 0; pp < N; ++pp)
          if (position[pp] < 0)
            right(static_cast<Index>(pp), M + static_cast<Index>(c)) = std::conj(entry(q, pp, a, b));
      }
      Eigen::HouseholderQR<MatrixXcd> ql(left);
      Eigen::HouseholderQR<MatrixXcd> qr(right);
      const MatrixXcd rl = ql.matrixQR().topRows(2 * M).triangularView<Eigen::Upper>();
      const MatrixXcd rr = qr.matrixQR().topRows(2 * M).triangularView<Eigen::Upper>();
      dist = schatten_of_matrix(rl * rr.adjoint(), rep.alpha);
    }
    rep.ladder.push_back({ladder_times[i - 1], ladder_times[i], dist});
  }
  finish_report(rep, decay_limit);
  return rep;
}

ScatteringReport scattering_diagnostic_dense(const HartreeRun& run, const std::vector<double>& ladder_times,
                                             double alpha, double decay_limit) {
  if (run.q.empty()) throw std::invalid_argument("scattering: run has no reconstructed operators");
  const auto nodes = ladder_nodes(ladder_times, run.dt, run.q.size());
  ScatteringReport rep;
  rep.alpha = alpha > 0.0 ? alpha : default_alpha(run.grid.dim());
  require_schatten_exponent(rep.alpha, 2.0);
  std::vector<DenseOperator> w;
  for (std::size_t k : nodes) w.push_back(conjugate_free(run.q[k], -run.times[k]));
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const DenseOperator diff(run.grid, w[i].kernel - w[i - 1].kernel);
    rep.ladder.push_back({ladder_times[i - 1], ladder_times[i], schatten_norm(diff, rep.alpha).value});
  }
  finish_report(rep, decay_limit);
  return rep;
}

}  // namespace schatten::hartree
