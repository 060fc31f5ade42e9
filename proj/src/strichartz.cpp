#include "schatten/strichartz.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "schatten/fft.hpp"
#include "schatten/parallel.hpp"

namespace schatten::lab {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

std::vector<cplx> column(const MatrixXcd& m, Index j) { return {m.col(j).data(), m.col(j).data() + m.rows()}; }

void validate_common(const ExperimentConfig& cfg) {
  if (cfg.samples < 100) throw std::invalid_argument("samples (M) must be >= 100");
  if (cfg.steps < 2) throw std::invalid_argument("steps must be >= 2");
  if (!(cfg.T > 0.0)) throw std::invalid_argument("T must be positive");
  if (cfg.r_list.size() < 2) throw std::invalid_argument("need at least two moment orders r");
  for (double r : cfg.r_list)
    if (!(r >= 1.0) || std::isinf(r)) throw std::invalid_argument("moment orders r must lie in [1, inf)");
  if (cfg.sigma < 0 || 2 * cfg.sigma >= cfg.d) throw std::invalid_argument("sigma must lie in [0, d/2)");
  if (cfg.initial.rank < 0) throw std::invalid_argument("rank must be >= 0");
}

// max over frames of |rho| on the faces x_i = -L/2, relative to the max of |rho|.
double wrap_ratio_of(const Grid& g, const std::vector<Field>& frames) {
  double face = 0.0;
  double top = 0.0;
  for (const auto& f : frames)
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = std::abs(f[i]);
      top = std::max(top, v);
      const auto idx = g.axis_indices(i);
      for (int a = 0; a < g.dim(); ++a)
        if (idx[a] == 0) face = std::max(face, v);
    }
  return top > 0.0 ? face / top : 0.0;
}

std::vector<std::pair<std::string, std::string>> provenance(const ExperimentConfig& cfg, const std::string& kind) {
  return {{"experiment", kind},
          {"d", std::to_string(cfg.d)},
          {"n", std::to_string(cfg.n)},
          {"L", format_double(cfg.L)},
          {"T", format_double(cfg.T)},
          {"dt", format_double(cfg.T / static_cast<double>(cfg.steps))},
          {"family_g", cfg.family_g.describe()},
          {"family_l", kind == "singular" ? std::string("none") : cfg.family_l.describe()}};
}

LowRankOperator weighted_svd(const LowRankOperator& a, double sigma) {
  const LowRankOperator w = sigma == 0.0 ? a : conjugate_factors(FourierMultiplier::bessel(a.grid, sigma), a);
  return is_singular_value_form(w) ? w : svd_form(w);
}

// Raw spectra of <grad>^{-sigma} applied to every column.
MatrixXcd factor_spectra(const Grid& g, const MatrixXcd& f, double sigma) {
  MatrixXcd out(f.rows(), f.cols());
  const auto inv = FourierMultiplier::bessel(g, -sigma);
  for (Index j = 0; j < f.cols(); ++j) {
    auto buf = column(f, j);
    fft::transform(g, buf, -1);
    for (std::size_t i = 0; i < buf.size(); ++i) out(static_cast<Index>(i), j) = buf[i] * inv.symbol[i];
  }
  return out;
}

// Inverse transform of spectrum * m / N.
std::vector<cplx> synthesize(const Grid& g, const cplx* spectrum, const std::vector<cplx>& m) {
  std::vector<cplx> buf(g.size());
  const double w = 1.0 / static_cast<double>(g.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = spectrum[i] * m[i] * w;
  fft::transform(g, buf, +1);
  return buf;
}

ExperimentResult finish(const ExperimentConfig& cfg, std::vector<double> samples, const std::string& kind) {
  ExperimentResult out;
  out.table = moment_table(samples, cfg.r_list, cfg.seed, cfg.resamples);
  out.table.provenance = provenance(cfg, kind);
  out.samples = std::move(samples);
  return out;
}

}  // namespace

InitialShape parse_shape(const std::string& text) {
  if (text == "packets") return InitialShape::packets;
  if (text == "mode") return InitialShape::mode;
  if (text == "zero") return InitialShape::zero;
  throw std::invalid_argument("unknown initial shape: " + text);
}

std::string to_string(InitialShape s) {
  switch (s) {
    case InitialShape::packets: return "packets";
    case InitialShape::mode: return "mode";
    case InitialShape::zero: return "zero";
  }
  return "?";
}

namespace {

Field plane_wave(const Grid& g, const std::array<int, 3>& mode) {
  const double step = g.frequency_step();
  Vec3 xi{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    xi[a] = mode[a];
    const double j = mode[a] / step;
    if (std::abs(j - std::round(j)) > 1e-9 || std::abs(j) >= g.n() / 2)
      throw std::invalid_argument("mode frequency is not on the lattice (use L = 2*pi*m)");
  }
  const double norm = 1.0 / std::sqrt(g.volume());
  return Field::from_function(g, [&](const Vec3& x) {
    return std::polar(norm, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]);
  });
}

std::vector<Field> packets(const Grid& g, const InitialData& spec, std::uint64_t seed, int count) {
  std::mt19937_64 rng(derive_stream(seed, 0xda7a));
  const double spread = spec.spread > 0.0 ? spec.spread : g.length() / 10.0;
  std::uniform_real_distribution<double> centre(-spread, spread);
  std::uniform_real_distribution<double> momentum(-spec.momentum, spec.momentum);
  std::vector<Field> out;
  for (int k = 0; k < count; ++k) {
    Vec3 c{0, 0, 0}, xi{0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) c[a] = centre(rng);
    for (int a = 0; a < g.dim(); ++a) xi[a] = momentum(rng);
    auto f = Field::from_function(g, [&](const Vec3& x) {
      double r2 = 0.0, phase = 0.0;
      for (int a = 0; a < 3; ++a) {
        r2 += (x[a] - c[a]) * (x[a] - c[a]);
        phase += xi[a] * x[a];
      }
      return std::polar(std::exp(-r2 / (2 * spec.width * spec.width)), phase);
    });
    const double nrm = l2_norm(f);
    for (auto& v : f.values) v /= nrm;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

LowRankOperator make_initial_operator(const Grid& g, const InitialData& spec, std::uint64_t seed) {
  switch (spec.shape) {
    case InitialShape::zero: return LowRankOperator(g);
    case InitialShape::mode: {
      const auto e = plane_wave(g, spec.mode);
      return LowRankOperator::rank_one(1.0, e, e);
    }
    case InitialShape::packets: {
      LowRankOperator a(g);
      const auto fs = packets(g, spec, seed, spec.rank);
      for (int k = 0; k < spec.rank; ++k)
        a = add(a, LowRankOperator::rank_one(1.0 / (k + 1), fs[static_cast<std::size_t>(k)], fs[static_cast<std::size_t>(k)]));
      return a;
    }
  }
  return LowRankOperator(g);
}

Field make_initial_function(const Grid& g, const InitialData& spec, std::uint64_t seed) {
  switch (spec.shape) {
    case InitialShape::zero: return Field(g);
    case InitialShape::mode: return plane_wave(g, spec.mode);
    case InitialShape::packets: return packets(g, spec, seed, 1).front();
  }
  return Field(g);
}

std::uint64_t coefficient_stream(std::size_t draw) { return 2 * static_cast<std::uint64_t>(draw); }
std::uint64_t wiener_stream(std::size_t draw) { return 2 * static_cast<std::uint64_t>(draw) + 1; }

double gaussian_abs_moment(double r, double variance) {
  // E|g|^r = variance^{r/2} 2^{r/2} Gamma((r+1)/2) / sqrt(pi)
  const double log_m = 0.5 * r * std::log(2.0 * variance) + std::lgamma(0.5 * (r + 1)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(log_m / r);
}

ExperimentResult run_singular(const ExperimentConfig& cfg) {
  validate_common(cfg);
  const auto ex = singular_regime_exponents(cfg.p, cfg.q, cfg.sigma, cfg.d);
  const Grid g = make_grid(cfg.d, cfg.n, cfg.L);
  const double sigma = to_double(cfg.sigma);
  const double p = to_double(cfg.p);
  const double q = to_double(cfg.q);
  const auto gamma0 = make_initial_operator(g, cfg.initial, cfg.seed);
  const auto times = uniform_times(0.0, cfg.T, cfg.steps);
  const double dt = times[1] - times[0];

  const auto b = weighted_svd(gamma0, sigma);
  const Index rank = b.rank();
  const MatrixXcd left = factor_spectra(g, b.left, sigma);
  const MatrixXcd right = factor_spectra(g, b.right, sigma);
  const auto up = FourierMultiplier::bessel(g, sigma);
  // frames[k] column n: <grad>^sigma (U(t_k) u_n conj(U(t_k) v_n)); the draw enters linearly.
  std::vector<MatrixXcd> frames(times.size(), MatrixXcd(static_cast<Index>(g.size()), rank));
  parallel_for(times.size(), cfg.workers, [&](std::size_t k) {
    const auto prop = FourierMultiplier::free_propagator(g, times[k]).symbol;
    for (Index n = 0; n < rank; ++n) {
      const auto u = synthesize(g, left.col(n).data(), prop);
      const auto v = synthesize(g, right.col(n).data(), prop);
      Field prod(g);
      for (std::size_t i = 0; i < g.size(); ++i) prod[i] = u[i] * std::conj(v[i]);
      if (sigma != 0.0) prod = apply_multiplier(up, prod);
      frames[k].col(n) = as_vector(prod);
    }
  });

  std::vector<double> samples(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t m) {
    const auto gdraw = sample_coefficients(cfg.family_g, static_cast<std::size_t>(rank), coefficient_stream(m));
    VectorXcd c(rank);
    for (Index n = 0; n < rank; ++n) c(n) = b.coeffs(n) * gdraw[static_cast<std::size_t>(n)];
    std::vector<double> per_frame(times.size());
    Field frame(g);
    for (std::size_t k = 0; k < times.size(); ++k) {
      Eigen::Map<VectorXcd>(frame.values.data(), static_cast<Index>(g.size())) = frames[k] * c;
      per_frame[k] = lebesgue_norm(frame, q);
    }
    samples[m] = time_norm(per_frame, dt, p);
  });

  auto out = finish(cfg, std::move(samples), "singular");
  out.alpha = to_double(ex.alpha);
  out.data_norm = sobolev_schatten_norm(gamma0, sigma, out.alpha).value;
  out.wrap_ratio = wrap_ratio_of(g, density_trajectory(gamma0, times).frames);
  return out;
}

double singular_sample_reference(const ExperimentConfig& cfg, std::size_t draw) {
  const Grid g = make_grid(cfg.d, cfg.n, cfg.L);
  const double sigma = to_double(cfg.sigma);
  const auto gamma0 = make_initial_operator(g, cfg.initial, cfg.seed);
  const auto rnd = sobolev_conjugated_randomize(gamma0, sigma, RandomizationKind::singular, cfg.family_g,
                                                cfg.family_l, nullptr, coefficient_stream(draw), wiener_stream(draw));
  auto tr = density_trajectory(rnd, uniform_times(0.0, cfg.T, cfg.steps));
  if (sigma != 0.0)
    for (auto& f : tr.frames) f = apply_multiplier(FourierMultiplier::bessel(g, sigma), f);
  return mixed_norm(tr, to_double(cfg.p), to_double(cfg.q));
}

ExperimentResult run_full(const ExperimentConfig& cfg) {
  validate_common(cfg);
  check_full_randomization_exponents(cfg.p, cfg.q, cfg.q_hat, cfg.d);
  const Grid g = make_grid(cfg.d, cfg.n, cfg.L);
  const PartitionOfUnity pou(g);
  const double sigma = to_double(cfg.sigma);
  const double p = to_double(cfg.p);
  const double q_hat = to_double(cfg.q_hat);
  const auto gamma0 = make_initial_operator(g, cfg.initial, cfg.seed);
  const auto times = uniform_times(0.0, cfg.T, cfg.steps);
  const double dt = times[1] - times[0];

  const auto b = weighted_svd(gamma0, sigma);
  const Index rank = b.rank();
  const MatrixXcd left = factor_spectra(g, b.left, sigma);
  const MatrixXcd right = factor_spectra(g, b.right, sigma);
  const auto up = FourierMultiplier::bessel(g, sigma);
  std::vector<std::vector<cplx>> props;
  for (double t : times) props.push_back(FourierMultiplier::free_propagator(g, t).symbol);

  std::vector<double> samples(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t m) {
    const auto gdraw = sample_coefficients(cfg.family_g, static_cast<std::size_t>(rank), coefficient_stream(m));
    const auto r = wiener_multiplier(cfg.family_l, pou, wiener_stream(m)).symbol;
    std::vector<double> per_frame(times.size());
    std::vector<cplx> mult(g.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < g.size(); ++i) mult[i] = r[i] * props[k][i];
      Field frame(g);
      for (Index n = 0; n < rank; ++n) {
        const cplx c = b.coeffs(n) * gdraw[static_cast<std::size_t>(n)];
        const auto u = synthesize(g, left.col(n).data(), mult);
        const auto v = synthesize(g, right.col(n).data(), mult);
        for (std::size_t i = 0; i < g.size(); ++i) frame[i] += c * u[i] * std::conj(v[i]);
      }
      if (sigma != 0.0) frame = apply_multiplier(up, frame);
      per_frame[k] = lebesgue_norm(frame, q_hat);
    }
    samples[m] = time_norm(per_frame, dt, p);
  });

  auto out = finish(cfg, std::move(samples), "full");
  out.alpha = 2.0;
  out.data_norm = sobolev_schatten_norm(gamma0, sigma, 2.0).value;
  out.wrap_ratio = wrap_ratio_of(g, density_trajectory(gamma0, times).frames);
  return out;
}

double full_sample_reference(const ExperimentConfig& cfg, std::size_t draw) {
  const Grid g = make_grid(cfg.d, cfg.n, cfg.L);
  const PartitionOfUnity pou(g);
  const double sigma = to_double(cfg.sigma);
  const auto gamma0 = make_initial_operator(g, cfg.initial, cfg.seed);
  const auto rnd = sobolev_conjugated_randomize(gamma0, sigma, RandomizationKind::full, cfg.family_g, cfg.family_l,
                                                &pou, coefficient_stream(draw), wiener_stream(draw));
  auto tr = density_trajectory(rnd, uniform_times(0.0, cfg.T, cfg.steps));
  if (sigma != 0.0)
    for (auto& f : tr.frames) f = apply_multiplier(FourierMultiplier::bessel(g, sigma), f);
  return mixed_norm(tr, to_double(cfg.p), to_double(cfg.q_hat));
}

ExperimentResult run_function(const ExperimentConfig& cfg) {
  validate_common(cfg);
  check_function_randomization_exponents(cfg.p, cfg.q, cfg.q_hat, cfg.d);
  const Grid g = make_grid(cfg.d, cfg.n, cfg.L);
  const PartitionOfUnity pou(g);
  const double p = to_double(cfg.p);
  const double q_hat = to_double(cfg.q_hat);
  const auto f = make_initial_function(g, cfg.initial, cfg.seed);
  const auto times = uniform_times(0.0, cfg.T, cfg.steps);
  const double dt = times[1] - times[0];
  std::vector<cplx> spectrum = f.values;
  fft::transform(g, spectrum, -1);
  std::vector<std::vector<cplx>> props;
  for (double t : times) props.push_back(FourierMultiplier::free_propagator(g, t).symbol);

  std::vector<double> samples(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t m) {
    const auto r = wiener_multiplier(cfg.family_l, pou, wiener_stream(m)).symbol;
    std::vector<double> per_frame(times.size());
    std::vector<cplx> mult(g.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < g.size(); ++i) mult[i] = r[i] * props[k][i];
      per_frame[k] = lebesgue_norm(Field(g, synthesize(g, spectrum.data(), mult)), q_hat);
    }
    samples[m] = time_norm(per_frame, dt, p);
  });

  auto out = finish(cfg, std::move(samples), "function");
  out.alpha = 2.0;
  out.data_norm = l2_norm(f);
  std::vector<Field> frames;
  for (double t : times) {
    const auto ut = free_propagate(f, t);
    Field rho(g);
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] = std::norm(ut[i]);
    frames.push_back(std::move(rho));
  }
  out.wrap_ratio = wrap_ratio_of(g, frames);
  return out;
}

double key_estimate_lhs(const std::vector<Field>& v, const LowRankOperator& q0, double T, double alpha) {
  if (v.size() < 2) throw std::invalid_argument("key estimate: need at least two time nodes");
  const auto times = uniform_times(0.0, T, v.size() - 1);
  const auto w = trapezoid_weights(times.size(), times[1] - times[0]);
  // U(-tau) V(tau) Q(tau) U(tau) = U(-tau) V U(tau) Q_0 with Q(tau) = U(tau) Q_0 U(tau)^*: only the
  // left factors depend on tau, so the quadrature sum stays at the rank of Q_0.
  MatrixXcd left = MatrixXcd::Zero(q0.left.rows(), q0.rank());
  for (std::size_t k = 0; k < times.size(); ++k)
    for (Index n = 0; n < q0.rank(); ++n) {
      const auto moved = free_propagate(pointwise(v[k], free_propagate(q0.left_field(n), times[k])), -times[k]);
      left.col(n) += w[k] * as_vector(moved);
    }
  return schatten_norm(LowRankOperator(q0.grid, q0.coeffs, left, q0.right), alpha).value;
}

KeyEstimateResult key_estimate_probe(const KeyEstimateConfig& cfg) {
  check_key_estimate_exponents(cfg.mu, cfg.alpha, cfg.d);
  if (cfg.instances == 0 || cfg.steps < 2) throw std::invalid_argument("key estimate: instances >= 1 and steps >= 2");
  const Grid g = make_grid(cfg.d, cfg.n, cfg.L);
  const double mu = to_double(cfg.mu);
  const Rational inv_nu = (2 - 2 / cfg.mu) / cfg.d;
  const double nu = inv_nu == Rational(0) ? kInfinity : 1.0 / to_double(inv_nu);
  KeyEstimateResult out;
  out.nu = nu;
  out.ratios.resize(cfg.instances);
  out.ratios_refined.resize(cfg.instances);
  const auto smooth = FourierMultiplier::from_function(g, [](const Vec3& xi) {
    return cplx(std::exp(-0.5 * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])));
  });
  parallel_for(cfg.instances, cfg.workers, [&](std::size_t i) {
    std::mt19937_64 rng(derive_stream(cfg.seed, i));
    std::normal_distribution<double> nd;
    std::array<Field, 3> phi{Field(g), Field(g), Field(g)};
    for (auto& f : phi) {
      for (auto& v : f.values) v = nd(rng);
      f = apply_multiplier(smooth, f);
      for (auto& v : f.values) v = v.real();
    }
    InitialData data;
    data.rank = cfg.rank;
    const auto q0 = make_initial_operator(g, data, rng());
    const double q_norm = schatten_norm(q0, cfg.alpha).value;
    const auto ratio = [&](std::size_t steps) {
      const auto times = uniform_times(0.0, cfg.T, steps);
      std::vector<Field> v;
      std::vector<double> vn;
      for (double t : times) {
        v.push_back(phi[0] + t * phi[1] + (t * t) * phi[2]);
        vn.push_back(lebesgue_norm(v.back(), nu));
      }
      const double rhs = time_norm(vn, times[1] - times[0], mu) * q_norm;
      return key_estimate_lhs(v, q0, cfg.T, cfg.alpha) / rhs;
    };
    out.ratios[i] = ratio(cfg.steps);
    out.ratios_refined[i] = ratio(2 * cfg.steps);
  });
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    out.max_ratio = std::max(out.max_ratio, out.ratios[i]);
    out.max_ratio_refined = std::max(out.max_ratio_refined, out.ratios_refined[i]);
  }
  return out;
}

}  // namespace schatten::lab
