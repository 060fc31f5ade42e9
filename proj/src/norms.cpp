#include "schatten/norms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "schatten/randomize.hpp"

namespace schatten {

Trajectory::Trajectory(const Grid& g, std::vector<double> t, std::vector<Field> f)
    : grid(g), times(std::move(t)), frames(std::move(f)) {
  if (times.size() != frames.size()) throw std::invalid_argument("trajectory: one frame per time required");
  if (times.size() < 3) throw std::invalid_argument("trajectory: at least 3 frames required");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory: times must increase");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs((times[k] - times[k - 1]) - dt) > 1e-9 * dt)
      throw std::invalid_argument("trajectory: time step must be uniform");
  for (const auto& fr : frames) require_same_grid(fr.grid, grid, "trajectory");
}

std::vector<double> uniform_times(double t0, double t1, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("uniform_times: need at least one step");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(steps);
  return t;
}

std::vector<double> trapezoid_weights(std::size_t count, double dt) {
  std::vector<double> w(count, dt);
  if (count == 0) return w;
  if (count == 1) {
    w[0] = 0.0;
    return w;
  }
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double lebesgue_norm(const Field& u, double q) {
  if (std::isnan(q) || q < 1.0) throw std::invalid_argument("lebesgue_norm: exponent must be >= 1");
  double top = 0.0;
  for (const auto& v : u.values) top = std::max(top, std::abs(v));
  if (std::isinf(q) || top == 0.0) return top;
  std::vector<double> terms(u.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(std::abs(u.values[i]) / top, q);
  return top * std::pow(pairwise_sum(terms) * u.grid.cell_volume(), 1.0 / q);
}

double time_norm(std::span<const double> values, double dt, double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("time_norm: exponent must be >= 1");
  if (values.size() < 3) throw std::invalid_argument("time_norm: at least 3 frames required");
  double top = 0.0;
  for (double v : values) top = std::max(top, std::abs(v));
  if (std::isinf(p) || top == 0.0) return top;
  const auto w = trapezoid_weights(values.size(), dt);
  std::vector<double> terms(values.size());
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = w[k] * std::pow(std::abs(values[k]) / top, p);
  return top * std::pow(pairwise_sum(terms), 1.0 / p);
}

double mixed_norm(const Trajectory& tr, double p, double q) {
  std::vector<double> per_frame(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) per_frame[k] = lebesgue_norm(tr.frames[k], q);
  return time_norm(per_frame, tr.step(), p);
}

Trajectory density_trajectory(const LowRankOperator& a, const std::vector<double>& times) {
  std::vector<Field> frames;
  frames.reserve(times.size());
  for (double t : times) frames.push_back(density(conjugate_free(a, t)));
  return Trajectory(a.grid, times, std::move(frames));
}

Trajectory density_trajectory(const DenseOperator& a, const std::vector<double>& times) {
  std::vector<Field> frames;
  frames.reserve(times.size());
  for (double t : times) frames.push_back(density(conjugate_free(a, t)));
  return Trajectory(a.grid, times, std::move(frames));
}

double moment_value(std::span<const double> samples, double r) {
  if (samples.empty()) throw std::invalid_argument("empirical moment: no samples");
  if (std::isnan(r) || r < 1.0 || std::isinf(r)) throw std::invalid_argument("empirical moment: r must lie in [1, inf)");
  double top = 0.0;
  for (double x : samples) {
    if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("empirical moment: samples must be non-negative");
    top = std::max(top, x);
  }
  if (top == 0.0) return 0.0;
  std::vector<double> terms(samples.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(samples[i] / top, r);
  return top * std::pow(pairwise_sum(terms) / static_cast<double>(samples.size()), 1.0 / r);
}

namespace {

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = pairwise_sum(v) / static_cast<double>(v.size());
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

std::vector<double> resample(std::span<const double> samples, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  std::vector<double> out(samples.size());
  for (auto& x : out) x = samples[pick(rng)];
  return out;
}

}  // namespace

MomentEstimate empirical_moment(std::span<const double> samples, double r, std::uint64_t seed, std::size_t resamples) {
  MomentEstimate out;
  out.value = moment_value(samples, r);
  std::mt19937_64 rng(derive_stream(seed, 0));
  std::vector<double> boot(resamples);
  for (auto& b : boot) b = moment_value(resample(samples, rng), r);
  out.std_error = sample_std(boot);
  return out;
}

std::pair<double, double> log_log_fit(std::span<const double> r, std::span<const double> values) {
  if (r.size() != values.size() || r.size() < 2) throw std::invalid_argument("slope fit: need >= 2 matched points");
  for (double v : values)
    if (!(v > 0.0)) return {0.0, 0.0};  // degenerate (zero) moments carry no growth
  const double n = static_cast<double>(r.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    sx += std::log(r[i]);
    sy += std::log(values[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double dx = std::log(r[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

MomentTable moment_table(std::span<const double> samples, const std::vector<double>& r_list, std::uint64_t seed,
                         std::size_t resamples) {
  if (r_list.size() < 2) throw std::invalid_argument("moment table: need at least two moment orders");
  MomentTable table;
  table.samples = samples.size();
  table.seed = seed;
  std::vector<double> values(r_list.size());
  for (std::size_t i = 0; i < r_list.size(); ++i) values[i] = moment_value(samples, r_list[i]);
  std::tie(table.fit.slope, table.fit.intercept) = log_log_fit(r_list, values);

  std::mt19937_64 rng(derive_stream(seed, 0));
  std::vector<std::vector<double>> boot(r_list.size(), std::vector<double>(resamples));
  std::vector<double> slopes(resamples);
  std::vector<double> bv(r_list.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    const auto rs = resample(samples, rng);
    for (std::size_t i = 0; i < r_list.size(); ++i) boot[i][b] = bv[i] = moment_value(rs, r_list[i]);
    slopes[b] = log_log_fit(r_list, bv).first;
  }
  for (std::size_t i = 0; i < r_list.size(); ++i) table.rows.push_back({r_list[i], values[i], sample_std(boot[i])});
  std::sort(slopes.begin(), slopes.end());
  if (resamples > 0) {
    const double last = static_cast<double>(resamples - 1);
    table.fit.ci_low = slopes[static_cast<std::size_t>(std::floor(0.025 * last))];
    table.fit.ci_high = slopes[static_cast<std::size_t>(std::ceil(0.975 * last))];
  } else {
    table.fit.ci_low = table.fit.ci_high = table.fit.slope;
  }
  return table;
}

bool moments_monotone(const MomentTable& table) {
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[j];
      if (a.r < b.r && a.value > b.value + 2 * b.std_error) return false;
    }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const MomentTable& table) {
  std::ostringstream os;
  os << "r,value,stderr,M,seed";
  for (const auto& [k, v] : table.provenance) os << ',' << k;
  os << '\n';
  for (const auto& row : table.rows) {
    os << format_double(row.r) << ',' << format_double(row.value) << ',' << format_double(row.std_error) << ','
       << table.samples << ',' << table.seed;
    for (const auto& [k, v] : table.provenance) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace schatten
