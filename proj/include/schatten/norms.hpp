#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schatten/grid.hpp"
#include "schatten/linop.hpp"

namespace schatten {

/// Uniformly spaced density frames with trapezoidal time weights.
struct Trajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<Field> frames;

  Trajectory(const Grid& g, std::vector<double> t, std::vector<Field> f);

  std::size_t size() const noexcept { return times.size(); }
  double step() const noexcept { return times[1] - times[0]; }
  double span() const noexcept { return times.back() - times.front(); }
};

/// t_k = t0 + k (t1 - t0) / steps, k = 0..steps.
std::vector<double> uniform_times(double t0, double t1, std::size_t steps);
/// Trapezoidal weights for `count` nodes with spacing dt.
std::vector<double> trapezoid_weights(std::size_t count, double dt);

/// Order-independent (pairwise) sum.
double pairwise_sum(std::span<const double> values);

/// (h^d sum |u|^q)^{1/q}, max |u| for q = infinity.
double lebesgue_norm(const Field& u, double q);
/// Trapezoidal L^p over uniformly spaced nonnegative samples (max for p = infinity).
double time_norm(std::span<const double> values, double dt, double p);
double mixed_norm(const Trajectory& tr, double p, double q);

Trajectory density_trajectory(const LowRankOperator& a, const std::vector<double>& times);
Trajectory density_trajectory(const DenseOperator& a, const std::vector<double>& times);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// ((1/M) sum X^r)^{1/r}.
double moment_value(std::span<const double> samples, double r);
/// Moment with bootstrap standard error (resamples drawn from `seed`).
MomentEstimate empirical_moment(std::span<const double> samples, double r, std::uint64_t seed = 0x5eed,
                                std::size_t resamples = 200);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Least-squares slope of log value against log r.
std::pair<double, double> log_log_fit(std::span<const double> r, std::span<const double> values);

struct MomentRow {
  double r = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

struct MomentTable {
  std::vector<MomentRow> rows;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  SlopeFit fit;
  std::vector<std::pair<std::string, std::string>> provenance;  // extra CSV columns
};

/// Moments at every r, bootstrap errors, and the slope fit with a 95% bootstrap interval.
MomentTable moment_table(std::span<const double> samples, const std::vector<double>& r_list, std::uint64_t seed,
                         std::size_t resamples = 200);

/// value(r1) <= value(r2) + 2 stderr(r2) for all r1 < r2.
bool moments_monotone(const MomentTable& table);

/// Shortest round-trip decimal text.
std::string format_double(double v);
std::string to_csv(const MomentTable& table);

}  // namespace schatten
