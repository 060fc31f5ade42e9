#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "schatten/exponents.hpp"
#include "schatten/linop.hpp"
#include "schatten/norms.hpp"
#include "schatten/randomize.hpp"

namespace schatten::lab {

/// Initial data shapes for the Monte Carlo experiments.
enum class InitialShape {
  packets,  // random Gaussian wave packets with decaying weights
  mode,     // a single plane wave at an integer frequency (single-cell collapse)
  zero,
};
InitialShape parse_shape(const std::string& text);
std::string to_string(InitialShape s);

struct InitialData {
  InitialShape shape = InitialShape::packets;
  int rank = 4;
  double width = 1.0;          // packet width
  double momentum = 1.0;       // packet momenta drawn from [-momentum, momentum]^d
  double spread = 0.0;         // packet centres drawn from [-spread, spread]^d; 0 means L/10
  std::array<int, 3> mode{1, 0, 0};
};

/// Self-adjoint sum_n n^{-1} |phi_n><phi_n| for packets; |e_k><e_k| for a mode.
LowRankOperator make_initial_operator(const Grid& g, const InitialData& spec, std::uint64_t seed);
/// The first factor of make_initial_operator, used as the function-randomization datum.
Field make_initial_function(const Grid& g, const InitialData& spec, std::uint64_t seed);

struct ExperimentConfig {
  int d = 1;
  int n = 64;
  double L = 20.0;
  InitialData initial;
  Rational sigma{0};
  Rational p{4};
  Rational q{2};
  Rational q_hat{4};           // full and function experiments
  SubgaussianFamily family_g = SubgaussianFamily::gaussian(1.0, 1);
  SubgaussianFamily family_l = SubgaussianFamily::gaussian(1.0, 1);
  std::size_t samples = 1000;  // M
  std::vector<double> r_list{2, 4, 8, 16, 32, 64};
  double T = 1.0;
  std::size_t steps = 64;      // time steps over [0, T]
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::size_t resamples = 200;
};

struct ExperimentResult {
  MomentTable table;
  std::vector<double> samples;  // X per draw, in draw order
  /// Largest boundary-face density over the largest density across the reference trajectory.
  double wrap_ratio = 0.0;
  double alpha = 0.0;           // Schatten exponent of the data norm
  double data_norm = 0.0;       // ||gamma_0||_{H^{sigma, alpha}} (or ||f||_{L^2})
};

/// Stream ids of draw m.
std::uint64_t coefficient_stream(std::size_t draw);
std::uint64_t wiener_stream(std::size_t draw);

/// X = ||<grad>^sigma rho(U(t) gamma_0^{omega;sigma} U(t)^*)||_{L^p_t L^q_x} over M draws.
ExperimentResult run_singular(const ExperimentConfig& cfg);
/// X = ||<grad>^sigma rho(U(t) gamma_0^{omega,omega~;sigma} U(t)^*)||_{L^p_t L^{q_hat}_x}.
ExperimentResult run_full(const ExperimentConfig& cfg);
/// X = ||U(t) f^{omega~}||_{L^p_t L^{q_hat}_x}.
ExperimentResult run_function(const ExperimentConfig& cfg);

/// Reference value of X for one draw computed through the operator-level randomization
/// routines (slow path, used as an oracle for the harness).
double singular_sample_reference(const ExperimentConfig& cfg, std::size_t draw);
double full_sample_reference(const ExperimentConfig& cfg, std::size_t draw);

/// (E|g|^r)^{1/r} for a centred Gaussian of the given variance.
double gaussian_abs_moment(double r, double variance = 1.0);

struct KeyEstimateConfig {
  int d = 1;
  int n = 32;
  double L = 12.0;
  int rank = 3;
  double T = 0.5;
  std::size_t steps = 32;
  Rational mu{4, 3};
  double alpha = 2.0;
  std::size_t instances = 50;
  std::uint64_t seed = 7;
  std::size_t workers = 0;
};

struct KeyEstimateResult {
  std::vector<double> ratios;  // per instance, at `steps`
  std::vector<double> ratios_refined;  // per instance, at 2 * steps
  double max_ratio = 0.0;
  double max_ratio_refined = 0.0;
  double nu = 0.0;
};

/// Ratio ||int_0^T U(tau)^* V Q U(tau) dtau||_{S^alpha} / (||V||_{L^mu_t L^nu_x} sup ||Q||_{S^alpha})
/// with Q(tau) = U(tau) Q_0 U(tau)^*, at the configured step and at half of it.
KeyEstimateResult key_estimate_probe(const KeyEstimateConfig& cfg);
/// Left side of the key estimate for explicit data (V sampled at the uniform nodes).
double key_estimate_lhs(const std::vector<Field>& v, const LowRankOperator& q0, double T, double alpha);

}  // namespace schatten::lab
