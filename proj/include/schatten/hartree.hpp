#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schatten/errors.hpp"
#include "schatten/linop.hpp"
#include "schatten/norms.hpp"
#include "schatten/randomize.hpp"

namespace schatten::hartree {

/// Momentum distribution f(xi) of gamma_f = f(-i grad) and the interaction symbol w_hat.
struct Background {
  FourierMultiplier f;
  FourierMultiplier w_hat;
  std::string f_name;
  std::string w_name;
};

/// f kinds: "fermi-sea" (amplitude * 1_{|xi|^2 <= 1}), "gaussian" (amplitude * exp(-|xi|^2 / width^2)), "zero".
/// w kinds: "delta" (w_hat = strength), "gaussian" (strength * exp(-|xi|^2 / 2)), "zero".
Background make_background(const Grid& g, const std::string& f_kind, double f_amplitude,
                           const std::string& w_kind, double w_strength, double f_width = 1.0);
/// f real and bounded, w_hat bounded with w_hat(-xi) = conj w_hat(xi); throws otherwise.
void validate_background(const Background& bg);
/// rho_{gamma_f}: the constant L^{-d} sum f.
double background_density(const Background& bg);

struct StationarityReport {
  double residual = 0.0;  // max over probe modes of ||[-Lap + w*rho_f, gamma_f] e|| / ||e||
  double scale = 0.0;     // max|f| (max|xi|^2 + |V_0|)
  std::size_t probes = 0;
};
StationarityReport stationarity_residual(const Background& bg, std::size_t max_probes = 256);

/// [-Lap, Q] for a dense kernel.
DenseOperator laplacian_commutator(const DenseOperator& q);

/// D_V[A](t_k) = -i int_0^{t_k} U(t_k - tau) [V(tau), A(tau)] U(t_k - tau)^* dtau for every node,
/// trapezoidal in tau. `a` holds one operator per node, or a single time-independent operator.
std::vector<DenseOperator> duhamel_series(const std::vector<Field>& v, const std::vector<DenseOperator>& a, double dt);
/// Low-rank variant; [V, Q] doubles the rank per node and the running sum is recompressed at
/// `tol` whenever its rank exceeds `rank_cap` (0 means 4x the rank of a[0]).
std::vector<LowRankOperator> duhamel_series(const std::vector<Field>& v, const std::vector<LowRankOperator>& a,
                                            double dt, Eigen::Index rank_cap = 0, double tol = 1e-9);

enum class Scheme { d1, d2, d3 };
Scheme default_scheme(int d);
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& text);
/// Norm of the auxiliary unknown: d1 L^4_t L^2_x of rho, d2 L^2_t L^2_x of rho,
/// d3 L^2_t (L^2 + L^inf)_x of w * rho.
double aux_norm(Scheme s, const std::vector<Field>& aux, double dt);

struct PicardOptions {
  double T = 0.1;
  double dt = 1e-3;
  double tol = 1e-10;
  int max_iterations = 100;
  int max_halvings = 8;
  double contraction_limit = 0.9;
  Scheme scheme = Scheme::d1;
};

struct HartreeRun {
  Grid grid;
  std::vector<double> times;
  std::vector<DenseOperator> q;
  std::vector<Field> rho;
  std::vector<Field> v;
  double T = 0.0;
  double dt = 0.0;
  std::vector<double> deltas;  // per-iteration deltas of the accepted attempt
  double R = 0.0;              // radius of the contraction ball
  int halvings = 0;
  int iterations = 0;
  std::string status;

  explicit HartreeRun(const Grid& g) : grid(g) {}
};

constexpr std::size_t kDenseLimit = 2048;
void require_dense_size(const Grid& g);

/// w * rho on the torus.
Field potential_from_density(const Background& bg, const Field& rho);

/// Fixed-point iteration of Q = U(t)_* Q0 + D_V[Q] + D_V[gamma_f], V = w * rho_Q.
HartreeRun picard_solve(const DenseOperator& q0, const Background& bg, const PicardOptions& opt);
/// Classical RK4 for i dQ/dt = [-Lap + V, Q] + [V, gamma_f], V = w * rho_Q.
HartreeRun dense_rk4_oracle(const DenseOperator& q0, const Background& bg, double T, double dt);

/// Largest ratio of consecutive deltas above the noise floor (0 if fewer than two).
double contraction_factor(const std::vector<double>& deltas, double noise_floor);

// ---- linear response L_1 -------------------------------------------------------------

/// L_1[g](t) = rho(i int_0^t U(t - tau) [w * g(tau), gamma_f] U(t - tau)^* dtau), dense quadrature.
std::vector<Field> l1_apply_direct(const std::vector<Field>& g, const Background& bg, double dt);
/// c0 w_hat(xi) int_0^t sin((t - tau)|xi|^2) f_check(2 (t - tau) xi) g_hat(tau, xi) dtau.
std::vector<Field> l1_apply_fourier(const std::vector<Field>& g, const Background& bg, double dt, double c0);

/// f_check(2 m dt xi) = L^{-d} sum_p f(p) exp(2 i m dt p.xi) for m = 0..steps, indexed [m][xi].
std::vector<std::vector<cplx>> l1_fourier_table(const Background& bg, double dt, std::size_t steps);

struct Calibration {
  double c0 = 0.0;
  double imag = 0.0;      // imaginary part of the complex least-squares fit
  double residual = 0.0;  // relative residual after the fit
  std::size_t probes = 0;
};
/// Real band-limited random density trajectories (|xi_i| <= band * max|xi_i|).
std::vector<std::vector<Field>> l1_probe_ensemble(const Grid& g, std::size_t probes, std::size_t steps,
                                                  std::uint64_t seed, double band = 0.25);
/// Least-squares fit of the Fourier path to the direct path; throws NumericFailure when the residual
/// exceeds `max_residual` or the fit is not real.
Calibration calibrate_l1_constant(const Background& bg, double dt, std::size_t steps, std::size_t probes,
                                  std::uint64_t seed, double max_residual = 1e-6);

// ---- linearized solver and scattering -------------------------------------------------

enum class L1Path { direct, fourier };

struct LinearizedOptions {
  double T = 1.0;
  double dt = 0.01;
  L1Path path = L1Path::direct;
  double c0 = 2.0;                 // Fourier path constant
  bool reconstruct = true;         // build dense Q(t) (small grids only)
  double divergence_limit = 1e6;   // growth factor of ||rho|| over ||source|| that aborts
};

struct LinearizedRun {
  HartreeRun run;
  std::vector<Field> source;
  double residual = 0.0;  // ||(1 + L_1) rho - source||_{L^2_t L^2_x} / ||source||
  double growth = 0.0;    // max_t ||rho(t)|| / max_t ||source(t)||

  explicit LinearizedRun(const Grid& g) : run(g) {}
};

/// Solves (1 + L_1) rho = rho(U(t)_* Q0) by causal marching, then Q = U(t)_* Q0 + D_V[gamma_f].
LinearizedRun linearized_solve(const LowRankOperator& q0, const Background& bg, const LinearizedOptions& opt);

/// ||(1 + L_1) rho - source||_{L^2_t L^2_x} / ||source||_{L^2_t L^2_x}.
double linearized_residual(const std::vector<Field>& rho, const std::vector<Field>& source,
                           const Background& bg, double dt, L1Path path, double c0);

struct LadderPoint {
  double t_from = 0.0;
  double t_to = 0.0;
  double distance = 0.0;  // ||W(t_to) - W(t_from)||_{S^alpha}
};

struct ScatteringReport {
  double alpha = 4.0;
  std::vector<LadderPoint> ladder;
  bool cauchy_consistent = false;  // successive distances shrink by a factor <= decay_limit
  double worst_ratio = 0.0;
  std::string verdict;
};

/// Distances of W(t) = U(-t) Q(t) U(t) between consecutive ladder times from the densities of a
/// linearized run, evaluated in the momentum basis (no dense N x N kernels).
ScatteringReport scattering_diagnostic(const std::vector<Field>& rho, const Background& bg, double dt,
                                       const std::vector<double>& ladder_times, double alpha = 0.0,
                                       double decay_limit = 0.9, double support_threshold = 1e-14);
/// Same distances from dense reconstructed Q(t) (small grids; oracle for the momentum route).
ScatteringReport scattering_diagnostic_dense(const HartreeRun& run, const std::vector<double>& ladder_times,
                                             double alpha = 0.0, double decay_limit = 0.9);

// ---- randomized local well-posedness pipeline ----------------------------------------

struct PipelineOptions {
  RandomizationKind kind = RandomizationKind::singular;
  SubgaussianFamily family_g = SubgaussianFamily::gaussian(1.0, 1);
  SubgaussianFamily family_l = SubgaussianFamily::gaussian(1.0, 1);
  double epsilon = 0.1;  // sigma of the Sobolev-conjugated randomization (d >= 2)
  std::uint64_t draw = 0;
  PicardOptions picard;
};

struct PipelineResult {
  HartreeRun run;
  double data_norm = 0.0;  // trajectory norm required by the local theory for this dimension
  std::string data_norm_name;
  std::vector<DrawRecord> draws;

  explicit PipelineResult(const Grid& g) : run(g) {}
};

/// Randomize Q0, evaluate the data norm of the free evolution, then run Picard with the matching scheme.
PipelineResult randomized_lwp_pipeline(const LowRankOperator& q0, const Background& bg, const PipelineOptions& opt);

}  // namespace schatten::hartree
