#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "schatten/grid.hpp"
#include "schatten/linop.hpp"

namespace schatten {

enum class FamilyKind { gaussian, rademacher, uniform, constant };

/// Mean-zero real coefficient law with a recorded sub-Gaussian constant.
/// `constant` is the degenerate device (every draw equals `parameter`) used by tests.
struct SubgaussianFamily {
  FamilyKind kind = FamilyKind::gaussian;
  double parameter = 1.0;  // variance, unused, half-width, or the constant value
  std::uint64_t seed = 0;

  static SubgaussianFamily gaussian(double variance, std::uint64_t seed);
  static SubgaussianFamily rademacher(std::uint64_t seed);
  static SubgaussianFamily uniform(double half_width, std::uint64_t seed);
  static SubgaussianFamily constant(double value, std::uint64_t seed = 0);
  /// Parses "gaussian", "gaussian(2)", "rademacher", "uniform(0.5)", "constant(1)".
  static SubgaussianFamily parse(const std::string& text, std::uint64_t seed);

  /// C in E exp(zeta X) <= exp(C zeta^2); zero for the degenerate family.
  double mgf_constant() const;
  std::string describe() const;
};

/// Independent 64-bit seed for stream `b` of master seed `a`.
std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b);

/// `count` draws from stream `stream`; bit-identical for equal (seed, stream).
std::vector<double> sample_coefficients(const SubgaussianFamily& family, std::size_t count,
                                        std::uint64_t stream);

/// Hat-profile partition chi_k(xi) = prod_i max(0, 1 - |xi_i - k_i|) over integer cells k.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(const Grid& g);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t cell_count() const noexcept { return count_; }
  std::array<int, 3> cell(std::size_t index) const;
  /// Index of the cell with offset k, or cell_count() when k carries no lattice weight.
  std::size_t cell_index(const std::array<int, 3>& k) const;

  static double profile(double x) noexcept;
  double weight(std::size_t cell_index, std::size_t frequency) const;
  FourierMultiplier cell_multiplier(std::size_t cell_index) const;
  /// sum_k l_k chi_k(xi).
  FourierMultiplier combine(const std::vector<double>& cell_coefficients) const;

 private:
  Grid grid_;
  std::array<int, 3> lo_{};
  std::array<int, 3> extent_{1, 1, 1};
  std::size_t count_ = 1;
};

Field unit_projection(const Field& u, const std::array<int, 3>& k, const PartitionOfUnity& pou);

/// R(xi) = sum_k l_k chi_k(xi) with l drawn from `family` on `stream`.
FourierMultiplier wiener_multiplier(const SubgaussianFamily& family, const PartitionOfUnity& pou,
                                    std::uint64_t stream);
Field wiener_randomize(const Field& u, const SubgaussianFamily& family, const PartitionOfUnity& pou,
                       std::uint64_t stream);

/// True when coefficients are real non-negative and both families orthonormal to `tol`.
bool is_singular_value_form(const LowRankOperator& a, double tol = 1e-8);

/// sum a_n g_n |u_n><v_n| on the singular value decomposition of A.
LowRankOperator singular_value_randomize(const LowRankOperator& a, const SubgaussianFamily& family,
                                         std::uint64_t stream);

/// R (sum a_n g_n |u_n><v_n|) R with one Wiener multiplier R on both sides.
LowRankOperator full_randomize(const LowRankOperator& a, const SubgaussianFamily& family_g,
                               const SubgaussianFamily& family_l, const PartitionOfUnity& pou,
                               std::uint64_t stream_g, std::uint64_t stream_l);

enum class RandomizationKind { singular, full };

/// <grad>^{-sigma} (<grad>^sigma A <grad>^sigma)^omega <grad>^{-sigma}.
/// `family_l` and `pou` are only read for the full kind; `pou` may be null otherwise.
LowRankOperator sobolev_conjugated_randomize(const LowRankOperator& a, double sigma, RandomizationKind kind,
                                             const SubgaussianFamily& family_g,
                                             const SubgaussianFamily& family_l,
                                             const PartitionOfUnity* pou, std::uint64_t stream_g,
                                             std::uint64_t stream_l);

}  // namespace schatten
