#include "schatten/randomize.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace schatten {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SubgaussianFamily SubgaussianFamily::gaussian(double variance, std::uint64_t seed) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian family: variance must be positive");
  return {FamilyKind::gaussian, variance, seed};
}

SubgaussianFamily SubgaussianFamily::rademacher(std::uint64_t seed) { return {FamilyKind::rademacher, 1.0, seed}; }

SubgaussianFamily SubgaussianFamily::uniform(double half_width, std::uint64_t seed) {
  if (!(half_width > 0.0)) throw std::invalid_argument("uniform family: half-width must be positive");
  return {FamilyKind::uniform, half_width, seed};
}

SubgaussianFamily SubgaussianFamily::constant(double value, std::uint64_t seed) {
  return {FamilyKind::constant, value, seed};
}

SubgaussianFamily SubgaussianFamily::parse(const std::string& text, std::uint64_t seed) {
  static const std::regex re(R"(\s*([a-z]+)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw std::invalid_argument("unrecognized family: " + text);
  const std::string name = m[1];
  const bool has_arg = m[2].matched;
  const double arg = has_arg ? std::stod(m[2]) : 1.0;
  if (name == "gaussian") return gaussian(arg, seed);
  if (name == "rademacher") {
    if (has_arg) throw std::invalid_argument("rademacher family takes no parameter");
    return rademacher(seed);
  }
  if (name == "uniform") return uniform(arg, seed);
  if (name == "constant") return constant(arg, seed);
  throw std::invalid_argument("unrecognized family: " + text);
}

double SubgaussianFamily::mgf_constant() const {
  switch (kind) {
    case FamilyKind::gaussian: return parameter / 2.0;
    case FamilyKind::rademacher: return 0.5;
    case FamilyKind::uniform: return parameter * parameter / 2.0;
    case FamilyKind::constant: return 0.0;
  }
  return 0.0;
}

std::string SubgaussianFamily::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case FamilyKind::gaussian: os << "gaussian(" << parameter << ")"; break;
    case FamilyKind::rademacher: os << "rademacher"; break;
    case FamilyKind::uniform: os << "uniform(" << parameter << ")"; break;
    case FamilyKind::constant: os << "constant(" << parameter << ")"; break;
  }
  return os.str();
}

std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

std::vector<double> sample_coefficients(const SubgaussianFamily& family, std::size_t count, std::uint64_t stream) {
  std::vector<double> out(count);
  if (family.kind == FamilyKind::constant) {
    std::fill(out.begin(), out.end(), family.parameter);
    return out;
  }
  std::mt19937_64 rng(derive_stream(family.seed, stream));
  switch (family.kind) {
    case FamilyKind::gaussian: {
      std::normal_distribution<double> nd(0.0, std::sqrt(family.parameter));
      for (auto& v : out) v = nd(rng);
      break;
    }
    case FamilyKind::rademacher:
      for (auto& v : out) v = (rng() >> 63) ? 1.0 : -1.0;
      break;
    case FamilyKind::uniform: {
      std::uniform_real_distribution<double> ud(-family.parameter, family.parameter);
      for (auto& v : out) v = ud(rng);
      break;
    }
    case FamilyKind::constant: break;
  }
  return out;
}

PartitionOfUnity::PartitionOfUnity(const Grid& g) : grid_(g) {
  const double step = g.frequency_step();
  if (step > 1.0 + 1e-12)
    throw std::invalid_argument("partition of unity: L < 2*pi leaves unit cells unresolved");
  const int half = g.n() / 2;
  const int lo = static_cast<int>(std::floor(-half * step));
  const int hi = static_cast<int>(std::ceil((half - 1) * step));
  count_ = 1;
  for (int i = 0; i < 3; ++i) {
    lo_[i] = i < g.dim() ? lo : 0;
    extent_[i] = i < g.dim() ? hi - lo + 1 : 1;
    count_ *= static_cast<std::size_t>(extent_[i]);
  }
}

std::array<int, 3> PartitionOfUnity::cell(std::size_t index) const {
  std::array<int, 3> k{0, 0, 0};
  for (int i = 2; i >= 0; --i) {
    k[i] = lo_[i] + static_cast<int>(index % static_cast<std::size_t>(extent_[i]));
    index /= static_cast<std::size_t>(extent_[i]);
  }
  return k;
}

std::size_t PartitionOfUnity::cell_index(const std::array<int, 3>& k) const {
  std::size_t index = 0;
  for (int i = 0; i < 3; ++i) {
    const int off = k[i] - lo_[i];
    if (off < 0 || off >= extent_[i]) return count_;
    index = index * static_cast<std::size_t>(extent_[i]) + static_cast<std::size_t>(off);
  }
  return index;
}

double PartitionOfUnity::profile(double x) noexcept { return std::max(0.0, 1.0 - std::abs(x)); }

double PartitionOfUnity::weight(std::size_t ci, std::size_t frequency) const {
  const auto k = cell(ci);
  const auto xi = grid_.frequency(frequency);
  double w = 1.0;
  for (int i = 0; i < grid_.dim(); ++i) w *= profile(xi[i] - k[i]);
  return w;
}

FourierMultiplier PartitionOfUnity::cell_multiplier(std::size_t ci) const {
  if (ci >= count_) throw std::out_of_range("partition of unity: cell index out of range");
  std::vector<cplx> sym(grid_.size());
  for (std::size_t j = 0; j < sym.size(); ++j) sym[j] = weight(ci, j);
  return FourierMultiplier(grid_, std::move(sym));
}

FourierMultiplier PartitionOfUnity::combine(const std::vector<double>& coeffs) const {
  if (coeffs.size() != count_) throw std::invalid_argument("partition of unity: one coefficient per cell required");
  const int d = grid_.dim();
  std::vector<cplx> sym(grid_.size());
  for (std::size_t j = 0; j < sym.size(); ++j) {
    const auto xi = grid_.frequency(j);
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      base[i] = static_cast<int>(std::floor(xi[i]));
      frac[i] = xi[i] - base[i];
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      std::array<int, 3> k{0, 0, 0};
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        const int bit = (corner >> i) & 1;
        k[i] = base[i] + bit;
        w *= bit ? frac[i] : 1.0 - frac[i];
      }
      if (w == 0.0) continue;
      acc += w * coeffs[cell_index(k)];
    }
    sym[j] = acc;
  }
  return FourierMultiplier(grid_, std::move(sym));
}

Field unit_projection(const Field& u, const std::array<int, 3>& k, const PartitionOfUnity& pou) {
  require_same_grid(u.grid, pou.grid(), "unit_projection");
  const auto ci = pou.cell_index(k);
  if (ci >= pou.cell_count()) return Field(u.grid);
  return apply_multiplier(pou.cell_multiplier(ci), u);
}

FourierMultiplier wiener_multiplier(const SubgaussianFamily& family, const PartitionOfUnity& pou,
                                    std::uint64_t stream) {
  return pou.combine(sample_coefficients(family, pou.cell_count(), stream));
}

Field wiener_randomize(const Field& u, const SubgaussianFamily& family, const PartitionOfUnity& pou,
                       std::uint64_t stream) {
  require_same_grid(u.grid, pou.grid(), "wiener_randomize");
  return apply_multiplier(wiener_multiplier(family, pou, stream), u);
}

bool is_singular_value_form(const LowRankOperator& a, double tol) {
  if (a.rank() == 0) return true;
  for (Eigen::Index n = 0; n < a.rank(); ++n)
    if (a.coeffs(n).imag() != 0.0 || a.coeffs(n).real() < 0.0) return false;
  const double w = a.grid.cell_volume();
  const auto id = Eigen::MatrixXcd::Identity(a.rank(), a.rank());
  const double eu = ((a.left.adjoint() * a.left) * w - id).cwiseAbs().maxCoeff();
  const double ev = ((a.right.adjoint() * a.right) * w - id).cwiseAbs().maxCoeff();
  return eu <= tol && ev <= tol;
}

LowRankOperator singular_value_randomize(const LowRankOperator& a, const SubgaussianFamily& family,
                                         std::uint64_t stream) {
  LowRankOperator out = is_singular_value_form(a) ? a : svd_form(a);
  const auto g = sample_coefficients(family, static_cast<std::size_t>(out.rank()), stream);
  for (Eigen::Index n = 0; n < out.rank(); ++n) out.coeffs(n) *= g[static_cast<std::size_t>(n)];
  out.draws.push_back({"singular", family.describe(), family.seed, stream});
  return out;
}

LowRankOperator full_randomize(const LowRankOperator& a, const SubgaussianFamily& family_g,
                               const SubgaussianFamily& family_l, const PartitionOfUnity& pou,
                               std::uint64_t stream_g, std::uint64_t stream_l) {
  require_same_grid(a.grid, pou.grid(), "full_randomize");
  const auto b = singular_value_randomize(a, family_g, stream_g);
  // R has a real symbol, so R^* = R and conjugating the factors gives R B R.
  auto out = conjugate_factors(wiener_multiplier(family_l, pou, stream_l), b);
  out.draws.push_back({"wiener", family_l.describe(), family_l.seed, stream_l});
  return out;
}

LowRankOperator sobolev_conjugated_randomize(const LowRankOperator& a, double sigma, RandomizationKind kind,
                                             const SubgaussianFamily& family_g,
                                             const SubgaussianFamily& family_l,
                                             const PartitionOfUnity* pou, std::uint64_t stream_g,
                                             std::uint64_t stream_l) {
  const auto randomize = [&](const LowRankOperator& b) {
    return kind == RandomizationKind::singular
               ? singular_value_randomize(b, family_g, stream_g)
               : full_randomize(b, family_g, family_l, *pou, stream_g, stream_l);
  };
  if (kind == RandomizationKind::full && pou == nullptr)
    throw std::invalid_argument("full randomization needs a partition of unity");
  if (sigma == 0.0) return randomize(a);
  const auto weighted = conjugate_factors(FourierMultiplier::bessel(a.grid, sigma), a);
  return conjugate_factors(FourierMultiplier::bessel(a.grid, -sigma), randomize(weighted));
}

}  // namespace schatten
