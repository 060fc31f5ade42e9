#include <cmath>
#include <random>
#include <stdexcept>

#include "schatten/fft.hpp"
#include "schatten/hartree.hpp"

namespace schatten::hartree {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<cplx> raw_spectrum(const Field& u) {
  std::vector<cplx> s(u.values);
  fft::transform(u.grid, s, -1);
  return s;
}

Field from_raw_spectrum(const Grid& g, std::vector<cplx> s) {
  fft::transform(g, s, +1);
  const double w = 1.0 / static_cast<double>(g.size());
  for (auto& z : s) z *= w;
  return Field(g, std::move(s));
}

void require_frames(const std::vector<Field>& g, const Background& bg) {
  if (g.empty()) throw std::invalid_argument("L1: no time nodes");
  for (const auto& f : g) require_same_grid(f.grid, bg.f.grid, "L1");
}

}  // namespace

std::vector<Field> l1_apply_direct(const std::vector<Field>& g, const Background& bg, double dt) {
  require_frames(g, bg);
  require_dense_size(bg.f.grid);
  std::vector<Field> v;
  v.reserve(g.size());
  for (const auto& frame : g) v.push_back(potential_from_density(bg, frame));
  const auto d = duhamel_series(v, std::vector<DenseOperator>{multiplier_operator(bg.f)}, dt);
  std::vector<Field> out;
  out.reserve(g.size());
  // D_V[gamma_f] carries -i where L_1 carries +i.
  for (const auto& op : d) out.push_back(cplx{-1.0, 0.0} * density(op));
  return out;
}

std::vector<std::vector<cplx>> l1_fourier_table(const Background& bg, double dt, std::size_t steps) {
  const Grid& g = bg.f.grid;
  std::vector<std::size_t> support;
  for (std::size_t p = 0; p < g.size(); ++p)
    if (bg.f.symbol[p] != cplx{0.0, 0.0}) support.push_back(p);
  std::vector<std::vector<cplx>> table(steps + 1, std::vector<cplx>(g.size()));
  const double inv_vol = 1.0 / g.volume();
  for (std::size_t xi = 0; xi < g.size(); ++xi) {
    const auto k = g.frequency(xi);
    for (std::size_t p : support) {
      const auto q = g.frequency(p);
      const double phase = 2.0 * dt * (q[0] * k[0] + q[1] * k[1] + q[2] * k[2]);
      const cplx z = std::polar(1.0, phase);
      cplx w = bg.f.symbol[p] * inv_vol;
      // Re-seed the power every 64 steps to keep the recursion error bounded.
      for (std::size_t m = 0; m <= steps; ++m) {
        if (m % 64 == 0) w = bg.f.symbol[p] * inv_vol * std::polar(1.0, phase * static_cast<double>(m));
        table[m][xi] += w;
        w *= z;
      }
    }
  }
  return table;
}

std::vector<Field> l1_apply_fourier(const std::vector<Field>& g, const Background& bg, double dt, double c0) {
  require_frames(g, bg);
  if (!std::isfinite(c0)) throw std::invalid_argument("L1 Fourier path: constant c0 is not calibrated");
  const Grid& grid = bg.f.grid;
  const std::size_t K = g.size();
  const auto table = l1_fourier_table(bg, dt, K - 1);
  std::vector<std::vector<cplx>> spec;
  spec.reserve(K);
  for (const auto& frame : g) spec.push_back(raw_spectrum(frame));

  std::vector<Field> out;
  out.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<cplx> acc(grid.size());
    for (std::size_t xi = 0; xi < grid.size(); ++xi) {
      const double k2 = grid.frequency_norm2(xi);
      cplx sum{0.0, 0.0};
      for (std::size_t j = 0; j < k; ++j) {
        const double w = j == 0 ? 0.5 * dt : dt;
        sum += w * std::sin(static_cast<double>(k - j) * dt * k2) * table[k - j][xi] * spec[j][xi];
      }
      acc[xi] = c0 * bg.w_hat.symbol[xi] * sum;
    }
    out.push_back(from_raw_spectrum(grid, std::move(acc)));
  }
  return out;
}

std::vector<std::vector<Field>> l1_probe_ensemble(const Grid& g, std::size_t probes, std::size_t steps,
                                                  std::uint64_t seed, double band) {
  if (!(band > 0.0) || band > 1.0) throw std::invalid_argument("probe band must lie in (0, 1]");
  const double cutoff = band * kPi * g.n() / g.length();
  std::vector<std::vector<Field>> out(probes);
  for (std::size_t p = 0; p < probes; ++p) {
    std::mt19937_64 rng(derive_stream(seed, p));
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k <= steps; ++k) {
      std::vector<cplx> s(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) {
        const auto xi = g.frequency(j);
        const auto idx = g.lattice_index(j);
        bool keep = true;
        for (int a = 0; a < g.dim(); ++a)
          if (std::abs(xi[a]) > cutoff || idx[a] == -g.n() / 2) keep = false;
        const double re = nd(rng);
        const double im = nd(rng);
        if (keep) s[j] = {re, im};
      }
      Field f = from_raw_spectrum(g, std::move(s));
      for (auto& z : f.values) z = z.real();
      out[p].push_back(std::move(f));
    }
  }
  return out;
}

Calibration calibrate_l1_constant(const Background& bg, double dt, std::size_t steps, std::size_t probes,
                                  std::uint64_t seed, double max_residual) {
  validate_background(bg);
  if (probes == 0 || steps < 2) throw std::invalid_argument("calibration needs probes and at least two steps");
  const auto ensemble = l1_probe_ensemble(bg.f.grid, probes, steps, seed);
  cplx num{0.0, 0.0};
  double den = 0.0;
  std::vector<std::vector<Field>> direct;
  std::vector<std::vector<Field>> fourier;
  for (const auto& g : ensemble) {
    direct.push_back(l1_apply_direct(g, bg, dt));
    fourier.push_back(l1_apply_fourier(g, bg, dt, 1.0));
    for (std::size_t k = 0; k < g.size(); ++k)
      for (std::size_t x = 0; x < bg.f.grid.size(); ++x) {
        num += std::conj(fourier.back()[k][x]) * direct.back()[k][x];
        den += std::norm(fourier.back()[k][x]);
      }
  }
  if (!(den > 0.0)) throw std::invalid_argument("calibration needs nonzero f and w");
  const cplx c = num / den;
  double res = 0.0;
  double ref = 0.0;
  for (std::size_t p = 0; p < direct.size(); ++p)
    for (std::size_t k = 0; k < direct[p].size(); ++k)
      for (std::size_t x = 0; x < bg.f.grid.size(); ++x) {
        res += std::norm(direct[p][k][x] - c * fourier[p][k][x]);
        ref += std::norm(direct[p][k][x]);
      }
  Calibration out{c.real(), c.imag(), std::sqrt(res / ref), probes};
  if (std::abs(c.imag()) > 1e-6 * std::abs(c))
    throw NumericFailure("L1 calibration: fitted constant is not real (" + std::to_string(c.imag()) + ")");
  if (out.residual > max_residual)
    throw NumericFailure("L1 calibration: Fourier and direct paths disagree (relative residual " +
                         std::to_string(out.residual) + ")");
  return out;
}

}  // namespace schatten::hartree
