#include "schatten/exponents.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace schatten {

namespace {

Rational cross(const ExponentPoint& o, const ExponentPoint& a, const ExponentPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const ExponentPoint& p, const ExponentPoint& a, const ExponentPoint& b) {
  if (cross(a, b, p) != Rational(0)) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

std::vector<ExponentPoint> convex_hull(std::vector<ExponentPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<ExponentPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

// Keeps the half-plane a*x + b*y <= c.
std::vector<ExponentPoint> clip(const std::vector<ExponentPoint>& poly, const Rational& a, const Rational& b,
                                const Rational& c) {
  std::vector<ExponentPoint> out;
  const auto value = [&](const ExponentPoint& p) { return a * p.x + b * p.y - c; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    const Rational vp = value(p);
    const Rational vq = value(q);
    if (vp <= 0) out.push_back(p);
    if ((vp < 0 && vq > 0) || (vp > 0 && vq < 0)) {
      const Rational t = vp / (vp - vq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw std::invalid_argument("empty number");
  try {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      const long long num = std::stoll(text.substr(0, slash));
      const long long den = std::stoll(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      return Rational(num, den);
    }
    const auto dot = text.find('.');
    if (text.find_first_of("eE") != std::string::npos) throw std::invalid_argument("exponent notation");
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return Rational(v);
    }
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad fraction");
    long long den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool negative = !whole.empty() && whole[0] == '-';
    const long long w = (whole.empty() || whole == "-" || whole == "+") ? 0 : std::stoll(whole);
    const long long f = frac.empty() ? 0 : std::stoll(frac);
    const Rational mag = Rational(negative ? -w : w) + Rational(f, den);
    return negative ? -mag : mag;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not an exact number: '" + raw + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("number out of range: '" + raw + "'");
  }
}

Rational parse_reciprocal(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "inf" || text == "infinity") return Rational(0);
  const Rational v = parse_rational(text);
  if (v < 1) throw std::invalid_argument("exponent must be >= 1: '" + raw + "'");
  return Rational(1) / v;
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

bool sharp_alpha_defined(const Rational& q, int d) {
  if (q < 1) return false;
  if (d == 1) return true;
  return q < Rational(d + 1, d - 1);
}

Rational deterministic_sharp_alpha(const Rational& q, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!sharp_alpha_defined(q, d))
    throw std::invalid_argument("sharp Schatten exponent requires 1 <= q < (d+1)/(d-1)");
  return 2 * q / (q + 1);
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::inside: return "inside";
    case Membership::boundary: return "boundary";
    case Membership::outside: return "outside";
    case Membership::excluded_ab: return "excluded-AB";
  }
  return "?";
}

RegionABCD::RegionABCD(int d, const Rational& sigma) : d_(d), sigma_(sigma) {
  if (d < 1 || d > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (sigma < 0 || 2 * sigma >= d) throw std::invalid_argument("region ABCD requires 0 <= sigma < d/2");
  const Rational dd(d);
  a_ = {Rational(0), (dd - 2 * sigma) / 2};
  b_ = {(dd - 2 * sigma) / dd, Rational(0)};
  c_ = {Rational(1), Rational(0)};
  dd_ = {(dd - 2) / dd, Rational(1)};
  // sigma = 0 makes AB and CD collinear; the hull is then a segment and is clipped the same way.
  auto poly = convex_hull({a_, b_, c_, dd_});
  if (poly.size() >= 2) {
    poly = clip(poly, Rational(-1), Rational(0), Rational(0));  // x >= 0
    poly = clip(poly, Rational(1), Rational(0), Rational(1));   // x <= 1
    poly = clip(poly, Rational(0), Rational(-1), Rational(0));  // y >= 0
    poly = clip(poly, Rational(0), Rational(1), Rational(1));   // y <= 1
  }
  polygon_ = std::move(poly);
}

Membership RegionABCD::classify(const ExponentPoint& pt) const {
  if (d_ == 2 && on_segment(pt, a_, b_)) return Membership::excluded_ab;
  const auto& poly = polygon_;
  if (poly.size() == 1) return pt == poly[0] ? Membership::boundary : Membership::outside;
  if (poly.size() == 2) return on_segment(pt, poly[0], poly[1]) ? Membership::boundary : Membership::outside;
  bool boundary = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    const Rational c = cross(p, q, pt);
    if (c < 0) return Membership::outside;
    if (c == Rational(0)) {
      if (!on_segment(pt, p, q)) return Membership::outside;
      boundary = true;
    }
  }
  return boundary ? Membership::boundary : Membership::inside;
}

Rational sigma_from_scaling(const Rational& inv_p, const Rational& inv_q, int d) { return d - 2 * inv_p - d * inv_q; }

AdmissibilityReport sobolev_schatten_admissible(const Rational& inv_p, const Rational& inv_q, const Rational& inv_alpha,
                                     const Rational& s, int d) {
  if (2 * s <= 0 || 2 * s >= d) throw std::invalid_argument("admissibility requires 0 < s < d/2");
  AdmissibilityReport rep;
  rep.holder = inv_alpha >= inv_p / d + inv_q;
  rep.strict = inv_alpha > inv_p;  // alpha < p
  rep.scaling = 2 * inv_p + d * inv_q == d - 2 * s;
  return rep;
}

SingularRegimeExponents singular_regime_exponents(const Rational& p, const Rational& q, const Rational& sigma, int d) {
  if (p < 1 || q < 1) throw std::invalid_argument("singular-randomization exponents: p, q must lie in [1, inf)");
  if (sigma < 0 || 2 * sigma >= d) throw std::invalid_argument("singular-randomization exponents: sigma must lie in [0, d/2)");
  const Rational inv_p = 1 / p;
  const Rational inv_q = 1 / q;
  if (2 * inv_p + d * inv_q != d - sigma)
    throw std::invalid_argument("singular-randomization scaling: 2/p + d/q != d - sigma (needs sigma = " +
                                to_string(sigma_from_scaling(inv_p, inv_q, d)) + ")");
  const RegionABCD region(d, sigma);
  SingularRegimeExponents out;
  out.membership = region.classify({inv_q, inv_p});
  if (out.membership == Membership::excluded_ab)
    throw std::invalid_argument("singular-randomization region: point on excluded segment AB (d=2)");
  if (out.membership == Membership::outside) throw std::invalid_argument("singular-randomization region: point outside ABCD");
  out.alpha = std::min({p, q, Rational(2)});
  out.r_min = std::max(p, q);
  out.sharp_defined = sharp_alpha_defined(q, d);
  if (out.sharp_defined) {
    out.sharp_alpha = deterministic_sharp_alpha(q, d);
    out.exceeds_sharp = out.alpha > out.sharp_alpha;
  }
  return out;
}

void check_full_randomization_exponents(const Rational& p, const Rational& q, const Rational& q_hat, int d) {
  if (p < 2) throw std::invalid_argument("full-randomization exponents: p must be >= 2");
  if (q < 1) throw std::invalid_argument("full-randomization exponents: q must be >= 1");
  if (2 / p + d / q != Rational(d)) throw std::invalid_argument("full-randomization scaling: 2/p + d/q != d");
  if (q_hat < std::max(q, Rational(2))) throw std::invalid_argument("full-randomization exponents: q_hat must be >= max(q, 2)");
}

void check_function_randomization_exponents(const Rational& p, const Rational& q, const Rational& q_hat, int d) {
  if (p < 2 || q < 1) throw std::invalid_argument("Strichartz pair: p >= 2 and q >= 1 required");
  if (d == 2 && p == Rational(2)) throw std::invalid_argument("Strichartz pair: the endpoint p = 2 is excluded in d = 2");
  if (2 / p + d / q != Rational(d, 2)) throw std::invalid_argument("Strichartz pair: 2/p + d/q != d/2");
  if (q_hat < q) throw std::invalid_argument("function randomization: q_hat must be >= q");
}

void check_key_estimate_exponents(const Rational& mu, double alpha, int d) {
  if (mu < 1) throw std::invalid_argument("key estimate: mu must be >= 1");
  const bool ok = (d == 1 && mu <= Rational(4, 3)) || (d == 2 && mu < 2) || (d == 3 && mu <= 2);
  if (!ok) throw std::invalid_argument("key estimate: mu outside the admissible range for this dimension");
  if (!(alpha == 2.0 || alpha == std::numeric_limits<double>::infinity()))
    throw std::invalid_argument("key estimate: only alpha in {2, inf} is implemented");
}

}  // namespace schatten
