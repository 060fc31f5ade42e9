#pragma once

#include <boost/rational.hpp>

#include <string>
#include <vector>

namespace schatten {

using Rational = boost::rational<long long>;

/// Parses "3", "4/3", "0.25" exactly; "inf" is rejected.
Rational parse_rational(const std::string& text);
/// Parses an exponent in [1, inf] and returns its reciprocal (0 for "inf").
Rational parse_reciprocal(const std::string& text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// 2q/(q+1) for 1 <= q < (d+1)/(d-1).
Rational deterministic_sharp_alpha(const Rational& q, int d);
bool sharp_alpha_defined(const Rational& q, int d);

/// A point (1/q, 1/p) of the exponent plane.
struct ExponentPoint {
  Rational x;  // 1/q
  Rational y;  // 1/p
  bool operator==(const ExponentPoint&) const = default;
};

enum class Membership { inside, boundary, outside, excluded_ab };
std::string to_string(Membership m);

/// Convex hull of A=(0,(d-2s)/2), B=((d-2s)/d,0), C=(1,0), D=((d-2)/d,1), clipped to the unit square.
class RegionABCD {
 public:
  RegionABCD(int d, const Rational& sigma);

  int dim() const noexcept { return d_; }
  const Rational& sigma() const noexcept { return sigma_; }
  ExponentPoint corner_a() const noexcept { return a_; }
  ExponentPoint corner_b() const noexcept { return b_; }
  ExponentPoint corner_c() const noexcept { return c_; }
  ExponentPoint corner_d() const noexcept { return dd_; }
  /// Counter-clockwise vertices of the clipped region.
  const std::vector<ExponentPoint>& polygon() const noexcept { return polygon_; }

  /// In d = 2 the closed segment AB is removed before the hull test.
  Membership classify(const ExponentPoint& pt) const;

 private:
  int d_;
  Rational sigma_;
  ExponentPoint a_, b_, c_, dd_;
  std::vector<ExponentPoint> polygon_;
};

/// d - 2/p - d/q, the regularity solving the scaling line 2/p + d/q = d - sigma.
Rational sigma_from_scaling(const Rational& inv_p, const Rational& inv_q, int d);

struct AdmissibilityReport {
  bool holder = false;   // 1/alpha >= 1/(dp) + 1/q
  bool strict = false;   // alpha < p
  bool scaling = false;  // 2/p + d/q = d - 2s
  bool admissible() const noexcept { return holder && strict && scaling; }
};
AdmissibilityReport sobolev_schatten_admissible(const Rational& inv_p, const Rational& inv_q, const Rational& inv_alpha,
                                                const Rational& s, int d);

struct SingularRegimeExponents {
  Rational alpha;       // min(p, q, 2)
  Rational r_min;       // max(p, q)
  Membership membership = Membership::outside;
  bool sharp_defined = false;
  Rational sharp_alpha;  // 2q/(q+1) when defined
  bool exceeds_sharp = false;
};
/// Validates p, q in [1, inf), the scaling 2/p + d/q = d - sigma and region membership;
/// throws std::invalid_argument naming the violated condition.
SingularRegimeExponents singular_regime_exponents(const Rational& p, const Rational& q, const Rational& sigma, int d);

/// 2/p + d/q = d, p >= 2, q_hat >= max(q, 2).
void check_full_randomization_exponents(const Rational& p, const Rational& q, const Rational& q_hat, int d);
/// Standard Strichartz pair (2/p + d/q = d/2, p >= 2, p > 2 in d = 2) and q_hat >= q.
void check_function_randomization_exponents(const Rational& p, const Rational& q, const Rational& q_hat, int d);
/// mu range of the key estimate: [1, 4/3] (d=1), [1, 2) (d=2), [1, 2] (d=3); alpha in {2, inf}.
void check_key_estimate_exponents(const Rational& mu, double alpha, int d);

}  // namespace schatten
