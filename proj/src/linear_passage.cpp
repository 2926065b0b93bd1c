#include "passage/linear_passage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace passage {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;

void require_off_boundary(const PassageProblem& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
    throw std::invalid_argument("passage problem has non-finite parameters");
  }
  if (p.x == p.a) {
    throw std::invalid_argument("start point must be strictly off the boundary");
  }
}

}  // namespace

bool recurrent(const PassageProblem& p) { return (p.a - p.x) * p.b <= 0.0; }

PassageProblem reflect_to_canonical(const PassageProblem& p) {
  if (p.x > p.a) return {-p.x, -p.a, -p.b};
  return p;
}

double first_passage_density(const PassageProblem& p, double t) {
  require_off_boundary(p);
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("first_passage_density: t must be positive");
  }
  const PassageProblem c = reflect_to_canonical(p);
  const double amx = c.a - c.x;
  const double rt = std::sqrt(t);
  const double pdf = std_normal_pdf((amx + c.b * t) / rt);
  // Avoid 0/0 when both the Gaussian and t^{3/2} underflow at extreme t.
  if (pdf == 0.0) return 0.0;
  return amx * pdf / (t * rt);
}

double first_passage_cdf(const PassageProblem& p, double t) {
  require_off_boundary(p);
  if (std::isnan(t) || t < 0.0) {
    throw std::invalid_argument("first_passage_cdf: t must be nonnegative");
  }
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return hit_probability(p);
  const PassageProblem c = reflect_to_canonical(p);
  const double amx = c.a - c.x;
  const double rt = std::sqrt(t);
  const double tail = 1.0 - std_normal_cdf(amx / rt + c.b * rt);
  const double mirror_arg = c.b * rt - amx / rt;
  const double log_weight = -2.0 * c.b * amx;
  double mirror;
  if (log_weight > 700.0) {
    // e^{-2b(a-x)} overflows on its own; the product with Phi stays finite.
    mirror = std::exp(log_weight + std_normal_cdf_log(mirror_arg));
  } else {
    mirror = std::exp(log_weight) * std_normal_cdf(mirror_arg);
  }
  return std::clamp(tail + mirror, 0.0, 1.0);
}

double first_passage_mean(const PassageProblem& p) {
  require_off_boundary(p);
  if (!recurrent(p)) {
    throw std::invalid_argument(
        "first_passage_mean: undefined for a defective passage law");
  }
  if (p.b == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs((p.a - p.x) / p.b);
}

double hit_probability(const PassageProblem& p) {
  require_off_boundary(p);
  const double drift_away = (p.a - p.x) * p.b;
  return drift_away > 0.0 ? std::exp(-2.0 * drift_away) : 1.0;
}

DefectiveLaw first_passage_law(const PassageProblem& p) {
  require_off_boundary(p);
  DefectiveLaw law;
  law.density = [p](double t) { return first_passage_density(p, t); };
  law.cdf = [p](double t) { return first_passage_cdf(p, t); };
  law.atom_at_infinity = 1.0 - hit_probability(p);
  return law;
}

double last_passage_density(double b, double t, double u) {
  if (!std::isfinite(b) || !(t > 0.0) || !(u > 0.0) || !(u < t)) {
    throw std::invalid_argument("last_passage_density: need 0 < u < t");
  }
  const double v = t - u;
  const double babs = std::abs(b);  // the bracket is even in b
  const double bracket =
      std::exp(-0.5 * b * b * v) +
      0.5 * babs * std::sqrt(2.0 * kPi * v) *
          (2.0 * std_normal_cdf(babs * std::sqrt(v)) - 1.0);
  return std::exp(-0.5 * b * b * u) / (kPi * std::sqrt(u * v)) * bracket;
}

double last_passage_density_integral(double b, double t, double u,
                                const QuadSpec& spec) {
  if (!std::isfinite(b) || !(t > 0.0) || !(u > 0.0) || !(u < t)) {
    throw std::invalid_argument("last_passage_density_integral: need 0 < u < t");
  }
  const double v = t - u;
  // First-passage integrand against the reversed boundary, with the dummy
  // state shifted by the intercept: |w| e^{-(w + b v)^2 / (2v)} / sqrt(2 pi v^3).
  const auto integrand = [b, v](double w) {
    const double z = w + b * v;
    return std::abs(w) * std::exp(-0.5 * z * z / v) /
           (kSqrt2Pi * v * std::sqrt(v));
  };
  // The Gaussian factor concentrates on -b v +- O(sqrt(v)); the |w| kink sits
  // at w = 0. Integrate the two smooth sides separately.
  const double center = -b * v;
  const double half_width = 15.0 * std::sqrt(v);
  const double lo = std::min(0.0, center - half_width);
  const double hi = std::max(0.0, center + half_width);
  QuadSpec piece = spec;
  piece.abs_tol = 0.5 * spec.abs_tol;
  double total = 0.0;
  for (const auto& [pa, pb] : {std::pair{lo, 0.0}, std::pair{0.0, hi}}) {
    if (pa == pb) continue;
    const QuadResult r = integrate(integrand, pa, pb, piece);
    if (!r.converged) {
      throw QuadratureError("last_passage_density_integral did not converge");
    }
    total += r.value;
  }
  return std::exp(-0.5 * b * b * u) / std::sqrt(2.0 * kPi * u) * total;
}

double no_zero_probability(double b, double s, double gap,
                           const QuadSpec& spec) {
  if (!std::isfinite(b) || !(s > 0.0) || std::isnan(gap) || gap < 0.0) {
    throw std::invalid_argument("no_zero_probability: need s > 0, gap >= 0");
  }
  if (gap == 0.0) return 1.0;
  if (gap > 1e8 * s) return never_return_probability(b, s);
  const double t = s + gap;
  QuadSpec q = spec;
  q.singular_left = true;
  q.singular_right = true;  // psi's right singularity at t approaches s as gap -> 0
  const QuadResult r = integrate(
      [b, t](double y) { return last_passage_density(b, t, y); }, 0.0, s, q);
  if (!r.converged) {
    throw QuadratureError("no_zero_probability did not converge");
  }
  return std::clamp(r.value, 0.0, 1.0);
}

double never_return_probability(double b, double s) {
  if (!std::isfinite(b) || !(s > 0.0)) {
    throw std::invalid_argument("never_return_probability: need s > 0");
  }
  if (b == 0.0) return 0.0;
  return 2.0 * (std_normal_cdf(std::abs(b) * std::sqrt(s)) - 0.5);
}

}  // namespace passage
