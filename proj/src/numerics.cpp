#include "passage/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace passage {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
// Gauss nodes sit at the odd indices plus the centre.
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {0.12948496616886969327, 0.27970539148927666790,
                           0.38183005050511894495, 0.41795918367346938776};

struct RuleResult {
  double value;
  double error;
};

double checked_eval(const std::function<double(double)>& f, double t) {
  const double y = f(t);
  if (!std::isfinite(y)) {
    throw std::invalid_argument(
        "integrate: integrand returned a non-finite value");
  }
  return y;
}

RuleResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = checked_eval(f, c);
  double res_g = kWg[3] * fc;
  double res_k = kWgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double pair = checked_eval(f, c - dx) + checked_eval(f, c + dx);
    res_k += kWgk[j] * pair;
    if (j % 2 == 1) res_g += kWg[(j - 1) / 2] * pair;
  }
  return {res_k * h, std::abs((res_k - res_g) * h)};
}

struct Interval {
  double a, b;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Interval& l, const Interval& r) const {
    return l.error < r.error;
  }
};

QuadResult adapt(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_subdivisions) {
  std::priority_queue<Interval, std::vector<Interval>, ByError> heap;
  const RuleResult whole = gk15(f, a, b);
  double total_v = whole.value;
  double total_e = whole.error;
  heap.push({a, b, whole.value, whole.error});
  const auto tol = [&] {
    return std::max(abs_tol, rel_tol * std::abs(total_v));
  };
  int splits = 0;
  while (total_e > tol() && splits < max_subdivisions) {
    const Interval worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) break;  // interval exhausted in doubles
    heap.pop();
    const RuleResult left = gk15(f, worst.a, m);
    const RuleResult right = gk15(f, m, worst.b);
    total_v += left.value + right.value - worst.value;
    total_e += left.error + right.error - worst.error;
    heap.push({worst.a, m, left.value, left.error});
    heap.push({m, worst.b, right.value, right.error});
    ++splits;
  }
  return {total_v, total_e, total_e <= tol()};
}

struct Piece {
  std::function<double(double)> g;
  double a, b;
};

}  // namespace

double std_normal_pdf(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("std_normal_pdf: non-finite input");
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double std_normal_cdf(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

double std_normal_cdf_log(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("std_normal_cdf_log: non-finite input");
  const double y = -z * kInvSqrt2;  // Phi(z) = erfc(y)/2
  if (y <= 25.0) return std::log(0.5 * std::erfc(y));
  // erfc(y) ~ e^{-y^2}/(y sqrt(pi)) (1 - u + 3u^2 - 15u^3 + 105u^4), u = 1/(2y^2)
  const double u = 0.5 / (y * y);
  const double series = -u * (1.0 - 3.0 * u * (1.0 - 5.0 * u * (1.0 - 7.0 * u)));
  return -y * y - std::log(2.0 * y * std::sqrt(kPi)) + std::log1p(series);
}

QuadResult integrate(const std::function<double(double)>& f, double lo,
                     double hi, const QuadSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1) {
    throw std::invalid_argument("integrate: invalid QuadSpec");
  }
  if (!std::isfinite(lo) || std::isnan(hi)) {
    throw std::invalid_argument("integrate: bad interval");
  }
  if (hi == lo) return {0.0, 0.0, true};
  if (hi < lo) throw std::invalid_argument("integrate: hi < lo");

  std::vector<Piece> pieces;
  const bool infinite = std::isinf(hi);
  double fin_hi = hi;
  if (infinite) {
    // Split off (S, inf) and map t = S/w^2: the composed Jacobian 2S/w^3
    // turns t^{-3/2}-type tails into bounded integrands.
    const double split = std::max(lo + 1.0, 2.0 * std::abs(lo));
    fin_hi = split;
    pieces.push_back({[&f, split](double w) {
                        const double t = split / (w * w);
                        if (!std::isfinite(t)) return 0.0;
                        return 2.0 * split * f(t) / (w * w * w);
                      },
                      0.0, 1.0});
  }

  const bool sl = spec.singular_left;
  const bool sr = spec.singular_right && !infinite;
  const double len = fin_hi - lo;
  if (sl && sr) {
    // u = lo + len sin^2(theta) clusters nodes at both endpoints.
    pieces.push_back({[&f, lo, len](double th) {
                        const double s = std::sin(th);
                        const double c = std::cos(th);
                        return f(lo + len * s * s) * len * 2.0 * s * c;
                      },
                      0.0, 0.5 * kPi});
  } else if (sl) {
    pieces.push_back({[&f, lo](double w) { return 2.0 * w * f(lo + w * w); },
                      0.0, std::sqrt(len)});
  } else if (sr) {
    pieces.push_back(
        {[&f, fin_hi](double w) { return 2.0 * w * f(fin_hi - w * w); }, 0.0,
         std::sqrt(len)});
  } else {
    pieces.push_back({f, lo, fin_hi});
  }

  const double piece_abs = spec.abs_tol / static_cast<double>(pieces.size());
  double value = 0.0;
  double error = 0.0;
  bool ok = true;
  for (const Piece& p : pieces) {
    const QuadResult r =
        adapt(p.g, p.a, p.b, piece_abs, spec.rel_tol, spec.max_subdivisions);
    value += r.value;
    error += r.error_estimate;
    ok = ok && r.converged;
  }
  ok = ok && error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
  return {value, error, ok};
}

}  // namespace passage
