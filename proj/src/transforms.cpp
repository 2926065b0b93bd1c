#include "passage/transforms.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace passage {

namespace {

// Solves rho(t) = target for an increasing rho with rho(0) = 0 by doubling
// the bracket and bisecting to 1e-12 relative width.
double invert_increasing(const std::function<double(double)>& rho,
                         double target) {
  if (!std::isfinite(target) || target < 0.0) {
    throw std::invalid_argument("time change inverse: need a finite target >= 0");
  }
  if (target == 0.0) return 0.0;
  double hi = 1.0;
  while (rho(hi) < target) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw std::runtime_error("time change inverse: bracket overflow");
    }
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    (rho(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Checks the clock invariants on [0, 100]: starts at zero, strictly
// increasing, inverse round-trips within 1e-10.
void validate_time_change(const TimeChange& tc) {
  if (!tc.rho || !tc.rho_inverse || !tc.derivative) {
    throw std::invalid_argument("time change: all three maps must be set");
  }
  if (!(std::abs(tc.rho(0.0)) <= 1e-12)) {
    throw std::invalid_argument("time change: rho(0) must be 0");
  }
  const int n = 1000;
  double prev = tc.rho(0.0);
  for (int i = 1; i <= n; ++i) {
    const double t = 100.0 * i / n;
    const double r = tc.rho(t);
    if (!std::isfinite(r) || r <= prev) {
      throw std::invalid_argument("time change: rho must be strictly increasing");
    }
    prev = r;
    const double back = tc.rho_inverse(r);
    if (!(std::abs(back - t) <= 1e-10 * std::max(1.0, t))) {
      throw std::invalid_argument(
          "time change: rho_inverse does not invert rho");
    }
  }
}

// Checks v(0) = 0, strict monotonicity and the inverse round-trip on a
// 1000-point grid spanning 0 and both states.
void validate_conjugation(const Conjugation& c, double z, double a) {
  if (!c.v || !c.v_inverse) {
    throw std::invalid_argument("conjugation: both maps must be set");
  }
  if (!(std::abs(c.v(0.0)) <= 1e-12)) {
    throw std::invalid_argument("conjugation: v(0) must be 0");
  }
  const double lo = std::min({0.0, z, a});
  const double hi = std::max({0.0, z, a});
  const int n = 999;
  double prev = c.v(lo);
  for (int i = 0; i <= n; ++i) {
    const double s = lo + (hi - lo) * i / n;
    const double y = c.v(s);
    if (!std::isfinite(y) || (i > 0 && y <= prev)) {
      throw std::invalid_argument("conjugation: v must be strictly increasing");
    }
    prev = y;
    const double back = c.v_inverse(y);
    if (!(std::abs(back - s) <= 1e-10 * std::max(1.0, std::abs(s)))) {
      throw std::invalid_argument("conjugation: v_inverse does not invert v");
    }
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

TimeChange identity_time_change() {
  auto id = [](double t) { return t; };
  return {id, id, [](double) { return 1.0; }};
}

TimeChange make_time_change(std::function<double(double)> rho,
                            std::function<double(double)> derivative) {
  if (!rho || !derivative) {
    throw std::invalid_argument("make_time_change: rho and derivative required");
  }
  TimeChange tc;
  tc.rho = rho;
  tc.rho_inverse = [rho](double u) { return invert_increasing(rho, u); };
  tc.derivative = std::move(derivative);
  return tc;
}

Conjugation cir_conjugation() {
  return {[](double z) { return 2.0 * std::sqrt(z); },
          [](double y) { return 0.25 * y * y; }};
}

Conjugation wright_fisher_conjugation() {
  return {[](double z) { return 2.0 * std::asin(std::sqrt(z)); },
          [](double y) {
            const double s = std::sin(0.5 * y);
            return s * s;
          }};
}

ReducedProblem reduce_time_changed(double z, double a, TimeChange tc) {
  require_finite(z, "reduce_time_changed: z");
  require_finite(a, "reduce_time_changed: barrier");
  if (z == a) {
    throw std::invalid_argument("reduce_time_changed: start must differ from barrier");
  }
  validate_time_change(tc);
  return {{z, a, 0.0}, std::move(tc),
          "time-changed Brownian motion z + B(rho(t)), constant barrier"};
}

ReducedProblem reduce_conjugated(ConjugationKind kind, double z, double a,
                                 const Conjugation* custom) {
  require_finite(z, "reduce_conjugated: z");
  require_finite(a, "reduce_conjugated: barrier");
  Conjugation map;
  std::string label;
  switch (kind) {
    case ConjugationKind::cir:
      if (z < 0.0 || a < 0.0) {
        throw std::invalid_argument("reduce_conjugated: CIR states must be >= 0");
      }
      map = cir_conjugation();
      label = "CIR conjugated to Brownian motion via v(z) = 2 sqrt(z)";
      break;
    case ConjugationKind::wright_fisher:
      if (z < 0.0 || z > 1.0 || a < 0.0 || a > 1.0) {
        throw std::invalid_argument(
            "reduce_conjugated: Wright-Fisher states must lie in [0, 1]");
      }
      map = wright_fisher_conjugation();
      label =
          "Wright-Fisher conjugated to Brownian motion via "
          "v(z) = 2 arcsin(sqrt(z))";
      break;
    case ConjugationKind::custom:
      if (custom == nullptr) {
        throw std::invalid_argument("reduce_conjugated: custom map required");
      }
      validate_conjugation(*custom, z, a);
      map = *custom;
      label = "custom conjugation to Brownian motion";
      break;
  }
  const double x_prime = map.v(z);
  const double a_prime = map.v(a);
  if (x_prime == a_prime) {
    throw std::invalid_argument(
        "reduce_conjugated: start and barrier coincide after mapping");
  }
  return {{x_prime, a_prime, 0.0}, identity_time_change(), std::move(label)};
}

ReducedProblem reduce_gbm(double z, double r, double sigma, double s0,
                          double mu_prime) {
  require_finite(r, "reduce_gbm: r");
  require_finite(s0, "reduce_gbm: s0");
  require_finite(mu_prime, "reduce_gbm: mu_prime");
  if (!std::isfinite(z) || z <= 0.0) {
    throw std::invalid_argument("reduce_gbm: need z > 0");
  }
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw std::invalid_argument("reduce_gbm: need sigma > 0");
  }
  const double mu = r - 0.5 * sigma * sigma;
  return {{std::log(z) / sigma, s0, (mu_prime - mu) / sigma},
          identity_time_change(),
          "geometric Brownian motion, log-reduced to a linear barrier"};
}

ReducedProblem reduce_ou(double z, double mu, double sigma, double s0) {
  require_finite(z, "reduce_ou: z");
  if (!std::isfinite(mu) || mu <= 0.0) {
    throw std::invalid_argument("reduce_ou: need mu > 0");
  }
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw std::invalid_argument("reduce_ou: need sigma > 0");
  }
  if (!std::isfinite(s0) || s0 <= z) {
    throw std::invalid_argument("reduce_ou: need s0 > z");
  }
  const double scale = 0.5 * sigma * sigma / mu;
  TimeChange tc;
  tc.rho = [scale, mu](double t) { return scale * std::expm1(2.0 * mu * t); };
  tc.rho_inverse = [scale, mu](double u) {
    return std::log1p(u / scale) / (2.0 * mu);
  };
  tc.derivative = [sigma, mu](double t) {
    return sigma * sigma * std::exp(2.0 * mu * t);
  };
  return {{z, s0, 0.0}, std::move(tc),
          "Ornstein-Uhlenbeck via the clock rho(t) = "
          "(sigma^2/(2 mu)) (e^{2 mu t} - 1), constant barrier"};
}

NthPassageLaw pushforward_law(const ReducedProblem& reduced, int n,
                              const std::vector<double>& grid,
                              const QuadSpec& spec) {
  if (grid.size() < 2) {
    throw std::invalid_argument("pushforward_law: need at least two abscissae");
  }
  std::vector<double> bm_grid(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !(grid[i] > 0.0) ||
        (i > 0 && grid[i] <= grid[i - 1])) {
      throw std::invalid_argument(
          "pushforward_law: abscissae must be positive and strictly increasing");
    }
    bm_grid[i] = reduced.time_map.rho(grid[i]);
  }
  const NthPassageLaw bm_law =
      nth_passage_law(reduced.bm_problem, n, bm_grid, spec);
  NthPassageLaw law;
  law.n = n;
  law.atom_at_infinity = bm_law.atom_at_infinity;
  law.density.abscissae = grid;
  law.density.left_exponent = bm_law.density.left_exponent;
  law.density.values.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    law.density.values[i] =
        bm_law.density.values[i] * reduced.time_map.derivative(grid[i]);
  }
  return law;
}

}  // namespace passage
