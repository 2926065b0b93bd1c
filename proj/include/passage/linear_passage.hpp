#pragma once

#include <functional>

#include "passage/numerics.hpp"

namespace passage {

// Start point x against the linear boundary S(t) = a + b t.
struct PassageProblem {
  double x = 0.0;
  double a = 1.0;
  double b = 0.0;
};

// (a - x) b <= 0: the boundary is reached in finite time almost surely.
bool recurrent(const PassageProblem& p);

// (x, a, b) -> (-x, -a, -b) whenever x > a, so a - x > 0 holds downstream.
// Every law here is invariant under this reflection.
PassageProblem reflect_to_canonical(const PassageProblem& p);

// Density/CDF on (0, inf) plus an explicit atom at +infinity.
struct DefectiveLaw {
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  double atom_at_infinity = 0.0;
};

// Inverse Gaussian first-passage density of the boundary crossing time.
double first_passage_density(const PassageProblem& p, double t);

// Closed-form crossing-time distribution; t may be +infinity.
double first_passage_cdf(const PassageProblem& p, double t);

// |a-x|/|b| for b != 0; +infinity for b = 0. Requires a recurrent problem.
double first_passage_mean(const PassageProblem& p);

// e^{-2b(a-x)} when the boundary drifts away, 1 otherwise.
double hit_probability(const PassageProblem& p);

// The first-passage law bundled with its atom at infinity.
DefectiveLaw first_passage_law(const PassageProblem& p);

// Density psi_t(u) of the last boundary-crossing time before t, for paths
// restarted on the boundary. Independent of x and a; even in b.
double last_passage_density(double b, double t, double u);

// Same density evaluated through the first-passage representation against the
// time-reversed boundary (an integral over a dummy state variable). Serves as
// an independent numerical cross-check of the closed form.
double last_passage_density_integral(double b, double t, double u,
                                const QuadSpec& spec = {});

// P(no boundary crossings in (s, s+gap)) for a path on the boundary at time
// 0; equals the integral of psi_{s+gap} over (0, s).
double no_zero_probability(double b, double s, double gap,
                           const QuadSpec& spec = {});

// gap -> infinity limit of no_zero_probability: 2 sgn(b) (Phi(b sqrt(s)) - 1/2).
double never_return_probability(double b, double s);

}  // namespace passage
