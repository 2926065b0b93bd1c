#pragma once

#include <vector>

#include "passage/linear_passage.hpp"

namespace passage {

// Tabulated density with a declared power behaviour t^{left_exponent} at 0+,
// used for the analytic head correction of mass integrals.
struct DensityGrid {
  std::vector<double> abscissae;
  std::vector<double> values;
  double left_exponent = 0.0;
};

// Head-corrected trapezoid mass of the tabulated density.
double grid_mass(const DensityGrid& g);

// Piecewise-linear evaluation; zero outside the tabulated range.
double grid_interpolate(const DensityGrid& g, double t);

struct NthPassageLaw {
  int n = 1;
  DensityGrid density;
  double atom_at_infinity = 0.0;
};

// Density of the waiting time between consecutive passages, conditional on
// the previous passage happening at epoch s. The restart structure makes this
// kernel the same at every order n.
double t2_conditional_density(double b, double s, double t);

// P(T2 <= t): probability the process is back on the boundary within t of
// the first passage. Defective for b != 0.
double t2_cdf(const PassageProblem& p, double t, const QuadSpec& spec = {});

// Density of T2 on (0, inf); behaves like const/sqrt(t) at 0+.
double t2_density(const PassageProblem& p, double t, const QuadSpec& spec = {});

// P(T2 = +infinity), by quadrature of the closed integral form.
double t2_defect(const PassageProblem& p, const QuadSpec& spec = {});

// Closed-form upper bound on t2_defect; even in b, zero at b = 0.
double jensen_bound(const PassageProblem& p);

// Density of the second passage time tau2 = tau1 + T2 (convolution form).
double tau2_density(const PassageProblem& p, double t, const QuadSpec& spec = {});

// integral_0^horizon P(T2 > t) dt, for b = 0 only; diverges as the horizon
// grows, witnessing E(T2) = +infinity.
double t2_partial_mean(const PassageProblem& p, double horizon,
                       const QuadSpec& spec = {});

// P(T1 <= t) for the driftless boundary, equal to the b = 0 crossing law.
double t1_cdf_driftless(const PassageProblem& p, double t);

// Law of the n-th passage time on the given abscissae. n = 1 samples the
// closed form; n >= 2 runs the inductive convolution on an internal log grid
// refined with the caller's points. The atom at infinity is 1 minus the
// recovered mass; for n = 2 it is cross-checked against t2_defect.
NthPassageLaw nth_passage_law(const PassageProblem& p, int n,
                              const std::vector<double>& grid,
                              const QuadSpec& spec = {});

// P(T_n <= t) by integrating the no-return kernel against the tabulated
// (n-1)-th passage law.
double tn_cdf(const PassageProblem& p, int n, double t,
              const QuadSpec& spec = {});

}  // namespace passage
