#pragma once

#include <functional>
#include <string>
#include <vector>

#include "passage/successive.hpp"

namespace passage {

// Deterministic clock rho with rho(0) = 0, strictly increasing, mapping the
// process clock onto Brownian time: Z(t) = z + B(rho(t)).
struct TimeChange {
  std::function<double(double)> rho;
  std::function<double(double)> rho_inverse;
  std::function<double(double)> derivative;
};

// rho(t) = t; passage laws carry over unchanged.
TimeChange identity_time_change();

// Wraps an increasing clock whose inverse has no closed form; the inverse is
// computed by bracketing plus bisection to 1e-12 relative width.
TimeChange make_time_change(std::function<double(double)> rho,
                            std::function<double(double)> derivative);

// Strictly increasing space map v with v(0) = 0 carrying a diffusion onto
// Brownian motion: Z(t) = v_inverse(B(t) + v(z)).
struct Conjugation {
  std::function<double(double)> v;
  std::function<double(double)> v_inverse;
};

// v(z) = 2 sqrt(z) on z >= 0 (squared-Bessel-type square-root diffusion).
Conjugation cir_conjugation();

// v(z) = 2 arcsin(sqrt(z)) on z in [0, 1].
Conjugation wright_fisher_conjugation();

enum class ConjugationKind { cir, wright_fisher, custom };

// A passage problem for a transformed process, restated for Brownian motion.
// Passage epochs map back through time_map.rho_inverse.
struct ReducedProblem {
  PassageProblem bm_problem;
  TimeChange time_map;
  std::string description;
};

// Z(t) = z + B(rho(t)) against a constant barrier; passage times of Z are
// rho_inverse of the Brownian ones. The clock is validated on [0, 100]:
// rho(0) = 0, strictly increasing, inverse round-trip within 1e-10.
ReducedProblem reduce_time_changed(double z, double a, TimeChange tc);

// Space-conjugated diffusion against a constant barrier; the Brownian problem
// starts at v(z) with barrier v(a) and the identity clock. Custom maps are
// checked numerically (v(0) = 0, monotone, inverse round-trip) on a
// 1000-point grid spanning 0, z and a before use.
// The restatement reads the image walk on the increasing branch of v_inverse.
// When v_inverse folds at the origin (square-root and interval maps), the
// original process also reaches the barrier through the fold, which the
// one-sided Brownian problem does not count; its passage law then understates
// crossings (see the Euler cross-checks in the verification suite).
ReducedProblem reduce_conjugated(ConjugationKind kind, double z, double a,
                                 const Conjugation* custom = nullptr);

// Geometric Brownian motion z exp((r - sigma^2/2) t + sigma B(t)) against the
// exponential barrier exp(sigma s0 + mu_prime t); reduces in log space to
// x = ln(z)/sigma against the line s0 + (mu_prime - mu) t / sigma with the
// identity clock, where mu = r - sigma^2/2.
ReducedProblem reduce_gbm(double z, double r, double sigma, double s0,
                          double mu_prime);

// Ornstein-Uhlenbeck process e^{-mu t}(z + B(rho(t))) with clock
// rho(t) = (sigma^2/(2 mu))(e^{2 mu t} - 1) against the barrier s0 e^{-mu t},
// s0 > z; reduces to x = z, constant barrier s0, with that clock.
ReducedProblem reduce_ou(double z, double mu, double sigma, double s0);

// Law of the n-th passage time of the transformed process on the given
// process-clock abscissae: f_Z(t) = f_B(rho(t)) rho'(t), atom at infinity
// carried over unchanged.
NthPassageLaw pushforward_law(const ReducedProblem& reduced, int n,
                              const std::vector<double>& grid,
                              const QuadSpec& spec = {});

}  // namespace passage
