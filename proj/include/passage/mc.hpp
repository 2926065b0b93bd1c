#pragma once

#include <cstdint>
#include <vector>

#include "passage/linear_passage.hpp"

namespace passage {

// Step sizes keeping discretization bias below statistical error at 1e5 paths.
inline constexpr double kDefaultBmStep = 1e-3;
inline constexpr double kDefaultEulerStep = 1e-4;

struct McConfig {
  std::int64_t n_paths = 100000;
  double dt = kDefaultBmStep;
  double horizon = 50.0;
  std::uint64_t seed = 20260819;
  // 0 picks the hardware count, capped by the PASSAGE_LAB_THREADS variable.
  int workers = 0;
  // Resample intra-step crossings with the Brownian-bridge probability
  // exp(-2 d d' / dt); disabling it biases passage times late.
  bool bridge_correction = true;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_effective = 0;
};

// One entry per path; censored entries hold the horizon in times.
struct PassageSample {
  std::vector<double> times;
  std::vector<std::uint8_t> censored;
};

// 50 mean crossing times when the line is drifting, 50 (a-x)^2 otherwise.
double default_horizon(const PassageProblem& p);

// Crossing times of the line a + b t by x + B_t, bridge-corrected per step.
// Identical seed and config give bit-identical samples for any worker count.
PassageSample simulate_first_passage(const PassageProblem& p,
                                     const McConfig& cfg);

// Fraction of paths started on the line whose distance process has no
// detected zero inside the open interval (s, s + gap).
McEstimate estimate_no_zero_probability(double b, double s, double gap,
                                        const McConfig& cfg);

// Empirical P(last detected zero before t is <= u), paths started on the
// line; the quadrature counterpart integrates the last-zero density over
// (0, u). Requires 0 < u < t.
McEstimate estimate_last_passage_cdf(double b, double t, double u,
                                     const McConfig& cfg);

enum class EulerKind { cir, wright_fisher, gbm, ou };

// Parameters for the Euler-Maruyama crossing samplers; fields beyond the
// ones a kind uses are ignored.
//   cir:            dZ = dt/4 + sqrt(Z v 0) dB,        barrier `barrier`
//   wright_fisher:  dZ = (1/4 - Z/2) dt
//                        + sqrt(Z (1 - Z) v 0) dB,     barrier `barrier`,
//                        state clamped to [0, 1]
//   gbm:            dZ = r Z dt + sigma Z dB,          barrier e^{sigma s0 + mu_prime t}
//   ou:             dZ = -mu Z dt + sigma dB,          barrier s0 e^{-mu t}
struct EulerProblem {
  EulerKind kind = EulerKind::cir;
  double z = 0.25;
  double barrier = 1.0;
  double r = 0.0;
  double sigma = 1.0;
  double s0 = 1.0;
  double mu_prime = 0.0;
  double mu = 1.0;
};

// First grid crossing of the kind's barrier, crossing time linearly
// interpolated within the step. No bridge resampling: the diffusion
// coefficient is state-dependent, so the step bias is controlled by dt alone.
PassageSample simulate_euler(const EulerProblem& ep, const McConfig& cfg);

// States of one Euler path on the step grid (diagnostic; same stream the
// sampler uses for that path index).
std::vector<double> euler_path(const EulerProblem& ep, const McConfig& cfg,
                               std::uint64_t path_index);

// Mean of the uncensored times; std_error is the empirical sd over sqrt(n).
McEstimate sample_mean(const PassageSample& s);

// Fraction of paths with a crossing at or before t, censored paths counting
// as never crossed; exact binomial denominator n_paths.
double empirical_cdf(const PassageSample& s, double t);

}  // namespace passage
