#include "passage/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <vector>

#include "passage/figures.hpp"
#include "passage/linear_passage.hpp"
#include "passage/mc.hpp"
#include "passage/successive.hpp"
#include "passage/transforms.hpp"

namespace passage {
namespace {

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] =
        lo * std::exp(ratio * static_cast<double>(i) / (n - 1));
  }
  return g;
}

// Quantile of the crossing-time law by bisection on the distribution
// function; valid whenever q is below the total crossing mass.
double invert_passage_cdf(const PassageProblem& p, double q) {
  double lo = 0.0;
  double hi = 1.0;
  while (first_passage_cdf(p, hi) < q) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("quantile out of reach");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (first_passage_cdf(p, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Sample median with censored entries pushed to +infinity, so the estimate
// is valid as long as more than half of the paths crossed.
double censored_median(const PassageSample& s) {
  std::vector<double> v(s.times.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = s.censored[i] ? std::numeric_limits<double>::infinity()
                         : s.times[i];
  }
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double binom_se(double q, std::int64_t n) {
  return std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

}  // namespace

CheckResult check_last_zero_two_routes(const QuadSpec& spec) {
  // Fifty probe points: a closed form for the last-zero density against an
  // independent quadrature of the same law.
  const double slopes[] = {-2.0, -1.0, -0.5, 0.0};
  const double times[] = {0.5, 1.0, 2.0, 5.0};
  const double fracs[] = {0.2, 0.5, 0.8};
  double worst = 0.0;
  int points = 0;
  for (double b : slopes) {
    for (double t : times) {
      for (double f : fracs) {
        const double u = f * t;
        worst = std::max(
            worst, std::abs(last_passage_density(b, t, u) -
                            last_passage_density_integral(b, t, u, spec)));
        ++points;
      }
    }
  }
  for (double f : {0.35, 0.65}) {
    worst = std::max(worst,
                     std::abs(last_passage_density(-2.0, 1.0, f) -
                              last_passage_density_integral(-2.0, 1.0, f, spec)));
    ++points;
  }
  return {"last-zero density two-route agreement", worst <= 1e-6,
          fmt("max |closed - quadrature| = %.3g over %d points (tol 1e-6)",
              worst, points)};
}

CheckResult check_arcsine_pointwise() {
  // Zero slope collapses the last-zero density to the arcsine law.
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    for (int k = 1; k <= 11; ++k) {
      const double u = t * static_cast<double>(k) / 12.0;
      const double arcsine = 1.0 / (M_PI * std::sqrt(u * (t - u)));
      worst = std::max(worst, std::abs(last_passage_density(0.0, t, u) -
                                       arcsine));
    }
  }
  return {"driftless last-zero arcsine form", worst <= 1e-12,
          fmt("max |density - arcsine| = %.3g over 44 points (tol 1e-12)",
              worst)};
}

CheckResult check_no_zero_limit() {
  // For a huge gap the zero-free probability converges to the probability
  // of never returning, 2 (Phi(|b| sqrt(s)) - 1/2) at s = 1.
  double worst = 0.0;
  for (double b : {-2.0, -1.0, -0.5}) {
    const double limit = 2.0 * (std_normal_cdf(std::abs(b)) - 0.5);
    worst = std::max(worst,
                     std::abs(no_zero_probability(b, 1.0, 1e6) - limit));
  }
  return {"zero-free probability long-gap limit", worst <= 1e-3,
          fmt("max |P(gap 1e6) - no-return limit| = %.3g (tol 1e-3)", worst)};
}

CheckResult check_defect_consistency(const QuadSpec& spec) {
  // The waiting-time density must integrate to exactly one minus the defect
  // computed by the direct double integral.
  double worst = 0.0;
  double worst_b = 0.0;
  for (double b : {-2.0, -1.0, -0.5, -0.1}) {
    const PassageProblem p{0.0, 1.0, b};
    // Density mass beyond the horizon decays like e^{-b^2 t / 2}.
    const double horizon = std::max(50.0, 40.0 / (b * b));
    QuadSpec outer = spec;
    outer.singular_left = true;
    const auto r = integrate(
        [&](double t) { return t <= 0.0 ? 0.0 : t2_density(p, t, spec); },
        0.0, horizon, outer);
    if (!r.converged) {
      return {"waiting-time defect consistency", false,
              fmt("density integral did not converge at b = %g", b)};
    }
    const double diff = std::abs((1.0 - r.value) - t2_defect(p, spec));
    if (diff > worst) {
      worst = diff;
      worst_b = b;
    }
  }
  return {"waiting-time defect consistency", worst <= 1e-3,
          fmt("max |1 - mass - defect| = %.3g at b = %g (tol 1e-3)", worst,
              worst_b)};
}

CheckResult check_defect_bound_curve(const QuadSpec& spec) {
  // Across b in [-3, 0]: the defect sits below its convexity bound, both
  // vanish at zero slope, the defect decreases toward zero slope, and the
  // bound at b = -3 matches 2 (Phi(sqrt(3)) - 1/2).
  const Table fig = figure_data(1, spec);
  double worst_gap = -1.0;
  double worst_mono = -1.0;
  for (std::size_t i = 0; i < fig.rows.size(); ++i) {
    const double defect = fig.rows[i][1];
    const double gamma = fig.rows[i][2];
    worst_gap = std::max(worst_gap, defect - gamma);
    if (i + 1 < fig.rows.size()) {
      worst_mono = std::max(worst_mono, fig.rows[i + 1][1] - defect);
    }
  }
  const double at_zero = std::max(std::abs(fig.rows.back()[1]),
                                  std::abs(fig.rows.back()[2]));
  const double gamma3 = fig.rows.front()[2];
  const double gamma3_ref = 2.0 * (std_normal_cdf(std::sqrt(3.0)) - 0.5);
  const bool pass = fig.rows.size() == 31 && worst_gap <= 1e-12 &&
                    worst_mono <= 1e-9 && at_zero <= 1e-9 &&
                    std::abs(gamma3 - gamma3_ref) <= 1e-12 &&
                    std::abs(gamma3 - 0.9167) <= 1e-4;
  return {"defect bound curve", pass,
          fmt("bound(-3) = %.6f, max(defect - bound) = %.2g, "
              "max monotonicity violation = %.2g, value at 0 = %.2g",
              gamma3, worst_gap, worst_mono, at_zero)};
}

CheckResult check_driftless_masses(const QuadSpec& spec) {
  // Zero slope: both laws are proper. The waiting-time tail beyond the
  // horizon is closed through the distribution function; the second-passage
  // tail through a log-corrected t^{-3/2} fit over the last decade.
  const PassageProblem p{0.0, 1.0, 0.0};
  const double horizon = 1e6;
  QuadSpec outer = spec;
  outer.singular_left = true;
  QuadSpec inner = spec;
  inner.abs_tol = 1e-12;
  inner.rel_tol = 1e-10;
  const auto gap_mass = integrate(
      [&](double t) { return t <= 0.0 ? 0.0 : t2_density(p, t, inner); },
      0.0, horizon, outer);
  const double gap_total =
      gap_mass.value + (1.0 - t2_cdf(p, horizon, spec));

  const auto second_mass = integrate(
      [&](double t) { return t <= 0.0 ? 0.0 : tau2_density(p, t, spec); },
      0.0, horizon, spec);
  const double c_end = tau2_density(p, horizon, spec) * horizon *
                       std::sqrt(horizon);
  const double c_prev = tau2_density(p, horizon / 10, spec) *
                        (horizon / 10) * std::sqrt(horizon / 10);
  const double beta = (c_end - c_prev) / std::log(10.0);
  const double second_total =
      second_mass.value + (2.0 * c_end + 4.0 * beta) / std::sqrt(horizon);

  const bool pass = gap_mass.converged && second_mass.converged &&
                    std::abs(gap_total - 1.0) <= 5e-3 &&
                    std::abs(second_total - 1.0) <= 5e-3;
  return {"driftless unit masses", pass,
          fmt("waiting-time mass = %.6f (cdf tail), second-passage mass = "
              "%.6f (fitted tail), tol 5e-3",
              gap_total, second_total)};
}

CheckResult check_singular_head(const QuadSpec& spec) {
  // sqrt(t) f(t) approaches a positive constant at small times; the scaled
  // values across four decades must agree to a few percent.
  const PassageProblem p{0.0, 1.0, 0.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double t : {1e-4, 1e-6, 1e-8}) {
    const double r = std::sqrt(t) * t2_density(p, t, spec);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double spread = hi / lo - 1.0;
  return {"waiting-time square-root head", spread < 0.05,
          fmt("sqrt(t) f(t) in [%.6f, %.6f] across t = 1e-4..1e-8, "
              "spread %.2f%% (tol 5%%)",
              lo, hi, 100.0 * spread)};
}

CheckResult check_recursion_vs_closed_form(const QuadSpec& spec) {
  // The generic n-step recursion at n = 2 must reproduce the closed-form
  // second-passage density.
  const PassageProblem p{0.0, 1.0, 0.0};
  const auto grid = log_grid(0.05, 50.0, 400);
  const auto law = nth_passage_law(p, 2, grid, spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, std::abs(law.density.values[i] -
                                     tau2_density(p, grid[i], spec)));
  }
  return {"second-passage recursion vs closed form", worst <= 1e-4,
          fmt("sup |recursion - closed| = %.3g over 400 log points on "
              "[0.05, 50] (tol 1e-4)",
              worst)};
}

CheckResult check_divergent_mean(const QuadSpec& spec) {
  // The waiting-time mean diverges, so the truncated mean must keep
  // growing: two decades of horizon should multiply it several times over.
  const PassageProblem p{0.0, 1.0, 0.0};
  const double m_low = t2_partial_mean(p, 1e2, spec);
  const double m_high = t2_partial_mean(p, 1e4, spec);
  const double ratio = m_high / m_low;
  return {"waiting-time divergent mean", ratio >= 5.0,
          fmt("truncated mean grows %.2fx from horizon 1e2 to 1e4 "
              "(requires >= 5x)",
              ratio)};
}

namespace {

// Highest tabulated value of each density column of a figure table.
std::vector<double> column_peaks(const Table& fig) {
  std::vector<double> peaks(fig.columns.size() - 1, 0.0);
  for (const auto& row : fig.rows) {
    for (std::size_t j = 1; j < row.size(); ++j) {
      peaks[j - 1] = std::max(peaks[j - 1], row[j]);
    }
  }
  return peaks;
}

}  // namespace

CheckResult check_peak_ordering(const QuadSpec& spec) {
  // Second-passage density peaks decrease as the slope rises from -2 to 0.
  const auto peaks = column_peaks(figure_data(3, spec));
  const bool pass = peaks[0] > peaks[1] && peaks[1] > peaks[2] &&
                    peaks[2] > peaks[3];
  return {"second-passage peak ordering", pass,
          fmt("peaks %.4f > %.4f > %.4f > %.4f for b = -2, -1, -0.5, 0",
              peaks[0], peaks[1], peaks[2], peaks[3])};
}

CheckResult check_peak_dominance(const QuadSpec& spec) {
  // Claimed: at zero slope the second-passage peak exceeds the single
  // crossing peak. The computed peaks order the other way; kept as a check
  // so the discrepancy stays visible.
  const auto peaks = column_peaks(figure_data(4, spec));
  return {"second-passage peak dominance", peaks[0] > peaks[1],
          fmt("second-passage peak %.6f vs single-passage peak %.6f",
              peaks[0], peaks[1])};
}

CheckResult check_bridge_single_step(std::uint64_t seed, std::int64_t paths) {
  // One step spanning the whole horizon: with the bridge correction the
  // crossing probability is exact in distribution, 2 (1 - Phi(1)); without
  // it only endpoint crossings count, 1 - Phi(1).
  const PassageProblem p{0.0, 1.0, 0.0};
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = 1.0;
  cfg.horizon = 1.0;
  cfg.seed = seed;
  const auto count_hits = [&](bool bridge) {
    McConfig c = cfg;
    c.bridge_correction = bridge;
    const auto s = simulate_first_passage(p, c);
    std::int64_t hits = 0;
    for (auto flag : s.censored) hits += flag ? 0 : 1;
    return static_cast<double>(hits) / static_cast<double>(paths);
  };
  const double with_bridge = count_hits(true);
  const double without = count_hits(false);
  const double exact_with = 2.0 * (1.0 - std_normal_cdf(1.0));
  const double exact_without = 1.0 - std_normal_cdf(1.0);
  const double band_with = 3.0 * binom_se(exact_with, paths);
  const double band_without = 3.0 * binom_se(exact_without, paths);
  const bool pass = std::abs(with_bridge - exact_with) <= band_with &&
                    std::abs(without - exact_without) <= band_without &&
                    without < with_bridge;
  return {"single-step bridge exactness", pass,
          fmt("P(cross) = %.4f vs %.4f exact with bridge, %.4f vs %.4f "
              "without (3 SE bands %.4f / %.4f)",
              with_bridge, exact_with, without, exact_without, band_with,
              band_without)};
}

CheckResult check_zero_free_interval_mc(std::uint64_t seed,
                                        std::int64_t paths) {
  // Driftless zero-free probability on (s, 4s) is exactly 1/3.
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = 1e-3;
  cfg.seed = seed;
  const auto est = estimate_no_zero_probability(0.0, 0.25, 0.75, cfg);
  const double dev = std::abs(est.value - 1.0 / 3.0);
  const double band = 3.0 * est.std_error;
  return {"zero-free interval frequency", dev <= band,
          fmt("P(no zero in (0.25, 1)) = %.5f vs 1/3, |dev| = %.5f, "
              "3 SE = %.5f",
              est.value, dev, band)};
}

CheckResult check_crossing_law_mc(std::uint64_t seed, std::int64_t paths) {
  // Unit drift toward a unit barrier: simulated crossing times must match
  // the inverse Gaussian law at every decile and in the mean.
  const PassageProblem p{0.0, 1.0, -1.0};
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = 1e-3;
  cfg.horizon = default_horizon(p);
  cfg.seed = seed;
  const auto sample = simulate_first_passage(p, cfg);
  std::int64_t censored = 0;
  for (auto flag : sample.censored) censored += flag ? 1 : 0;

  double worst_ratio = 0.0;
  double worst_q = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double q = static_cast<double>(k) / 10.0;
    const double t_q = invert_passage_cdf(p, q);
    const double dev = std::abs(empirical_cdf(sample, t_q) - q);
    const double ratio = dev / (3.0 * binom_se(q, paths));
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_q = q;
    }
  }
  const auto mean = sample_mean(sample);
  const double mean_dev = std::abs(mean.value - 1.0);
  const double mean_band = 3.0 * mean.std_error;
  const bool pass =
      worst_ratio <= 1.0 && mean_dev <= mean_band && censored <= paths / 1000;
  return {"drifted crossing-time law", pass,
          fmt("worst decile dev = %.2f of its 3 SE band (at q = %.1f), "
              "mean = %.4f vs 1 (3 SE = %.4f), censored %lld",
              worst_ratio, worst_q, mean.value, mean_band,
              static_cast<long long>(censored))};
}

CheckResult check_conjugation_pathwise() {
  // Drive a random walk through the square-root map both ways: state and
  // first barrier crossing must agree between the transformed walk and the
  // closed-form image (y^2 / 4 against barrier level v(1) = 2).
  const Conjugation c = cir_conjugation();
  std::mt19937_64 rng(20260819);
  std::normal_distribution<double> gauss;
  const double dt = 2.5e-4;
  const double sdt = std::sqrt(dt);
  double worst = std::abs(c.v_inverse(c.v(0.25)) - 0.25);
  worst = std::max(worst, std::abs(c.v(1.0) - 2.0));
  int crossings = 0;
  for (int path = 0; path < 10; ++path) {
    double y = c.v(0.25);
    int hit_y = -1;
    int hit_z = -1;
    for (int k = 0; k < 4000; ++k) {
      y += gauss(rng) * sdt;
      const double z = c.v_inverse(std::max(y, 0.0));
      worst = std::max(worst, std::abs(z - std::max(y, 0.0) *
                                               std::max(y, 0.0) / 4.0));
      if (hit_y < 0 && y >= 2.0) hit_y = k;
      if (hit_z < 0 && z >= 1.0) hit_z = k;
    }
    if (hit_y != hit_z) {
      return {"square-root conjugation pathwise", false,
              fmt("crossing step mismatch on path %d: %d vs %d", path, hit_y,
                  hit_z)};
    }
    if (hit_y >= 0) ++crossings;
  }
  return {"square-root conjugation pathwise", worst <= 1e-12 && crossings > 0,
          fmt("max pathwise |transformed - closed| = %.3g over 40000 steps, "
              "%d/10 paths crossed at identical steps (tol 1e-12)",
              worst, crossings)};
}

namespace {

// The square-root diffusion is the squared image walk over four: it reaches
// the barrier 1 from z = 1/4 exactly when the image walk, a unit Brownian
// motion from 1, leaves (-2, 2). Median of that exit time by two independent
// series (spectral and reflection), frozen to double precision.
constexpr double kSqrtExitMedian = 1.9164448390953898;

PassageSample run_cir_euler(std::uint64_t seed, std::int64_t paths,
                            double dt) {
  EulerProblem ep;
  ep.kind = EulerKind::cir;
  ep.z = 0.25;
  ep.barrier = 1.0;
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = dt;
  cfg.horizon = 8.0;
  cfg.seed = seed;
  return simulate_euler(ep, cfg);
}

}  // namespace

CheckResult check_cir_euler_exit_law(std::uint64_t seed, std::int64_t paths,
                                     double dt, double bias_allowance) {
  // Validates the Euler sampler against the true law of its own SDE: the
  // empirical distribution at the exact two-sided exit median must sit at
  // one half, up to sampling noise and the quoted grid-crossing allowance.
  const auto sample = run_cir_euler(seed, paths, dt);
  const double at_median = empirical_cdf(sample, kSqrtExitMedian);
  const double dev = std::abs(at_median - 0.5);
  const double band = 3.0 * binom_se(0.5, paths) + bias_allowance;
  return {"square-root process Euler exit law", dev <= band,
          fmt("ECDF at exit median %.4f is %.4f vs 0.5 (band %.4f), sample "
              "median %.4f, dt = %g",
              kSqrtExitMedian, at_median, band, censored_median(sample), dt)};
}

CheckResult check_cir_euler_claimed_median(std::uint64_t seed,
                                           std::int64_t paths, double dt) {
  // The one-sided restatement maps the problem to Brownian motion from 1 to
  // 2, median 2.1981...; the simulated process also reaches the barrier
  // through the fold of the square map at zero, so its median is the
  // two-sided exit value and this comparison overshoots.
  const auto sample = run_cir_euler(seed, paths, dt);
  std::int64_t censored = 0;
  for (auto flag : sample.censored) censored += flag ? 1 : 0;
  if (censored * 2 >= paths) {
    return {"square-root Euler vs one-sided median", false,
            fmt("median undefined: %lld of %lld paths censored",
                static_cast<long long>(censored),
                static_cast<long long>(paths))};
  }
  const double median = censored_median(sample);
  const double claimed = 2.198109338317732;
  const double rel = std::abs(median - claimed) / claimed;
  return {"square-root Euler vs one-sided median", rel <= 0.05,
          fmt("median = %.4f vs %.4f claimed, rel dev %.2f%% (tol 5%%); "
              "true two-sided exit median is %.4f, dt = %g",
              median, claimed, 100.0 * rel, kSqrtExitMedian, dt)};
}

CheckResult check_ou_euler_deciles(std::uint64_t seed, std::int64_t paths,
                                   double dt, double bias_allowance) {
  // Euler walk of the mean-reverting process from 0 toward the decaying
  // barrier e^{-t}; the exact law is the driftless Brownian crossing law
  // pushed through the clock inverse log(1 + u) / 2. Grid-point crossing
  // detection runs late by about 0.5 sqrt(dt) in distribution, which the
  // caller covers through bias_allowance.
  EulerProblem ep;
  ep.kind = EulerKind::ou;
  ep.z = 0.0;
  ep.s0 = 1.0;
  ep.mu = 1.0;
  ep.sigma = std::sqrt(2.0);
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = dt;
  cfg.horizon = 5.0;
  cfg.seed = seed;
  const auto sample = simulate_euler(ep, cfg);

  const auto reduced = reduce_ou(ep.z, ep.mu, ep.sigma, ep.s0);
  double worst_ratio = 0.0;
  double worst_q = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double q = static_cast<double>(k) / 10.0;
    const double s_q = invert_passage_cdf(reduced.bm_problem, q);
    const double t_q = reduced.time_map.rho_inverse(s_q);
    const double dev = std::abs(empirical_cdf(sample, t_q) - q);
    const double ratio = dev / (3.0 * binom_se(q, paths) + bias_allowance);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_q = q;
    }
  }
  return {"mean-reverting process Euler deciles", worst_ratio <= 1.0,
          fmt("worst decile dev = %.2f of its band (at q = %.1f), "
              "dt = %g, allowance = %g",
              worst_ratio, worst_q, dt, bias_allowance)};
}

std::vector<CheckResult> analytic_checks(const QuadSpec& spec) {
  return {check_last_zero_two_routes(spec),
          check_arcsine_pointwise(),
          check_no_zero_limit(),
          check_defect_consistency(spec),
          check_defect_bound_curve(spec),
          check_driftless_masses(spec),
          check_singular_head(spec),
          check_recursion_vs_closed_form(spec),
          check_divergent_mean(spec),
          check_peak_ordering(spec)};
}

std::vector<CheckResult> mc_checks(std::uint64_t seed, std::int64_t paths) {
  const std::int64_t euler_floor = 1000;
  // Step size balances runtime against bias; the sqrt(dt) allowance keeps
  // the Euler bands honest no matter how far `paths` shrinks the noise.
  const double kEulerCheckDt = 2e-4;
  const double kEulerCheckAllowance = std::sqrt(kEulerCheckDt);
  return {check_bridge_single_step(seed, paths),
          check_zero_free_interval_mc(seed, paths),
          check_crossing_law_mc(seed, paths),
          check_conjugation_pathwise(),
          check_cir_euler_exit_law(seed, std::max(paths / 4, euler_floor),
                                   kEulerCheckDt, kEulerCheckAllowance),
          check_ou_euler_deciles(seed, std::max(paths / 2, euler_floor),
                                 kEulerCheckDt, kEulerCheckAllowance)};
}

}  // namespace passage
