#include "passage/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace passage {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based stream keyed by (seed, path index): the sample a path draws
// never depends on how paths are spread over workers.
struct PathRng {
  std::uint64_t state;
  double spare = 0.0;
  bool has_spare = false;

  PathRng(std::uint64_t seed, std::uint64_t path)
      : state(mix64(seed ^ mix64(path + 0x9E3779B97F4A7C15ull))) {}

  std::uint64_t bits() {
    state += 0x9E3779B97F4A7C15ull;
    return mix64(state);
  }

  // Uniform on (0, 1), never 0 or 1, so logs stay finite.
  double u01() {
    return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double r = std::sqrt(-2.0 * std::log(u01()));
    const double th = 2.0 * kPi * u01();
    spare = r * std::sin(th);
    has_spare = true;
    return r * std::cos(th);
  }
};

void validate_config(const McConfig& cfg) {
  if (cfg.n_paths < 1 || !std::isfinite(cfg.dt) || !(cfg.dt > 0.0) ||
      !std::isfinite(cfg.horizon) || cfg.horizon < cfg.dt || cfg.workers < 0) {
    throw std::invalid_argument(
        "mc: need n_paths >= 1, dt > 0, horizon >= dt, workers >= 0");
  }
}

int resolve_workers(const McConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  int cap = 8;
  if (const char* env = std::getenv("PASSAGE_LAB_THREADS")) {
    cap = std::max(1, std::atoi(env));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(hw == 0 ? 1 : static_cast<int>(hw), 1, cap);
}

// Runs fn(lo, hi) over a contiguous partition of [0, n); rethrows the first
// worker failure.
template <class Fn>
void run_partitioned(std::int64_t n, int workers, Fn&& fn) {
  const int w = static_cast<int>(std::min<std::int64_t>(workers, n));
  if (w <= 1) {
    fn(std::int64_t{0}, n);
    return;
  }
  const std::int64_t chunk = (n + w - 1) / w;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(w));
  for (int k = 0; k < w; ++k) {
    const std::int64_t lo = k * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, &errors, k, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[static_cast<size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Advances the signed distance to the line by Gaussian steps and reports
// every detected zero to on_zero(time) in increasing order; a false return
// stops the path. Same-sign steps cross with the Brownian-bridge probability
// exp(-2 d d' / step); the drift drops out of the bridge.
template <class OnZero>
void walk_distance(double d0, double b, const McConfig& cfg, PathRng& rng,
                   OnZero&& on_zero) {
  const double dt = cfg.dt;
  const auto n_full = static_cast<std::int64_t>(cfg.horizon / dt);
  const double remainder = cfg.horizon - static_cast<double>(n_full) * dt;
  const double sqrt_dt = std::sqrt(dt);
  double d = d0;
  for (std::int64_t i = 0; i <= n_full; ++i) {
    const bool last = i == n_full;
    const double step = last ? remainder : dt;
    if (!(step > 0.0)) break;
    const double t0 = static_cast<double>(i) * dt;
    const double sstep = last ? std::sqrt(step) : sqrt_dt;
    const double d2 = d + rng.gaussian() * sstep - b * step;
    double zero_time = -1.0;
    if (d2 == 0.0 || (d > 0.0) != (d2 > 0.0)) {
      zero_time = t0 + step * (d / (d - d2));
    } else if (cfg.bridge_correction) {
      if (rng.u01() < std::exp(-2.0 * d * d2 / step)) {
        zero_time =
            t0 + step * (std::abs(d) / (std::abs(d) + std::abs(d2)));
      }
    }
    d = d2;
    if (zero_time >= 0.0 &&
        !on_zero(std::min(zero_time, cfg.horizon))) {
      return;
    }
  }
}

McEstimate binomial_estimate(std::int64_t hits, std::int64_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n)),
          n};
}

struct EulerStep {
  double drift;
  double diffusion;
};

EulerStep euler_coefficients(const EulerProblem& ep, double z) {
  switch (ep.kind) {
    case EulerKind::cir:
      return {0.25, std::sqrt(std::max(z, 0.0))};
    case EulerKind::wright_fisher:
      return {0.25 - 0.5 * z, std::sqrt(std::max(z * (1.0 - z), 0.0))};
    case EulerKind::gbm:
      return {ep.r * z, ep.sigma * z};
    case EulerKind::ou:
      return {-ep.mu * z, ep.sigma};
  }
  return {0.0, 0.0};
}

double euler_barrier(const EulerProblem& ep, double t) {
  switch (ep.kind) {
    case EulerKind::cir:
    case EulerKind::wright_fisher:
      return ep.barrier;
    case EulerKind::gbm:
      return std::exp(ep.sigma * ep.s0 + ep.mu_prime * t);
    case EulerKind::ou:
      return ep.s0 * std::exp(-ep.mu * t);
  }
  return 0.0;
}

double euler_clamp(const EulerProblem& ep, double z) {
  if (ep.kind == EulerKind::wright_fisher) return std::clamp(z, 0.0, 1.0);
  return z;
}

void euler_check_state(const EulerProblem& ep, double z) {
  if (!std::isfinite(z) || (ep.kind == EulerKind::cir && z < -1.0) ||
      (ep.kind == EulerKind::gbm && z <= 0.0)) {
    throw std::runtime_error(
        "simulate_euler: state left its domain, reduce the step size");
  }
}

void validate_euler(const EulerProblem& ep) {
  switch (ep.kind) {
    case EulerKind::cir:
      if (!(ep.z >= 0.0) || !(ep.barrier >= 0.0)) {
        throw std::invalid_argument("simulate_euler: need z, barrier >= 0");
      }
      break;
    case EulerKind::wright_fisher:
      if (!(ep.z >= 0.0) || ep.z > 1.0 || !(ep.barrier >= 0.0) ||
          ep.barrier > 1.0) {
        throw std::invalid_argument(
            "simulate_euler: need z, barrier in [0, 1]");
      }
      break;
    case EulerKind::gbm:
      if (!(ep.z > 0.0) || !(ep.sigma > 0.0)) {
        throw std::invalid_argument("simulate_euler: need z > 0, sigma > 0");
      }
      break;
    case EulerKind::ou:
      if (!(ep.mu > 0.0) || !(ep.sigma > 0.0) || !(ep.s0 > ep.z)) {
        throw std::invalid_argument(
            "simulate_euler: need mu > 0, sigma > 0, s0 > z");
      }
      break;
  }
  if (ep.z == euler_barrier(ep, 0.0)) {
    throw std::invalid_argument(
        "simulate_euler: start must differ from the barrier");
  }
}

// First grid crossing of the barrier; returns the interpolated time or a
// negative value when the path is censored at the horizon.
double euler_first_crossing(const EulerProblem& ep, const McConfig& cfg,
                            PathRng& rng) {
  const double dt = cfg.dt;
  const auto n_full = static_cast<std::int64_t>(cfg.horizon / dt);
  const double remainder = cfg.horizon - static_cast<double>(n_full) * dt;
  const double sqrt_dt = std::sqrt(dt);
  double z = ep.z;
  double d = z - euler_barrier(ep, 0.0);
  for (std::int64_t i = 0; i <= n_full; ++i) {
    const bool last = i == n_full;
    const double step = last ? remainder : dt;
    if (!(step > 0.0)) break;
    const double t0 = static_cast<double>(i) * dt;
    const double sstep = last ? std::sqrt(step) : sqrt_dt;
    const EulerStep c = euler_coefficients(ep, z);
    z = euler_clamp(
        ep, z + c.drift * step + c.diffusion * rng.gaussian() * sstep);
    euler_check_state(ep, z);
    const double d2 = z - euler_barrier(ep, t0 + step);
    if (d2 == 0.0 || (d > 0.0) != (d2 > 0.0)) {
      return std::min(t0 + step * (d / (d - d2)), cfg.horizon);
    }
    d = d2;
  }
  return -1.0;
}

}  // namespace

double default_horizon(const PassageProblem& p) {
  if (p.b == 0.0) {
    const double gap = p.a - p.x;
    return 50.0 * gap * gap;
  }
  return 50.0 * first_passage_mean(p);
}

PassageSample simulate_first_passage(const PassageProblem& p,
                                     const McConfig& cfg) {
  validate_config(cfg);
  if (!std::isfinite(p.x) || !std::isfinite(p.a) || !std::isfinite(p.b) ||
      p.x == p.a) {
    throw std::invalid_argument(
        "simulate_first_passage: need finite parameters with x != a");
  }
  PassageSample out;
  out.times.resize(static_cast<size_t>(cfg.n_paths));
  out.censored.resize(static_cast<size_t>(cfg.n_paths));
  const double d0 = p.x - p.a;
  run_partitioned(cfg.n_paths, resolve_workers(cfg),
                  [&](std::int64_t lo, std::int64_t hi) {
                    for (std::int64_t i = lo; i < hi; ++i) {
                      PathRng rng(cfg.seed, static_cast<std::uint64_t>(i));
                      double hit = -1.0;
                      walk_distance(d0, p.b, cfg, rng, [&](double zt) {
                        hit = zt;
                        return false;
                      });
                      const auto k = static_cast<size_t>(i);
                      out.times[k] = hit >= 0.0 ? hit : cfg.horizon;
                      out.censored[k] = hit >= 0.0 ? 0 : 1;
                    }
                  });
  return out;
}

McEstimate estimate_no_zero_probability(double b, double s, double gap,
                                        const McConfig& cfg) {
  validate_config(cfg);
  if (!std::isfinite(b) || !std::isfinite(s) || !(s > 0.0) ||
      !std::isfinite(gap) || gap < 0.0) {
    throw std::invalid_argument(
        "estimate_no_zero_probability: need finite b, s > 0, gap >= 0");
  }
  if (gap == 0.0) return {1.0, 0.0, cfg.n_paths};
  McConfig run = cfg;
  run.horizon = s + gap;
  std::atomic<std::int64_t> clear{0};
  run_partitioned(run.n_paths, resolve_workers(run),
                  [&](std::int64_t lo, std::int64_t hi) {
                    std::int64_t local = 0;
                    for (std::int64_t i = lo; i < hi; ++i) {
                      PathRng rng(run.seed, static_cast<std::uint64_t>(i));
                      bool zero_inside = false;
                      walk_distance(0.0, b, run, rng, [&](double zt) {
                        if (zt > s && zt < s + gap) {
                          zero_inside = true;
                          return false;
                        }
                        return true;
                      });
                      if (!zero_inside) ++local;
                    }
                    clear.fetch_add(local, std::memory_order_relaxed);
                  });
  return binomial_estimate(clear.load(), run.n_paths);
}

McEstimate estimate_last_passage_cdf(double b, double t, double u,
                                     const McConfig& cfg) {
  validate_config(cfg);
  if (!std::isfinite(b) || !std::isfinite(t) || !std::isfinite(u) ||
      !(u > 0.0) || !(u < t)) {
    throw std::invalid_argument(
        "estimate_last_passage_cdf: need finite b and 0 < u < t");
  }
  McConfig run = cfg;
  run.horizon = t;
  std::atomic<std::int64_t> early{0};
  run_partitioned(run.n_paths, resolve_workers(run),
                  [&](std::int64_t lo, std::int64_t hi) {
                    std::int64_t local = 0;
                    for (std::int64_t i = lo; i < hi; ++i) {
                      PathRng rng(run.seed, static_cast<std::uint64_t>(i));
                      double last_zero = 0.0;
                      walk_distance(0.0, b, run, rng, [&](double zt) {
                        last_zero = zt;
                        return true;
                      });
                      if (last_zero <= u) ++local;
                    }
                    early.fetch_add(local, std::memory_order_relaxed);
                  });
  return binomial_estimate(early.load(), run.n_paths);
}

PassageSample simulate_euler(const EulerProblem& ep, const McConfig& cfg) {
  validate_config(cfg);
  validate_euler(ep);
  PassageSample out;
  out.times.resize(static_cast<size_t>(cfg.n_paths));
  out.censored.resize(static_cast<size_t>(cfg.n_paths));
  run_partitioned(cfg.n_paths, resolve_workers(cfg),
                  [&](std::int64_t lo, std::int64_t hi) {
                    for (std::int64_t i = lo; i < hi; ++i) {
                      PathRng rng(cfg.seed, static_cast<std::uint64_t>(i));
                      const double hit = euler_first_crossing(ep, cfg, rng);
                      const auto k = static_cast<size_t>(i);
                      out.times[k] = hit >= 0.0 ? hit : cfg.horizon;
                      out.censored[k] = hit >= 0.0 ? 0 : 1;
                    }
                  });
  return out;
}

std::vector<double> euler_path(const EulerProblem& ep, const McConfig& cfg,
                               std::uint64_t path_index) {
  validate_config(cfg);
  validate_euler(ep);
  const double dt = cfg.dt;
  const auto n_full = static_cast<std::int64_t>(cfg.horizon / dt);
  const double remainder = cfg.horizon - static_cast<double>(n_full) * dt;
  const double sqrt_dt = std::sqrt(dt);
  PathRng rng(cfg.seed, path_index);
  std::vector<double> states;
  states.reserve(static_cast<size_t>(n_full) + 2);
  double z = ep.z;
  states.push_back(z);
  for (std::int64_t i = 0; i <= n_full; ++i) {
    const bool last = i == n_full;
    const double step = last ? remainder : dt;
    if (!(step > 0.0)) break;
    const double sstep = last ? std::sqrt(step) : sqrt_dt;
    const EulerStep c = euler_coefficients(ep, z);
    z = euler_clamp(
        ep, z + c.drift * step + c.diffusion * rng.gaussian() * sstep);
    euler_check_state(ep, z);
    states.push_back(z);
  }
  return states;
}

McEstimate sample_mean(const PassageSample& s) {
  double sum = 0.0;
  std::int64_t m = 0;
  for (size_t i = 0; i < s.times.size(); ++i) {
    if (!s.censored[i]) {
      sum += s.times[i];
      ++m;
    }
  }
  if (m == 0) return {0.0, 0.0, 0};
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (size_t i = 0; i < s.times.size(); ++i) {
    if (!s.censored[i]) {
      const double d = s.times[i] - mean;
      ss += d * d;
    }
  }
  const double var =
      m > 1 ? ss / static_cast<double>(m - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(m)), m};
}

double empirical_cdf(const PassageSample& s, double t) {
  std::int64_t hits = 0;
  for (size_t i = 0; i < s.times.size(); ++i) {
    if (!s.censored[i] && s.times[i] <= t) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(s.times.size());
}

}  // namespace passage
