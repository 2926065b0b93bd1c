#pragma once

#include <functional>
#include <stdexcept>

namespace passage {

// Quadrature request. Integrands may blow up like (t - endpoint)^{-1/2} at a
// declared singular endpoint; the engine removes declared singularities by
// substitution before any subdivision happens.
struct QuadSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  int max_subdivisions = 400;
  bool singular_left = false;
  bool singular_right = false;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

// Thrown by operations that need a converged integral and did not get one.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi(z) = e^{-z^2/2} / sqrt(2 pi)
double std_normal_pdf(double z);

// Phi(z), accurate to ~1e-15 relative via the complementary error function.
double std_normal_cdf(double z);

// log Phi(z), finite for all double z; stable where Phi itself underflows.
double std_normal_cdf_log(double z);

// Adaptive Gauss-Kronrod 15(7) integration of f over (lo, hi); hi may be
// +infinity. Endpoints are never evaluated. Non-convergence is reported in
// the result, never returned as a silently wrong number.
QuadResult integrate(const std::function<double(double)>& f, double lo,
                     double hi, const QuadSpec& spec = {});

}  // namespace passage
