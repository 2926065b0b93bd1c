#include "passage/figures.hpp"

#include <stdexcept>

#include "passage/successive.hpp"

namespace passage {

namespace {

std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  return g;
}

constexpr double kTLow = 0.02;
constexpr double kTHigh = 3.0;
constexpr int kTPoints = 150;

}  // namespace

Table figure_data(int figure, const QuadSpec& spec) {
  Table out;
  switch (figure) {
    case 1: {
      out.columns = {"b", "defect", "gamma"};
      for (int i = 0; i <= 30; ++i) {
        const double b = static_cast<double>(i - 30) / 10.0;
        const PassageProblem p{0.0, 1.0, b};
        out.rows.push_back({b, t2_defect(p, spec), jensen_bound(p)});
      }
      break;
    }
    case 2: {
      out.columns = {"t", "f_T2(b=0)", "f_T2(b=-0.5)", "f_T2(b=-1)"};
      for (double t : linear_grid(kTLow, kTHigh, kTPoints)) {
        out.rows.push_back({t, t2_density({0.0, 1.0, 0.0}, t, spec),
                            t2_density({0.0, 1.0, -0.5}, t, spec),
                            t2_density({0.0, 1.0, -1.0}, t, spec)});
      }
      break;
    }
    case 3: {
      out.columns = {"t", "f_tau2(b=-2)", "f_tau2(b=-1)", "f_tau2(b=-0.5)",
                     "f_tau2(b=0)"};
      for (double t : linear_grid(kTLow, kTHigh, kTPoints)) {
        out.rows.push_back({t, tau2_density({0.0, 1.0, -2.0}, t, spec),
                            tau2_density({0.0, 1.0, -1.0}, t, spec),
                            tau2_density({0.0, 1.0, -0.5}, t, spec),
                            tau2_density({0.0, 1.0, 0.0}, t, spec)});
      }
      break;
    }
    case 4: {
      out.columns = {"t", "f_tau2", "f_IG"};
      const PassageProblem p{0.0, 1.0, 0.0};
      for (double t : linear_grid(kTLow, kTHigh, kTPoints)) {
        out.rows.push_back(
            {t, tau2_density(p, t, spec), first_passage_density(p, t)});
      }
      break;
    }
    default:
      throw std::invalid_argument("figure_data: figure must be 1, 2, 3 or 4");
  }
  return out;
}

}  // namespace passage
