#include "passage/cli_app.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <utility>

#include "CLI11.hpp"
#include "passage/csv.hpp"
#include "passage/figures.hpp"
#include "passage/linear_passage.hpp"
#include "passage/numerics.hpp"
#include "passage/successive.hpp"
#include "passage/transforms.hpp"
#include "passage/verify.hpp"

namespace passage {
namespace {

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "passage_cli";
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

// Left-open evaluation grid: densities may be singular or undefined at 0.
std::vector<double> density_grid(double tmin, double tmax, int points) {
  if (!(tmin >= 0.0) || !(tmax > tmin)) {
    throw std::invalid_argument("need 0 <= tmin < tmax");
  }
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 1; k <= points; ++k) {
    g[static_cast<std::size_t>(k - 1)] =
        tmin + (tmax - tmin) * static_cast<double>(k) /
                   static_cast<double>(points);
  }
  return g;
}

int emit_table(const Table& table, const RunManifest& manifest,
               const std::string& output, std::ostream& out,
               std::ostream& err) {
  if (output.empty()) {
    write_csv(out, manifest, table);
    return 0;
  }
  std::ofstream file(output);
  if (!file) {
    err << "error: cannot open " << output << " for writing\n";
    return 2;
  }
  write_csv(file, manifest, table);
  out << "wrote " << table.rows.size() << " rows to " << output << "\n";
  return 0;
}

struct DensityArgs {
  std::string kind;
  double x = 0.0;
  double a = 1.0;
  double b = 0.0;
  double t = 1.0;
  int n = 3;
  double tmin = 0.0;
  double tmax = 5.0;
  int points = 200;
  std::string output;
};

int run_density(const DensityArgs& d, const RunManifest& base,
                std::ostream& out, std::ostream& err) {
  const PassageProblem p{d.x, d.a, d.b};
  RunManifest manifest = base;
  manifest.parameters = {{"kind", d.kind},
                         {"x", format_number(d.x)},
                         {"a", format_number(d.a)},
                         {"b", format_number(d.b)}};
  Table table;
  if (d.kind == "psi") {
    if (!(d.t > 0.0)) throw std::invalid_argument("psi needs --t > 0");
    manifest.parameters.emplace_back("t", format_number(d.t));
    manifest.parameters.emplace_back("points", std::to_string(d.points));
    table.columns = {"u", "density"};
    for (int k = 1; k <= d.points; ++k) {
      const double u =
          d.t * static_cast<double>(k) / static_cast<double>(d.points + 1);
      table.rows.push_back({u, last_passage_density(d.b, d.t, u)});
    }
    return emit_table(table, manifest, d.output, out, err);
  }

  manifest.parameters.emplace_back("tmin", format_number(d.tmin));
  manifest.parameters.emplace_back("tmax", format_number(d.tmax));
  manifest.parameters.emplace_back("points", std::to_string(d.points));
  const auto grid = density_grid(d.tmin, d.tmax, d.points);
  if (d.kind == "tau1") {
    table.columns = {"t", "density", "cdf"};
    for (double t : grid) {
      table.rows.push_back(
          {t, first_passage_density(p, t), first_passage_cdf(p, t)});
    }
  } else if (d.kind == "t2") {
    table.columns = {"t", "density"};
    for (double t : grid) table.rows.push_back({t, t2_density(p, t)});
  } else if (d.kind == "tau2") {
    table.columns = {"t", "density"};
    for (double t : grid) table.rows.push_back({t, tau2_density(p, t)});
  } else {
    manifest.parameters.emplace_back("n", std::to_string(d.n));
    const auto law = nth_passage_law(p, d.n, grid);
    manifest.parameters.emplace_back("atom",
                                     format_number(law.atom_at_infinity));
    table.columns = {"t", "density"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      table.rows.push_back({grid[i], law.density.values[i]});
    }
  }
  return emit_table(table, manifest, d.output, out, err);
}

struct ReduceArgs {
  std::string process;
  double z = 0.25;
  double barrier = 1.0;
  double r = 0.0;
  double sigma = 1.0;
  double s0 = 1.0;
  double mu_prime = 0.0;
  double mu = 1.0;
  bool emit_density = false;
  int n = 1;
  double tmin = 0.0;
  double tmax = 5.0;
  int points = 200;
  std::string output;
};

int run_reduce(const ReduceArgs& a, const RunManifest& base,
               std::ostream& out, std::ostream& err) {
  ReducedProblem red;
  RunManifest manifest = base;
  manifest.parameters = {{"process", a.process},
                         {"z", format_number(a.z)}};
  if (a.process == "cir" || a.process == "wf") {
    red = reduce_conjugated(a.process == "cir"
                                ? ConjugationKind::cir
                                : ConjugationKind::wright_fisher,
                            a.z, a.barrier);
    manifest.parameters.emplace_back("barrier", format_number(a.barrier));
  } else if (a.process == "gbm") {
    red = reduce_gbm(a.z, a.r, a.sigma, a.s0, a.mu_prime);
    manifest.parameters.emplace_back("r", format_number(a.r));
    manifest.parameters.emplace_back("sigma", format_number(a.sigma));
    manifest.parameters.emplace_back("s0", format_number(a.s0));
    manifest.parameters.emplace_back("muprime", format_number(a.mu_prime));
  } else {
    red = reduce_ou(a.z, a.mu, a.sigma, a.s0);
    manifest.parameters.emplace_back("mu", format_number(a.mu));
    manifest.parameters.emplace_back("sigma", format_number(a.sigma));
    manifest.parameters.emplace_back("s0", format_number(a.s0));
  }

  out << red.description << "\n";
  out << "brownian problem: x = " << format_number(red.bm_problem.x)
      << ", a = " << format_number(red.bm_problem.a)
      << ", b = " << format_number(red.bm_problem.b) << "\n";
  if (a.process == "ou") {
    out << "clock: rho(t) = " << format_number(0.5 * a.sigma * a.sigma / a.mu)
        << " (e^{" << format_number(2.0 * a.mu) << " t} - 1)\n";
  } else {
    out << "clock: identity\n";
  }
  out << "recurrent: " << (recurrent(red.bm_problem) ? "yes" : "no") << "\n";

  if (!a.emit_density) return 0;
  manifest.parameters.emplace_back("n", std::to_string(a.n));
  const auto grid = density_grid(a.tmin, a.tmax, a.points);
  const auto law = pushforward_law(red, a.n, grid);
  manifest.parameters.emplace_back("atom",
                                   format_number(law.atom_at_infinity));
  manifest.parameters.emplace_back("tmin", format_number(a.tmin));
  manifest.parameters.emplace_back("tmax", format_number(a.tmax));
  manifest.parameters.emplace_back("points", std::to_string(a.points));
  Table table;
  table.columns = {"t", "density"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.rows.push_back({grid[i], law.density.values[i]});
  }
  return emit_table(table, manifest, a.output, out, err);
}

int run_verify(const std::string& suite, std::uint64_t seed,
               std::int64_t paths, std::ostream& out) {
  std::vector<CheckResult> results;
  if (suite != "mc") {
    for (auto& r : analytic_checks()) results.push_back(std::move(r));
  }
  if (suite != "analytic") {
    for (auto& r : mc_checks(seed, paths)) results.push_back(std::move(r));
  }
  int failed = 0;
  for (const auto& r : results) {
    failed += r.pass ? 0 : 1;
    out << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(44)
        << r.name << r.detail << "\n";
  }
  out << results.size() - static_cast<std::size_t>(failed) << " of "
      << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "exact and simulated passage-time laws for Brownian motion "
      "crossing a linear barrier"};
  app.name("passage_cli");
  app.set_version_flag("--version", library_version());
  app.require_subcommand(0, 1);

  DensityArgs d;
  auto* density =
      app.add_subcommand("density", "tabulate a passage-time law as CSV");
  density->add_option("--kind", d.kind,
                      "law to tabulate: tau1 (first passage), psi (last "
                      "zero at fixed t), t2 (waiting time), tau2 (second "
                      "passage), taun (n-th passage)")
      ->required()
      ->check(CLI::IsMember({"tau1", "psi", "t2", "tau2", "taun"}));
  density->add_option("--x", d.x, "start point (default 0)");
  density->add_option("--a", d.a, "barrier intercept (default 1)");
  density->add_option("--b", d.b, "barrier slope (default 0)");
  density->add_option("--t", d.t,
                      "fixed time for psi; the u grid spans (0, t)");
  density->add_option("--n", d.n, "passage index for taun (default 3)")
      ->check(CLI::Range(1, 64));
  density->add_option("--tmin", d.tmin, "grid left edge, excluded "
                      "(default 0)");
  density->add_option("--tmax", d.tmax, "grid right edge (default 5)");
  density->add_option("--points", d.points, "grid size (default 200)")
      ->check(CLI::Range(1, 1000000));
  density->add_option("--output", d.output, "write CSV here instead of "
                      "stdout");

  int fig_index = 1;
  std::string fig_output;
  auto* figure = app.add_subcommand(
      "figure", "tabulate one of the standard plots as CSV");
  figure
      ->add_option("index", fig_index,
                   "1 defect vs bound, 2 waiting-time densities, 3 "
                   "second-passage densities, 4 second vs first passage")
      ->required()
      ->check(CLI::Range(1, 4));
  figure->add_option("--output", fig_output,
                     "write CSV here instead of stdout");

  std::string suite = "all";
  std::uint64_t seed = 20260819;
  std::int64_t paths = 20000;
  auto* verify =
      app.add_subcommand("verify", "run the library self-check suites");
  verify->add_option("--suite", suite, "analytic, mc or all (default all)")
      ->check(CLI::IsMember({"analytic", "mc", "all"}));
  verify->add_option("--seed", seed, "sampler seed (default 20260819)");
  verify
      ->add_option("--paths", paths,
                   "Monte Carlo paths per check (default 20000)")
      ->check(CLI::Range(static_cast<std::int64_t>(100),
                         static_cast<std::int64_t>(10000000)));

  ReduceArgs ra;
  auto* reduce = app.add_subcommand(
      "reduce", "restate a diffusion crossing problem as Brownian motion");
  reduce->add_option("--process", ra.process,
                     "cir, wf (Wright-Fisher), gbm or ou")
      ->required()
      ->check(CLI::IsMember({"cir", "wf", "gbm", "ou"}));
  reduce->add_option("--z", ra.z, "start state")->required();
  reduce->add_option("--barrier", ra.barrier,
                     "barrier level for cir/wf (default 1)");
  reduce->add_option("--r", ra.r, "gbm drift rate (default 0)");
  reduce->add_option("--sigma", ra.sigma,
                     "gbm volatility / ou noise scale (default 1)");
  reduce->add_option("--s0", ra.s0,
                     "barrier parameter: gbm exponent offset, ou initial "
                     "level (default 1)");
  reduce->add_option("--muprime", ra.mu_prime,
                     "gbm barrier growth rate (default 0)");
  reduce->add_option("--mu", ra.mu, "ou reversion rate (default 1)");
  reduce->add_flag("--emit-density", ra.emit_density,
                   "also tabulate the n-th passage density of the "
                   "transformed process as CSV");
  reduce->add_option("--n", ra.n, "passage index for --emit-density "
                     "(default 1)")
      ->check(CLI::Range(1, 64));
  reduce->add_option("--tmin", ra.tmin, "grid left edge, excluded "
                     "(default 0)");
  reduce->add_option("--tmax", ra.tmax, "grid right edge (default 5)");
  reduce->add_option("--points", ra.points, "grid size (default 200)")
      ->check(CLI::Range(1, 1000000));
  reduce->add_option("--output", ra.output, "write CSV here instead of "
                     "stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunManifest manifest;
  manifest.command = join_args(args);
  try {
    if (app.got_subcommand(density)) return run_density(d, manifest, out, err);
    if (app.got_subcommand(figure)) {
      manifest.parameters = {{"figure", std::to_string(fig_index)}};
      return emit_table(figure_data(fig_index), manifest, fig_output, out,
                        err);
    }
    if (app.got_subcommand(verify)) return run_verify(suite, seed, paths, out);
    if (app.got_subcommand(reduce)) return run_reduce(ra, manifest, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const QuadratureError& e) {
    err << "error: quadrature did not converge: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  out << app.help();
  return 2;
}

}  // namespace passage
