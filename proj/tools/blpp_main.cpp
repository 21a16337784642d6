// Command line front end. Subcommands cover simulation (simulate, lpp),
// exact evaluation (density, rn-ratio, lpnorm), bound suites (bounds), and
// the verification harness (verify). Every file written is accompanied by a
// <file>.manifest.json recording the command, parameters, seed, and grid, so
// runs can be reproduced bit for bit; timestamps live only in manifests.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blpp/bounds.hpp"
#include "blpp/core.hpp"
#include "blpp/densities.hpp"
#include "blpp/errors.hpp"
#include "blpp/kernels.hpp"
#include "blpp/lpp.hpp"
#include "blpp/manifest.hpp"
#include "blpp/quadrature.hpp"
#include "blpp/reflect.hpp"
#include "blpp/rng.hpp"
#include "blpp/stats.hpp"
#include "blpp/verify.hpp"

namespace {

using nlohmann::json;

std::string out_dir() {
  const char* env = std::getenv("BLPP_OUT_DIR");
  return (env && *env) ? std::string(env) : std::string(".");
}

std::string in_out_dir(const std::string& name) { return out_dir() + "/" + name; }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<double> parse_csv_doubles(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty())
      throw std::invalid_argument(std::string(flag) + ": '" + tok +
                                  "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(flag) + ": empty vector");
  return out;
}

json json_vector(const std::vector<double>& v) { return json(v); }

// One row of a verification report.
struct CheckResult {
  std::string name;
  bool pass = false;
  double statistic = 0.0;
  std::optional<double> p_value;
  std::optional<double> margin;
};

json checks_to_json(const std::string& suite, std::uint64_t seed,
                    const std::vector<CheckResult>& checks) {
  json j;
  j["suite"] = suite;
  j["master_seed"] = seed;
  j["artifact_version"] = blpp::kArtifactVersion;
  j["checks"] = json::array();
  for (const auto& c : checks) {
    json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["statistic"] = c.statistic;
    if (c.p_value) e["p_value"] = *c.p_value;
    if (c.margin) e["margin"] = *c.margin;
    j["checks"].push_back(e);
  }
  return j;
}

json bound_report_json(const std::string& name, const blpp::BoundReport& rep) {
  json e;
  e["name"] = name;
  e["lhs_log"] = rep.lhs.log_mag;
  e["rhs_log"] = rep.rhs.log_mag;
  e["margin"] = rep.margin;
  e["satisfied"] = rep.satisfied;
  return e;
}

// Writes `content` to `path` and a manifest next to it.
void write_with_manifest(const std::string& command,
                         const std::map<std::string, std::string>& params,
                         std::uint64_t seed, const blpp::GridSpec& grid,
                         const std::string& path, const std::string& started,
                         const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path);
  os << content;
  os.close();
  blpp::RunManifest man;
  man.command = command;
  man.parameters = params;
  man.master_seed = seed;
  man.grid = grid;
  man.started = started;
  man.finished = blpp::iso_timestamp_utc();
  man.output_files = {path};
  blpp::write_manifest(man, path + ".manifest.json");
}

// ---------------------------------------------------------------- simulate

struct SimOpts {
  std::size_t m = 2;
  double t = 1.0;
  std::size_t grid = 4096;
  std::uint64_t seed = 42;
  std::size_t n = 1;
  std::string b_csv;
  std::string out;
  unsigned threads = 1;
};

int cmd_simulate(const SimOpts& o) {
  if (!is_pow2(o.grid)) throw std::invalid_argument("--grid must be a power of two");
  std::vector<double> g(o.m, 0.0);
  if (!o.b_csv.empty()) g = parse_csv_doubles(o.b_csv, "--b");
  if (g.size() != o.m)
    throw std::invalid_argument("--b must have one entry per line (--m)");
  const blpp::TimeGrid grid = blpp::make_grid(0.0, o.t, o.grid);
  const std::string started = blpp::iso_timestamp_utc();

  std::ostringstream os;
  os << "replicate,t";
  for (std::size_t k = 1; k <= o.m; ++k) os << ",h" << k;
  os << '\n';
  for (std::size_t rep = 0; rep < o.n; ++rep) {
    blpp::RngStream rng = blpp::make_stream(o.seed, rep);
    const blpp::Ensemble driving =
        blpp::sample_ensemble(grid, o.m, blpp::kRateTwo, {}, rng);
    const blpp::Ensemble tasep = blpp::brownian_tasep(driving, blpp::InitialData{g});
    for (std::size_t j = 0; j < grid.n_points(); ++j) {
      os << rep << ',' << fmt17(grid.time(j));
      for (const auto& line : tasep.lines) os << ',' << fmt17(line[j]);
      os << '\n';
    }
  }

  const std::string path = o.out.empty() ? in_out_dir("simulate.csv") : o.out;
  write_with_manifest("simulate",
                      {{"m", std::to_string(o.m)},
                       {"t", fmt17(o.t)},
                       {"grid", std::to_string(o.grid)},
                       {"n", std::to_string(o.n)},
                       {"b", o.b_csv},
                       {"threads", std::to_string(o.threads)}},
                      o.seed, {0.0, o.t, o.grid}, path, started, os.str());
  std::cout << path << '\n';
  return 0;
}

// --------------------------------------------------------------------- lpp

int cmd_lpp(const SimOpts& o) {
  if (!is_pow2(o.grid)) throw std::invalid_argument("--grid must be a power of two");
  const blpp::TimeGrid grid = blpp::make_grid(0.0, o.t, o.grid);
  const std::string started = blpp::iso_timestamp_utc();

  std::ostringstream os;
  os << "replicate,value\n";
  for (std::size_t rep = 0; rep < o.n; ++rep) {
    blpp::RngStream rng = blpp::make_stream(o.seed, rep);
    const blpp::Ensemble ens = blpp::sample_ensemble(grid, o.m, blpp::kRateTwo, {}, rng);
    const double v =
        blpp::lpp_value(ens, {0, o.m}, {grid.n_steps, 1});
    os << rep << ',' << fmt17(v) << '\n';
  }

  const std::string path = o.out.empty() ? in_out_dir("lpp.csv") : o.out;
  write_with_manifest("lpp",
                      {{"m", std::to_string(o.m)},
                       {"t", fmt17(o.t)},
                       {"grid", std::to_string(o.grid)},
                       {"n", std::to_string(o.n)},
                       {"threads", std::to_string(o.threads)}},
                      o.seed, {0.0, o.t, o.grid}, path, started, os.str());
  std::cout << path << '\n';
  return 0;
}

// ----------------------------------------------------- density and rn-ratio

struct PointOpts {
  std::size_t m = 0;
  double r = 1.0;
  std::string b_csv;
  std::string x_csv;
  std::string out;
};

int emit_record(const std::string& command, const PointOpts& o, const json& record) {
  std::cout << record.dump(2) << std::endl;
  if (!o.out.empty()) {
    const std::string started = blpp::iso_timestamp_utc();
    write_with_manifest(command,
                        {{"m", std::to_string(o.m)},
                         {"r", fmt17(o.r)},
                         {"b", o.b_csv},
                         {"x", o.x_csv}},
                        0, {}, o.out, started, record.dump(2) + "\n");
  }
  return 0;
}

int cmd_density(const PointOpts& o) {
  const std::vector<double> b = parse_csv_doubles(o.b_csv, "--b");
  const std::vector<double> x = parse_csv_doubles(o.x_csv, "--x");
  if (o.m != 0 && o.m != b.size())
    throw std::invalid_argument("--m disagrees with the length of --b");
  const blpp::DensityEval eval = blpp::warren_density(o.r, x, b);
  json rec;
  rec["m"] = b.size();
  rec["r"] = o.r;
  rec["b"] = json_vector(b);
  rec["x"] = json_vector(x);
  rec["density"] = eval.value.value();
  rec["log_density"] = eval.value.log_mag;
  rec["sign"] = eval.value.sign;
  rec["condition_hint"] = eval.condition_hint;
  return emit_record("density", o, rec);
}

int cmd_rn_ratio(const PointOpts& o) {
  const std::vector<double> b = parse_csv_doubles(o.b_csv, "--b");
  const std::vector<double> x = parse_csv_doubles(o.x_csv, "--x");
  if (o.m != 0 && o.m != b.size())
    throw std::invalid_argument("--m disagrees with the length of --b");
  const blpp::RnRatioEval eval = blpp::rn_ratio(o.r, x, b);
  json rec;
  rec["m"] = b.size();
  rec["r"] = o.r;
  rec["b"] = json_vector(b);
  rec["x"] = json_vector(x);
  rec["value"] = eval.value.value();
  rec["log_value"] = eval.value.log_mag;
  rec["sign"] = eval.value.sign;
  rec["cross_residual"] = eval.cross_residual;
  rec["condition_hint"] = eval.condition_hint;
  return emit_record("rn-ratio", o, rec);
}

// ------------------------------------------------------------------ bounds

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// Exact slab probability for the top line of the two-line ordered system at
// time r from (0,0): joint density e^{-(x^2+h^2)/4r} (h-x)^2 / (8 pi r^2) on
// x <= h, integrated over the slab a <= h <= H.
double top_pair_slab_prob(double r, double a, double H) {
  return blpp::integrate_adaptive(
      [&](double h) {
        const double lo = std::min(h, 0.0) - 12.0 * std::sqrt(2.0 * r) - 2.0;
        return blpp::integrate_adaptive(
            [&](double x) {
              const double d = h - x;
              return std::exp(-(x * x + h * h) / (4.0 * r)) * d * d /
                     (8.0 * M_PI * r * r);
            },
            lo, h, 1e-10);
      },
      a, H, 1e-9);
}

std::vector<std::pair<std::string, blpp::BoundReport>> bounds_suite(
    const std::string& suite) {
  using blpp::LogReal;
  std::vector<std::pair<std::string, blpp::BoundReport>> out;
  const blpp::BoundConstants k{};

  if (suite == "dyson") {
    const double ell = 0.5, r = 1.0;
    for (double a : {-1.0, 0.0, 1.0}) {
      const double H = a + 0.5;
      const double p = top_pair_slab_prob(r, a, H);
      // Largest mean positive excursion of the top coordinate at time ell
      // compatible with the slab endpoint H at time r.
      const double mu0 = H * ell / r;
      const double sigma = std::sqrt(2.0 * ell * (r - ell) / r);
      const double xi_star =
          mu0 * std_normal_cdf(mu0 / sigma) + sigma * std_normal_pdf(mu0 / sigma);
      const double bound =
          blpp::dyson_rn_bound(2, ell, r, xi_star, std::max(H, 0.0), k).value();
      const double mu_a = std_normal_cdf(H / std::sqrt(2.0 * r)) -
                          std_normal_cdf(a / std::sqrt(2.0 * r));
      out.emplace_back("slab-top[" + fmt17(a) + "," + fmt17(H) + "]",
                       blpp::make_bound_report(LogReal::from_value(p),
                                               LogReal::from_value(bound * mu_a)));
    }
    return out;
  }

  if (suite == "tasep") {
    // Growth-law dominance: log bound(m) <= C m^2 log m, C pinned at m = 2.
    const double ell = 0.5, r = 1.0, xi_l = 1.0, xi_r = 1.5;
    const auto log_bound = [&](std::size_t m) {
      std::vector<double> b(m, 0.0);
      b[0] = 1.0;
      return blpp::tasep_rn_bound(static_cast<int>(m), ell, r, blpp::InitialData{b},
                                  xi_l, xi_r, k)
          .log_mag;
    };
    const double c_pin = log_bound(2) / (4.0 * std::log(2.0));
    for (std::size_t m = 2; m <= 12; ++m) {
      const double dm = static_cast<double>(m);
      out.emplace_back(
          "growth-m" + std::to_string(m),
          blpp::make_bound_report(blpp::log_exp(log_bound(m)),
                                  blpp::log_exp(c_pin * dm * dm * std::log(dm))));
    }
    return out;
  }

  if (suite == "appendix") {
    const std::vector<blpp::BoundReport> reports =
        blpp::check_appendix_inequalities(blpp::AppendixGrid{}, k);
    for (std::size_t i = 0; i < reports.size(); ++i)
      out.emplace_back("grid-" + std::to_string(i), reports[i]);
    return out;
  }

  if (suite == "erf") {
    for (double L : {0.5, 1.0, 2.0}) {
      for (double rr : {3.0, 6.0, 12.0}) {
        const blpp::ErfTailBounds b = blpp::erf_tail_bounds(L, rr);
        const std::string tag = "[L=" + fmt17(L) + ",r=" + fmt17(rr) + "]";
        if (b.first_order) out.emplace_back("first-order" + tag, *b.first_order);
        if (b.second_order) out.emplace_back("second-order" + tag, *b.second_order);
      }
    }
    return out;
  }

  if (suite == "contractivity") {
    out.emplace_back("constant",
                     blpp::increment_contractivity_check(
                         [](double, double) { return 1.0; }, 0.5, 1.0, 2.0));
    out.emplace_back("kinked-positive-part",
                     blpp::increment_contractivity_check(
                         [](double x, double y) {
                           return (std::max(x, 0.0) + 1.0) * (std::max(y, 0.0) + 1.0);
                         },
                         0.5, 1.0, 2.0));
    out.emplace_back("exponential-tilt",
                     blpp::increment_contractivity_check(
                         [](double x, double y) { return std::exp(0.3 * x + 0.1 * y); },
                         0.5, 1.0, 3.0));
    return out;
  }

  if (suite == "growth") {
    // Melon moment growth: log lp(n, p) non-decreasing in p and bounded
    // below by 0.1 n^2 at the calibrated exponent.
    for (int n = 3; n <= 10; ++n) {
      const LogReal lo = blpp::lp_lower_bound_gamma(n, 4.0);
      const LogReal hi = blpp::lp_lower_bound_gamma(n, 10.0);
      out.emplace_back("monotone-n" + std::to_string(n),
                       blpp::make_bound_report(lo, hi));
      out.emplace_back(
          "positive-n" + std::to_string(n),
          blpp::make_bound_report(
              blpp::log_exp(0.1 * static_cast<double>(n) * static_cast<double>(n)),
              hi));
    }
    return out;
  }

  throw std::invalid_argument("unknown bounds suite '" + suite + "'");
}

struct BoundsOpts {
  std::string suite;
  std::string out;
};

int cmd_bounds(const BoundsOpts& o) {
  const std::string started = blpp::iso_timestamp_utc();
  const auto reports = bounds_suite(o.suite);
  json arr = json::array();
  bool all = true;
  for (const auto& [name, rep] : reports) {
    arr.push_back(bound_report_json(name, rep));
    all = all && rep.satisfied;
  }
  std::cout << arr.dump(2) << std::endl;
  if (!o.out.empty())
    write_with_manifest("bounds", {{"suite", o.suite}}, 0, {}, o.out, started,
                        arr.dump(2) + "\n");
  return all ? 0 : 1;
}

// ------------------------------------------------------------------ lpnorm

struct LpOpts {
  double p = 2.0;
  std::size_t n_max = 8;
  std::string out;
};

int cmd_lpnorm(const LpOpts& o) {
  if (o.n_max < 1) throw std::invalid_argument("--n-max must be at least 1");
  const std::string started = blpp::iso_timestamp_utc();
  std::ostringstream os;
  os << "n,log_value\n";
  for (std::size_t n = 1; n <= o.n_max; ++n)
    os << n << ','
       << fmt17(blpp::lp_lower_bound_gamma(static_cast<int>(n), o.p).log_mag) << '\n';
  std::cout << os.str();
  if (!o.out.empty())
    write_with_manifest("lpnorm",
                        {{"p", fmt17(o.p)}, {"n-max", std::to_string(o.n_max)}}, 0, {},
                        o.out, started, os.str());
  return 0;
}

// ------------------------------------------------------------------ verify

std::vector<CheckResult> verify_deterministic(std::uint64_t seed) {
  const blpp::TimeGrid grid = blpp::make_grid(0.0, 1.0, 1024);
  double w_pitman = 0.0, w_dual = 0.0, w_comp = 0.0, w_flat = 0.0;
  for (std::uint64_t run = 0; run < 40; ++run) {
    blpp::RngStream rng = blpp::make_stream(seed, run);
    const std::size_t m = 2 + run % 5;
    const blpp::Ensemble ens = blpp::sample_ensemble(grid, m, blpp::kRateTwo, {}, rng);
    double scale = 1.0;
    for (const auto& line : ens.lines)
      for (double v : line) scale = std::max(scale, std::abs(v));

    // Two-line Pitman top equals the last passage value to line 1.
    blpp::Ensemble two;
    two.grid = grid;
    two.lines = {ens.lines[0], ens.lines[1]};
    const blpp::ReflectionOutput ref = blpp::skorokhod_reflect(two.lines[0], two.lines[1]);
    const blpp::Ensemble prof2 = blpp::lpp_profile(two, {0, 2});
    for (std::size_t j = 0; j < grid.n_points(); ++j)
      w_pitman = std::max(w_pitman, std::abs(ref.w_top[j] - prof2.lines[0][j]) / scale);

    // Iterated reflection equals boundary last passage from random starts.
    std::vector<double> g(m);
    g[0] = 2.0 * rng.uniform01();
    for (std::size_t i = 1; i < m; ++i) g[i] = g[i - 1] - rng.uniform01();
    const blpp::Ensemble tasep = blpp::brownian_tasep(ens, blpp::InitialData{g});
    const blpp::Ensemble direct = blpp::lpp_with_boundary(ens, g);
    for (std::size_t kk = 0; kk < m; ++kk)
      for (std::size_t j = 0; j < grid.n_points(); ++j)
        w_dual = std::max(w_dual, std::abs(tasep.lines[kk][j] - direct.lines[kk][j]) / scale);

    // Composition law of last passage values across intermediate lines.
    w_comp = std::max(w_comp, blpp::metric_composition_residual(
                                  ens, {0, m}, {grid.n_steps, 1}) / scale);

    // Flat starts reduce to the plain profile from the bottom corner.
    const blpp::Ensemble flat =
        blpp::brownian_tasep(ens, blpp::InitialData{std::vector<double>(m, 0.0)});
    const blpp::Ensemble prof = blpp::lpp_profile(ens, {0, m});
    for (std::size_t kk = 0; kk < m; ++kk)
      for (std::size_t j = 0; j < grid.n_points(); ++j)
        w_flat = std::max(w_flat, std::abs(flat.lines[kk][j] - prof.lines[kk][j]) / scale);
  }
  const double tol = 1e-12;
  return {
      {"pitman-top-equals-lpp", w_pitman <= tol, w_pitman, {}, tol - w_pitman},
      {"reflection-equals-boundary-lpp", w_dual <= tol, w_dual, {}, tol - w_dual},
      {"metric-composition", w_comp <= tol, w_comp, {}, tol - w_comp},
      {"flat-start-equals-profile", w_flat <= tol, w_flat, {}, tol - w_flat},
  };
}

std::vector<CheckResult> verify_density_suite() {
  std::vector<CheckResult> checks;

  {  // One-line normalization.
    const double mass = blpp::integrate_adaptive(
        [](double x) { return blpp::warren_density(1.0, {x}, {0.5}).value.value(); },
        0.5 - 16.0, 0.5 + 16.0, 1e-10);
    const double res = std::abs(mass - 1.0);
    checks.push_back({"normalization-m1", res <= 1e-6, res, {}, 1e-6 - res});
  }
  {  // Two-line normalization from staggered starts.
    const std::vector<double> b = {1.0, 0.0};
    const double lo = -16.0, hi = 17.0;
    const double mass = blpp::integrate_adaptive(
        [&](double x1) {
          return blpp::integrate_adaptive(
              [&](double x2) {
                return blpp::warren_density(1.0, {x1, x2}, b).value.value();
              },
              lo, x1, 1e-9);
        },
        lo, hi, 1e-8);
    const double res = std::abs(mass - 1.0);
    checks.push_back({"normalization-m2", res <= 1e-6, res, {}, 1e-6 - res});
  }
  {  // Differentiation steps down the kernel ladder.
    double worst = 0.0;
    const double h = 0.05;
    for (int order : {3, 2, 1, 0, -1, -2}) {
      for (double y : {-1.7, -0.2, 0.9, 2.4}) {
        const auto f = [&](double z) { return blpp::phi_iter(order, 1.0, z); };
        const double deriv =
            (8.0 * (f(y + h) - f(y - h)) - (f(y + 2.0 * h) - f(y - 2.0 * h))) /
            (12.0 * h);
        worst = std::max(worst, std::abs(deriv - blpp::phi_iter(order - 1, 1.0, y)));
      }
    }
    checks.push_back({"ladder-derivative", worst <= 1e-6, worst, {}, 1e-6 - worst});
  }
  {  // Transpose invariance of the determinant evaluation.
    double worst = 0.0;
    for (double r : {0.5, 1.0}) {
      const std::vector<double> b = {2.0, 1.0, 0.0};
      for (double shift : {-0.5, 0.4, 1.3}) {
        const std::vector<double> x = {2.4 + shift, 0.9 + shift, -0.3 + shift};
        const double a = blpp::warren_density(r, x, b).value.value();
        const double t = blpp::warren_density_transposed(r, x, b).value.value();
        worst = std::max(worst, std::abs(a - t) / std::abs(a));
      }
    }
    checks.push_back({"transpose-invariance", worst <= 1e-12, worst, {}, 1e-12 - worst});
  }
  {  // Hermite translation identity, the engine behind argument shifts.
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n) {
      for (double x : {0.3, 1.1, -0.8}) {
        for (double a : {0.5, 2.0, -1.4}) {
          double sum = 0.0, sum_abs = 0.0, comb = 1.0;
          for (int kk = 0; kk <= n; ++kk) {
            const double term = comb * blpp::hermite(kk, x) * std::pow(2.0 * a, n - kk);
            sum += term;
            sum_abs += std::abs(term);
            comb = comb * static_cast<double>(n - kk) / static_cast<double>(kk + 1);
          }
          worst = std::max(worst, std::abs(blpp::hermite(n, x + a) - sum) /
                                      std::max(1.0, sum_abs));
        }
      }
    }
    checks.push_back({"hermite-translation", worst <= 1e-10, worst, {}, 1e-10 - worst});
  }
  return checks;
}

std::vector<CheckResult> verify_markov_suite() {
  std::vector<CheckResult> checks;
  const double r1 = blpp::chapman_kolmogorov_residual(1, 0.5, 0.5, blpp::InitialData{{0.3}});
  checks.push_back({"chapman-kolmogorov-m1", r1 <= 1e-8, r1, {}, 1e-8 - r1});
  const double r2a =
      blpp::chapman_kolmogorov_residual(2, 0.5, 0.5, blpp::InitialData{{0.0, 0.0}});
  checks.push_back({"chapman-kolmogorov-m2-flat", r2a <= 1e-4, r2a, {}, 1e-4 - r2a});
  const double r2b =
      blpp::chapman_kolmogorov_residual(2, 0.5, 0.5, blpp::InitialData{{1.0, 0.0}});
  checks.push_back({"chapman-kolmogorov-m2-staggered", r2b <= 1e-4, r2b, {}, 1e-4 - r2b});
  for (double r : {0.5, 1.0, 2.0}) {
    const double d = blpp::diagonal_marginal_residual(r);
    checks.push_back(
        {"diagonal-marginal-r" + fmt17(r), d <= 1e-6, d, {}, 1e-6 - d});
  }
  return checks;
}

std::vector<CheckResult> verify_bounds_suite() {
  std::vector<CheckResult> checks;
  {
    const double res = std::abs(blpp::mehta_integral(2, 1.0).value() - 2.0);
    checks.push_back({"mehta-n2-gamma1", res <= 1e-12, res, {}, 1e-12 - res});
  }
  {
    const double res = std::abs(blpp::mehta_integral(3, 1.0).value() - 12.0);
    checks.push_back({"mehta-n3-gamma1", res <= 1e-12, res, {}, 1e-12 - res});
  }
  {
    const double res = std::abs(blpp::lp_lower_bound_gamma(2, 2.0).value() - 0.5);
    checks.push_back({"lp-anchor-n2-p2", res <= 1e-12, res, {}, 1e-12 - res});
  }
  {
    const blpp::BoundConstants k{};
    const double got =
        blpp::tasep_rn_bound(1, 0.5, 1.0, blpp::InitialData{{0.0}}, 0.7, 1.1, k).value();
    const double want = std::exp(k.d_m_rate * k.d_m_rate / (4.0 * 0.5));
    const double res = std::abs(got - want) / want;
    checks.push_back({"tasep-m1-exact", res <= 1e-12, res, {}, 1e-12 - res});
  }
  {
    const blpp::BoundConstants k{};
    const double got = blpp::uniform_increment_rn_bound(1, 2.0, 0.5, 1.0, 0.8, k);
    const double res = std::abs(got - 1.0);
    checks.push_back({"uniform-increment-m1", res <= 1e-12, res, {}, 1e-12 - res});
  }
  for (const auto& [name, rep] : bounds_suite("contractivity"))
    checks.push_back({"contractivity-" + name, rep.satisfied,
                      rep.lhs.is_zero() ? 0.0 : rep.lhs.value(), {}, rep.margin});
  return checks;
}

std::vector<CheckResult> verify_appendix_suite() {
  const std::vector<blpp::BoundReport> reports =
      blpp::check_appendix_inequalities(blpp::AppendixGrid{}, blpp::BoundConstants{});
  bool all = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& rep : reports) {
    all = all && rep.satisfied;
    min_margin = std::min(min_margin, rep.margin);
  }
  return {
      {"appendix-grid-satisfied", all, static_cast<double>(reports.size()), {},
       min_margin},
  };
}

struct VerifyOpts {
  std::string suite;
  std::uint64_t seed = 42;
  std::string out;
  unsigned threads = 1;
};

int cmd_verify(const VerifyOpts& o) {
  const std::string started = blpp::iso_timestamp_utc();
  std::vector<CheckResult> checks;
  blpp::GridSpec grid{};
  if (o.suite == "deterministic") {
    grid = {0.0, 1.0, 1024};
    checks = verify_deterministic(o.seed);
  } else if (o.suite == "density") {
    checks = verify_density_suite();
  } else if (o.suite == "markov") {
    checks = verify_markov_suite();
  } else if (o.suite == "bounds") {
    checks = verify_bounds_suite();
  } else if (o.suite == "appendix") {
    checks = verify_appendix_suite();
  } else {
    throw std::invalid_argument("unknown verify suite '" + o.suite + "'");
  }

  const json report = checks_to_json(o.suite, o.seed, checks);
  std::cout << report.dump(2) << std::endl;
  const std::string path =
      o.out.empty() ? in_out_dir("verify-" + o.suite + ".json") : o.out;
  write_with_manifest("verify",
                      {{"suite", o.suite}, {"threads", std::to_string(o.threads)}},
                      o.seed, grid, path, started, report.dump(2) + "\n");
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian last passage percolation toolkit"};
  app.require_subcommand(1);

  SimOpts sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Sample the reflected line ensemble");
  c_sim->add_option("--m", sim.m, "number of lines");
  c_sim->add_option("--t", sim.t, "time horizon");
  c_sim->add_option("--grid", sim.grid, "grid steps (power of two)");
  c_sim->add_option("--seed", sim.seed, "master seed");
  c_sim->add_option("--n", sim.n, "replicates");
  c_sim->add_option("--b", sim.b_csv, "initial data, comma separated, top first");
  c_sim->add_option("--out", sim.out, "output file");
  c_sim->add_option("--threads", sim.threads,
                    "worker parallelism hint; results do not depend on it");

  SimOpts lpp_o;
  CLI::App* c_lpp = app.add_subcommand("lpp", "Last passage values of sampled ensembles");
  c_lpp->add_option("--m", lpp_o.m, "number of lines");
  c_lpp->add_option("--t", lpp_o.t, "time horizon");
  c_lpp->add_option("--grid", lpp_o.grid, "grid steps (power of two)");
  c_lpp->add_option("--seed", lpp_o.seed, "master seed");
  c_lpp->add_option("--n", lpp_o.n, "replicates");
  c_lpp->add_option("--out", lpp_o.out, "output file");
  c_lpp->add_option("--threads", lpp_o.threads,
                    "worker parallelism hint; results do not depend on it");

  PointOpts den;
  CLI::App* c_den = app.add_subcommand("density", "Evaluate the transition density");
  c_den->add_option("--m", den.m, "number of lines (optional, checked against --b)");
  c_den->add_option("--r", den.r, "time");
  c_den->add_option("--b", den.b_csv, "starting configuration, top first")->required();
  c_den->add_option("--x", den.x_csv, "evaluation point, top first")->required();
  c_den->add_option("--out", den.out, "also write the record to this file");

  PointOpts rn;
  CLI::App* c_rn = app.add_subcommand("rn-ratio", "Density ratio against flat starts");
  c_rn->add_option("--m", rn.m, "number of lines (optional, checked against --b)");
  c_rn->add_option("--r", rn.r, "time");
  c_rn->add_option("--b", rn.b_csv, "starting configuration, top first")->required();
  c_rn->add_option("--x", rn.x_csv, "evaluation point, top first")->required();
  c_rn->add_option("--out", rn.out, "also write the record to this file");

  BoundsOpts bnd;
  CLI::App* c_bnd = app.add_subcommand("bounds", "Evaluate a bound suite");
  c_bnd->add_option("--suite", bnd.suite, "bound suite")
      ->required()
      ->check(CLI::IsMember(
          {"dyson", "tasep", "appendix", "erf", "contractivity", "growth"}));
  c_bnd->add_option("--out", bnd.out, "also write the reports to this file");

  LpOpts lp;
  CLI::App* c_lp = app.add_subcommand("lpnorm", "Moment lower bound table");
  c_lp->add_option("--p", lp.p, "moment exponent")->required();
  c_lp->add_option("--n-max", lp.n_max, "largest line count");
  c_lp->add_option("--out", lp.out, "also write the table to this file");

  VerifyOpts ver;
  CLI::App* c_ver = app.add_subcommand("verify", "Run a verification suite");
  c_ver->add_option("--suite", ver.suite, "verification suite")
      ->required()
      ->check(CLI::IsMember({"deterministic", "density", "markov", "bounds", "appendix"}));
  c_ver->add_option("--seed", ver.seed, "master seed");
  c_ver->add_option("--out", ver.out, "report file");
  c_ver->add_option("--threads", ver.threads,
                    "worker parallelism hint; results do not depend on it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_lpp->parsed()) return cmd_lpp(lpp_o);
    if (c_den->parsed()) return cmd_density(den);
    if (c_rn->parsed()) return cmd_rn_ratio(rn);
    if (c_bnd->parsed()) return cmd_bounds(bnd);
    if (c_lp->parsed()) return cmd_lpnorm(lp);
    if (c_ver->parsed()) return cmd_verify(ver);
  } catch (const std::invalid_argument& e) {
    std::cerr << "blpp: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "blpp: " << e.what() << '\n';
    return 1;
  }
  std::cerr << app.help();
  return 2;
}
