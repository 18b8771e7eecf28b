// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <nwidths/ballwidths.hpp>
#include <nwidths/discretization.hpp>
#include <nwidths/exponents.hpp>
#include <nwidths/laurent.hpp>
#include <nwidths/sampling.hpp>

#include "tuples.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace nwidths;
using nwidths::testing::representatives;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void report(int index, const char* title, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.passed) ++failures;
  std::printf("criterion %d %s: %s (%s)\n", index, title, v.passed ? "PASS" : "FAIL", v.detail.c_str());
  std::fflush(stdout);
}

// All representative fits are shared by criteria 5 to 7.
struct Fit {
  std::string label;
  AbstractParams params;
  SimResult result;
  double seconds = 0.0;
};

std::vector<Fit> fits() {
  const auto grid = nwidths::testing::dyadic_grid(10, 24);
  std::vector<Fit> out;
  for (const auto& rep : representatives()) {
    const auto start = Clock::now();
    Fit f{rep.label, rep.params, fit_exponent(rep.params, grid), 0.0};
    f.seconds = seconds_since(start);
    out.push_back(std::move(f));
  }
  return out;
}

Verdict identities() {
  const auto start = Clock::now();
  const auto tuples = sample_spanning(20240607, 1000);
  std::set<std::string> cases;
  int nonzero = 0;
  for (const auto& p : tuples) {
    cases.insert(classify(p.p0, p.p1, p.inv_q).label());
    for (const auto& r : identity_suite(p))
      if (r.value != 0) ++nonzero;
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << tuples.size() << " tuples over " << cases.size() << " cases, " << nonzero << " nonzero residuals, " << secs
    << " s";
  return {tuples.size() >= 1000 && nonzero == 0 && cases.size() == covered_case_ids().size() && secs < 5.0, d.str()};
}

Verdict partition() {
  const auto start = Clock::now();
  const PartitionReport r = partition_scan(20);
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << r.tuples << " tuples, " << r.uncovered << " uncovered, " << r.gap_overlaps << " in two gaps ("
    << r.unexpected_gap_overlaps << " outside a&c, b&d; first match reported), "
    << r.case_overlaps << " shared boundaries with " << r.overlap_mismatches << " table mismatches, "
    << r.boundary_checks << " subcase boundaries with " << r.boundary_mismatches << " mismatches, " << secs << " s";
  return {r.ok() && r.tuples == 20 * 20 * 19 && secs < 5.0, d.str()};
}

Verdict mapping() {
  const MappingCheck check = verify_concrete_mapping();
  const ThetaPair t1 = theta_pair(map_concrete(nwidths::testing::concrete_case1()));
  const ThetaPair t5 = theta_pair(map_concrete(nwidths::testing::concrete_case5()));
  const bool worked = t1.tilde == make_rational(1, 2) && t1.hat == make_rational(1, 2) && t5.tilde == 1 &&
                      t5.hat == make_rational(1, 2);
  std::ostringstream d;
  d << "symbolic tilde " << (check.tilde_matches ? "ok" : "differs") << ", hat "
    << (check.hat_matches ? "ok" : "differs") << "; worked tuples (" << to_string(t1.tilde) << ", "
    << to_string(t1.hat) << ") and (" << to_string(t5.tilde) << ", " << to_string(t5.hat) << ")";
  return {check.tilde_matches && check.hat_matches && worked, d.str()};
}

Verdict oracle() {
  const auto start = Clock::now();
  BruteForceOptions options;
  auto brute = [&](const BallSpec& s) {
    try {
      return brute_force_linear_width(s, 4'000'000, options);
    } catch (const BudgetExceeded& e) {
      return e.best_value;
    }
  };
  const BallSpec a{LpExponent::infinity(), LpExponent::from_inverse(1), 3, 1};
  const BallSpec b{LpExponent::infinity(), LpExponent::from_inverse(make_rational(1, 2)), 4, 2};
  const double va = brute(a);
  const double vb = brute(b);
  bool ok = std::abs(va - 2.0) <= 1e-3 && std::abs(vb - std::sqrt(2.0)) / std::sqrt(2.0) <= 1e-2;
  int instances = 0;
  double worst = 0.0;
  for (int inv_q : {1, 2})
    for (std::int64_t N = 1; N <= 6; ++N)
      for (std::int64_t n = 0; n <= N; ++n) {
        const BallSpec s{LpExponent::infinity(), LpExponent::from_inverse(make_rational(1, inv_q)), N, n};
        const double exact = exact_linear_width(s).value;
        const double value = brute(s);
        const double err = exact > 0 ? std::abs(value - exact) / exact : std::abs(value);
        worst = std::max(worst, err);
        ok = ok && err <= 1e-2;
        ++instances;
      }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "(inf,1,3,1) -> " << va << ", (inf,2,4,2) -> " << vb << ", " << instances
    << " instances worst relative error " << worst << ", " << secs << " s";
  return {ok && secs < 60.0, d.str()};
}

Verdict slopes(const std::vector<Fit>& all) {
  bool ok = true;
  std::ostringstream d;
  for (const auto& f : all) {
    const auto table = theta_table(f.params);
    const bool gap_ok = table.gap && *table.gap >= make_rational(1, 10);
    const bool fit_ok = std::abs(f.result.residual) <= 0.05 && f.seconds < 60.0;
    ok = ok && gap_ok && fit_ok;
    d << f.label << " " << f.result.fitted_slope << " vs " << f.result.predicted << "; ";
  }
  std::string s = d.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

Verdict sandwich(const std::vector<Fit>& all) {
  bool ok = true;
  std::ostringstream d;
  for (const auto& f : all) {
    const auto id = classify(f.params.p0, f.params.p1, f.params.inv_q);
    const auto table = theta_table(f.params);
    const auto set = lower_bound_set(f.params);
    std::set<Rational> lower, thetas(table.thetas.begin(), table.thetas.end());
    for (const auto& t : set) lower.insert(t.exponent);

    std::vector<double> xs;
    std::vector<std::vector<double>> ys(set.size());
    for (int e = 10; e <= 24; ++e) {
      const auto probes = lower_bound_probe(f.params, id, std::ldexp(1.0, e));
      xs.push_back(e);
      for (std::size_t k = 0; k < probes.size(); ++k) ys[k].push_back(std::log2(probes[k].value));
    }
    double best = -INFINITY;
    std::string best_label;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double slope = least_squares_slope(xs, ys[k]);
      if (slope > best) {
        best = slope;
        best_label = set[k].label;
      }
    }
    const double target = f.result.predicted;
    const bool this_ok =
        lower == thetas && std::abs(best - target) <= 0.1 && std::abs(f.result.fitted_slope - target) <= 0.1;
    ok = ok && this_ok;
    d << f.label << " " << best_label << " " << best << (lower == thetas ? "" : " set mismatch") << "; ";
  }
  std::string s = d.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

Verdict budget(const std::vector<Fit>& all) {
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& f : all)
    for (double r : f.result.budget_ratio) {
      worst = std::max(worst, r);
      ++points;
    }
  // Sampled tuples from every case, evaluated directly.
  std::mt19937_64 rng(31);
  for (const auto& id : covered_case_ids())
    for (int i = 0; i < 3; ++i) {
      const auto p = sample_admissible(rng, id);
      if (!p) return {false, "could not sample case " + id.label()};
      for (double n : {std::ldexp(1.0, 10), std::ldexp(1.0, 16), std::ldexp(1.0, 22)}) {
        const Allocation a = choose_allocation(*p, id, n);
        const SumBreakdown s = evaluate_S(*p, n, a);
        worst = std::max(worst, s.rank_sum / (budget_constant(a.eps) * n));
        ++points;
      }
    }
  std::ostringstream d;
  d << points << " (params, n) pairs, largest sum/(C(eps) n) " << worst;
  return {points > 0 && worst <= 1.0, d.str()};
}

Verdict breakpoints() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log2_n(8.0, 30.0);
  int checks = 0, bad = 0, cases = 0;
  double worst = 0.0;
  for (const auto& id : covered_case_ids()) {
    bool applicable = false;
    for (int i = 0; i < 100; ++i) {
      const auto p = sample_admissible(rng, id);
      if (!p) {
        ++bad;
        continue;
      }
      const auto bp = solve_breakpoints(*p, id, std::exp2(log2_n(rng)));
      for (const auto& c : breakpoint_identities(*p, bp)) {
        applicable = true;
        ++checks;
        worst = std::max(worst, c.relative_error());
        if (!(c.relative_error() <= 1e-10)) ++bad;
      }
    }
    if (applicable) ++cases;
  }
  std::ostringstream d;
  d << checks << " identities over " << cases << " cases, worst relative error " << worst;
  return {bad == 0 && checks > 0, d.str()};
}

}  // namespace

int main() {
  report(1, "identity suite", identities);
  report(2, "partition coverage", partition);
  report(3, "concrete-abstract consistency", mapping);
  report(4, "ball-width oracle", oracle);
  std::vector<Fit> all;
  std::string fit_error;
  try {
    all = fits();
  } catch (const std::exception& e) {
    fit_error = e.what();
  }
  const auto guarded = [&](Verdict (*f)(const std::vector<Fit>&)) {
    return [&, f]() -> Verdict {
      if (!fit_error.empty()) return {false, "fit failed: " + fit_error};
      return f(all);
    };
  };
  report(5, "upper-bound slope", guarded(slopes));
  report(6, "sandwich", guarded(sandwich));
  report(7, "allocation budget", guarded(budget));
  report(8, "breakpoint identities", breakpoints);
  return failures == 0 ? 0 : 1;
}
