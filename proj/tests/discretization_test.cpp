#include <doctest.h>

#include <nwidths/discretization.hpp>
#include <nwidths/sampling.hpp>

#include "tuples.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace nwidths;
using doctest::Approx;
using nwidths::testing::abstract_tuple;
using nwidths::testing::dyadic_grid;
using nwidths::testing::representatives;

namespace {

CaseId case_of(const AbstractParams& p) { return classify(p.p0, p.p1, p.inv_q); }

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("hat line example") {
  auto p = abstract_tuple("1/2", "1/2", "1/2", "2", "1", "1", "1");
  const auto bp = solve_breakpoints(p, case_of(p), 1024);
  CHECK(bp.m_hat(3) == Approx(7.0));
}

TEST_CASE("scale lines satisfy their defining equations") {
  for (const auto& rep : representatives()) {
    const auto& p = rep.params;
    const double L = 20.0;
    const auto bp = solve_breakpoints(p, case_of(p), std::ldexp(1.0, 20));
    const double g = to_double(p.gamma_star);
    const double q = 1 / to_double(p.inv_q);
    const double p0d = 1 / (1 - to_double(p.p0.inv()));
    const double p1d = 1 / (1 - to_double(p.p1.inv()));
    for (double t : {0.0, 0.5, 1.7, 3.0}) {
      CHECK(g * t + bp.m_hat(t) == Approx(L));
      CHECK(g * t + bp.m_q(t) == Approx(q / 2 * L));
      CHECK(g * t + bp.m_p0d(t) == Approx(p0d / 2 * L));
      CHECK(g * t + bp.m_p1d(t) == Approx(p1d / 2 * L));
    }
  }
}

TEST_CASE("tilde line balances the two radii against the dimension") {
  const auto p = abstract_tuple("3/4", "3/5", "1/5", "9/4", "2", "3", "-1/4");
  const auto bp = solve_breakpoints(p, case_of(p), 1 << 16);
  for (double t : {0.0, 1.0, 2.5}) {
    const double m = bp.m_tilde(t);
    const double log_r1 = -0.25 * t - m * (2.25 + 0.2 - 0.6);
    const double log_r0 = -3.0 * t + m * (0.75 - 0.2);
    const double log_nu = 2.0 * t + m;
    CHECK(log_r0 == Approx(log_r1 + (0.75 - 0.6) * log_nu));
  }
}

TEST_CASE("case 6a: m' meets m~ at t**") {
  const auto p = abstract_tuple("3/4", "3/5", "1/5", "9/4", "2", "3", "-1/4");
  REQUIRE(case_of(p) == CaseId::of(6, 'a'));
  const auto bp = solve_breakpoints(p, case_of(p), 1 << 20);
  REQUIRE(bp.t_2star);
  CHECK(bp.m_prime(*bp.t_2star) == Approx(bp.m_tilde(*bp.t_2star)));
}

TEST_CASE("case 1: t* closes the scale equation") {
  const auto p = map_concrete(nwidths::testing::concrete_case1());
  const double n = std::ldexp(1.0, 18);
  const auto bp = solve_breakpoints(p, CaseId::of(1), n);
  REQUIRE(bp.t_star);
  const double mu = to_double(p.mu_star), al = to_double(p.alpha_star), g = to_double(p.gamma_star);
  const double s = to_double(p.s_star);
  const double lhs = (mu + al + g * (s + 0.5 - 0.5)) * *bp.t_star;
  CHECK(lhs == Approx(s * 18));
}

TEST_CASE("property: breakpoint identities for every case") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> exponent(8, 30);
  for (const auto& id : covered_case_ids()) {
    for (int i = 0; i < 20; ++i) {
      const auto p = sample_admissible(rng, id);
      REQUIRE(p);
      const double n = std::ldexp(1.0, exponent(rng));
      const auto bp = solve_breakpoints(*p, id, n);
      for (const auto& check : breakpoint_identities(*p, bp)) {
        INFO(id.label() << " " << check.name);
        CHECK(check.relative_error() <= 1e-10);
      }
    }
  }
}

TEST_CASE("property: closed-form peaks decay as n^-theta_j") {
  std::mt19937_64 rng(22);
  for (const auto& id : covered_case_ids()) {
    const auto specs = peak_specs(id);
    for (int i = 0; i < 10; ++i) {
      const auto p = sample_admissible(rng, id);
      REQUIRE(p);
      const auto table = theta_table(*p);
      REQUIRE(specs.size() == table.thetas.size());
      for (int e : {12, 20}) {
        const auto bp = solve_breakpoints(*p, id, std::ldexp(1.0, e));
        for (std::size_t j = 0; j < specs.size(); ++j) {
          INFO(id.label() << " j=" << j + 1);
          CHECK(peak_log2(*p, bp, specs[j]) == Approx(-to_double(table.thetas[j]) * e).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("region counts") {
  const auto count = [](const char* a, const char* b, const char* c, CaseId expect) {
    auto p = abstract_tuple(a, b, c, "2", "1", "2", "1");
    REQUIRE(case_of(p) == expect);
    return build_regions(p, expect, solve_breakpoints(p, expect, 1 << 16)).size();
  };
  CHECK(count("3/4", "3/5", "1/5", CaseId::of(6, 'a')) == 3);
  CHECK(count("4/5", "3/5", "1/4", CaseId::of(9, 'a')) == 4);

  std::mt19937_64 rng(3);
  const auto p10 = sample_admissible(rng, CaseId::of(10, 'a'));
  REQUIRE(p10);
  const auto regions = build_regions(*p10, CaseId::of(10, 'a'), solve_breakpoints(*p10, CaseId::of(10, 'a'), 1 << 16));
  CHECK(regions.size() == 5);

  const auto p9 = abstract_tuple("4/5", "3/5", "1/4", "3/2", "3/4", "2", "-1/2");
  const auto r9 = build_regions(p9, CaseId::of(9, 'a'), solve_breakpoints(p9, CaseId::of(9, 'a'), 1 << 16));
  REQUIRE(r9.size() == 4);
  CHECK(r9[1].id == "II");
  CHECK(r9[1].envelope == Envelope::interpolated);
}

TEST_CASE("allocation and ambiguity") {
  const auto p = map_concrete(nwidths::testing::concrete_case5());
  const auto a = choose_allocation(p, CaseId::of(5), 1 << 16);
  CHECK(a.j_star == 3);
  CHECK(a.eps == Approx(0.25 / 8));
  CHECK(budget_constant(a.eps) > 4);

  const auto tie = abstract_tuple("1/2", "1/2", "1/2", "1/4", "1", "1", "-1/4");
  CHECK_THROWS_AS(choose_allocation(tie, CaseId::of(1), 1 << 16), AmbiguousDominance);
}

TEST_CASE("least squares slope recovers a synthetic power law") {
  std::vector<double> xs, ys;
  for (int e = 10; e <= 24; ++e) {
    xs.push_back(e);
    ys.push_back(std::log2(3.0 * std::pow(std::ldexp(1.0, e), -0.8125)));
  }
  double rms = 1;
  CHECK(least_squares_slope(xs, ys, &rms) == Approx(-0.8125).epsilon(1e-6));
  CHECK(rms < 1e-9);
}

TEST_CASE("property: budget, peak dominance and slope on representative tuples") {
  const auto grid = dyadic_grid(10, 24);
  for (const auto& rep : representatives()) {
    INFO("case " << rep.label);
    const auto result = fit_exponent(rep.params, grid);
    const auto table = theta_table(rep.params);
    REQUIRE(table.j_star);
    CHECK(result.predicted == Approx(-to_double(table.min_theta())));
    CHECK(std::abs(result.residual) <= 0.05);
    for (double r : result.budget_ratio) CHECK(r <= 1.0);

    std::vector<double> ratios;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(result.S_values[i] > 0);
      ratios.push_back(result.S_values[i] / max_of(result.peaks[i]));
    }
    for (double r : ratios) {
      CHECK(r <= 16.0);
      CHECK(r >= 1.0 / 16);
    }
    const std::vector<double> early(ratios.begin(), ratios.begin() + 5);
    const std::vector<double> late(ratios.end() - 5, ratios.end());
    CHECK(max_of(late) <= 1.5 * max_of(early));
  }
}

TEST_CASE("evaluate_S sums only region terms, boundary and tail") {
  const auto p = abstract_tuple("3/4", "3/5", "1/5", "9/4", "2", "3", "-1/4");
  const double n = 1 << 18;
  const auto alloc = choose_allocation(p, CaseId::of(6, 'a'), n);
  const auto s = evaluate_S(p, n, alloc);
  double sum = 0;
  for (const auto& [name, value] : s.by_region) sum += value;
  CHECK(sum == Approx(s.total).epsilon(1e-12));
  CHECK(s.fallback_points == 0);
  CHECK_FALSE(s.truncated);
  CHECK(s.rank_sum <= budget_constant(alloc.eps) * n);
}

TEST_CASE("property: probe slopes track their own exponents") {
  for (const auto& rep : representatives()) {
    const auto id = case_of(rep.params);
    const auto set = lower_bound_set(rep.params);
    std::vector<double> xs;
    std::vector<std::vector<double>> ys(set.size());
    for (int e = 10; e <= 24; ++e) {
      const auto probes = lower_bound_probe(rep.params, id, std::ldexp(1.0, e));
      REQUIRE(probes.size() == set.size());
      xs.push_back(e);
      for (std::size_t k = 0; k < probes.size(); ++k) {
        CHECK(probes[k].label == set[k].label);
        CHECK(probes[k].value > 0);
        ys[k].push_back(std::log2(probes[k].value));
      }
    }
    for (std::size_t k = 0; k < set.size(); ++k) {
      INFO("case " << rep.label << " probe " << set[k].label);
      CHECK(std::abs(least_squares_slope(xs, ys[k]) + to_double(set[k].exponent)) <= 0.1);
    }
  }
}

TEST_CASE("case 11: ll probe slope") {
  const auto p = abstract_tuple("1/3", "2/3", "1/4", "7/4", "3/4", "7/4", "0");
  const auto tp = theta_pair(p);
  const double expected = -to_double(tp.hat + (make_rational(2, 3) - make_rational(1, 2)) * tp.tilde / p.s_star);
  std::vector<double> xs, ys;
  for (int e = 10; e <= 24; ++e) {
    for (const auto& probe : lower_bound_probe(p, CaseId::of(11), std::ldexp(1.0, e)))
      if (probe.label == "ll") ys.push_back(std::log2(probe.value));
    xs.push_back(e);
  }
  REQUIRE(ys.size() == xs.size());
  CHECK(std::abs(least_squares_slope(xs, ys) - expected) <= 0.05);
}

TEST_CASE("case 1: l4 probe decays like n^-theta~") {
  const auto p = map_concrete(nwidths::testing::concrete_case1());
  std::vector<double> xs, ys;
  for (int e = 10; e <= 24; e += 2) {
    for (const auto& probe : lower_bound_probe(p, CaseId::of(1), std::ldexp(1.0, e)))
      if (probe.label == "l4") ys.push_back(std::log2(probe.value));
    xs.push_back(e);
  }
  CHECK(least_squares_slope(xs, ys) == Approx(-0.5).epsilon(1e-3));
}
