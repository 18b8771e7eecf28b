#include <nwidths/sampling.hpp>

#include <algorithm>

namespace nwidths {

namespace {

Rational grid_value(std::mt19937_64& rng, int lo, int hi, int den) {
  std::uniform_int_distribution<int> pick(lo, hi);
  return make_rational(pick(rng), den);
}

std::vector<Rational> distinct(std::vector<Rational> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

AbstractParams with_exponents(const Rational& a, const Rational& b, const Rational& c, int variant) {
  AbstractParams p;
  p.p0 = Extended::from_inverse(a);
  p.p1 = Extended::from_inverse(b);
  p.inv_q = c;
  if (variant == 0) {
    p.s_star = 2;
    p.gamma_star = 1;
    p.mu_star = make_rational(1, 2);
    p.alpha_star = 1;
  } else {
    p.s_star = make_rational(7, 4);
    p.gamma_star = make_rational(3, 4);
    p.mu_star = 0;
    p.alpha_star = make_rational(7, 4);
  }
  return p;
}

bool same_sets(const CaseId& x, const CaseId& y, const Rational& a, const Rational& b, const Rational& c) {
  for (int variant = 0; variant < 2; ++variant) {
    const AbstractParams p = with_exponents(a, b, c, variant);
    const ThetaPair tp = theta_pair(p);
    if (distinct(case_thetas(x, p, tp)) != distinct(case_thetas(y, p, tp))) return false;
  }
  return true;
}

}  // namespace

std::vector<CaseId> covered_case_ids() {
  std::vector<CaseId> out;
  for (int major = 1; major <= 12; ++major) {
    if (major == 6 || major == 7 || major == 9 || major == 10) {
      out.push_back(CaseId::of(major, 'a'));
      out.push_back(CaseId::of(major, 'b'));
    } else {
      out.push_back(CaseId::of(major));
    }
  }
  return out;
}

std::optional<AbstractParams> sample_admissible(std::mt19937_64& rng, const CaseId& target, int max_tries) {
  for (int tries = 0; tries < max_tries;) {
    AbstractParams p;
    p.p0 = Extended::from_inverse(grid_value(rng, 0, 19, 20));
    p.p1 = Extended::from_inverse(grid_value(rng, 0, 19, 20));
    p.inv_q = grid_value(rng, 1, 19, 20);
    ++tries;
    if (!(classify(p.p0, p.p1, p.inv_q) == target)) continue;
    for (int inner = 0; inner < 400 && tries < max_tries; ++inner, ++tries) {
      p.s_star = grid_value(rng, 1, 40, 8);
      p.gamma_star = grid_value(rng, 1, 24, 8);
      p.alpha_star = grid_value(rng, -8, 32, 8);
      p.mu_star = grid_value(rng, -16, 24, 8);
      if (check_hypotheses(p).empty()) return p;
    }
  }
  return std::nullopt;
}

std::vector<AbstractParams> sample_spanning(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const auto ids = covered_case_ids();
  std::vector<AbstractParams> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const CaseId& id = ids[static_cast<std::size_t>(i) % ids.size()];
    auto p = sample_admissible(rng, id);
    if (!p) throw UncoveredCase("could not sample an admissible tuple for case " + id.label());
    out.push_back(*p);
  }
  return out;
}

PartitionReport partition_scan(int d) {
  PartitionReport report;
  const Rational half = make_rational(1, 2);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 1; k < d; ++k) {
        const Rational a = make_rational(i, d);
        const Rational b = make_rational(j, d);
        const Rational c = make_rational(k, d);
        const Extended p0 = Extended::from_inverse(a);
        const Extended p1 = Extended::from_inverse(b);
        ++report.tuples;
        const auto cases = matching_cases(p0, p1, c);
        const auto gaps = matching_gaps(p0, p1, c);
        if (cases.empty() && gaps.empty()) {
          ++report.uncovered;
          continue;
        }
        if (cases.empty()) {
          if (gaps.size() > 1) {
            ++report.gap_overlaps;
            const bool implied = gaps == std::vector<char>{'a', 'c'} || gaps == std::vector<char>{'b', 'd'};
            if (!implied) ++report.unexpected_gap_overlaps;
          }
          continue;
        }
        if (cases.size() > 1) {
          ++report.case_overlaps;
          for (std::size_t x = 1; x < cases.size(); ++x)
            if (!same_sets(cases[0], cases[x], a, b, c)) ++report.overlap_mismatches;
        }
        // Subcase boundaries: the a-variant formulas must collapse onto the b-variant.
        const CaseId id = classify(p0, p1, c);
        const auto check = [&](const CaseId& x, const CaseId& y) {
          ++report.boundary_checks;
          if (!same_sets(x, y, a, b, c)) ++report.boundary_mismatches;
        };
        if (id.sub == 'b') check(CaseId::of(id.major, 'a'), id);
        if (id.major == 8 && a > half) {
          check(CaseId::of(6, 'a'), id);
          check(CaseId::of(7, 'a'), id);
        }
      }
    }
  }
  return report;
}

}  // namespace nwidths
