#pragma once

#include <nwidths/ballwidths.hpp>
#include <nwidths/errors.hpp>
#include <nwidths/exponents.hpp>
#include <nwidths/log_affine.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nwidths {

using Form = LogAffine<double>;

// Scale lines and scalar breakpoints for one (params, n). Levels t are in units
// of the outer index, so the scaled level is T = k* t.
struct Breakpoints {
  CaseId case_id;
  double log2_n = 0.0;
  double k = 1.0;

  Form hat;     // ν' = n
  Form tilde;   // p0 radius = p1 radius · ν'^{1/p0 − 1/p1}
  Form equal;   // p0 radius = p1 radius
  Form line_q;  // ν' = n^{q/2}
  Form line_p0d;
  Form line_p1d;
  std::optional<Form> prime;  // the case's m' line (cases 6..12)

  std::optional<double> t_star;
  std::optional<double> t_2star;
  std::optional<double> t_3star;
  std::optional<double> t_n;

  double m_on(const Form& f, double t) const { return solve_m(f, k * t, log2_n); }
  double m_hat(double t) const { return m_on(hat, t); }
  double m_tilde(double t) const { return m_on(tilde, t); }
  double m_equal(double t) const { return m_on(equal, t); }
  double m_q(double t) const { return m_on(line_q, t); }
  double m_p0d(double t) const { return m_on(line_p0d, t); }
  double m_p1d(double t) const { return m_on(line_p1d, t); }
  double m_prime(double t) const;
  // Upper end of the allocation window: the largest of the three ν' = n^{x/2} lines.
  double m_bar(double t) const;
};

// Each scalar identity, written as lhs = rhs with both sides in log2 units.
struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error() const;
};

Breakpoints solve_breakpoints(const AbstractParams& params, const CaseId& case_id, double n);
std::vector<IdentityCheck> breakpoint_identities(const AbstractParams& params, const Breakpoints& bp);

struct Region {
  std::string id;
  std::function<bool(double t, double m)> contains;
  std::optional<Envelope> envelope;  // nullopt: smallest applicable envelope
};

std::vector<Region> build_regions(const AbstractParams& params, const CaseId& case_id, const Breakpoints& bp);

enum class PeakLevel { zero, t_star, t_2star, t_3star, t_n };
enum class PeakLine { hat, q, p0d, p1d };

struct PeakSpec {
  PeakLevel level = PeakLevel::zero;
  PeakLine line = PeakLine::hat;
  std::optional<Envelope> envelope;
};

// Location of the summand that realizes θ_j, in the order of case_thetas.
std::vector<PeakSpec> peak_specs(const CaseId& case_id);

struct PeakPoint {
  double t = 0.0;
  double m = 0.0;
};

PeakPoint peak_point(const Breakpoints& bp, const PeakSpec& spec);
// log2 of the summand at a real point with rank n and unrounded ν'.
double peak_log2(const AbstractParams& params, const Breakpoints& bp, const PeakSpec& spec);

struct Allocation {
  double eps = 0.0;
  double t1 = 0.0;
  double m1 = 0.0;
  int j_star = 0;
};

Allocation choose_allocation(const AbstractParams& params, const CaseId& case_id, double n);
double budget_constant(double eps);

struct SumBreakdown {
  double total = 0.0;
  std::map<std::string, double> by_region;  // region ids plus "boundary", "tail", "fallback"
  std::vector<double> peaks;                // closed-form S_j(n), j = 1..j0
  double rank_sum = 0.0;                    // Σ l_{t,m} over the window
  std::int64_t fallback_points = 0;         // points no region claimed
  std::int64_t rows = 0;
  bool truncated = false;                   // continuation rows had not died out
};

SumBreakdown evaluate_S(const AbstractParams& params, double n, const Allocation& allocation);

struct SimResult {
  std::vector<std::int64_t> n_grid;
  std::vector<double> S_values;
  std::vector<std::vector<double>> peaks;
  std::vector<double> budget_ratio;  // Σ l / (C(ε) n)
  double fitted_slope = 0.0;
  double predicted = 0.0;
  double residual = 0.0;  // fitted_slope − predicted
  double fit_rms = 0.0;
  Allocation allocation;  // at the largest n
};

// Least-squares slope of ys against xs.
double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys, double* rms = nullptr);

SimResult fit_exponent(const AbstractParams& params, const std::vector<std::int64_t>& n_grid);

struct ProbeValue {
  std::string label;
  double value = 0.0;
  std::int64_t t = 0;
  std::int64_t m = 0;
};

std::vector<ProbeValue> lower_bound_probe(const AbstractParams& params, const CaseId& case_id, double n);

}  // namespace nwidths
