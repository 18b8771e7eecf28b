#pragma once

#include <nwidths/errors.hpp>
#include <nwidths/log_affine.hpp>
#include <nwidths/rational.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nwidths {

// An exponent 1 < p <= inf stored as 1/p in [0, 1); 0 means p = inf.
class Extended {
 public:
  Extended() = default;

  static Extended from_inverse(const Rational& inv);
  static Extended from_exponent(const Rational& p);
  static Extended infinity() { return Extended(); }
  // "inf" or a rational p > 1.
  static Extended parse(std::string_view text);

  const Rational& inv() const { return inv_; }
  Rational dual_inv() const { return 1 - inv_; }
  // p' = p / (p - 1); finite for every admissible p.
  Rational dual() const { return 1 / dual_inv(); }
  bool is_infinite() const { return inv_ == 0; }
  std::string to_string() const;

  friend bool operator==(const Extended& a, const Extended& b) { return a.inv_ == b.inv_; }

 private:
  explicit Extended(Rational inv) : inv_(std::move(inv)) {}
  Rational inv_{0};
};

struct ConcreteParams {
  long long r = 1;
  long long d = 1;
  Extended p0;
  Extended p1;
  Rational inv_q{make_rational(1, 2)};
  Rational beta{0};
  Rational sigma{0};
  Rational lambda_w{0};
};

struct AbstractParams {
  Extended p0;
  Extended p1;
  Rational inv_q{make_rational(1, 2)};
  Rational s_star{1};
  Rational gamma_star{1};
  Rational mu_star{0};
  Rational alpha_star{0};
  long long k_star = 1;
  Rational c_const{1};
  long long t0 = 0;
};

struct CaseId {
  int major = 0;   // 1..12, 0 when the tuple sits in a gap
  char sub = 0;    // 'a' or 'b' for cases 6, 7, 9, 10
  char gap = 0;    // 'a'..'d'

  bool covered() const { return major != 0; }
  std::string label() const;
  static CaseId of(int major, char sub = 0) { return CaseId{major, sub, 0}; }
  static CaseId of_gap(char g) { return CaseId{0, 0, g}; }

  friend bool operator==(const CaseId&, const CaseId&) = default;
};

struct ThetaPair {
  Rational tilde;
  Rational hat;
};

struct ExponentTable {
  CaseId case_id;
  int j0 = 0;
  std::vector<Rational> thetas;
  Rational theta_tilde;
  Rational theta_hat;
  std::optional<int> j_star;        // 1-based
  std::vector<int> minimizers;      // 1-based indices attaining min θ_j
  std::optional<Rational> gap;      // second smallest minus smallest θ_j
  std::optional<Rational> tail_exponent;

  const Rational& min_theta() const { return thetas.at(static_cast<std::size_t>(minimizers.front() - 1)); }
};

struct Violation {
  std::string inequality;
  std::string detail;
};

struct LowerBoundTerm {
  std::string label;
  Rational exponent;
};

// One lower-bound construction: move along `line` until ν' ≍ n^kappa and inscribe
// a ball of inverse exponent ball_inv into W_{t,m}.
struct Construction {
  std::string label;
  ScaleLine line = ScaleLine::level_zero;
  Rational kappa{1};
  Rational ball_inv{0};
  // For ll and ll1: which radius the inscribed ball must be limited by.
  std::optional<char> required_side;  // '0' for k0, '1' for k1
  // l4 is a Kolmogorov-width bound; the inscribed-ball route reproduces it.
  bool kolmogorov = false;
};

struct Residual {
  std::string name;
  Rational value;
};

CaseId classify(const Extended& p0, const Extended& p1, const Rational& inv_q);

// Every case 1..12 whose closed predicate holds, in order, before tie-breaking.
std::vector<CaseId> matching_cases(const Extended& p0, const Extended& p1, const Rational& inv_q);
// Every gap a..d whose predicate holds (only meaningful when no case matches).
std::vector<char> matching_gaps(const Extended& p0, const Extended& p1, const Rational& inv_q);

AbstractParams map_concrete(const ConcreteParams& params);

ThetaPair theta_pair(const AbstractParams& params);
// θ̃, θ̂ written directly in the concrete parameters (r, d, β, σ, λ).
ThetaPair concrete_theta_pair(const ConcreteParams& params);

// The θ list of a given case evaluated at params (no classification performed).
std::vector<Rational> case_thetas(const CaseId& case_id, const AbstractParams& params,
                                  const ThetaPair& pair);

ExponentTable theta_table(const AbstractParams& params);

std::vector<Violation> check_hypotheses(const AbstractParams& params);
std::vector<Violation> check_hypotheses(const ConcreteParams& params);

std::vector<Construction> lower_bound_constructions(const AbstractParams& params, const CaseId& case_id);
std::vector<LowerBoundTerm> lower_bound_set(const AbstractParams& params);
// Exponent θ such that the construction gives λ_n ≳ n^{-θ}.
Rational construction_exponent(const AbstractParams& params, const Construction& construction);

std::vector<Residual> identity_suite(const AbstractParams& params);
std::vector<Residual> identity_suite(const AbstractParams& params, const ThetaPair& pair);

// Human-readable θ_j formulas of a case, in the order of case_thetas.
std::vector<std::string> case_theta_formulas(const CaseId& case_id);

}  // namespace nwidths
