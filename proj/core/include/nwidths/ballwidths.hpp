#pragma once

#include <nwidths/errors.hpp>
#include <nwidths/exponents.hpp>
#include <nwidths/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nwidths {

// 1 <= p <= inf as 1/p in [0, 1]. Unlike Extended this admits p = 1.
class LpExponent {
 public:
  LpExponent() = default;
  LpExponent(const Extended& e) : inv_(e.inv()) {}  // NOLINT(google-explicit-constructor)

  static LpExponent from_inverse(const Rational& inv);
  static LpExponent infinity() { return LpExponent(); }
  // "inf" or a rational p >= 1.
  static LpExponent parse(std::string_view text);

  const Rational& inv() const { return inv_; }
  double inv_double() const { return to_double(inv_); }
  bool is_infinite() const { return inv_ == 0; }
  bool is_one() const { return inv_ == 1; }
  std::string to_string() const;

 private:
  Rational inv_{0};
};

struct BallSpec {
  LpExponent p;  // source ball B_p^N
  LpExponent q;  // ambient norm l_q^N
  std::int64_t dim_N = 1;
  std::int64_t rank_n = 0;
};

enum class Regime { exact, gluskin_order, envelope_only };

std::string_view regime_name(Regime r);

struct WidthEstimate {
  double value = 0.0;
  Regime regime = Regime::exact;
  std::string formula_tag;
};

WidthEstimate exact_linear_width(const BallSpec& spec);
WidthEstimate gluskin_envelope(const BallSpec& spec);

// Width of B_p^N in l_q^N at rank l with unit constants, picking the exact formula
// for q <= p and the Gluskin envelope otherwise. N and l may exceed 2^63.
WidthEstimate ball_width(double inv_p, double inv_q, double N, double l);

Rational interp_lambda(const Rational& inv_p0, const Rational& inv_p1, const Rational& inv_q);

struct WBody {
  std::int64_t level_t = 0;
  std::int64_t level_m = 0;
  double radius_p1 = 1.0;
  double radius_p0 = 1.0;
  double dim_nu = 1.0;    // ⌈ν'⌉, integer valued
  double nu_prime = 1.0;  // c^{-1} 2^{γ k t} 2^m before rounding
  double inv_p0 = 0.0;
  double inv_p1 = 0.0;
};

WBody make_wbody(const AbstractParams& params, std::int64_t t, std::int64_t m);

enum class Envelope { p1_ball, p0_ball, interpolated };

std::string_view envelope_name(Envelope e);

// One inclusion envelope of λ_l(W, l_q^ν); nullopt when it does not apply
// (interpolation outside its range, or a ball regime with no formula).
std::optional<WidthEstimate> single_envelope(const WBody& body, double inv_q, double l, Envelope which);

// Minimum of all applicable envelopes.
WidthEstimate intersection_width_envelope(const WBody& body, double inv_q, double l);

struct BruteForceOptions {
  int restarts = 32;
  std::uint64_t seed = 20240607;
  double tolerance = 1e-8;
  bool parallel = true;
};

// Minimax over rank <= n maps of max ‖x − Ax‖_q over the extreme points of B_p^N,
// p in {1, inf}. The budget counts gradient steps over all restarts.
double brute_force_linear_width(const BallSpec& spec, std::int64_t budget,
                                const BruteForceOptions& options = {});

}  // namespace nwidths
