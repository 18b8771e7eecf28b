#include <nwidths/exponents.hpp>
#include <nwidths/theta_forms.hpp>

#include <algorithm>
#include <stdexcept>

namespace nwidths {

namespace {

const Rational kHalf = make_rational(1, 2);

struct Vars {
  Rational a, b, c, s, g, al, mu;

  explicit Vars(const AbstractParams& p)
      : a(p.p0.inv()),
        b(p.p1.inv()),
        c(p.inv_q),
        s(p.s_star),
        g(p.gamma_star),
        al(p.alpha_star),
        mu(p.mu_star) {}

  Rational denominator() const { return mu + al + g * (s + a - b); }
  Rational p0d() const { return 1 / (1 - a); }
  Rational p1d() const { return 1 / (1 - b); }
  Rational q() const { return 1 / c; }
};

void require_open_unit(const Rational& inv_q) {
  if (inv_q <= 0 || inv_q >= 1) throw OutOfRange("1/q must lie in (0, 1), got " + to_string(inv_q));
}

// Case predicates in inverse exponents a = 1/p0, b = 1/p1, c = 1/q.
bool case_holds(int major, const Rational& a, const Rational& b, const Rational& c) {
  const Rational& h = kHalf;
  const bool q_gt_2 = c < h;
  switch (major) {
    case 1: return a <= c && b <= c;
    case 2: return a < c && b > c && (c >= h || b <= h);
    case 3: return a >= c && b >= c && (c >= h || (a <= h && b <= h));
    case 4: return b < c && a > c && (c >= h || a <= h);
    case 5: return q_gt_2 && a >= h && b >= h && a + c >= 1 && b + c >= 1;
    case 6: return q_gt_2 && a > b && b >= h && a + c <= 1 && b + c <= 1;
    case 7: return q_gt_2 && b > a && a >= h && a + c <= 1 && b + c <= 1;
    case 8: return q_gt_2 && a == b && a > h && a + c <= 1;
    case 9: return q_gt_2 && a > h && b >= h && a + c > 1 && b + c < 1;
    case 10: return q_gt_2 && a >= h && b > h && a + c < 1 && b + c > 1;
    case 11: return q_gt_2 && c < a && a < h && b > h && b + c <= 1;
    case 12: return q_gt_2 && c < b && b < h && a > h && a + c <= 1;
    default: return false;
  }
}

char subcase(int major, const Rational& a, const Rational& b) {
  switch (major) {
    case 6:
    case 9: return b > kHalf ? 'a' : 'b';
    case 7:
    case 10: return a > kHalf ? 'a' : 'b';
    default: return 0;
  }
}

// Gaps a and b are closed at p0 = q (resp. p1 = q) so that the note covers the
// boundary tuples no case claims.
bool gap_holds(char gap, const Rational& a, const Rational& b, const Rational& c) {
  if (c >= kHalf) return false;
  switch (gap) {
    case 'a': return a <= c && b >= kHalf;
    case 'b': return b <= c && a >= kHalf;
    case 'c': return a < kHalf && b + c > 1;
    case 'd': return b < kHalf && a + c > 1;
    default: return false;
  }
}

// Exponent of λ_n(B_x^ν, l_q^ν) with ν ≍ n^κ, read off Gluskin's and Pietsch–Stesin's
// formulas (x = 1/p, c = 1/q).
Rational ball_width_exponent(const Rational& x, const Rational& c, const Rational& kappa) {
  if (x <= c) return kappa * (c - x);
  if (x > kHalf && c < kHalf) {
    const Rational grow = std::max(c, Rational(1 - x));
    return std::min(Rational(0), Rational(-kHalf + kappa * grow));
  }
  return 0;
}

}  // namespace

Extended Extended::from_inverse(const Rational& inv) {
  if (inv < 0 || inv >= 1) throw OutOfRange("1/p must lie in [0, 1), got " + nwidths::to_string(inv));
  return Extended(inv);
}

Extended Extended::from_exponent(const Rational& p) {
  if (p <= 1) throw OutOfRange("exponent must exceed 1, got " + nwidths::to_string(p));
  return Extended(1 / p);
}

Extended Extended::parse(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity") return infinity();
  return from_exponent(parse_rational(text));
}

std::string Extended::to_string() const {
  if (is_infinite()) return "inf";
  return nwidths::to_string(Rational(1 / inv_));
}

std::string CaseId::label() const {
  if (!covered()) return std::string("gap ") + gap;
  std::string out = std::to_string(major);
  if (sub != 0) out += sub;
  return out;
}

std::vector<CaseId> matching_cases(const Extended& p0, const Extended& p1, const Rational& inv_q) {
  require_open_unit(inv_q);
  std::vector<CaseId> out;
  for (int major = 1; major <= 12; ++major) {
    if (case_holds(major, p0.inv(), p1.inv(), inv_q))
      out.push_back(CaseId::of(major, subcase(major, p0.inv(), p1.inv())));
  }
  return out;
}

std::vector<char> matching_gaps(const Extended& p0, const Extended& p1, const Rational& inv_q) {
  require_open_unit(inv_q);
  std::vector<char> out;
  for (char g : {'a', 'b', 'c', 'd'}) {
    if (gap_holds(g, p0.inv(), p1.inv(), inv_q)) out.push_back(g);
  }
  return out;
}

CaseId classify(const Extended& p0, const Extended& p1, const Rational& inv_q) {
  const auto cases = matching_cases(p0, p1, inv_q);
  if (!cases.empty()) return cases.front();
  const auto gaps = matching_gaps(p0, p1, inv_q);
  if (!gaps.empty()) return CaseId::of_gap(gaps.front());
  throw std::logic_error("classification is not total at (" + p0.to_string() + ", " + p1.to_string() +
                         ", 1/q=" + to_string(inv_q) + ")");
}

AbstractParams map_concrete(const ConcreteParams& cp) {
  const Rational d = cp.d;
  const auto image = concrete_to_abstract(d, make_rational(cp.r, cp.d), cp.beta, cp.sigma, cp.lambda_w);
  AbstractParams ap;
  ap.p0 = cp.p0;
  ap.p1 = cp.p1;
  ap.inv_q = cp.inv_q;
  ap.s_star = image.s;
  ap.gamma_star = image.gamma;
  ap.alpha_star = image.alpha;
  ap.mu_star = image.mu;
  // The companion constants k* and c cancel from every exponent.
  ap.k_star = 1;
  ap.c_const = 1;
  ap.t0 = 0;
  return ap;
}

ThetaPair theta_pair(const AbstractParams& params) {
  const Vars v(params);
  const auto forms = abstract_theta_forms(v.a, v.b, v.c, v.s, v.g, v.mu, v.al);
  if (forms.tilde.den == 0) throw DegenerateDenominator("μ* + α* + γ*(s* + 1/p0 − 1/p1) = 0");
  return {forms.tilde.num / forms.tilde.den, forms.hat.num / forms.hat.den};
}

ThetaPair concrete_theta_pair(const ConcreteParams& cp) {
  const Rational r = cp.r;
  const Rational d = cp.d;
  const auto forms = concrete_theta_forms(r, d, Rational(r / d), cp.p0.inv(), cp.p1.inv(), cp.inv_q, cp.beta,
                                          cp.sigma, cp.lambda_w);
  if (forms.tilde.den == 0) throw DegenerateDenominator("β + σ + r + d/p0 − d/p1 = 0");
  return {forms.tilde.num / forms.tilde.den, forms.hat.num / forms.hat.den};
}

std::vector<Rational> case_thetas(const CaseId& id, const AbstractParams& params, const ThetaPair& tp) {
  if (!id.covered()) throw UncoveredCase("tuple lies in " + id.label());
  const Vars v(params);
  const Rational& s = v.s;
  const Rational& a = v.a;
  const Rational& b = v.b;
  const Rational& c = v.c;
  const Rational& h = kHalf;
  const Rational& tt = tp.tilde;
  const Rational& th = tp.hat;
  const Rational q = v.q();
  const Rational p0d = v.p0d();
  const Rational p1d = v.p1d();
  // Shifted θ̂ that recurs in cases 6, 9 (x6) and 7, 10 (x7).
  const Rational x6 = th + (a - b) * (1 - tt / s);
  const Rational x7 = th + (b - a) * tt / s;
  const bool sub_a = id.sub == 'a';
  switch (id.major) {
    case 1: return {s, tt};
    case 2: return {s + c - b, tt, th};
    case 3: return {s + c - b, th};
    case 4: return {s, tt, th};
    case 5: return {s + h - b, q * (s + c - b) / 2, th + h - c, q * th / 2};
    case 6:
      if (sub_a) return {s + c - h, p1d * (s + c - b) / 2, x6 + b - h, p1d * x6 / 2, p0d * th / 2};
      return {s + c - h, th + (a - h) * (1 - tt / s), p0d * th / 2};
    case 7:
      if (sub_a) return {s + c - h, p1d * (s + c - b) / 2, x7 + a - h, p0d * x7 / 2, p1d * th / 2};
      return {s + c - h, p1d * (s + c - b) / 2, th + (b - h) * tt / s, p1d * th / 2};
    case 8: return {s + c - h, p1d * (s + c - b) / 2, th + b - h, p1d * th / 2};
    case 9:
      if (sub_a) return {s + c - h, p1d * (s + c - b) / 2, x6 + b - h, p1d * x6 / 2, th + h - c, q * th / 2};
      return {s + c - h, th + (a - h) * (1 - tt / s), th + h - c, q * th / 2};
    case 10:
      if (sub_a) return {s + h - b, q * (s + c - b) / 2, x7 + a - h, p0d * x7 / 2, th + h - c, q * th / 2};
      return {s + h - b, q * (s + c - b) / 2, th + (b - h) * tt / s, th + h - c, q * th / 2};
    case 11: return {s + c - h, p1d * (s + c - b) / 2, th + (b - h) * tt / s, p1d * th / 2};
    case 12: return {s + c - b, th + (a - h) * (1 - tt / s), p0d * th / 2};
    default: break;
  }
  throw UncoveredCase("unknown case " + id.label());
}

std::vector<std::string> case_theta_formulas(const CaseId& id) {
  const std::string x6 = "θ̂+(1/p0−1/p1)(1−θ̃/s*)";
  const std::string x7 = "θ̂+(1/p1−1/p0)θ̃/s*";
  const bool sub_a = id.sub == 'a';
  switch (id.major) {
    case 1: return {"s*", "θ̃"};
    case 2: return {"s*+1/q−1/p1", "θ̃", "θ̂"};
    case 3: return {"s*+1/q−1/p1", "θ̂"};
    case 4: return {"s*", "θ̃", "θ̂"};
    case 5: return {"s*+1/2−1/p1", "q(s*+1/q−1/p1)/2", "θ̂+1/2−1/q", "qθ̂/2"};
    case 6:
      if (sub_a)
        return {"s*+1/q−1/2", "p1'(s*+1/q−1/p1)/2", x6 + "+1/p1−1/2", "p1'(" + x6 + ")/2", "p0'θ̂/2"};
      return {"s*+1/q−1/2", "θ̂+(1/p0−1/2)(1−θ̃/s*)", "p0'θ̂/2"};
    case 7:
      if (sub_a)
        return {"s*+1/q−1/2", "p1'(s*+1/q−1/p1)/2", x7 + "+1/p0−1/2", "p0'(" + x7 + ")/2", "p1'θ̂/2"};
      return {"s*+1/q−1/2", "p1'(s*+1/q−1/p1)/2", "θ̂+(1/p1−1/2)θ̃/s*", "p1'θ̂/2"};
    case 8: return {"s*+1/q−1/2", "p'(s*+1/q−1/p)/2", "θ̂+1/p−1/2", "p'θ̂/2"};
    case 9:
      if (sub_a)
        return {"s*+1/q−1/2", "p1'(s*+1/q−1/p1)/2", x6 + "+1/p1−1/2", "p1'(" + x6 + ")/2", "θ̂+1/2−1/q",
                "qθ̂/2"};
      return {"s*+1/q−1/2", "θ̂+(1/p0−1/2)(1−θ̃/s*)", "θ̂+1/2−1/q", "qθ̂/2"};
    case 10:
      if (sub_a)
        return {"s*+1/2−1/p1", "q(s*+1/q−1/p1)/2", x7 + "+1/p0−1/2", "p0'(" + x7 + ")/2", "θ̂+1/2−1/q",
                "qθ̂/2"};
      return {"s*+1/2−1/p1", "q(s*+1/q−1/p1)/2", "θ̂+(1/p1−1/2)θ̃/s*", "θ̂+1/2−1/q", "qθ̂/2"};
    case 11: return {"s*+1/q−1/2", "p1'(s*+1/q−1/p1)/2", "θ̂+(1/p1−1/2)θ̃/s*", "p1'θ̂/2"};
    case 12: return {"s*+1/q−1/p1", "θ̂+(1/p0−1/2)(1−θ̃/s*)", "p0'θ̂/2"};
    default: break;
  }
  throw UncoveredCase("no formulas for " + id.label());
}

ExponentTable theta_table(const AbstractParams& params) {
  ExponentTable table;
  table.case_id = classify(params.p0, params.p1, params.inv_q);
  if (!table.case_id.covered()) throw UncoveredCase("tuple lies in " + table.case_id.label());
  const ThetaPair tp = theta_pair(params);
  table.theta_tilde = tp.tilde;
  table.theta_hat = tp.hat;
  table.thetas = case_thetas(table.case_id, params, tp);
  table.j0 = static_cast<int>(table.thetas.size());

  const Rational lowest = *std::min_element(table.thetas.begin(), table.thetas.end());
  std::optional<Rational> runner_up;
  for (int j = 0; j < table.j0; ++j) {
    const Rational& th = table.thetas[static_cast<std::size_t>(j)];
    if (th == lowest) {
      table.minimizers.push_back(j + 1);
    } else if (!runner_up || th < *runner_up) {
      runner_up = th;
    }
  }
  if (table.minimizers.size() == 1) {
    table.j_star = table.minimizers.front();
    if (runner_up) table.gap = *runner_up - lowest;
  } else {
    table.gap = Rational(0);
  }

  const Vars v(params);
  if (v.a >= v.c && v.b >= v.c && v.s + v.a - v.b != 0)
    table.tail_exponent = (v.al * (v.s + v.c - v.b) - v.mu * (v.a - v.c)) / (v.s + v.a - v.b);
  return table;
}

std::vector<Violation> check_hypotheses(const AbstractParams& params) {
  std::vector<Violation> out;
  const Vars v(params);
  auto need = [&](bool ok, const char* inequality, const Rational& lhs) {
    if (!ok) out.push_back({inequality, "left side evaluates to " + to_string(lhs)});
  };
  need(v.s > 0, "s*>0", v.s);
  need(v.s + v.c - v.b > 0, "s*+1/q−1/p1>0", v.s + v.c - v.b);
  need(v.s + v.a - v.b > 0, "s*+1/p0−1/p1>0", v.s + v.a - v.b);
  need(v.mu + v.al + v.g * (v.a - v.b) > 0, "μ*+α*+γ*/p0−γ*/p1>0", v.mu + v.al + v.g * (v.a - v.b));
  need(v.mu + v.al > 0, "μ*+α*>0", v.mu + v.al);
  need(v.g > 0, "γ*>0", v.g);
  if (params.k_star < 1) out.push_back({"k*≥1", "k* = " + std::to_string(params.k_star)});
  need(params.c_const >= 1, "c≥1", params.c_const);
  if (v.a <= v.c) need(v.al > v.g * (v.c - v.a), "α*>γ*/q−γ*/p0 (p0≥q)", v.al - v.g * (v.c - v.a));
  const bool both_below = v.a >= v.c && v.b >= v.c;
  const bool straddle = v.a > v.c && v.b < v.c;
  if (both_below || straddle) {
    const Rational lhs = v.al * (v.s + v.c - v.b) - v.mu * (v.a - v.c);
    need(lhs > 0, "α*(s*+1/q−1/p1)>μ*(1/p0−1/q)", lhs);
  }
  const CaseId id = classify(params.p0, params.p1, params.inv_q);
  if (!id.covered()) {
    out.push_back({"(p0,p1,q) covered by a case 1–12", "tuple lies in " + id.label()});
  } else if (v.denominator() != 0) {
    const auto table = theta_table(params);
    if (!table.j_star) out.push_back({"θ_{j*}<min_{j≠j*}θ_j", "minimum θ_j is attained more than once"});
  }
  return out;
}

std::vector<Violation> check_hypotheses(const ConcreteParams& cp) {
  std::vector<Violation> out;
  if (cp.r < 1) out.push_back({"r≥1", "r = " + std::to_string(cp.r)});
  if (cp.d < 1) {
    out.push_back({"d≥1", "d = " + std::to_string(cp.d)});
    return out;
  }
  const Rational& a = cp.p0.inv();
  const Rational& b = cp.p1.inv();
  const Rational& c = cp.inv_q;
  const Rational rd = make_rational(cp.r, cp.d);
  auto need = [&](bool ok, const char* inequality, const Rational& lhs) {
    if (!ok) out.push_back({inequality, "left side evaluates to " + to_string(lhs)});
  };
  need(c > 0 && c < 1, "1<q<∞", c);
  const Rational smooth = rd + std::min(c, a) - b;
  need(smooth > 0, "r/d+min{1/q,1/p0}−1/p1>0", smooth);
  const Rational w1 = cp.beta + cp.sigma + Rational(cp.d) * (a - b);
  need(w1 > 0, "β+σ+d/p0−d/p1>0", w1);
  need(cp.beta + cp.sigma > 0, "β+σ>0", cp.beta + cp.sigma);
  if (c <= 0 || c >= 1) return out;
  const CaseId id = classify(cp.p0, cp.p1, c);
  if (!id.covered()) {
    out.push_back({"(p0,p1,q) covered by a case 1–12", "tuple lies in " + id.label()});
    return out;
  }
  if (cp.beta + cp.sigma + Rational(cp.r) + Rational(cp.d) * (a - b) == 0) return out;
  const ThetaPair tp = concrete_theta_pair(cp);
  if (a <= c) need(tp.tilde > 0, "θ̃>0 (p0≥q)", tp.tilde);
  if (a > c) need(tp.hat > 0, "θ̂>0 (p0<q)", tp.hat);
  const auto table = theta_table(map_concrete(cp));
  if (!table.j_star) out.push_back({"θ_{j*}<min_{j≠j*}θ_j", "minimum θ_j is attained more than once"});
  return out;
}

std::vector<Construction> lower_bound_constructions(const AbstractParams& params, const CaseId& id) {
  if (!id.covered()) throw UncoveredCase("tuple lies in " + id.label());
  const Vars v(params);
  const Rational& a = v.a;
  const Rational& b = v.b;
  const Rational one = 1;
  const Rational q_half = v.q() / 2;
  const Rational p0_half = v.p0d() / 2;
  const Rational p1_half = v.p1d() / 2;
  // On the m_t line the smaller exponent's ball sits inside W.
  const Rational mt_ball = std::max(a, b);
  // On the m̃ line the larger exponent's ball sits inside W.
  const Rational mtilde_ball = std::min(a, b);

  const Construction l1{"l1", ScaleLine::level_zero, one, b, std::nullopt, false};
  const Construction l2{"l2", ScaleLine::level_zero, q_half, b, std::nullopt, false};
  const Construction l3{"l3", ScaleLine::level_zero, p1_half, b, std::nullopt, false};
  const Construction l4{"l4", ScaleLine::m_tilde, one, mtilde_ball, std::nullopt, true};
  const Construction l5{"l5", ScaleLine::m_t, one, mt_ball, std::nullopt, false};
  const Construction c00{"00", ScaleLine::m_t, one, mt_ball, std::nullopt, false};
  const Construction c000{"000", ScaleLine::m_t, q_half, mt_ball, std::nullopt, false};
  const Construction c11{"11", ScaleLine::m_tilde, one, b, std::nullopt, false};
  const Construction c22{"22", ScaleLine::m_tilde, p1_half, b, std::nullopt, false};
  const Construction c33{"33", ScaleLine::m_tilde, one, a, std::nullopt, false};
  const Construction c44{"44", ScaleLine::m_tilde, p0_half, a, std::nullopt, false};
  const Construction c55{"55", ScaleLine::m_t, p0_half, a, std::nullopt, false};
  const Construction c66{"66", ScaleLine::m_t, p1_half, b, std::nullopt, false};
  const Construction ll{"ll", ScaleLine::m_bar, one, kHalf, '0', false};
  const Construction ll1{"ll1", ScaleLine::m_bar1, one, kHalf, '1', false};

  switch (id.major) {
    case 1: return {l1, l4};
    case 2: return {l1, l4, l5};
    case 3: return {l1, l5};
    case 4: return {l1, l4, l5};
    case 5: return {l1, l2, c00, c000};
    case 6:
      if (id.sub == 'a') return {l1, l3, c11, c22, c55};
      return {l1, c11, c55};
    case 7:
      if (id.sub == 'a') return {l1, l3, c33, c44, c66};
      return {l1, l3, c33, c66};
    case 8: return {l1, l3, c11, c22, c55};
    case 9:
      if (id.sub == 'a') return {l1, l3, c11, c22, c00, c000};
      return {l1, c11, c00, c000};
    case 10:
      if (id.sub == 'a') return {l1, l2, c33, c44, c00, c000};
      return {l1, l2, c33, c00, c000};
    case 11: return {l1, l3, c66, ll};
    case 12: return {l1, c55, ll1};
    default: break;
  }
  throw UncoveredCase("unknown case " + id.label());
}

Rational construction_exponent(const AbstractParams& params, const Construction& k) {
  const Vars v(params);
  const BodyForms<Rational> body(v.a, v.b, v.c, v.s, v.g, v.mu, v.al);
  // Work in units of L: set L = 1 and solve for (T/L, m/L).
  const LogAffine<Rational> scale = body.nu - LogAffine<Rational>{0, 0, k.kappa};
  const auto [tau, omega] = solve_pair(body.line(k.line, v.a, v.b), scale, Rational(1));
  const Rational r1 = body.r1.at(tau, omega, 1);
  const Rational r0 = body.r0.at(tau, omega, 1);
  // Largest multiple of B_x inside W: each ball constraint costs ν^{(1/p_i − x)_+}.
  const Rational side1 = r1 - k.kappa * positive_part(v.b - k.ball_inv);
  const Rational side0 = r0 - k.kappa * positive_part(v.a - k.ball_inv);
  const Rational radius = std::min(side0, side1);
  return -(radius + ball_width_exponent(k.ball_inv, v.c, k.kappa));
}

std::vector<LowerBoundTerm> lower_bound_set(const AbstractParams& params) {
  const CaseId id = classify(params.p0, params.p1, params.inv_q);
  std::vector<LowerBoundTerm> out;
  for (const auto& k : lower_bound_constructions(params, id)) out.push_back({k.label, construction_exponent(params, k)});
  return out;
}

std::vector<Residual> identity_suite(const AbstractParams& params) {
  return identity_suite(params, theta_pair(params));
}

std::vector<Residual> identity_suite(const AbstractParams& params, const ThetaPair& tp) {
  const Vars v(params);
  const Rational den = v.denominator();
  if (den == 0 || v.s == 0) throw DegenerateDenominator("identity suite needs D ≠ 0 and s* ≠ 0");
  const Rational& a = v.a;
  const Rational& b = v.b;
  const Rational& c = v.c;
  const Rational& s = v.s;
  const Rational& h = kHalf;
  const Rational& tt = tp.tilde;
  const Rational& th = tp.hat;
  const Rational p1_side = v.mu + v.g * (s + c - b);
  const Rational p0_side = v.al + v.g * a - v.g * c;
  return {
      {"eq", s * p1_side / den - s - c + b - (-th - (a - b) * (1 - tt / s))},
      {"eq1", -s * p0_side / den - c + a - (-th - (b - a) * tt / s)},
      {"eq2", -p0_side * (s + a - h) / den - c + a - (-th - (b - h) * tt / s)},
      {"eq3", p1_side * (s + h - b) / den - s - c + b - (-th - (a - h) * (1 - tt / s))},
  };
}

}  // namespace nwidths
