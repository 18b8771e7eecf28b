#include <nwidths/discretization.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace nwidths {

namespace {

constexpr double kTol = 1e-9;

struct Reals {
  double a, b, c, s, g, mu, al, k;

  explicit Reals(const AbstractParams& p)
      : a(to_double(p.p0.inv())),
        b(to_double(p.p1.inv())),
        c(to_double(p.inv_q)),
        s(to_double(p.s_star)),
        g(to_double(p.gamma_star)),
        mu(to_double(p.mu_star)),
        al(to_double(p.alpha_star)),
        k(static_cast<double>(p.k_star)) {}

  double denominator() const { return mu + al + g * (s + a - b); }
  double p0d() const { return 1.0 / (1.0 - a); }
  double p1d() const { return 1.0 / (1.0 - b); }
  double q() const { return 1.0 / c; }
  bool tail() const { return a >= c && b >= c; }
  BodyForms<double> body() const { return BodyForms<double>(a, b, c, s, g, mu, al); }
};

// Groups the cases that share a proof layout.
int family(const CaseId& id) {
  if (id.major == 8) return 6;
  if (id.major >= 6) return id.major;
  return 0;
}

Form level(double x) { return Form{0.0, 0.0, x}; }

double scalar_t(const Form& e1, const Form& e2, double L, double k) { return solve_pair(e1, e2, L).first / k; }

bool le(double m, double line) { return m <= line + kTol; }
bool ge(double m, double line) { return m >= line - kTol; }

double ball_log2_factor(double x, double c, double log2_nu, double L) {
  if (x <= c) return (c - x) * log2_nu;
  if (x > 0.5 && c < 0.5) return std::min(0.0, -0.5 * L + std::max(c, 1.0 - x) * log2_nu);
  return 0.0;
}

std::optional<double> envelope_log2(const Reals& v, const BodyForms<double>& body, Envelope e, double T,
                                    double m, double L) {
  double radius = 0.0;
  double x = 0.0;
  switch (e) {
    case Envelope::p1_ball:
      radius = body.r1.at(T, m, L);
      x = v.b;
      break;
    case Envelope::p0_ball:
      radius = body.r0.at(T, m, L);
      x = v.a;
      break;
    case Envelope::interpolated: {
      const double target = 1.0 - v.c;
      if (!(std::min(v.a, v.b) < target && target < std::max(v.a, v.b))) return std::nullopt;
      const double lambda = (target - v.b) / (v.a - v.b);
      radius = (1 - lambda) * body.r1.at(T, m, L) + lambda * body.r0.at(T, m, L);
      x = target;
      break;
    }
  }
  return radius + ball_log2_factor(x, v.c, body.nu.at(T, m, L), L);
}

std::optional<WidthEstimate> safe_envelope(const WBody& body, double c, double l, Envelope e) {
  const double radius = e == Envelope::p1_ball ? body.radius_p1 : e == Envelope::p0_ball ? body.radius_p0 : 1.0;
  if (radius == 0.0) return WidthEstimate{0.0, Regime::exact, "underflow"};
  auto w = single_envelope(body, c, std::min(l, body.dim_nu), e);
  if (w && !std::isfinite(w->value)) w->value = 0.0;
  return w;
}

double min_envelope(const WBody& body, double c, double l) {
  double best = std::numeric_limits<double>::infinity();
  for (Envelope e : {Envelope::p1_ball, Envelope::p0_ball, Envelope::interpolated})
    if (auto w = safe_envelope(body, c, l, e)) best = std::min(best, w->value);
  if (!std::isfinite(best)) throw RegimeUnsupported("no envelope regime applies to this body");
  return best;
}

}  // namespace

double Breakpoints::m_prime(double t) const {
  if (!prime) throw UncoveredCase("case " + case_id.label() + " has no m' line");
  // A vertical m' line (no m dependence) bounds no region; comparisons against NaN fail.
  if (std::abs(prime->m) <= 1e-12 * (1.0 + std::abs(prime->t))) return std::numeric_limits<double>::quiet_NaN();
  return m_on(*prime, t);
}

double Breakpoints::m_bar(double t) const { return std::max({m_q(t), m_p0d(t), m_p1d(t)}); }

double IdentityCheck::relative_error() const {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return std::abs(lhs - rhs) / scale;
}

Breakpoints solve_breakpoints(const AbstractParams& params, const CaseId& case_id, double n) {
  if (!case_id.covered()) throw UncoveredCase("tuple lies in " + case_id.label());
  if (n < 2) throw OutOfRange("n must be at least 2");
  const Reals v(params);
  const BodyForms<double> body = v.body();
  Breakpoints bp;
  bp.case_id = case_id;
  bp.log2_n = std::log2(n);
  bp.k = v.k;
  const double L = bp.log2_n;

  bp.hat = body.nu - level(1.0);
  bp.tilde = body.line(ScaleLine::m_tilde, v.a, v.b);
  bp.equal = body.line(ScaleLine::m_t, v.a, v.b);
  bp.line_q = body.nu - level(v.q() / 2);
  bp.line_p0d = body.nu - level(v.p0d() / 2);
  bp.line_p1d = body.nu - level(v.p1d() / 2);

  const int fam = family(case_id);
  const auto rq = [&] {
    const double lambda = (1 - v.c - v.b) / (v.a - v.b);
    return (1 - lambda) * body.r1 + lambda * body.r0;
  };
  switch (fam) {
    case 6: bp.prime = body.r1 - (body.r0 + body.gluskin(v.a)); break;
    case 7: bp.prime = (body.r1 + body.gluskin(v.b)) - body.r0; break;
    case 9: bp.prime = body.r1 - (rq() + body.gluskin(1 - v.c)); break;
    case 10: bp.prime = body.r0 - (rq() + body.gluskin(1 - v.c)); break;
    case 11: bp.prime = body.line(ScaleLine::m_bar, v.a, v.b); break;
    case 12: bp.prime = body.line(ScaleLine::m_bar1, v.a, v.b); break;
    default: break;
  }

  const auto t_of = [&](const Form& e1, const Form& e2) { return scalar_t(e1, e2, L, v.k); };
  const int major = case_id.major;
  if (fam >= 6 && fam <= 10) {
    bp.t_star = t_of(bp.tilde, bp.hat);
    bp.t_2star = t_of(bp.tilde, (fam == 7 || fam == 10) ? bp.line_p0d : bp.line_p1d);
  } else if (major == 1 || major == 2 || major == 4) {
    bp.t_star = t_of(bp.tilde, bp.hat);
  }
  switch (fam) {
    case 6: bp.t_3star = t_of(bp.equal, bp.line_p0d); break;
    case 7: bp.t_3star = t_of(bp.equal, bp.line_p1d); break;
    case 9:
    case 10: bp.t_3star = t_of(bp.equal, bp.line_q); break;
    case 11: bp.t_3star = t_of(bp.line_p1d, *bp.prime); break;
    case 12: bp.t_3star = t_of(bp.line_p0d, *bp.prime); break;
    default: {
      if (major == 5) {
        bp.t_3star = t_of(bp.equal, bp.line_q);
      } else {
        const double widest = std::max({v.q(), v.p0d(), v.p1d()});
        bp.t_3star = t_of(bp.equal, body.nu - level(widest / 2));
      }
    }
  }
  if (fam == 11 || fam == 12) {
    bp.t_n = t_of(bp.hat, *bp.prime);
  } else if (fam == 9 || fam == 10 || fam == 0) {
    bp.t_n = t_of(bp.equal, bp.hat);
  }
  return bp;
}

std::vector<IdentityCheck> breakpoint_identities(const AbstractParams& params, const Breakpoints& bp) {
  const Reals v(params);
  const double D = v.denominator();
  const double L = bp.log2_n;
  const double s = v.s;
  const double sab = v.s + v.a - v.b;
  std::vector<IdentityCheck> out;
  const auto scalar = [&](std::string name, const std::optional<double>& t, double rhs) {
    if (!t) throw DegenerateDenominator("breakpoint for " + name + " is undefined");
    out.push_back({std::move(name), D * v.k * *t, rhs * L});
  };
  // The point (t, m) of the other line lies on the m' line; stays meaningful when m' is vertical.
  const auto on_prime = [&](std::string name, double t, double m) {
    const Form& f = *bp.prime;
    out.push_back({std::move(name), f.t * v.k * t + f.m * m, -f.l * L});
  };
  const auto coincide = [&](const std::string& name) {
    on_prime(name + "@t**", *bp.t_2star, bp.m_tilde(*bp.t_2star));
    on_prime(name + "@t***", *bp.t_3star, bp.m_equal(*bp.t_3star));
  };
  switch (family(bp.case_id)) {
    case 6:
      scalar("t* tilde meets hat", bp.t_star, s);
      scalar("t** tilde meets prime", bp.t_2star, s * v.p1d() / 2);
      scalar("t*** equal meets scale line", bp.t_3star, sab * v.p0d() / 2);
      coincide("prime line");
      break;
    case 7:
      scalar("t* tilde meets hat", bp.t_star, s);
      scalar("t** tilde meets prime", bp.t_2star, s * v.p0d() / 2);
      scalar("t*** equal meets scale line", bp.t_3star, sab * v.p1d() / 2);
      coincide("prime line");
      break;
    case 9:
      scalar("t* tilde meets hat", bp.t_star, s);
      scalar("t** tilde meets prime", bp.t_2star, s * v.p1d() / 2);
      scalar("t*** equal meets scale line", bp.t_3star, sab * v.q() / 2);
      scalar("t(n) equal meets hat", bp.t_n, sab);
      coincide("prime line");
      break;
    case 10:
      scalar("t* tilde meets hat", bp.t_star, s);
      scalar("t** tilde meets prime", bp.t_2star, s * v.p0d() / 2);
      scalar("t*** equal meets scale line", bp.t_3star, sab * v.q() / 2);
      scalar("t(n) equal meets hat", bp.t_n, sab);
      coincide("prime line");
      break;
    case 11:
      scalar("t(n) hat meets prime", bp.t_n, s + v.a - 0.5);
      scalar("t*** equal meets scale line", bp.t_3star, sab * v.p1d() / 2);
      break;
    case 12:
      scalar("t(n) hat meets prime", bp.t_n, s + 0.5 - v.b);
      scalar("t*** equal meets scale line", bp.t_3star, sab * v.p0d() / 2);
      break;
    default:
      if (bp.t_star) scalar("t* tilde meets hat", bp.t_star, s);
      break;
  }
  return out;
}

std::vector<Region> build_regions(const AbstractParams& params, const CaseId& case_id, const Breakpoints& bp) {
  if (!case_id.covered()) throw UncoveredCase("tuple lies in " + case_id.label());
  (void)params;
  using E = Envelope;
  const Breakpoints* p = &bp;
  const double t3 = bp.t_3star.value_or(std::numeric_limits<double>::infinity());
  const auto within = [t3](double t) { return t >= 0 && t <= t3 + kTol; };
  std::vector<Region> out;
  const auto add = [&](std::string id, std::optional<E> e, std::function<bool(double, double)> pred) {
    out.push_back({std::move(id), [within, pred](double t, double m) { return within(t) && pred(t, m); }, e});
  };
  switch (family(case_id)) {
    case 6:
      add("I", E::p1_ball, [p](double t, double m) { return le(m, p->m_p1d(t)) && ge(m, p->m_tilde(t)); });
      add("II", E::p1_ball, [p](double t, double m) { return ge(m, p->m_p1d(t)) && ge(m, p->m_prime(t)); });
      add("III", E::p0_ball, [p](double t, double m) { return le(m, p->m_tilde(t)) && le(m, p->m_prime(t)); });
      break;
    case 7: {
      const double t2 = bp.t_2star.value_or(0.0);
      add("I", E::p1_ball, [p](double t, double m) {
        return le(m, p->m_p1d(t)) && ge(m, p->m_tilde(t)) && ge(m, p->m_prime(t));
      });
      add("II", E::p0_ball, [p](double t, double m) { return le(m, p->m_p0d(t)) && le(m, p->m_tilde(t)); });
      add("III", E::p0_ball, [p, t2](double t, double m) {
        return t > t2 && ge(m, p->m_p0d(t)) && le(m, p->m_prime(t));
      });
      add("IV", E::p1_ball, [p](double t, double m) { return ge(m, p->m_p1d(t)); });
      break;
    }
    case 9:
      add("I", E::p1_ball, [p](double t, double m) { return le(m, p->m_p1d(t)) && ge(m, p->m_tilde(t)); });
      add("II", E::interpolated, [p](double t, double m) {
        return le(m, p->m_tilde(t)) && ge(m, p->m_equal(t)) && le(m, p->m_prime(t));
      });
      add("III", E::p1_ball, [p](double t, double m) { return ge(m, p->m_p1d(t)) && ge(m, p->m_prime(t)); });
      add("IV", E::p0_ball, [p](double t, double m) { return le(m, p->m_equal(t)); });
      break;
    case 10:
      add("I", E::p1_ball, [p](double t, double m) { return le(m, p->m_q(t)) && ge(m, p->m_equal(t)); });
      add("II", E::interpolated, [p](double t, double m) {
        return ge(m, p->m_tilde(t)) && le(m, p->m_equal(t)) && ge(m, p->m_prime(t));
      });
      add("III", E::p1_ball, [p](double t, double m) { return ge(m, p->m_q(t)); });
      add("IV", E::p0_ball, [p](double t, double m) { return le(m, p->m_p0d(t)) && le(m, p->m_tilde(t)); });
      add("V", E::p0_ball, [p](double t, double m) { return ge(m, p->m_p0d(t)) && le(m, p->m_prime(t)); });
      break;
    case 11:
      add("I", E::p1_ball, [p](double t, double m) { return le(m, p->m_p1d(t)) && ge(m, p->m_prime(t)); });
      add("II", E::p1_ball, [p](double t, double m) { return ge(m, p->m_p1d(t)); });
      add("III", E::p0_ball, [p](double t, double m) { return le(m, p->m_prime(t)); });
      break;
    case 12:
      add("I", E::p1_ball, [p](double t, double m) { return le(m, p->m_p0d(t)) && ge(m, p->m_prime(t)); });
      add("II", E::p1_ball, [p](double t, double m) { return ge(m, p->m_p0d(t)); });
      add("III", E::p0_ball, [p](double t, double m) { return le(m, p->m_prime(t)); });
      break;
    default:
      // Cases 1..5 take the smallest envelope everywhere and run past t*** when there is no tail.
      out.push_back({"I", [](double t, double) { return t >= 0; }, std::nullopt});
      break;
  }
  return out;
}

std::vector<PeakSpec> peak_specs(const CaseId& id) {
  if (!id.covered()) throw UncoveredCase("tuple lies in " + id.label());
  using L = PeakLevel;
  using M = PeakLine;
  constexpr auto p1 = Envelope::p1_ball;
  constexpr auto p0 = Envelope::p0_ball;
  constexpr auto iq = Envelope::interpolated;
  const std::optional<Envelope> least;
  const bool sub_a = id.sub == 'a';
  switch (id.major) {
    case 1: return {{L::zero, M::hat, least}, {L::t_star, M::hat, least}};
    case 2: return {{L::zero, M::hat, least}, {L::t_star, M::hat, least}, {L::t_n, M::hat, least}};
    case 3: return {{L::zero, M::hat, least}, {L::t_n, M::hat, least}};
    case 4: return {{L::zero, M::hat, least}, {L::t_star, M::hat, least}, {L::t_n, M::hat, least}};
    case 5:
      return {{L::zero, M::hat, least}, {L::zero, M::q, least}, {L::t_n, M::hat, least}, {L::t_3star, M::q, least}};
    case 6:
      if (sub_a)
        return {{L::zero, M::hat, p1}, {L::zero, M::p1d, p1}, {L::t_star, M::hat, p1},
                {L::t_2star, M::p1d, p1}, {L::t_3star, M::p0d, p1}};
      return {{L::zero, M::hat, p1}, {L::t_star, M::hat, p1}, {L::t_3star, M::p0d, p1}};
    case 7:
      if (sub_a)
        return {{L::zero, M::hat, p1}, {L::zero, M::p1d, p1}, {L::t_star, M::hat, p0},
                {L::t_2star, M::p0d, p0}, {L::t_3star, M::p1d, p1}};
      return {{L::zero, M::hat, p1}, {L::zero, M::p1d, p1}, {L::t_star, M::hat, p0}, {L::t_3star, M::p1d, p1}};
    case 8:
      return {{L::zero, M::hat, p1}, {L::zero, M::p1d, p1}, {L::t_star, M::hat, p1}, {L::t_2star, M::p1d, p1}};
    case 9:
      if (sub_a)
        return {{L::zero, M::hat, p1}, {L::zero, M::p1d, p1}, {L::t_star, M::hat, p1},
                {L::t_2star, M::p1d, p1}, {L::t_n, M::hat, iq}, {L::t_3star, M::q, iq}};
      return {{L::zero, M::hat, p1}, {L::t_star, M::hat, p1}, {L::t_n, M::hat, iq}, {L::t_3star, M::q, iq}};
    case 10:
      if (sub_a)
        return {{L::zero, M::hat, p1}, {L::zero, M::q, p1}, {L::t_star, M::hat, p0},
                {L::t_2star, M::p0d, p0}, {L::t_n, M::hat, iq}, {L::t_3star, M::q, iq}};
      return {{L::zero, M::hat, p1}, {L::zero, M::q, p1}, {L::t_star, M::hat, p0},
              {L::t_n, M::hat, iq}, {L::t_3star, M::q, iq}};
    case 11:
      return {{L::zero, M::hat, p1}, {L::zero, M::p1d, p1}, {L::t_n, M::hat, p0}, {L::t_3star, M::p1d, p1}};
    case 12: return {{L::zero, M::hat, p1}, {L::t_n, M::hat, p1}, {L::t_3star, M::p0d, p1}};
    default: break;
  }
  throw UncoveredCase("unknown case " + id.label());
}

PeakPoint peak_point(const Breakpoints& bp, const PeakSpec& spec) {
  std::optional<double> t;
  switch (spec.level) {
    case PeakLevel::zero: t = 0.0; break;
    case PeakLevel::t_star: t = bp.t_star; break;
    case PeakLevel::t_2star: t = bp.t_2star; break;
    case PeakLevel::t_3star: t = bp.t_3star; break;
    case PeakLevel::t_n: t = bp.t_n; break;
  }
  if (!t) throw DegenerateDenominator("peak level undefined for case " + bp.case_id.label());
  double m = 0.0;
  switch (spec.line) {
    case PeakLine::hat: m = bp.m_hat(*t); break;
    case PeakLine::q: m = bp.m_q(*t); break;
    case PeakLine::p0d: m = bp.m_p0d(*t); break;
    case PeakLine::p1d: m = bp.m_p1d(*t); break;
  }
  return {*t, m};
}

double peak_log2(const AbstractParams& params, const Breakpoints& bp, const PeakSpec& spec) {
  const Reals v(params);
  const BodyForms<double> body = v.body();
  const PeakPoint pt = peak_point(bp, spec);
  const double T = v.k * pt.t;
  if (spec.envelope) {
    auto value = envelope_log2(v, body, *spec.envelope, T, pt.m, bp.log2_n);
    if (!value) throw RegimeUnsupported("peak envelope does not apply");
    return *value;
  }
  double best = std::numeric_limits<double>::infinity();
  for (Envelope e : {Envelope::p1_ball, Envelope::p0_ball, Envelope::interpolated})
    if (auto value = envelope_log2(v, body, e, T, pt.m, bp.log2_n)) best = std::min(best, *value);
  return best;
}

Allocation choose_allocation(const AbstractParams& params, const CaseId& case_id, double n) {
  const ExponentTable table = theta_table(params);
  if (!table.j_star || !table.gap || *table.gap <= 0)
    throw AmbiguousDominance("no strict dominant θ_j for case " + case_id.label());
  const Breakpoints bp = solve_breakpoints(params, case_id, n);
  const auto specs = peak_specs(case_id);
  const PeakPoint pt = peak_point(bp, specs.at(static_cast<std::size_t>(*table.j_star - 1)));
  Allocation out;
  out.eps = std::min({to_double(*table.gap), to_double(params.s_star), 1.0}) / 8.0;
  out.t1 = std::max(pt.t, 0.0);
  out.m1 = std::max(pt.m, 0.0);
  out.j_star = *table.j_star;
  return out;
}

double budget_constant(double eps) {
  const double r = 1.0 + 2.0 / (std::exp2(eps) - 1.0);
  return r * r + 4.0;
}

SumBreakdown evaluate_S(const AbstractParams& params, double n, const Allocation& alloc) {
  const CaseId id = classify(params.p0, params.p1, params.inv_q);
  const Breakpoints bp = solve_breakpoints(params, id, n);
  const auto regions = build_regions(params, id, bp);
  const Reals v(params);
  const double eps = alloc.eps;
  if (!(eps > 0)) throw OutOfRange("allocation ε must be positive");

  SumBreakdown out;
  for (const auto& spec : peak_specs(id)) out.peaks.push_back(std::exp2(peak_log2(params, bp, spec)));

  const auto rank = [&](double t, double m) {
    return std::ceil(n * std::exp2(-eps * (std::abs(m - alloc.m1) + std::abs(t - alloc.t1))));
  };
  const double t3 = *bp.t_3star;
  const std::int64_t tmax = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(t3 + kTol)));
  const bool tail = v.tail();
  // Without the tail bound the rows past t*** carry rank 0 and are summed until they die out.
  const std::int64_t t_end = tail ? tmax : tmax + std::max<std::int64_t>(256, 8 * (tmax + 1));
  int quiet_rows = 0;

  for (std::int64_t t = 0; t <= t_end; ++t) {
    const auto td = static_cast<double>(t);
    const bool window_row = t <= tmax;
    const double m_star = std::max(bp.m_hat(td) - eps * std::abs(td - alloc.t1), 0.0);
    const auto m0 = static_cast<std::int64_t>(std::floor(m_star + kTol));
    const double m_bar = bp.m_bar(td);
    double row = 0.0;
    for (std::int64_t m = std::max<std::int64_t>(m0, 0);; ++m) {
      const auto md = static_cast<double>(m);
      const bool in_window = window_row && md <= m_bar + kTol;
      const double l = in_window ? rank(td, md) : 0.0;
      out.rank_sum += l;
      const WBody body = make_wbody(params, t, m);
      double value = -1.0;
      for (const auto& region : regions) {
        if (!region.contains(td, md)) continue;
        if (!region.envelope) {
          value = min_envelope(body, v.c, l);
        } else if (auto w = safe_envelope(body, v.c, l, *region.envelope)) {
          value = w->value;
        } else {
          continue;
        }
        out.by_region[region.id] += value;
        break;
      }
      if (value < 0) {
        value = min_envelope(body, v.c, l);
        out.by_region["fallback"] += value;
        ++out.fallback_points;
      }
      row += value;
      const double excess = md - m_bar;
      if ((excess > 5 && value <= 1e-18 * (out.total + row)) || excess > 400) break;
    }
    if (m_star == 0.0) {
      const WBody body = make_wbody(params, t, 0);
      const double l = window_row ? rank(td, 0.0) : 0.0;
      if (auto w = safe_envelope(body, v.c, l, Envelope::p0_ball)) {
        out.by_region["boundary"] += w->value;
        row += w->value;
      }
    }
    out.total += row;
    ++out.rows;
    if (!window_row) {
      quiet_rows = row <= 1e-17 * out.total ? quiet_rows + 1 : 0;
      if (quiet_rows >= 3) break;
      if (t == t_end) out.truncated = true;
    }
  }
  if (tail) {
    const double expo = (v.al * (v.s + v.c - v.b) - v.mu * (v.a - v.c)) / (v.s + v.a - v.b);
    const double value = std::exp2(-expo * v.k * static_cast<double>(tmax + 1));
    out.by_region["tail"] += value;
    out.total += value;
  }
  return out;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys, double* rms) {
  if (xs.size() != ys.size() || xs.size() < 2) throw OutOfRange("slope fit needs two or more points");
  const auto count = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw OutOfRange("slope fit needs distinct abscissae");
  const double slope = sxy / sxx;
  if (rms) {
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (my + slope * (xs[i] - mx));
      ss += r * r;
    }
    *rms = std::sqrt(ss / count);
  }
  return slope;
}

SimResult fit_exponent(const AbstractParams& params, const std::vector<std::int64_t>& n_grid) {
  if (n_grid.size() < 2) throw OutOfRange("n grid needs two or more points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw OutOfRange("n grid entries must be at least 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw OutOfRange("n grid must be increasing");
  }
  const CaseId id = classify(params.p0, params.p1, params.inv_q);
  const ExponentTable table = theta_table(params);

  struct Point {
    Allocation alloc;
    SumBreakdown sum;
  };
  std::vector<std::future<Point>> futures;
  futures.reserve(n_grid.size());
  for (std::int64_t n : n_grid) {
    futures.push_back(std::async(std::launch::async, [&params, id, n] {
      const auto nd = static_cast<double>(n);
      Point p;
      p.alloc = choose_allocation(params, id, nd);
      p.sum = evaluate_S(params, nd, p.alloc);
      return p;
    }));
  }

  SimResult out;
  out.n_grid = n_grid;
  for (auto& f : futures) {
    Point p = f.get();
    out.S_values.push_back(p.sum.total);
    out.peaks.push_back(p.sum.peaks);
    out.budget_ratio.push_back(p.sum.rank_sum / (budget_constant(p.alloc.eps) * static_cast<double>(out.n_grid[out.S_values.size() - 1])));
    out.allocation = p.alloc;
  }

  std::vector<double> xs, ys;
  for (std::size_t i = n_grid.size() / 2; i < n_grid.size(); ++i) {
    xs.push_back(std::log2(static_cast<double>(n_grid[i])));
    ys.push_back(std::log2(out.S_values[i]));
  }
  out.fitted_slope = least_squares_slope(xs, ys, &out.fit_rms);
  out.predicted = -to_double(table.min_theta());
  out.residual = out.fitted_slope - out.predicted;
  return out;
}

std::vector<ProbeValue> lower_bound_probe(const AbstractParams& params, const CaseId& case_id, double n) {
  if (!case_id.covered()) throw UncoveredCase("tuple lies in " + case_id.label());
  const Reals v(params);
  const BodyForms<double> body = v.body();
  const double L = std::log2(n);
  const double log2_c = std::log2(to_double(params.c_const));
  std::vector<ProbeValue> out;
  for (const auto& k : lower_bound_constructions(params, case_id)) {
    const double kappa = to_double(k.kappa);
    const double x = to_double(k.ball_inv);
    // ν' must reach 2 n^κ.
    const double target = 1.0 + kappa * L;
    std::int64_t t = 0;
    std::int64_t m = 0;
    if (k.line == ScaleLine::level_zero) {
      m = static_cast<std::int64_t>(std::ceil(target + log2_c - kTol));
    } else {
      Form line = body.line(k.line, v.a, v.b);
      line.l *= L;
      const Form scale{v.g, 1.0, -(target + log2_c)};
      const double T = solve_pair(line, scale, 1.0).first;
      t = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(T / v.k)));
      bool found = false;
      for (int step = 0; step < 256 && !found; ++step, ++t) {
        const double mt = solve_m(line, v.k * static_cast<double>(t), 1.0);
        if (mt < 0) continue;
        m = static_cast<std::int64_t>(std::floor(mt));
        found = make_wbody(params, t, m).nu_prime >= std::exp2(target);
        if (found) break;
      }
      if (!found) throw InclusionFailed("construction " + k.label + " never reaches ν' ≥ 2n^κ");
    }
    const WBody w = make_wbody(params, t, m);
    const double nu = w.dim_nu;
    const double side1 = w.radius_p1 * std::pow(nu, -std::max(v.b - x, 0.0));
    const double side0 = w.radius_p0 * std::pow(nu, -std::max(v.a - x, 0.0));
    if (k.required_side) {
      const bool zero = *k.required_side == '0';
      const double need = zero ? side0 : side1;
      const double other = zero ? side1 : side0;
      if (need > 16.0 * other)
        throw InclusionFailed("construction " + k.label + ": the k" + std::string(1, *k.required_side) +
                              " radius does not limit the inscribed ball");
    }
    const double width = ball_width(x, v.c, nu, n).value;
    out.push_back({k.label, std::min(side0, side1) * width, t, m});
  }
  return out;
}

}  // namespace nwidths
