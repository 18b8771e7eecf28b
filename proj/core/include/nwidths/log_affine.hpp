#pragma once

#include <nwidths/errors.hpp>

#include <utility>

namespace nwidths {

// Level lines along which the lower-bound constructions move.
enum class ScaleLine {
  level_zero,  // t = 0
  m_t,         // both radii equal
  m_tilde,     // p0 radius equals p1 radius times ν'^{1/p0 − 1/p1}
  m_bar,       // p0 radius equals the p1 radius times the B_2 factor of p1
  m_bar1,      // the mirror image with p0 and p1 exchanged
};

// A log2-affine form x*T + y*m + z*L, where T = k*t is the scaled level, m the
// inner level and L = log2 n. Every breakpoint equation is one of these set to zero.
template <class Num>
struct LogAffine {
  Num t{0};
  Num m{0};
  Num l{0};

  Num at(const Num& T, const Num& M, const Num& L) const { return t * T + m * M + l * L; }

  friend LogAffine operator+(const LogAffine& a, const LogAffine& b) {
    return {a.t + b.t, a.m + b.m, a.l + b.l};
  }
  friend LogAffine operator-(const LogAffine& a, const LogAffine& b) {
    return {a.t - b.t, a.m - b.m, a.l - b.l};
  }
  friend LogAffine operator*(const Num& k, const LogAffine& a) { return {k * a.t, k * a.m, k * a.l}; }
};

// Solves e1 = e2 = 0 for (T, m) at the given L.
template <class Num>
std::pair<Num, Num> solve_pair(const LogAffine<Num>& e1, const LogAffine<Num>& e2, const Num& L) {
  const Num det = e1.t * e2.m - e1.m * e2.t;
  if (det == Num(0)) throw DegenerateDenominator("singular breakpoint system");
  const Num r1 = -e1.l * L;
  const Num r2 = -e2.l * L;
  return {(r1 * e2.m - e1.m * r2) / det, (e1.t * r2 - r1 * e2.t) / det};
}

// Solves e = 0 for m at fixed T and L.
template <class Num>
Num solve_m(const LogAffine<Num>& e, const Num& T, const Num& L) {
  if (e.m == Num(0)) throw DegenerateDenominator("breakpoint equation does not involve m");
  return -(e.t * T + e.l * L) / e.m;
}

// The log2 forms of the two radii and the block dimension of W_{t,m}.
template <class Num>
struct BodyForms {
  LogAffine<Num> r1;  // μ T − m(s + 1/q − 1/p1)
  LogAffine<Num> r0;  // −α T + m(1/p0 − 1/q)
  LogAffine<Num> nu;  // γ T + m

  BodyForms(const Num& a, const Num& b, const Num& c, const Num& s, const Num& gamma,
            const Num& mu, const Num& alpha)
      : r1{mu, -(s + c - b), Num(0)}, r0{-alpha, a - c, Num(0)}, nu{gamma, Num(1), Num(0)} {}

  // Gluskin factor n^{-1/2} ν^{1 - x} for a ball with inverse exponent x.
  LogAffine<Num> gluskin(const Num& x) const { return LogAffine<Num>{Num(0), Num(0), Num(-1) / 2} + (1 - x) * nu; }

  // The form whose zero set is the given line; a = 1/p0, b = 1/p1.
  LogAffine<Num> line(ScaleLine which, const Num& a, const Num& b) const {
    switch (which) {
      case ScaleLine::level_zero:
        return LogAffine<Num>{Num(1), Num(0), Num(0)};
      case ScaleLine::m_t:
        return r1 - r0;
      case ScaleLine::m_tilde:
        return r0 - (r1 + (a - b) * nu);
      case ScaleLine::m_bar:
        return r0 - (r1 + gluskin(b));
      case ScaleLine::m_bar1:
        return (r0 + gluskin(a)) - r1;
    }
    return {};
  }
};

}  // namespace nwidths
