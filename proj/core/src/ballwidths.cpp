#include <nwidths/ballwidths.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <vector>

namespace nwidths {

LpExponent LpExponent::from_inverse(const Rational& inv) {
  if (inv < 0 || inv > 1) throw OutOfRange("1/p must lie in [0, 1], got " + nwidths::to_string(inv));
  LpExponent out;
  out.inv_ = inv;
  return out;
}

LpExponent LpExponent::parse(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity") return infinity();
  const Rational p = parse_rational(text);
  if (p < 1) throw OutOfRange("exponent must be at least 1, got " + nwidths::to_string(p));
  return from_inverse(1 / p);
}

std::string LpExponent::to_string() const {
  if (is_infinite()) return "inf";
  return nwidths::to_string(Rational(1 / inv_));
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::exact: return "exact";
    case Regime::gluskin_order: return "gluskin_order";
    case Regime::envelope_only: return "envelope_only";
  }
  return "unknown";
}

std::string_view envelope_name(Envelope e) {
  switch (e) {
    case Envelope::p1_ball: return "p1_ball";
    case Envelope::p0_ball: return "p0_ball";
    case Envelope::interpolated: return "interpolated";
  }
  return "unknown";
}

namespace {

void check_dims(const BallSpec& spec) {
  if (spec.dim_N < 1) throw OutOfRange("dimension N must be positive");
  if (spec.rank_n < 0 || spec.rank_n > spec.dim_N) throw OutOfRange("rank n must lie in [0, N]");
}

// Gluskin's order for p <= q; the caller has excluded q < p.
WidthEstimate gluskin_value(double x, double c, double N, double l) {
  if (l >= N) return {0.0, Regime::exact, "full_rank"};
  if (l == 0) return {1.0, Regime::exact, "radius"};
  const Regime regime = 2 * l > N ? Regime::envelope_only : Regime::gluskin_order;
  if (x > 0.5 && c < 0.5) {
    const double grow = std::max(c, 1.0 - x);
    const double v = std::min(1.0, std::pow(l, -0.5) * std::pow(N, grow));
    return {v, regime, "gluskin_power"};
  }
  return {1.0, regime, "gluskin_unit"};
}

}  // namespace

WidthEstimate exact_linear_width(const BallSpec& spec) {
  check_dims(spec);
  if (spec.q.inv() < spec.p.inv())
    throw RegimeUnsupported("exact formula needs q <= p; got p=" + spec.p.to_string() + ", q=" +
                            spec.q.to_string());
  const auto N = static_cast<double>(spec.dim_N);
  const auto n = static_cast<double>(spec.rank_n);
  if (spec.rank_n == spec.dim_N) return {0.0, Regime::exact, "full_rank"};
  const double e = to_double(Rational(spec.q.inv() - spec.p.inv()));
  return {std::pow(N - n, e), Regime::exact, "pietsch_stesin"};
}

WidthEstimate gluskin_envelope(const BallSpec& spec) {
  check_dims(spec);
  if (spec.q.inv() > spec.p.inv())
    throw RegimeUnsupported("q < p: use the exact formula; got p=" + spec.p.to_string() + ", q=" +
                            spec.q.to_string());
  if (spec.p.is_one() && spec.q.is_infinite())
    throw RegimeUnsupported("(p, q) = (1, inf) is outside the envelope's range");
  return gluskin_value(spec.p.inv_double(), spec.q.inv_double(), static_cast<double>(spec.dim_N),
                       static_cast<double>(spec.rank_n));
}

WidthEstimate ball_width(double x, double c, double N, double l) {
  if (l >= N) return {0.0, Regime::exact, "full_rank"};
  if (x <= c) return {std::pow(N - l, c - x), Regime::exact, "pietsch_stesin"};
  if (x == 1.0 && c == 0.0) throw RegimeUnsupported("(p, q) = (1, inf) is outside the envelope's range");
  return gluskin_value(x, c, N, l);
}

Rational interp_lambda(const Rational& inv_p0, const Rational& inv_p1, const Rational& inv_q) {
  const Rational target = 1 - inv_q;
  const Rational lo = std::min(inv_p0, inv_p1);
  const Rational hi = std::max(inv_p0, inv_p1);
  if (!(lo < target && target < hi))
    throw OutOfRange("1/q' = " + to_string(target) + " is not strictly between 1/p0 and 1/p1");
  return (target - inv_p1) / (inv_p0 - inv_p1);
}

WBody make_wbody(const AbstractParams& params, std::int64_t t, std::int64_t m) {
  if (t < 0 || m < 0) throw OutOfRange("levels t, m must be nonnegative");
  const double a = to_double(params.p0.inv());
  const double b = to_double(params.p1.inv());
  const double c = to_double(params.inv_q);
  const double s = to_double(params.s_star);
  const double T = static_cast<double>(params.k_star) * static_cast<double>(t);
  const auto md = static_cast<double>(m);
  WBody body;
  body.level_t = t;
  body.level_m = m;
  body.radius_p1 = std::exp2(to_double(params.mu_star) * T - md * (s + c - b));
  body.radius_p0 = std::exp2(-to_double(params.alpha_star) * T + md * (a - c));
  body.nu_prime = std::exp2(to_double(params.gamma_star) * T + md) / to_double(params.c_const);
  body.dim_nu = std::ceil(body.nu_prime);
  body.inv_p0 = a;
  body.inv_p1 = b;
  return body;
}

std::optional<WidthEstimate> single_envelope(const WBody& body, double c, double l, Envelope which) {
  double radius = 0.0;
  double x = 0.0;
  switch (which) {
    case Envelope::p1_ball:
      radius = body.radius_p1;
      x = body.inv_p1;
      break;
    case Envelope::p0_ball:
      radius = body.radius_p0;
      x = body.inv_p0;
      break;
    case Envelope::interpolated: {
      const double target = 1.0 - c;
      const double lo = std::min(body.inv_p0, body.inv_p1);
      const double hi = std::max(body.inv_p0, body.inv_p1);
      if (!(lo < target && target < hi)) return std::nullopt;
      const double lambda = (target - body.inv_p1) / (body.inv_p0 - body.inv_p1);
      radius = std::exp2((1 - lambda) * std::log2(body.radius_p1) + lambda * std::log2(body.radius_p0));
      x = target;
      break;
    }
  }
  if (x == 1.0 && c == 0.0) return std::nullopt;
  WidthEstimate w = ball_width(x, c, body.dim_nu, l);
  w.value *= radius;
  w.formula_tag = std::string(envelope_name(which)) + "/" + w.formula_tag;
  return w;
}

WidthEstimate intersection_width_envelope(const WBody& body, double inv_q, double l) {
  if (l > body.dim_nu) throw OutOfRange("rank exceeds the block dimension");
  std::optional<WidthEstimate> best;
  for (Envelope e : {Envelope::p1_ball, Envelope::p0_ball, Envelope::interpolated}) {
    auto w = single_envelope(body, inv_q, l, e);
    if (w && (!best || w->value < best->value)) best = std::move(w);
  }
  if (!best) throw RegimeUnsupported("no envelope regime applies to this body");
  return *best;
}

namespace {

using Matrix = Eigen::MatrixXd;

// Smoothed max over columns of smoothed ‖column‖_q, with its gradient in the residual.
class SmoothedObjective {
 public:
  SmoothedObjective(double inv_q, double beta, double delta) : c_(inv_q), beta_(beta), delta_(delta) {}

  double value(const Matrix& R, Matrix* grad) const {
    const Eigen::Index K = R.cols();
    Eigen::VectorXd g(K);
    Matrix dg(R.rows(), K);
    for (Eigen::Index k = 0; k < K; ++k) g(k) = column_norm(R.col(k), grad ? &dg : nullptr, k);
    const double top = g.maxCoeff();
    Eigen::VectorXd w = ((g.array() - top) * beta_).exp();
    const double total = w.sum();
    const double f = top + std::log(total) / beta_;
    if (grad) {
      w /= total;
      *grad = dg * w.asDiagonal();
    }
    return f;
  }

 private:
  double column_norm(const Eigen::Ref<const Eigen::VectorXd>& r, Matrix* dg, Eigen::Index k) const {
    if (c_ == 0.0) {
      // q = inf: log-sum-exp over ±r_i.
      const double top = r.cwiseAbs().maxCoeff();
      Eigen::ArrayXd up = ((r.array() - top) * beta_).exp();
      Eigen::ArrayXd down = ((-r.array() - top) * beta_).exp();
      const double total = (up + down).sum();
      if (dg) dg->col(k) = ((up - down) / total).matrix();
      return top + std::log(total) / beta_;
    }
    const double q = 1.0 / c_;
    Eigen::ArrayXd sq = r.array().square() + delta_ * delta_;
    Eigen::ArrayXd powq = sq.pow(q / 2);
    const double sum = powq.sum();
    const double norm = std::pow(sum, c_);
    if (dg) dg->col(k) = (std::pow(norm, 1 - q) * sq.pow(q / 2 - 1) * r.array()).matrix();
    return norm;
  }

  double c_;
  double beta_;
  double delta_;
};

double exact_objective(const Matrix& R, double c) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < R.cols(); ++k) {
    const auto col = R.col(k);
    const double v = c == 0.0 ? col.cwiseAbs().maxCoeff() : std::pow(col.cwiseAbs().array().pow(1.0 / c).sum(), c);
    worst = std::max(worst, v);
  }
  return worst;
}

Matrix extreme_points(bool p_is_one, int N) {
  if (p_is_one) return Matrix::Identity(N, N);
  // ±x give the same norm, so fix the first sign.
  const Eigen::Index K = Eigen::Index(1) << (N - 1);
  Matrix X(N, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    X(0, k) = 1.0;
    for (int i = 1; i < N; ++i) X(i, k) = ((k >> (i - 1)) & 1) ? -1.0 : 1.0;
  }
  return X;
}

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  bool budget_hit = false;
};

// Alternating gradient steps on U then V for the smoothed objective at fixed
// smoothing; returns the number of steps used.
std::int64_t descend(const Matrix& X, Matrix& U, Matrix& V, const SmoothedObjective& obj, double tol,
                     std::int64_t allowance, double& step_u, double& step_v) {
  std::int64_t steps = 0;
  Matrix grad;
  auto eval = [&](const Matrix& u, const Matrix& v, Matrix* g) {
    const Matrix R = X - u * (v.transpose() * X);
    return obj.value(R, g);
  };
  double f = eval(U, V, nullptr);
  while (steps < allowance) {
    const double before = f;
    for (int block = 0; block < 2 && steps < allowance; ++block) {
      ++steps;
      eval(U, V, &grad);
      // dF/dA = −G Xᵀ, A = U Vᵀ.
      const Matrix dA = -grad * X.transpose();
      Matrix& M = block == 0 ? U : V;
      double& step = block == 0 ? step_u : step_v;
      const Matrix dM = block == 0 ? Matrix(dA * V) : Matrix(dA.transpose() * U);
      const double slope = dM.squaredNorm();
      if (slope == 0.0) continue;
      step *= 2.0;
      while (true) {
        Matrix trial = M - step * dM;
        const double ft = block == 0 ? eval(trial, V, nullptr) : eval(U, trial, nullptr);
        if (ft <= f - 0.5 * step * slope || step < 1e-14) {
          if (ft < f) {
            M = std::move(trial);
            f = ft;
          }
          break;
        }
        step *= 0.5;
      }
    }
    if (before - f <= tol * std::max(std::abs(before), 1e-300)) return steps;
  }
  return steps;
}

RestartOutcome run_restart(const Matrix& X, double c, int n, std::uint64_t seed, double tol,
                           std::int64_t allowance) {
  const auto N = X.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(N)));
  Matrix U(N, n), V(N, n);
  for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = normal(rng);

  RestartOutcome out;
  const double scale = std::max(exact_objective(X, c), 1e-12);
  double step_u = 1e-2, step_v = 1e-2;
  std::int64_t used = 0;
  // Continuation: sharpen the smoothing stage by stage.
  for (double sharp = 4.0; sharp <= 4.0e5 * 1.0001; sharp *= 4.0) {
    const SmoothedObjective obj(c, sharp / scale, scale / sharp);
    const std::int64_t stage_cap = 4000;
    const std::int64_t want = std::min(stage_cap, allowance - used);
    if (want <= 0) {
      out.budget_hit = true;
      break;
    }
    used += descend(X, U, V, obj, tol, want, step_u, step_v);
    const Matrix R = X - U * (V.transpose() * X);
    out.value = std::min(out.value, exact_objective(R, c));
  }
  return out;
}

}  // namespace

double brute_force_linear_width(const BallSpec& spec, std::int64_t budget, const BruteForceOptions& options) {
  check_dims(spec);
  const bool p_one = spec.p.is_one();
  if (!p_one && !spec.p.is_infinite()) throw UnsupportedSource("brute force needs p = 1 or p = inf");
  if (!p_one && spec.dim_N > 12) throw OutOfRange("p = inf brute force supports N <= 12");
  if (p_one && spec.dim_N > 64) throw OutOfRange("p = 1 brute force supports N <= 64");
  const int N = static_cast<int>(spec.dim_N);
  const int n = static_cast<int>(spec.rank_n);
  const double c = spec.q.inv_double();
  const Matrix X = extreme_points(p_one, N);
  if (n == N) return 0.0;
  if (n == 0) return exact_objective(X, c);

  const int restarts = std::max(options.restarts, 1);
  const std::int64_t allowance = std::max<std::int64_t>(budget / restarts, 1);
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  auto work = [&](int i) {
    return run_restart(X, c, n, options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1),
                       options.tolerance, allowance);
  };
  if (options.parallel) {
    std::vector<std::future<RestartOutcome>> futures;
    futures.reserve(outcomes.size());
    for (int i = 0; i < restarts; ++i) futures.push_back(std::async(std::launch::async, work, i));
    for (int i = 0; i < restarts; ++i) outcomes[static_cast<std::size_t>(i)] = futures[static_cast<std::size_t>(i)].get();
  } else {
    for (int i = 0; i < restarts; ++i) outcomes[static_cast<std::size_t>(i)] = work(i);
  }
  double best = std::numeric_limits<double>::infinity();
  bool hit = false;
  for (const auto& o : outcomes) {
    best = std::min(best, o.value);
    hit = hit || o.budget_hit;
  }
  if (hit) throw BudgetExceeded("brute-force budget exhausted", best);
  return best;
}

}  // namespace nwidths
