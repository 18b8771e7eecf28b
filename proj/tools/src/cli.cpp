#include <nwidths/cli.hpp>

#include <nwidths/ballwidths.hpp>
#include <nwidths/discretization.hpp>
#include <nwidths/sampling.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>

namespace nwidths::cli {

namespace {

// Exit codes shared by every subcommand.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kDomain = 2;

Extended exponent_flag(const std::string& flag, const std::string& text) {
  try {
    return Extended::parse(text);
  } catch (const Error& e) {
    throw ParseError("--" + flag + ": " + e.what());
  }
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string exact_and_decimal(const Rational& v) { return to_string(v) + " (" + format_number(to_double(v)) + ")"; }

int cmd_classify(const std::string& p0_text, const std::string& p1_text, const std::string& q_text,
                 std::ostream& out) {
  const Extended p0 = exponent_flag("p0", p0_text);
  const Extended p1 = exponent_flag("p1", p1_text);
  const Extended q = exponent_flag("q", q_text);
  if (q.is_infinite()) throw ParseError("--q: q must be finite");
  const CaseId id = classify(p0, p1, q.inv());
  if (!id.covered()) {
    out << id.label() << "\n";
    return kDomain;
  }
  const auto formulas = case_theta_formulas(id);
  out << "case " << id.label() << ", j0=" << formulas.size() << "\n";
  out << "p0'=" << to_string(p0.dual()) << ", p1'=" << to_string(p1.dual()) << ", q=" << to_string(1 / q.inv())
      << "\n";
  for (std::size_t j = 0; j < formulas.size(); ++j) out << "theta_" << j + 1 << " = " << formulas[j] << "\n";
  return kOk;
}

int cmd_exponents(const std::string& path, std::ostream& out) {
  const ParamsFile file = load_params_file(path);
  const AbstractParams params = file.abstract();
  const CaseId id = classify(params.p0, params.p1, params.inv_q);
  out << "# case: " << id.label() << "\n";
  if (!id.covered()) {
    out << "j,theta_j,is_dominant,lower_bound_label\n";
    return kDomain;
  }
  const ExponentTable table = theta_table(params);
  const auto violations = file.is_concrete() ? check_hypotheses(std::get<ConcreteParams>(file.tuple))
                                             : check_hypotheses(params);
  const auto lower = lower_bound_set(params);
  out << "# theta_tilde: " << exact_and_decimal(table.theta_tilde) << "\n";
  out << "# theta_hat: " << exact_and_decimal(table.theta_hat) << "\n";
  out << "# j0: " << table.j0 << "\n";
  out << "# j_star: " << (table.j_star ? std::to_string(*table.j_star) : std::string("none")) << "\n";
  out << "# gap: " << (table.gap ? exact_and_decimal(*table.gap) : std::string("none")) << "\n";
  if (violations.empty()) out << "# violations: none\n";
  for (const auto& v : violations) out << "# violation: " << v.inequality << " (" << v.detail << ")\n";
  std::vector<std::string> labels;
  for (const auto& t : lower) labels.push_back(t.label);
  out << "# lower_bound_labels: " << join(labels, " ") << "\n";
  out << "j,theta_j,is_dominant,lower_bound_label\n";
  for (int j = 1; j <= table.j0; ++j) {
    const Rational& th = table.thetas[static_cast<std::size_t>(j - 1)];
    std::vector<std::string> hits;
    for (const auto& t : lower)
      if (t.exponent == th) hits.push_back(t.label);
    const bool dominant = std::find(table.minimizers.begin(), table.minimizers.end(), j) != table.minimizers.end();
    out << j << "," << format_number(to_double(th)) << "," << (dominant ? 1 : 0) << "," << join(hits, "|") << "\n";
  }
  return violations.empty() ? kOk : kDomain;
}

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

int cmd_simulate(const std::string& path, std::int64_t nmin, std::int64_t nmax, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  if (!is_power_of_two(nmin) || !is_power_of_two(nmax) || nmin >= nmax || nmin < 2)
    throw ParseError("--nmin and --nmax must be powers of two with 2 <= nmin < nmax");
  const AbstractParams params = load_params_file(path).abstract();
  const CaseId id = classify(params.p0, params.p1, params.inv_q);
  if (!id.covered()) {
    err << "tuple lies in " << id.label() << "\n";
    return kDomain;
  }
  for (const auto& v : check_hypotheses(params)) err << "warning: hypothesis " << v.inequality << " fails\n";

  std::vector<std::int64_t> grid;
  for (std::int64_t n = nmin; n <= nmax; n *= 2) grid.push_back(n);
  SimResult result;
  try {
    result = fit_exponent(params, grid);
  } catch (const AmbiguousDominance& e) {
    err << "ambiguous dominance: " << e.what() << "\n";
    return kDomain;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ParseError("--out: cannot open " + out_path);
  }
  std::ostream& csv = out_path.empty() ? out : file;
  csv << "n,S,S1,S2,S3,S4,S5,S6,max_lower_probe\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << grid[i] << "," << format_number(result.S_values[i]);
    for (std::size_t j = 0; j < 6; ++j) {
      csv << ",";
      if (j < result.peaks[i].size()) csv << format_number(result.peaks[i][j]);
    }
    csv << ",";
    try {
      double best = 0.0;
      for (const auto& p : lower_bound_probe(params, id, static_cast<double>(grid[i]))) best = std::max(best, p.value);
      csv << format_number(best);
    } catch (const InclusionFailed& e) {
      err << "n=" << grid[i] << ": " << e.what() << "\n";
    }
    csv << "\n";
  }
  csv << "# fitted_slope: " << format_number(result.fitted_slope) << "\n";
  csv << "# predicted: " << format_number(result.predicted) << "\n";
  csv << "# residual: " << format_number(result.residual) << "\n";
  csv << "# eps: " << format_number(result.allocation.eps) << "\n";
  return kOk;
}

int cmd_ballwidth(const std::string& p_text, const std::string& q_text, std::int64_t N, std::int64_t n, bool brute,
                  std::int64_t budget, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  LpExponent p, q;
  try {
    p = LpExponent::parse(p_text);
  } catch (const Error& e) {
    throw ParseError(std::string("--p: ") + e.what());
  }
  try {
    q = LpExponent::parse(q_text);
  } catch (const Error& e) {
    throw ParseError(std::string("--q: ") + e.what());
  }
  BallSpec spec{p, q, N, n};
  WidthEstimate estimate;
  try {
    estimate = q.inv() >= p.inv() ? exact_linear_width(spec) : gluskin_envelope(spec);
  } catch (const RegimeUnsupported& e) {
    err << "unsupported regime: " << e.what() << "\n";
    return kDomain;
  }
  out << "estimate: " << format_number(estimate.value) << "\n";
  out << "regime: " << regime_name(estimate.regime) << "\n";
  out << "formula: " << estimate.formula_tag << "\n";
  if (!brute) return kOk;
  BruteForceOptions options;
  options.seed = seed;
  double value = 0.0;
  try {
    value = brute_force_linear_width(spec, budget, options);
  } catch (const BudgetExceeded& e) {
    value = e.best_value;
    out << "brute_budget: exhausted\n";
  } catch (const UnsupportedSource& e) {
    out << "brute: unsupported (" << e.what() << ")\n";
    return kOk;
  } catch (const OutOfRange& e) {
    out << "brute: unsupported (" << e.what() << ")\n";
    return kOk;
  }
  out << "brute: " << format_number(value) << "\n";
  const double scale = std::max(std::abs(estimate.value), 1e-300);
  out << "discrepancy: " << format_number(std::abs(value - estimate.value) / scale) << "\n";
  return kOk;
}

std::uint64_t seed_from_env() {
  const char* text = std::getenv(kSeedEnv);
  if (!text || !*text) return kDefaultSeed;
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ParseError(std::string(kSeedEnv) + " must be an unsigned integer");
  }
}

int cmd_verify(VerifyOptions options, bool seed_given, std::ostream& out) {
  if (!seed_given) options.seed = seed_from_env();
  out << "seed: " << options.seed << "\n";
  bool all = true;
  for (const auto& r : run_verify(options)) {
    out << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " (" << r.detail << ")\n";
    all = all && r.passed;
  }
  return all ? kOk : kFailure;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  std::vector<SuiteResult> out;

  {
    const auto tuples = sample_spanning(options.seed, options.identity_tuples);
    int nonzero = 0;
    for (const auto& p : tuples) {
      ThetaPair tp = theta_pair(p);
      if (options.perturb_identity) tp.hat += make_rational(1, 1000);
      for (const auto& r : identity_suite(p, tp))
        if (r.value != 0) ++nonzero;
    }
    out.push_back({"identity", nonzero == 0,
                   std::to_string(tuples.size()) + " tuples, " + std::to_string(nonzero) + " nonzero residuals"});
  }

  {
    const PartitionReport r = partition_scan(20);
    out.push_back({"partition", r.ok(),
                   std::to_string(r.tuples) + " tuples, " + std::to_string(r.uncovered) + " uncovered, " +
                       std::to_string(r.overlap_mismatches + r.boundary_mismatches) + " table mismatches"});
  }

  {
    std::mt19937_64 rng(options.seed ^ 0x5bd1e995ULL);
    std::uniform_real_distribution<double> log2_n(8.0, 30.0);
    int checks = 0;
    int failures = 0;
    double worst = 0.0;
    for (const CaseId& id : covered_case_ids()) {
      for (int i = 0; i < options.breakpoint_tuples_per_case; ++i) {
        const auto p = sample_admissible(rng, id);
        if (!p) {
          ++failures;
          continue;
        }
        const Breakpoints bp = solve_breakpoints(*p, id, std::exp2(log2_n(rng)));
        for (const auto& c : breakpoint_identities(*p, bp)) {
          ++checks;
          worst = std::max(worst, c.relative_error());
          if (c.relative_error() > 1e-10) ++failures;
        }
      }
    }
    out.push_back({"breakpoints", failures == 0,
                   std::to_string(checks) + " identities, worst relative error " + format_number(worst)});
  }

  {
    int checks = 0;
    int failures = 0;
    double worst = 0.0;
    BruteForceOptions bf;
    bf.seed = options.seed;
    for (int inv_q : {1, 2}) {
      for (int N = 1; N <= 4; ++N) {
        for (int n = 0; n <= N; ++n) {
          const BallSpec spec{LpExponent::infinity(), LpExponent::from_inverse(make_rational(1, inv_q)), N, n};
          const double exact = exact_linear_width(spec).value;
          double brute = 0.0;
          try {
            brute = brute_force_linear_width(spec, 2'000'000, bf);
          } catch (const BudgetExceeded& e) {
            brute = e.best_value;
          }
          const double err = exact > 0 ? std::abs(brute - exact) / exact : std::abs(brute);
          worst = std::max(worst, err);
          ++checks;
          if (err > 1e-2) ++failures;
        }
      }
    }
    out.push_back({"oracle", failures == 0,
                   std::to_string(checks) + " instances, worst relative error " + format_number(worst)});
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Order exponents and numerical checks for linear widths of weighted Sobolev classes", "nwidths"};
  app.require_subcommand(1);

  std::string p0 = "2", p1 = "2", q;
  auto* classify_cmd = app.add_subcommand("classify", "Report the case of (p0, p1, q) and its θ formulas");
  classify_cmd->add_option("--p0", p0, "p0 as a rational or inf")->capture_default_str();
  classify_cmd->add_option("--p1", p1, "p1 as a rational or inf")->capture_default_str();
  classify_cmd->add_option("--q", q, "q as a rational (finite)")->required();

  std::string params_path;
  auto* exponents_cmd = app.add_subcommand("exponents", "Print the θ table of a params file");
  exponents_cmd->add_option("--params", params_path, "JSON params file")->required();

  std::int64_t nmin = 1 << 10, nmax = 1 << 24;
  std::string out_path;
  auto* simulate_cmd = app.add_subcommand("simulate", "Evaluate the discretized upper-bound sum over an n grid");
  simulate_cmd->add_option("--params", params_path, "JSON params file")->required();
  simulate_cmd->add_option("--nmin", nmin, "smallest n (power of two)")->capture_default_str();
  simulate_cmd->add_option("--nmax", nmax, "largest n (power of two)")->capture_default_str();
  simulate_cmd->add_option("--out", out_path, "write the CSV here instead of standard output");

  std::string p_text, q_text;
  std::int64_t dim_N = 1, rank_n = 0, budget = 4'000'000;
  bool brute = false;
  std::uint64_t seed = kDefaultSeed;
  auto* ball_cmd = app.add_subcommand("ballwidth", "Linear width of B_p^N in l_q^N");
  ball_cmd->add_option("--p", p_text, "source exponent p (rational >= 1 or inf)")->required();
  ball_cmd->add_option("--q", q_text, "target exponent q (rational >= 1 or inf)")->required();
  ball_cmd->add_option("--N", dim_N, "dimension")->required()->check(CLI::PositiveNumber);
  ball_cmd->add_option("--n", rank_n, "rank")->required()->check(CLI::NonNegativeNumber);
  ball_cmd->add_flag("--brute", brute, "also run the brute-force minimax oracle");
  ball_cmd->add_option("--budget", budget, "gradient-step budget for --brute")->capture_default_str();
  ball_cmd->add_option("--seed", seed, "seed for --brute")->capture_default_str();

  VerifyOptions verify_options;
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in consistency suites");
  auto* seed_opt = verify_cmd->add_option("--seed", verify_options.seed, "seed (default: $NWIDTHS_SEED or built-in)");
  verify_cmd->add_flag("--perturb-identity", verify_options.perturb_identity,
                       "shift θ̂ before the identity suite; the suite must then fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kFailure;
  }

  try {
    if (*classify_cmd) return cmd_classify(p0, p1, q, out);
    if (*exponents_cmd) return cmd_exponents(params_path, out);
    if (*simulate_cmd) return cmd_simulate(params_path, nmin, nmax, out_path, out, err);
    if (*ball_cmd) {
      if (rank_n > dim_N) throw ParseError("--n must not exceed --N");
      return cmd_ballwidth(p_text, q_text, dim_N, rank_n, brute, budget, seed, out, err);
    }
    if (*verify_cmd) return cmd_verify(verify_options, seed_opt->count() > 0, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const UncoveredCase& e) {
    err << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace nwidths::cli
