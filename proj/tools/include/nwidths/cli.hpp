#pragma once

#include <nwidths/exponents.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nwidths::cli {

// Environment variable consulted by `verify` when --seed is absent.
inline constexpr const char* kSeedEnv = "NWIDTHS_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20240607;

// A parameter tuple read from JSON. Concrete keys: r, d, p0, p1, q, beta, sigma,
// lambda. Abstract keys: p0, p1, q, s_star, gamma_star, mu_star, alpha_star, k_star.
struct ParamsFile {
  std::variant<ConcreteParams, AbstractParams> tuple;

  bool is_concrete() const { return std::holds_alternative<ConcreteParams>(tuple); }
  AbstractParams abstract() const;
};

ParamsFile parse_params_file(std::string_view text);
ParamsFile load_params_file(const std::string& path);

// Decimal with 15 significant digits.
std::string format_number(double value);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  bool perturb_identity = false;  // negative control: the identity suite must fail
  int identity_tuples = 1000;
  int breakpoint_tuples_per_case = 100;
};

std::vector<SuiteResult> run_verify(const VerifyOptions& options);

// Entry point shared by the executable and the tests; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nwidths::cli
