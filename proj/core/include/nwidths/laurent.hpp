#pragma once

#include <nwidths/rational.hpp>

#include <map>
#include <string>
#include <vector>

namespace nwidths {

// Multivariate Laurent polynomial with rational coefficients (integer exponents,
// negative allowed). Enough algebra to compare rational expressions after
// clearing denominators.
class LaurentPolynomial {
 public:
  using Exponents = std::vector<int>;

  LaurentPolynomial() = default;
  LaurentPolynomial(const Rational& constant, std::size_t variables);

  static LaurentPolynomial variable(std::size_t index, std::size_t variables, int power = 1);

  bool is_zero() const { return terms_.empty(); }
  std::size_t variables() const { return variables_; }
  std::string to_string(const std::vector<std::string>& names) const;

  LaurentPolynomial& operator+=(const LaurentPolynomial& other);
  LaurentPolynomial& operator-=(const LaurentPolynomial& other);
  LaurentPolynomial& operator*=(const LaurentPolynomial& other);

  friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial& b) { return a += b; }
  friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial& b) { return a -= b; }
  friend LaurentPolynomial operator*(LaurentPolynomial a, const LaurentPolynomial& b) { return a *= b; }
  friend bool operator==(const LaurentPolynomial&, const LaurentPolynomial&) = default;

 private:
  void add_term(const Exponents& e, const Rational& coefficient);
  void widen(std::size_t variables);

  std::size_t variables_ = 0;
  std::map<Exponents, Rational> terms_;
};

struct MappingCheck {
  bool tilde_matches = false;
  bool hat_matches = false;
  std::string tilde_residual;  // printed cross-multiplied difference
  std::string hat_residual;
};

// Cross-multiplies the concrete θ̃, θ̂ with the abstract ones under the concrete
// to abstract map and checks the differences vanish identically in
// (r, d, 1/p0, 1/p1, 1/q, β, σ, λ).
MappingCheck verify_concrete_mapping();

}  // namespace nwidths
