#include <nwidths/laurent.hpp>
#include <nwidths/theta_forms.hpp>

#include <sstream>

namespace nwidths {

LaurentPolynomial::LaurentPolynomial(const Rational& constant, std::size_t variables) : variables_(variables) {
  add_term(Exponents(variables, 0), constant);
}

LaurentPolynomial LaurentPolynomial::variable(std::size_t index, std::size_t variables, int power) {
  LaurentPolynomial out(Rational(0), variables);
  Exponents e(variables, 0);
  e.at(index) = power;
  out.add_term(e, Rational(1));
  return out;
}

void LaurentPolynomial::widen(std::size_t variables) {
  if (variables <= variables_) return;
  std::map<Exponents, Rational> wider;
  for (auto& [e, coefficient] : terms_) {
    Exponents w = e;
    w.resize(variables, 0);
    wider.emplace(std::move(w), coefficient);
  }
  terms_ = std::move(wider);
  variables_ = variables;
}

void LaurentPolynomial::add_term(const Exponents& e, const Rational& coefficient) {
  if (coefficient == 0) return;
  auto [it, inserted] = terms_.emplace(e, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
  }
}

LaurentPolynomial& LaurentPolynomial::operator+=(const LaurentPolynomial& other) {
  widen(other.variables_);
  for (const auto& [e, coefficient] : other.terms_) {
    Exponents w = e;
    w.resize(variables_, 0);
    add_term(w, coefficient);
  }
  return *this;
}

LaurentPolynomial& LaurentPolynomial::operator-=(const LaurentPolynomial& other) {
  widen(other.variables_);
  for (const auto& [e, coefficient] : other.terms_) {
    Exponents w = e;
    w.resize(variables_, 0);
    add_term(w, -coefficient);
  }
  return *this;
}

LaurentPolynomial& LaurentPolynomial::operator*=(const LaurentPolynomial& other) {
  const std::size_t n = std::max(variables_, other.variables_);
  LaurentPolynomial product(Rational(0), n);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : other.terms_) {
      Exponents e(n, 0);
      for (std::size_t i = 0; i < e1.size(); ++i) e[i] += e1[i];
      for (std::size_t i = 0; i < e2.size(); ++i) e[i] += e2[i];
      product.add_term(e, c1 * c2);
    }
  }
  *this = std::move(product);
  return *this;
}

std::string LaurentPolynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [e, coefficient] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << "(" << nwidths::to_string(coefficient) << ")";
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      out << "*" << (i < names.size() ? names[i] : "x" + std::to_string(i));
      if (e[i] != 1) out << "^" << e[i];
    }
  }
  return out.str();
}

MappingCheck verify_concrete_mapping() {
  using P = LaurentPolynomial;
  const std::vector<std::string> names{"r", "d", "a", "b", "c", "beta", "sigma", "lambda"};
  const std::size_t n = names.size();
  const P r = P::variable(0, n);
  const P d = P::variable(1, n);
  const P a = P::variable(2, n);
  const P b = P::variable(3, n);
  const P c = P::variable(4, n);
  const P beta = P::variable(5, n);
  const P sigma = P::variable(6, n);
  const P lambda = P::variable(7, n);
  const P r_over_d = r * P::variable(1, n, -1);

  const auto image = concrete_to_abstract(d, r_over_d, beta, sigma, lambda);
  const auto abstract = abstract_theta_forms(a, b, c, image.s, image.gamma, image.mu, image.alpha);
  const auto concrete = concrete_theta_forms(r, d, r_over_d, a, b, c, beta, sigma, lambda);

  const P tilde = abstract.tilde.num * concrete.tilde.den - concrete.tilde.num * abstract.tilde.den;
  const P hat = abstract.hat.num * concrete.hat.den - concrete.hat.num * abstract.hat.den;
  return {tilde.is_zero(), hat.is_zero(), tilde.to_string(names), hat.to_string(names)};
}

}  // namespace nwidths
