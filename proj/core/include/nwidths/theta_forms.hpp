#pragma once

// θ̃ and θ̂ as numerator/denominator pairs, generic over the scalar type so the same
// expressions serve exact evaluation and the polynomial identity check.

namespace nwidths {

template <class T>
struct Quotient {
  T num;
  T den;
};

template <class T>
struct ThetaForms {
  Quotient<T> tilde;
  Quotient<T> hat;
};

// a = 1/p0, b = 1/p1, c = 1/q.
template <class T>
ThetaForms<T> abstract_theta_forms(const T& a, const T& b, const T& c, const T& s, const T& gamma,
                                   const T& mu, const T& alpha) {
  const T den = mu + alpha + gamma * (s + a - b);
  return {{s * (alpha + gamma * a - gamma * c), den}, {alpha * (s + c - b) + mu * (c - a), den}};
}

// The same two numbers written in (r, d, β, σ, λ); r_over_d is r/d.
template <class T>
ThetaForms<T> concrete_theta_forms(const T& r, const T& d, const T& r_over_d, const T& a, const T& b,
                                   const T& c, const T& beta, const T& sigma, const T& lambda) {
  const T den = beta + sigma + r + d * a - d * b;
  return {{r_over_d * (sigma - lambda + d * a - d * c), den},
          {sigma * (r_over_d + c - b) + beta * (c - a) - lambda * (r_over_d + a - b), den}};
}

template <class T>
struct AbstractImage {
  T s;
  T gamma;
  T alpha;
  T mu;
};

template <class T>
AbstractImage<T> concrete_to_abstract(const T& d, const T& r_over_d, const T& beta, const T& sigma,
                                      const T& lambda) {
  return {r_over_d, d, sigma - lambda, beta + lambda};
}

}  // namespace nwidths
