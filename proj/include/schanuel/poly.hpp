#pragma once

#include "schanuel/ball.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace schanuel {

/// Dense univariate polynomial with integer coefficients, c[0] + c[1] x + ...
/// Always trimmed: the last coefficient is nonzero unless the polynomial is 0.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<mpz_class> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpz_class>& coeffs() const { return coeffs_; }
  const mpz_class& operator[](std::size_t i) const { return coeffs_[i]; }
  const mpz_class& leading() const { return coeffs_.back(); }

  mpz_class content() const;
  /// Divides out the content and makes the leading coefficient positive.
  IntPoly primitive() const;
  IntPoly derivative() const;
  IntPoly reflected() const;  ///< P(-x)
  IntPoly reversed() const;   ///< x^d P(1/x)

  Ball evaluate(const Ball& x) const;
  /// Returns (P(x), P'(x)) in one Horner pass.
  std::pair<Ball, Ball> evaluate_with_derivative(const Ball& x) const;

  std::string key() const;  ///< Comma-separated c0..cd, used for hashing.
  std::string to_string() const;

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.coeffs_ == b.coeffs_; }

 private:
  std::vector<mpz_class> coeffs_;
};

/// Polynomial over Q, same layout.
using RatPoly = std::vector<mpq_class>;

RatPoly to_rational(const IntPoly& p);
/// Clears denominators and returns the primitive integer polynomial.
IntPoly to_primitive_integer(const RatPoly& p);
void trim(RatPoly& p);
/// Euclidean division over Q; throws on division by zero.
std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b);
RatPoly gcd(RatPoly a, RatPoly b);
/// True iff b divides a exactly in Q[x].
bool divides(const IntPoly& b, const IntPoly& a);
IntPoly exact_quotient(const IntPoly& a, const IntPoly& b);
/// The product of the distinct irreducible factors of p.
IntPoly squarefree_part(const IntPoly& p);
/// P(x - shift) scaled to a primitive integer polynomial.
IntPoly shifted(const IntPoly& p, const mpq_class& shift);
/// Polynomial whose roots are factor * (roots of p).
IntPoly scaled_roots(const IntPoly& p, const mpq_class& factor);

/// Dense rational matrix helpers for resultant-free algebraic arithmetic.
using RatMatrix = std::vector<std::vector<mpq_class>>;
RatMatrix companion(const IntPoly& p);
RatMatrix kronecker_sum(const RatMatrix& a, const RatMatrix& b);
RatMatrix kronecker_product(const RatMatrix& a, const RatMatrix& b);
RatMatrix matrix_power(const RatMatrix& a, unsigned long exponent);
/// Characteristic polynomial det(xI - M), monic.
RatPoly characteristic_polynomial(const RatMatrix& m);

}  // namespace schanuel
