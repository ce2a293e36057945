#pragma once

#include "schanuel/ball.hpp"
#include "schanuel/poly.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace schanuel {

/// Axis-aligned complex rectangle with rational corners.
struct RationalBox {
  mpq_class re_lo, re_hi, im_lo, im_hi;

  mpq_class max_side() const;
  std::string to_string() const;  ///< "re_lo,re_hi,im_lo,im_hi"
  static RationalBox parse(const std::string& text);
};

/// Parses "a", "-a/b" or a finite decimal such as "1.25".
mpq_class parse_rational(const std::string& text);

class AlgebraicError : public std::runtime_error {
 public:
  enum class Kind { Reducible, NonIsolatingBox, DegreeCap, ZeroInverse, InvalidPolynomial, Isolation };
  AlgebraicError(Kind kind, const std::string& what, std::vector<IntPoly> factors = {})
      : std::runtime_error(what), kind_(kind), factors_(std::move(factors)) {}
  Kind kind() const { return kind_; }
  /// Nontrivial factors when kind() == Reducible.
  const std::vector<IntPoly>& factors() const { return factors_; }

 private:
  Kind kind_;
  std::vector<IntPoly> factors_;
};

/// Stable handle of an interned algebraic number (minimal polynomial plus
/// root index). Equal handles denote equal numbers.
struct AlgebraicId {
  std::uint32_t index = 0;
  friend bool operator==(AlgebraicId a, AlgebraicId b) { return a.index == b.index; }
};

/// An element of the algebraic closure of Q: primitive irreducible integer
/// polynomial plus an isolating rational box.
class AlgebraicConst {
 public:
  AlgebraicConst(AlgebraicId id, RationalBox box) : id_(id), box_(std::move(box)) {}

  AlgebraicId id() const { return id_; }
  const RationalBox& box() const { return box_; }
  const IntPoly& min_poly() const;
  int degree() const { return min_poly().degree(); }
  std::optional<std::string> name() const;
  bool is_rational() const { return degree() == 1; }
  mpq_class as_rational() const;  ///< Requires is_rational().

 private:
  AlgebraicId id_;
  RationalBox box_;
};

enum class FieldOp { Add, Mul, Neg, Inv };

/// Degree cap for minimal polynomials (default 64).
void set_degree_cap(int cap);
int degree_cap();

AlgebraicConst make_algebraic(const IntPoly& poly, const RationalBox& box);
AlgebraicConst make_rational_constant(const mpq_class& q);
/// Unary operations ignore `b`.
AlgebraicConst field_op(FieldOp op, const AlgebraicConst& a, const AlgebraicConst& b);
AlgebraicConst add(const AlgebraicConst& a, const AlgebraicConst& b);
AlgebraicConst multiply(const AlgebraicConst& a, const AlgebraicConst& b);
AlgebraicConst negate(const AlgebraicConst& a);
AlgebraicConst invert(const AlgebraicConst& a);
AlgebraicConst power(const AlgebraicConst& a, long exponent);

/// Sub-box of the constant's isolating box with max side <= target_radius.
RationalBox refine_box(const AlgebraicConst& a, const mpq_class& target_radius);

/// Certified enclosure of the constant at the requested precision; the
/// radius is below 2^-prec * max(1, |value|).
Ball enclosure(AlgebraicId id, mpfr_prec_t prec);

AlgebraicConst constant(AlgebraicId id);
/// Total deterministic order: degree, coefficients, root index.
int compare(AlgebraicId a, AlgebraicId b);
/// Canonical isolating box used by printers.
RationalBox canonical_box(AlgebraicId id);
std::size_t root_index(AlgebraicId id);

void register_name(const std::string& name, const AlgebraicConst& value);
std::optional<AlgebraicConst> lookup_name(const std::string& name);
/// (name, constant) pairs in registration order, excluding built-ins.
std::vector<std::pair<std::string, AlgebraicConst>> user_registry();

/// Loads `name : c0,...,cd : re_lo,re_hi,im_lo,im_hi` lines; '#' starts a comment.
void load_registry(const std::string& path);
void load_registry_text(const std::string& text);

/// Certified isolating discs of every root of a squarefree polynomial,
/// pairwise disjoint. Exposed for tests.
std::vector<Ball> isolate_roots(const IntPoly& squarefree);

/// The irreducible factor of `poly` vanishing at the root isolated by `root`.
IntPoly minimal_factor(const IntPoly& poly, const Ball& root);

}  // namespace schanuel
