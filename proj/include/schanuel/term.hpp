#pragma once

#include "schanuel/algebraic.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace schanuel {

enum class Kind : std::uint8_t { Rational, Algebraic, Sum, Product, IntPow, Exp, Log };

const char* kind_name(Kind k);

class Node;
/// Terms are interned: pointer equality is structural equality. Nodes live
/// for the whole process.
using Term = const Node*;

class Node {
 public:
  Kind kind() const { return kind_; }
  const mpq_class& rational() const { return value_; }
  AlgebraicId algebraic() const { return alg_; }
  /// Sum/Product operands; the single operand of IntPow, Exp and Log.
  const std::vector<Term>& children() const { return children_; }
  Term arg() const { return children_.front(); }
  long exponent() const { return integer_; }  ///< IntPow
  long branch() const { return integer_; }    ///< Log
  std::uint64_t id() const { return id_; }

  bool has_exp() const { return has_exp_; }
  bool has_log() const { return has_log_; }
  /// Maximal nesting of Exp (resp. Log) nodes along any path.
  unsigned exp_depth() const { return exp_depth_; }
  unsigned log_depth() const { return log_depth_; }
  bool is_constant() const { return kind_ == Kind::Rational || kind_ == Kind::Algebraic; }

 private:
  friend struct NodeFactory;
  Node() = default;

  Kind kind_ = Kind::Rational;
  mpq_class value_;
  AlgebraicId alg_;
  std::vector<Term> children_;
  long integer_ = 0;
  std::uint64_t id_ = 0;
  bool has_exp_ = false, has_log_ = false;
  unsigned exp_depth_ = 0, log_depth_ = 0;
};

class TermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Unnormalized constructors, exactly the node requested.
namespace raw {
Term rational(const mpq_class& q);
Term algebraic(const AlgebraicConst& a);
Term sum(std::vector<Term> children);
Term product(std::vector<Term> children);
Term pow(Term base, long exponent);
Term exp(Term arg);
Term log(Term arg, long branch);
}  // namespace raw

/// Normalizing constructors. Inputs must already be normal forms.
Term rational(const mpq_class& q);
Term algebraic(const AlgebraicConst& a);
Term sum(std::vector<Term> children);
Term product(std::vector<Term> children);
Term pow(Term base, long exponent);
Term exp(Term arg);
Term log(Term arg, long branch);
Term negate(Term t);
Term subtract(Term a, Term b);

Term normalize(Term t);
bool is_normal(Term t);

/// Constant value of a Rational/Algebraic leaf.
std::optional<AlgebraicConst> constant_value(Term t);
bool is_rational(Term t, const mpq_class& q);

std::optional<unsigned> e_level(Term t);
std::optional<unsigned> l_level(Term t);

/// Total order: kind rank, then children lexicographically, then branch.
int term_order(Term a, Term b);
struct TermLess {
  bool operator()(Term a, Term b) const { return term_order(a, b) < 0; }
};
void sort_terms(std::vector<Term>& terms);
/// Sorted, duplicate-free copy.
std::vector<Term> term_set(std::vector<Term> terms);

std::string print(Term t);
Term parse(const std::string& text);

/// Every distinct subterm, children before parents, in first-visit order.
std::vector<Term> subterms(Term t);

// Named constants used throughout the proofs.
Term one();
Term i_pi();                       ///< log(-1; 0)
Term pi();                         ///< (-i) * log(-1; 0)
Term iterated_exp(unsigned n);     ///< exp^[n](1); n = 0 gives 1
Term iterated_log_pi(unsigned k);  ///< log_[k] pi; k = 0 gives pi
/// Number of interned nodes so far (diagnostics).
std::size_t interned_count();

}  // namespace schanuel
