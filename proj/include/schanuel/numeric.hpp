#pragma once

#include "schanuel/ball.hpp"
#include "schanuel/term.hpp"

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace schanuel {

constexpr mpfr_prec_t kStartPrecision = 64;
constexpr mpfr_prec_t kPrecisionCap = 1 << 18;
constexpr int kMaxDoublings = 12;

class NumericError : public std::runtime_error {
 public:
  enum class Kind { InsufficientPrecision, EscalationFailed };
  NumericError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct EvalInfo {
  mpfr_prec_t working_precision = 0;
  bool near_branch_cut = false;
};

/// One evaluation at fixed working precision; throws BallError when a Log
/// or inverse meets an enclosure of zero.
Ball eval_at(Term t, mpfr_prec_t working);

/// Enclosure with radius below 2^-p * max(1, |value|) when reachable; the
/// working precision doubles on failure up to the cap. Throws
/// NumericError(EscalationFailed) if no evaluation succeeds.
Ball eval(Term t, mpfr_prec_t p, EvalInfo* info = nullptr);

struct NonzeroCertificate {
  Term term = nullptr;  ///< the normalized term
  mpfr_prec_t precision = 0;
  std::string lower_bound;  ///< decimal lower bound on |value|
};

/// Exact certificate that the value is nonzero, or absent. Never certifies
/// a term whose value is zero.
std::optional<NonzeroCertificate> certify_nonzero(Term t);
/// Re-runs the check at exactly the recorded precision.
bool recheck_nonzero(Term t, mpfr_prec_t precision);

enum class RelationKind { Linear, Monomial };

/// Linear: sum q_i x_i = 0. Monomial: prod exp(x_i)^q_i = 1.
struct RelationVector {
  std::vector<Term> terms;
  std::vector<mpz_class> coefficients;
  RelationKind kind = RelationKind::Linear;
};

/// Integral LLL (delta = 3/4) on the rows of `basis`, which must be linearly
/// independent. Rows are reduced in place.
void lll_reduce(std::vector<std::vector<mpz_class>>& basis);

/// Small integer vector q, |q_i| <= max_height, with |sum q_i v_i| < 2^-p/2
/// where p is the common precision; absent when none is found. Throws
/// NumericError(InsufficientPrecision) if p < 4 * bitlen(max_height) * n.
std::optional<std::vector<mpz_class>> find_integer_relation(const std::vector<Ball>& values,
                                                            const mpz_class& max_height);

/// Which exact argument confirmed a relation.
enum class Confirmation { None, LinearZero, BranchExpansion, MonomialImage };
const char* confirmation_name(Confirmation c);

/// Exact check that sum q_i t_i = 0.
Confirmation confirm_linear_relation(const std::vector<Term>& terms, const std::vector<mpz_class>& coefficients);
/// Log(t,k) -> Log(t,0) + 2k log(-1;0), applied everywhere.
Term expand_branches(Term t);

/// Evaluates, searches and symbolically confirms; absent otherwise.
std::optional<RelationVector> falsify_linear_independence(const std::vector<Term>& terms, mpfr_prec_t precision,
                                                          const mpz_class& max_height,
                                                          Confirmation* how = nullptr);

/// Normalizes so the first nonzero entry is positive and the gcd is 1.
void normalize_relation(std::vector<mpz_class>& q);

}  // namespace schanuel
