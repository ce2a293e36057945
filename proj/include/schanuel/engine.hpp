#pragma once

#include "schanuel/numeric.hpp"
#include "schanuel/support.hpp"
#include "schanuel/term.hpp"

#include <json.hpp>

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace schanuel {

/// Certification strength, weakest last.
enum class Provenance { Exact = 0, ConditionalOnSC = 1, HeuristicNumeric = 2 };
const char* provenance_name(Provenance p);
std::optional<Provenance> parse_provenance(const std::string& name);
inline Provenance weaker(Provenance a, Provenance b) { return a < b ? b : a; }

/// Base field of an algebraic-independence statement. E and L carry a level
/// (kAnyLevel for the whole tower).
enum class Field { Q, Qbar, E, L };
const char* field_name(Field f);

constexpr long kAnyLevel = -1;

enum class Stmt {
  QLinearlyIndependent,
  QbarLinearlyIndependent,
  AlgebraicallyIndependent,
  AlgebraicOver,
  TrdegAtLeast,
  TrdegAtMost,
  TrdegEquals,
  TrdegEqualSets,
  MemberE,
  MemberL,
  MemberQbar,
  NotMemberE,
  NotMemberL,
  NotMemberQbar,
  LinearlyDisjoint,
  IntersectionIsQbar,
  ClosuresFree,
  ClosuresLinearlyDisjoint,
  LinearImpliesMonomial,
  MonomialTrivial,
  ExpSupport,
  LogSupport,
  TranscendenceBasis,
  WitnessRelation,
  Contradiction,
};
const char* stmt_name(Stmt k);

/// A closed statement about exp-log constants. Which fields are meaningful
/// depends on the kind:
///   QLI/QbarLI(set); AI(set, base, level); AlgebraicOver(set over `over`);
///   Trdeg*(set, n); TrdegEqualSets(set, over); Member*(x, level);
///   NotMember*(x); LinearlyDisjoint / IntersectionIsQbar(E_m, L_n);
///   Closures*(set, over); LinearImpliesMonomial(set = terms, over = images,
///   text = display); MonomialTrivial(set = terms, zero, even);
///   Exp/LogSupport(x, set, level); TranscendenceBasis(set is a basis of over);
///   WitnessRelation(set = l, over = e, m, n).
struct Statement {
  Stmt kind = Stmt::Contradiction;
  std::vector<Term> set;
  std::vector<Term> over;
  Term x = nullptr;
  long n = 0;
  long m = kAnyLevel;
  long level = kAnyLevel;
  Field base = Field::Q;
  std::vector<long> zero, even;
  std::string text;

  std::string key() const;
  friend bool operator==(const Statement& a, const Statement& b) { return a.key() == b.key(); }
};

/// Ordered kinds keep `set` / `over` in the given order; all others sort them.
bool is_ordered(Stmt k);
/// Sorts and deduplicates the set-valued fields of unordered kinds.
Statement canonical(Statement s);

nlohmann::json to_json(const Statement& s);
/// Throws std::invalid_argument or ParseError on malformed input.
Statement statement_from_json(const nlohmann::json& j);
std::string describe(const Statement& s);

namespace stmt {
Statement qli(std::vector<Term> s);
Statement qbar_li(std::vector<Term> s);
Statement ai(std::vector<Term> s, Field base = Field::Q, long level = kAnyLevel);
Statement algebraic_over(std::vector<Term> x, std::vector<Term> over);
Statement trdeg_at_least(std::vector<Term> s, long n);
Statement trdeg_at_most(std::vector<Term> s, long n);
Statement trdeg_equals(std::vector<Term> s, long n);
Statement trdeg_equal_sets(std::vector<Term> a, std::vector<Term> b);
Statement member(Stmt kind, Term x, long level = kAnyLevel);
Statement linearly_disjoint(long m, long n);
Statement intersection_is_qbar(long m, long n);
Statement closures(Stmt kind, std::vector<Term> a, std::vector<Term> b);
Statement support(SupportKind kind, Term x, std::vector<Term> elements, long level);
Statement transcendence_basis(std::vector<Term> basis, std::vector<Term> of);
Statement witness(std::vector<Term> l, std::vector<Term> e, long m, long n);
Statement contradiction();
}  // namespace stmt

using FactId = std::size_t;

struct Fact {
  FactId id = 0;
  Statement statement;
  Provenance provenance = Provenance::Exact;
  std::string rule;
  std::vector<FactId> premises;
  std::string anchor;
  nlohmann::json data = nlohmann::json::object();
  /// Open hypotheses (ids of `assume` facts) this fact depends on.
  std::vector<FactId> assumptions;
};

/// A proof obligation that could not be discharged.
class ObligationError : public std::runtime_error {
 public:
  ObligationError(const std::string& rule, const std::string& what)
      : std::runtime_error(rule + ": " + what), rule_(rule) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

// ---------------------------------------------------------------- closure

/// "Every element of `x` is algebraic over Q(`over`)".
struct Dependency {
  std::vector<Term> x;
  std::vector<Term> over;
};

/// Algebraic closure of Q(base) as far as structure and the supplied
/// dependencies reveal it. Field expressions in members are members, a
/// member divided by a constant factor is a member, and so is the base of a
/// member power.
class Closure {
 public:
  explicit Closure(const std::vector<Term>& base);
  bool contains(Term x) const;
  bool contains_all(const std::vector<Term>& xs) const;
  /// Fires dependencies whose `over` lies in the closure until nothing
  /// changes; the result flags which ones fired.
  std::vector<bool> saturate(const std::vector<Dependency>& deps);

 private:
  void add(Term t);
  std::unordered_set<Term> members_;
  mutable std::unordered_map<Term, bool> memo_;
};

// ---------------------------------------------------------------- rules

struct RuleContext {
  const Statement& conclusion;
  const std::vector<const Statement*>& premises;
  const nlohmann::json& data;
  const std::string& anchor;
};

struct Rule {
  std::string name;
  Provenance floor = Provenance::Exact;
  /// Empty on success, otherwise the failed obligation.
  std::function<std::string(const RuleContext&)> check;
};

/// The one registry shared by the knowledge base and the trace checker.
const Rule* find_rule(const std::string& name);
std::vector<std::string> rule_names();

constexpr const char* kLangAnchor = "external-axiom: Lang-4.12";

/// Provenance and open assumptions a derivation must carry.
struct DerivedTags {
  Provenance provenance = Provenance::Exact;
  std::vector<FactId> assumptions;
};
/// `self` is the id the new fact will get; `assume` opens it as a hypothesis
/// and `discharge` closes the hypothesis given as its second premise.
DerivedTags derived_tags(const Rule& rule, FactId self, const std::vector<const Fact*>& premises);

// ---------------------------------------------------------------- knowledge base

/// Append-only fact store. Single writer, concurrent readers.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(const KnowledgeBase&) = delete;
  KnowledgeBase& operator=(const KnowledgeBase&) = delete;

  /// Validates the derivation with the rule registry and appends it, or
  /// returns an existing fact with the same statement, assumptions and at
  /// least the same strength. Throws ObligationError when the rule rejects.
  FactId derive(const std::string& rule, const std::vector<FactId>& premises, Statement conclusion,
                nlohmann::json data = nlohmann::json::object(), std::string anchor = {});

  std::size_t size() const;
  Fact fact(FactId id) const;
  /// Strongest assumption-free fact with this statement.
  std::optional<FactId> find(const Statement& s, bool allow_heuristic = false) const;
  /// Assumption-free facts of one kind, oldest first.
  std::vector<FactId> of_kind(Stmt kind, bool allow_heuristic = false) const;
  /// Ids of `results` and everything they depend on, ascending.
  std::vector<FactId> cone(const std::vector<FactId>& results) const;

  /// Dependencies recorded by AlgebraicOver and TranscendenceBasis facts.
  std::vector<std::pair<FactId, Dependency>> dependencies(bool allow_heuristic = false) const;
  /// Assumption-free AI/Trdeg lower-bound facts as (set, bound).
  std::vector<std::pair<FactId, std::pair<std::vector<Term>, long>>> lower_bounds(bool allow_heuristic = false) const;

 private:
  mutable std::shared_mutex mutex_;
  std::deque<Fact> facts_;
  std::map<std::string, std::vector<FactId>> by_key_;
};

// ---------------------------------------------------------------- operations

struct NumericConfig {
  mpfr_prec_t precision = 256;
  mpz_class height = 1000;
};

/// TrdegAtLeast(S u exp(S), |S|) from a QLinearlyIndependent(S) fact.
FactId schanuel_apply(KnowledgeBase& kb, const std::vector<Term>& s, FactId li, const std::string& anchor = {});

/// The exponential image of a linear relation; same terms and coefficients.
RelationVector reduce_linear_to_monomial(const RelationVector& r);
/// prod exp(t_i)^{q_i}, normalized.
Term monomial_value(const RelationVector& r);
/// Normalized exp(t) for each term.
std::vector<Term> exp_images(const std::vector<Term>& terms);
/// "(-1)^q0 * pi^q1 * ... = 1" for the exponential images of `terms`.
std::string monomial_display(const std::vector<Term>& terms);
/// LinearImpliesMonomial fact for the ordered terms.
FactId record_linear_to_monomial(KnowledgeBase& kb, const std::vector<Term>& terms, const std::string& anchor = {});
/// MonomialTrivial from a LinearImpliesMonomial fact and an AI fact covering
/// every non-constant image. Throws ObligationError on missing coverage.
FactId monomial_triviality(KnowledgeBase& kb, FactId monomial, std::optional<FactId> ai,
                           const std::string& anchor = {});

/// AlgebraicOver(x, over) from structure plus a minimal set of recorded
/// dependencies; absent when the knowledge base does not support it.
std::optional<FactId> derive_algebraic_over(KnowledgeBase& kb, const std::vector<Term>& x,
                                            const std::vector<Term>& over, const std::string& anchor = {});
/// AI(s, base) from the knowledge base (subset of a recorded AI set, base
/// changes between Q and Qbar); absent when not available.
std::optional<FactId> find_independence(KnowledgeBase& kb, const std::vector<Term>& s, Field base = Field::Q,
                                        const std::string& anchor = {});

enum class LIOutcome { Certificate, CounterRelation, Unknown };
struct LIResult {
  LIOutcome outcome = LIOutcome::Unknown;
  std::optional<FactId> certificate;
  std::optional<RelationVector> relation;
  Confirmation confirmation = Confirmation::None;
};
/// Symbolic certificate via the knowledge base, exact counter-relation via
/// numeric search plus symbolic confirmation, or Unknown.
LIResult check_q_linear_independence(KnowledgeBase& kb, const std::vector<Term>& s, unsigned depth_budget = 2,
                                     const NumericConfig& config = {});

struct TrdegInterval {
  long lo = 0, hi = 0;
};
TrdegInterval trdeg_bound(const KnowledgeBase& kb, const std::vector<Term>& s);
/// Derives TrdegEquals(s, k) when the bounds meet.
std::optional<FactId> certify_trdeg(KnowledgeBase& kb, const std::vector<Term>& s);

enum class BasisTarget { ExpImage, Identity };
struct BasisResult {
  std::vector<Term> basis;  ///< subset of A
  FactId fact = 0;          ///< TranscendenceBasis of the images
};
/// Greedy in term order. Throws ObligationError when an element can be
/// classified neither by certificates nor (if allowed) heuristically.
BasisResult select_transcendence_basis(KnowledgeBase& kb, const std::vector<Term>& a, BasisTarget target,
                                       bool allow_heuristic = false, const NumericConfig& config = {});

/// Heuristic AI: no integer relation among the monomials of degree <= 2.
std::optional<FactId> numeric_independence(KnowledgeBase& kb, const std::vector<Term>& s,
                                           const NumericConfig& config = {});

}  // namespace schanuel
