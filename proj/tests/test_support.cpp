#include "doctest.h"

#include "random_terms.hpp"
#include "schanuel/support.hpp"

#include <set>

using namespace schanuel;
using schanuel::testing::Flavor;

namespace {

// Oracle: arguments of every Exp node anywhere in t, by plain recursion.
void all_exp_args(Term t, std::set<Term>& out) {
  if (t->kind() == Kind::Exp) out.insert(t->arg());
  for (Term c : t->children()) all_exp_args(c, out);
}

void all_logs(Term t, std::set<Term>& out) {
  if (t->kind() == Kind::Log) out.insert(t);
  for (Term c : t->children()) all_logs(c, out);
}

std::set<Term> as_set(const std::vector<Term>& v) { return {v.begin(), v.end()}; }

std::size_t distinct_exp_nodes(Term t) {
  std::size_t n = 0;
  for (Term s : subterms(t)) n += s->kind() == Kind::Exp;
  return n;
}

}  // namespace

TEST_CASE("exp_support examples") {
  Term eee = parse("exp(exp(exp(1)))");
  auto s = exp_support(eee);
  std::vector<Term> expect{parse("1"), parse("exp(1)"), parse("exp(exp(1))")};
  CHECK(s.elements == expect);
  CHECK(s.level_witness == 2);
  CHECK(verify_closure(s));

  auto s1 = exp_support(parse("exp(1)"));
  CHECK(s1.elements == std::vector<Term>{parse("1")});

  auto s2 = exp_support(parse("exp(1) + exp(sqrt2)"));
  CHECK(as_set(s2.elements) == std::set<Term>{parse("1"), parse("sqrt2")});
  CHECK(s2.level_witness == 0);

  CHECK_THROWS_AS(exp_support(parse("log(2)")), SupportError);
  CHECK_THROWS_AS(exp_support(parse("7")), SupportError);
}

TEST_CASE("log_support examples") {
  auto s = log_support(parse("log(-1;0)"));
  CHECK(s.elements == std::vector<Term>{parse("log(-1;0)")});
  CHECK(s.level_witness == 0);
  CHECK(verify_closure(s));

  auto lp = log_support(parse("log(pi;0)"));
  CHECK(as_set(lp.elements) == std::set<Term>{parse("log(pi;0)"), parse("log(-1;0)")});
  CHECK(lp.level_witness == 1);
  CHECK(verify_closure(lp));

  CHECK_THROWS_AS(log_support(parse("5")), SupportError);
  CHECK_THROWS_AS(log_support(parse("exp(1)")), SupportError);
}

TEST_CASE("verify_closure rejects tampering") {
  auto s = exp_support(parse("exp(exp(exp(1)))"));
  auto tampered = s;
  tampered.elements.erase(tampered.elements.begin());  // drop Rational 1
  tampered.certificate.erase(tampered.certificate.begin() + 1);
  auto report = verify_closure(tampered);
  CHECK_FALSE(report.ok);
  bool found = false;
  for (const auto& d : report.diagnostics) found |= d == "Exp-argument 1 not in A";
  CHECK(found);

  auto wrong_level = s;
  wrong_level.level_witness = 1;
  CHECK_FALSE(verify_closure(wrong_level));

  auto wrong_cert = s;
  wrong_cert.certificate[0].consumed.clear();
  CHECK_FALSE(verify_closure(wrong_cert));

  SupportSet empty;
  empty.subject = parse("sqrt2");
  CHECK(verify_closure(empty));
  empty.subject = parse("exp(1)");
  CHECK_FALSE(verify_closure(empty));
}

TEST_CASE("support json round trip") {
  auto s = log_support(parse("log(log(pi)) + log(2;3)"));
  auto back = support_from_json(to_json(s));
  CHECK(back.elements == s.elements);
  CHECK(back.subject == s.subject);
  CHECK(verify_closure(back));
  CHECK(to_json(back) == to_json(s));
}

TEST_CASE("property: random exp-only supports") {
  std::mt19937 rng(11);
  for (int n = 0; n < 200; ++n) {
    Term t = schanuel::testing::random_tower_term(rng, 5, Flavor::ExpOnly);
    auto s = exp_support(t);
    CHECK(verify_closure(s));
    std::set<Term> oracle;
    all_exp_args(t, oracle);
    CHECK(as_set(s.elements) == oracle);
    CHECK(s.elements.size() <= distinct_exp_nodes(t));
    for (Term a : maximal_exp_arguments(t)) CHECK(oracle.count(a) == 1);
    // Deterministic.
    CHECK(exp_support(t).elements == s.elements);
    // Monotone: a subterm's support is contained in the whole.
    for (Term sub : subterms(t)) {
      if (!sub->has_exp()) continue;
      for (Term a : exp_support(sub).elements) CHECK(oracle.count(a) == 1);
    }
  }
}

TEST_CASE("property: random log-only supports") {
  std::mt19937 rng(12);
  for (int n = 0; n < 200; ++n) {
    Term t = schanuel::testing::random_tower_term(rng, 5, Flavor::LogOnly);
    auto s = log_support(t);
    CHECK(verify_closure(s));
    std::set<Term> oracle;
    all_logs(t, oracle);
    CHECK(as_set(s.elements) == oracle);
    CHECK(log_support(t).elements == s.elements);
  }
}
