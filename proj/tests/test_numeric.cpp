#include "doctest.h"

#include "random_terms.hpp"
#include "schanuel/numeric.hpp"

#include <chrono>

using namespace schanuel;

namespace {

// Oracle values straight from MPFR real primitives, independent of the
// complex ball layer.
Float mpfr_value(mpfr_prec_t p, int which) {
  Float x(p);
  switch (which) {
    case 0:  // log(log(pi))
      mpfr_const_pi(x.get(), MPFR_RNDN);
      mpfr_log(x.get(), x.get(), MPFR_RNDN);
      mpfr_log(x.get(), x.get(), MPFR_RNDN);
      break;
    case 1:  // e - 3
      mpfr_set_ui(x.get(), 1, MPFR_RNDN);
      mpfr_exp(x.get(), x.get(), MPFR_RNDN);
      mpfr_sub_ui(x.get(), x.get(), 3, MPFR_RNDN);
      break;
  }
  return x;
}

bool near_real(const Ball& b, const Float& expect, long bits) {
  Float diff(expect.precision());
  mpfr_sub(diff.get(), b.re().get(), expect.get(), MPFR_RNDN);
  mpfr_abs(diff.get(), diff.get(), MPFR_RNDN);
  Float tol(64);
  mpfr_set_ui_2exp(tol.get(), 1, -bits, MPFR_RNDN);
  mpfr_add(tol.get(), tol.get(), b.radius().get(), MPFR_RNDU);
  return mpfr_cmp(diff.get(), tol.get()) <= 0 && mpfr_cmpabs(b.im().get(), tol.get()) <= 0;
}

std::vector<mpz_class> ints(std::initializer_list<long> v) {
  std::vector<mpz_class> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("eval examples") {
  Ball ipi = eval(parse("log(-1;0)"), 128);
  CHECK(ipi.im().to_double() == doctest::Approx(3.14159265358979));
  CHECK(std::fabs(ipi.re().to_double()) < 1e-30);
  Ball e = eval(parse("exp(1)"), 64);
  CHECK(e.re().to_double() == doctest::Approx(2.718281828459045));
  Ball llp = eval(parse("log(log(pi))"), 256);
  CHECK(near_real(llp, mpfr_value(300, 0), 250));
  CHECK(llp.re().to_double() == doctest::Approx(0.1351786));
  Ball branch = eval(parse("log(2;3)"), 128);
  CHECK(branch.im().to_double() == doctest::Approx(6 * M_PI));
}

TEST_CASE("certify_nonzero") {
  auto c = certify_nonzero(parse("log(-1;0)"));
  REQUIRE(c);
  CHECK(c->precision == 64);
  CHECK(std::stod(c->lower_bound) > 3);
  CHECK_FALSE(certify_nonzero(raw::sum({raw::exp(raw::log(raw::rational(2), 0)), raw::rational(-2)})));
  auto d = certify_nonzero(parse("exp(1) - 3"));
  REQUIRE(d);
  Float oracle = mpfr_value(128, 1);
  CHECK(std::stod(d->lower_bound) <= std::fabs(oracle.to_double()));
  CHECK(recheck_nonzero(d->term, d->precision));
  // A zero identity that survives normalization.
  CHECK_FALSE(certify_nonzero(parse("log(2) + log(3) - log(6)")));
}

TEST_CASE("LLL output is size-reduced, Lovasz-reduced and spans the same lattice") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 4;
    std::vector<std::vector<mpz_class>> b(n, std::vector<mpz_class>(n));
    for (auto& row : b)
      for (auto& x : row) x = static_cast<long>(rng() % 201) - 100;
    for (std::size_t i = 0; i < n; ++i) b[i][i] += 500;  // keeps the rows independent
    auto det = [](std::vector<std::vector<mpz_class>> m) {
      const std::size_t k = m.size();
      std::vector<std::vector<mpq_class>> a(k, std::vector<mpq_class>(k));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a[i][j] = m[i][j];
      mpq_class d = 1;
      for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        while (p < k && a[p][c] == 0) ++p;
        if (p == k) return mpq_class(0);
        if (p != c) {
          std::swap(a[p], a[c]);
          d = -d;
        }
        d *= a[c][c];
        for (std::size_t r = c + 1; r < k; ++r) {
          mpq_class f = a[r][c] / a[c][c];
          for (std::size_t j = c; j < k; ++j) a[r][j] -= f * a[c][j];
        }
      }
      return d;
    };
    const mpq_class before = abs(det(b));
    lll_reduce(b);
    CHECK(abs(det(b)) == before);
    // Gram-Schmidt over Q, checked against the reduction conditions (delta = 3/4).
    std::vector<std::vector<mpq_class>> star(n);
    std::vector<mpq_class> norm(n);
    std::vector<std::vector<mpq_class>> mu(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
      star[i].assign(b[i].begin(), b[i].end());
      for (std::size_t j = 0; j < i; ++j) {
        mpq_class dot = 0;
        for (std::size_t c = 0; c < n; ++c) dot += mpq_class(b[i][c]) * star[j][c];
        mu[i][j] = dot / norm[j];
        for (std::size_t c = 0; c < n; ++c) star[i][c] -= mu[i][j] * star[j][c];
      }
      norm[i] = 0;
      for (auto& x : star[i]) norm[i] += x * x;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(abs(mu[i][j]) <= mpq_class(1, 2));
    for (std::size_t i = 1; i < n; ++i)
      CHECK(norm[i] >= (mpq_class(3, 4) - mu[i][i - 1] * mu[i][i - 1]) * norm[i - 1]);
  }
}

TEST_CASE("find_integer_relation examples") {
  std::vector<Term> logs{parse("log(2)"), parse("log(3)"), parse("log(6)")};
  std::vector<Ball> v;
  for (Term t : logs) v.push_back(eval(t, 200).with_precision(200));
  auto start = std::chrono::steady_clock::now();
  auto q = find_integer_relation(v, 100);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
  REQUIRE(q);
  CHECK(*q == ints({1, 1, -1}));
  CHECK(confirm_linear_relation(logs, *q) == Confirmation::MonomialImage);

  std::vector<Ball> one_pi{eval(one(), 200).with_precision(200), eval(pi(), 200).with_precision(200)};
  CHECK_FALSE(find_integer_relation(one_pi, 10000));

  std::vector<Ball> cor3;
  for (const char* s : {"1", "log(-1;0)", "log(pi)", "log(log(pi))"}) cor3.push_back(eval(parse(s), 1000).with_precision(1000));
  CHECK_FALSE(find_integer_relation(cor3, 10000));

  CHECK_THROWS_AS(find_integer_relation(one_pi, mpz_class("1000000000000000000000000000")), NumericError);
}

TEST_CASE("falsify_linear_independence") {
  Confirmation how = Confirmation::None;
  auto r = falsify_linear_independence({parse("log(2)"), parse("log(3)"), parse("log(6)")}, 200, 100, &how);
  REQUIRE(r);
  CHECK(r->coefficients == ints({1, 1, -1}));
  CHECK(how == Confirmation::MonomialImage);
  CHECK_FALSE(falsify_linear_independence({one(), pi()}, 200, 10000));
  // Relation through a branch constant: log(2;1) - log(2;0) - 2 log(-1;0) = 0.
  auto b = falsify_linear_independence({parse("log(2;1)"), parse("log(2)"), parse("log(-1;0)")}, 200, 100, &how);
  REQUIRE(b);
  CHECK(b->coefficients == ints({1, -1, -2}));
  CHECK(how == Confirmation::BranchExpansion);
}

TEST_CASE("property: planted relations are recovered") {
  std::mt19937 rng(99);
  const std::vector<Term> pool{one(), pi(), parse("exp(1)"), parse("log(2)"), parse("sqrt2"), parse("log(3)")};
  std::vector<Ball> base;
  for (Term t : pool) base.push_back(eval(t, 600));
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5;  // 2..6 values
    std::vector<mpz_class> planted(n);
    for (std::size_t i = 0; i + 1 < n; ++i) planted[i] = static_cast<long>(rng() % 2001) - 1000;
    if (std::all_of(planted.begin(), planted.end() - 1, [](const mpz_class& c) { return c == 0; })) planted[0] = 1;
    planted[n - 1] = 1;
    Ball last(600);
    for (std::size_t i = 0; i + 1 < n; ++i) last = last - scale(base[i], planted[i]);
    std::vector<Ball> values(base.begin(), base.begin() + static_cast<long>(n - 1));
    values.push_back(last);
    for (auto& v : values) v = v.with_precision(512);
    auto q = find_integer_relation(values, 1000);
    REQUIRE(q);
    auto expect = planted;
    normalize_relation(expect);
    CHECK(*q == expect);
  }
}

TEST_CASE("property: refinement nests and zero identities are never certified") {
  std::mt19937 rng(5);
  for (int n = 0; n < 40; ++n) {
    Term t = schanuel::testing::random_term(rng, 3, schanuel::testing::Flavor::ExpOnly);
    try {
      Ball a = eval_at(t, 128);
      Ball b = eval_at(t, 512);
      CHECK(a.overlaps(b));
      CHECK(b.radius().to_double() <= a.radius().to_double() + 1e-300);
      CHECK(eval_at(normalize(t), 256).overlaps(b));
    } catch (const BallError&) {
    }
  }
  for (int n = 0; n < 6; ++n) {
    Term x = schanuel::testing::random_tower_term(rng, 3, schanuel::testing::Flavor::LogOnly);
    // Zero identities that survive normalization: branch shifts and
    // unmerged exponentials.
    const long k = static_cast<long>(rng() % 5) - 2;
    Term branch = sum({log(x, k), negate(log(x, 0)), product({rational(-2 * k), i_pi()})});
    if (k != 0) CHECK_FALSE(is_rational(branch, 0));
    CHECK_FALSE(certify_nonzero(branch));
    Term y = schanuel::testing::random_term(rng, 2, schanuel::testing::Flavor::LogOnly);
    Term merge = subtract(product({exp(x), exp(y)}), exp(sum({x, y})));
    CHECK_FALSE(certify_nonzero(merge));
  }
}
