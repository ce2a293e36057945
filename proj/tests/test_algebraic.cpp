#include "doctest.h"

#include "schanuel/algebraic.hpp"

#include <random>

using namespace schanuel;

namespace {

IntPoly poly(std::initializer_list<long> c) {
  std::vector<mpz_class> v;
  for (long x : c) v.emplace_back(x);
  return IntPoly(v);
}

RationalBox box(const char* a, const char* b, const char* c, const char* d) {
  return RationalBox{parse_rational(a), parse_rational(b), parse_rational(c), parse_rational(d)};
}

// floor(x * 10^k) for x = n^(1/r), by integer root extraction.
mpz_class scaled_root(unsigned long n, unsigned long r, unsigned long k) {
  mpz_class scale, arg, out;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, k * r);
  arg = scale * n;
  mpz_root(out.get_mpz_t(), arg.get_mpz_t(), r);
  return out;
}

bool box_contains(const RationalBox& b, const mpq_class& re, const mpq_class& im) {
  return b.re_lo <= re && re <= b.re_hi && b.im_lo <= im && im <= b.im_hi;
}

void check_defining_property(const AlgebraicConst& a) {
  Ball z = enclosure(a.id(), 200);
  CHECK(a.min_poly().evaluate(z).contains_zero());
}

}  // namespace

TEST_CASE("make_algebraic basics") {
  auto s = make_algebraic(poly({-2, 0, 1}), box("1.4", "1.5", "-0.1", "0.1"));
  CHECK(s.degree() == 2);
  CHECK(s.min_poly() == poly({-2, 0, 1}));
  check_defining_property(s);

  auto i = make_algebraic(poly({1, 0, 1}), box("-0.5", "0.5", "0.5", "1.5"));
  CHECK(i.degree() == 2);
  CHECK(i.id() == lookup_name("i")->id());

  auto other_root = make_algebraic(poly({-2, 0, 1}), box("-2", "-1", "-1", "1"));
  CHECK_FALSE(other_root.id() == s.id());
  CHECK(negate(s).id() == other_root.id());
}

TEST_CASE("make_algebraic errors") {
  try {
    make_algebraic(poly({-2, 0, 1}), box("-2", "2", "-1", "1"));
    FAIL("expected non-isolating box");
  } catch (const AlgebraicError& e) {
    CHECK(e.kind() == AlgebraicError::Kind::NonIsolatingBox);
  }
  try {
    make_algebraic(poly({-1, 0, 1}), box("0.5", "1.5", "-0.5", "0.5"));
    FAIL("expected reducible");
  } catch (const AlgebraicError& e) {
    CHECK(e.kind() == AlgebraicError::Kind::Reducible);
    REQUIRE(e.factors().size() == 2);
    CHECK(e.factors()[0].degree() == 1);
  }
  // (x^2 - 2)(x^2 - 3) hides a reducible quartic behind an isolating box.
  try {
    make_algebraic(poly({6, 0, -5, 0, 1}), box("1.3", "1.5", "-0.1", "0.1"));
    FAIL("expected reducible");
  } catch (const AlgebraicError& e) {
    CHECK(e.kind() == AlgebraicError::Kind::Reducible);
    CHECK(e.factors()[0] == poly({-2, 0, 1}));
  }
  SUBCASE("degree cap") {
    set_degree_cap(2);
    CHECK_THROWS_AS(make_algebraic(poly({-2, 0, 0, 1}), box("1", "2", "-1", "1")), AlgebraicError);
    set_degree_cap(64);
  }
  CHECK_THROWS_AS(invert(make_rational_constant(0)), AlgebraicError);
}

TEST_CASE("field operations fold to rationals") {
  auto s = *lookup_name("sqrt2");
  auto i = *lookup_name("i");
  auto two = multiply(s, s);
  REQUIRE(two.is_rational());
  CHECK(two.as_rational() == 2);
  auto zero = add(s, negate(s));
  REQUIRE(zero.is_rational());
  CHECK(zero.as_rational() == 0);
  auto m1 = multiply(i, i);
  REQUIRE(m1.is_rational());
  CHECK(m1.as_rational() == -1);
  CHECK(invert(i).id() == negate(i).id());
}

TEST_CASE("field operations produce the expected minimal polynomials") {
  auto s = *lookup_name("sqrt2");
  auto i = *lookup_name("i");
  // sqrt2 + i has minimal polynomial x^4 - 2x^2 + 9.
  auto z = add(s, i);
  CHECK(z.min_poly() == poly({9, 0, -2, 0, 1}));
  check_defining_property(z);
  // (sqrt2 + i) - i = sqrt2: identification through a degree 4 detour.
  CHECK(add(z, negate(i)).id() == s.id());
  // sqrt2 * i = sqrt(-2).
  auto w = multiply(s, i);
  CHECK(w.min_poly() == poly({2, 0, 1}));
  auto c = make_algebraic(poly({-2, 0, 0, 1}), box("1", "2", "-1", "1"));
  auto c3 = power(c, 3);
  REQUIRE(c3.is_rational());
  CHECK(c3.as_rational() == 2);
  auto c2 = power(c, 2);
  CHECK(c2.min_poly() == poly({-4, 0, 0, 1}));
  CHECK(multiply(c2, c).as_rational() == 2);
  auto half = add(make_rational_constant(mpq_class(1, 2)), s);
  CHECK(half.min_poly() == poly({-7, -4, 4}));
}

TEST_CASE("refine_box") {
  auto s = *lookup_name("sqrt2");
  mpq_class tiny(1, mpz_class("1000000000000000000000000000000"));
  auto b = refine_box(s, tiny);
  CHECK(b.max_side() <= tiny);
  mpz_class lo = scaled_root(2, 2, 30);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, 30);
  CHECK(b.re_lo <= mpq_class(lo + 1, scale));
  CHECK(b.re_hi >= mpq_class(lo, scale));
  CHECK(box_contains(s.box(), b.re_lo, b.im_lo));

  auto i = *lookup_name("i");
  auto bi = refine_box(i, mpq_class(1, 10));
  CHECK(bi.max_side() <= mpq_class(1, 10));
  CHECK(box_contains(bi, 0, 1));

  auto c = make_algebraic(poly({-2, 0, 0, 1}), box("1", "2", "-1", "1"));
  mpq_class t10(1, 10000000000L);
  auto bc = refine_box(c, t10);
  CHECK(bc.max_side() <= t10);
  mpz_class c_lo = scaled_root(2, 3, 12);
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, 12);
  // The oracle value 1.259921049894... sits inside the refined box.
  mpq_class mid = (bc.re_lo + bc.re_hi) / 2;
  CHECK(abs(mid - mpq_class(c_lo, scale)) < mpq_class(2, 10000000000L));
}

TEST_CASE("canonical boxes are deterministic and isolating") {
  auto s = *lookup_name("sqrt2");
  auto b1 = canonical_box(s.id());
  auto again = make_algebraic(poly({-4, 0, 2}), box("1.2", "1.7", "-0.2", "0.2"));
  CHECK(again.id() == s.id());
  CHECK(canonical_box(again.id()).to_string() == b1.to_string());
  auto roots = isolate_roots(poly({-2, 0, 1}));
  int inside = 0;
  for (const auto& r : roots)
    if (r.inside_box(b1.re_lo, b1.re_hi, b1.im_lo, b1.im_hi)) ++inside;
  CHECK(inside == 1);
}

TEST_CASE("property: random field operations stay on the defining polynomial") {
  std::mt19937 rng(7);
  std::vector<AlgebraicConst> pool{*lookup_name("i"), *lookup_name("sqrt2"), make_rational_constant(3)};
  for (int step = 0; step < 24; ++step) {
    auto a = pool[rng() % pool.size()];
    auto b = pool[rng() % pool.size()];
    if (a.degree() * b.degree() > 8) continue;
    AlgebraicConst r = (rng() % 2) ? add(a, b) : multiply(a, b);
    if (r.degree() > 8) continue;
    check_defining_property(r);
    Ball expect = (r.id() == add(a, b).id()) ? enclosure(a.id(), 128) + enclosure(b.id(), 128)
                                              : enclosure(a.id(), 128) * enclosure(b.id(), 128);
    CHECK(expect.overlaps(enclosure(r.id(), 128)));
    pool.push_back(r);
  }
}

TEST_CASE("registry text") {
  load_registry_text("# comment\nphi : -1,-1,1 : 1.5,1.7,-0.1,0.1\n");
  auto phi = lookup_name("phi");
  REQUIRE(phi);
  CHECK(phi->min_poly() == poly({-1, -1, 1}));
  CHECK(phi->name().value() == "phi");
  auto reg = user_registry();
  REQUIRE(reg.size() == 1);
  CHECK(reg[0].first == "phi");
  CHECK_THROWS(load_registry_text("bad : 1,2 : 0,1"));
}
