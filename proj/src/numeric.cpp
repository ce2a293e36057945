#include "schanuel/numeric.hpp"

#include <algorithm>
#include <unordered_map>

namespace schanuel {

namespace {

Float power_of_two(long e) {
  Float out(Ball::kRadiusPrecision);
  mpfr_set_ui_2exp(out.get(), 1, e, MPFR_RNDN);
  return out;
}

bool accurate_enough(const Ball& b, mpfr_prec_t p) {
  // radius <= 2^-p * max(1, |mid|)
  Float scale = b.abs_upper();
  if (mpfr_cmp_ui(scale.get(), 1) < 0) mpfr_set_ui(scale.get(), 1, MPFR_RNDN);
  mpfr_mul_2si(scale.get(), scale.get(), -static_cast<long>(p), MPFR_RNDD);
  return mpfr_cmp(b.radius().get(), scale.get()) <= 0;
}

}  // namespace

Ball eval_at(Term t, mpfr_prec_t w) {
  std::unordered_map<Term, Ball> memo;
  for (Term u : subterms(t)) {
    auto child = [&](std::size_t i) -> const Ball& { return memo.at(u->children()[i]); };
    Ball value(w);
    switch (u->kind()) {
      case Kind::Rational:
        value = Ball::from_rational(u->rational(), w);
        break;
      case Kind::Algebraic:
        value = enclosure(u->algebraic(), w).with_precision(w);
        break;
      case Kind::Sum:
        value = child(0);
        for (std::size_t i = 1; i < u->children().size(); ++i) value = value + child(i);
        break;
      case Kind::Product:
        value = child(0);
        for (std::size_t i = 1; i < u->children().size(); ++i) value = value * child(i);
        break;
      case Kind::IntPow:
        value = pow(child(0), u->exponent());
        break;
      case Kind::Exp:
        value = exp(child(0));
        break;
      case Kind::Log:
        // An exact negative rational sits on the cut; split off log(-1; k).
        if (u->arg()->kind() == Kind::Rational && u->arg()->rational() < 0)
          value = log(Ball::from_rational(-u->arg()->rational(), w), 0) + log(Ball::from_rational(-1, w), u->branch());
        else
          value = log(child(0), u->branch());
        break;
    }
    memo.emplace(u, std::move(value));
  }
  return memo.at(t);
}

Ball eval(Term t, mpfr_prec_t p, EvalInfo* info) {
  std::optional<Ball> best;
  mpfr_prec_t used = 0;
  std::string last_error = "no evaluation attempted";
  for (mpfr_prec_t w = p + 32; w <= kPrecisionCap + 32; w *= 2) {
    try {
      Ball b = eval_at(t, w);
      best = b;
      used = w;
      if (accurate_enough(b, p)) break;
    } catch (const BallError& e) {
      last_error = e.what();
    }
  }
  if (!best)
    throw NumericError(NumericError::Kind::EscalationFailed,
                       "evaluation of " + print(t) + " failed up to the precision cap: " + last_error);
  if (info) {
    info->working_precision = used;
    info->near_branch_cut = best->near_branch_cut();
  }
  return *best;
}

bool recheck_nonzero(Term t, mpfr_prec_t precision) {
  try {
    return !eval_at(t, precision).contains_zero();
  } catch (const BallError&) {
    return false;
  }
}

std::optional<NonzeroCertificate> certify_nonzero(Term t) {
  Term n = normalize(t);
  if (is_rational(n, 0)) return std::nullopt;
  mpfr_prec_t p = kStartPrecision;
  for (int k = 0; k <= kMaxDoublings; ++k, p *= 2) {
    try {
      Ball b = eval_at(n, p);
      if (b.contains_zero()) continue;
      Float lower = b.abs_lower();
      char buf[64];
      mpfr_snprintf(buf, sizeof buf, "%.6RDe", lower.get());
      return NonzeroCertificate{n, p, buf};
    } catch (const BallError&) {
    }
  }
  return std::nullopt;
}

void lll_reduce(std::vector<std::vector<mpz_class>>& b) {
  const std::size_t n = b.size();
  if (n == 0) return;
  auto dot = [](const std::vector<mpz_class>& x, const std::vector<mpz_class>& y) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  // 1-based bookkeeping as in the integral algorithm: d[0] = 1.
  std::vector<mpz_class> d(n + 1);
  std::vector<std::vector<mpz_class>> lam(n + 1, std::vector<mpz_class>(n + 1));
  auto B = [&](std::size_t i) -> std::vector<mpz_class>& { return b[i - 1]; };
  d[0] = 1;
  d[1] = dot(B(1), B(1));
  if (d[1] == 0) throw std::invalid_argument("LLL basis is dependent");
  std::size_t k = 2, kmax = 1;

  auto red = [&](std::size_t k_, std::size_t l) {
    mpz_class twice = 2 * abs(lam[k_][l]);
    if (twice <= d[l]) return;
    // q = round(lam / d), ties away from zero
    mpz_class num = 2 * lam[k_][l] + d[l];
    mpz_class den = 2 * d[l];
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (std::size_t c = 0; c < B(k_).size(); ++c) B(k_)[c] -= q * B(l)[c];
    lam[k_][l] -= q * d[l];
    for (std::size_t i = 1; i < l; ++i) lam[k_][i] -= q * lam[l][i];
  };

  auto swap = [&](std::size_t k_) {
    std::swap(B(k_), B(k_ - 1));
    for (std::size_t j = 1; j + 2 <= k_; ++j) std::swap(lam[k_][j], lam[k_ - 1][j]);
    mpz_class l = lam[k_][k_ - 1];
    mpz_class bb = (d[k_ - 2] * d[k_] + l * l) / d[k_ - 1];
    for (std::size_t i = k_ + 1; i <= kmax; ++i) {
      mpz_class t = lam[i][k_];
      lam[i][k_] = (d[k_] * lam[i][k_ - 1] - l * t) / d[k_ - 1];
      lam[i][k_ - 1] = (bb * t + l * lam[i][k_]) / d[k_];
    }
    d[k_ - 1] = bb;
  };

  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        mpz_class u = dot(B(k), B(j));
        for (std::size_t i = 1; i < j; ++i) u = (d[i] * u - lam[k][i] * lam[j][i]) / d[i - 1];
        if (j < k)
          lam[k][j] = u;
        else {
          d[k] = u;
          if (u == 0) throw std::invalid_argument("LLL basis is dependent");
        }
      }
    }
    for (;;) {
      red(k, k - 1);
      if (4 * d[k] * d[k - 2] < 3 * d[k - 1] * d[k - 1] - 4 * lam[k][k - 1] * lam[k][k - 1]) {
        swap(k);
        k = std::max<std::size_t>(2, k - 1);
        continue;
      }
      for (std::size_t l = k - 1; l-- > 1;) red(k, l);
      ++k;
      break;
    }
  }
}

void normalize_relation(std::vector<mpz_class>& q) {
  mpz_class g = 0;
  for (const auto& c : q) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g == 0) return;
  for (auto& c : q) c /= g;
  for (const auto& c : q) {
    if (c == 0) continue;
    if (c < 0)
      for (auto& x : q) x = -x;
    break;
  }
}

std::optional<std::vector<mpz_class>> find_integer_relation(const std::vector<Ball>& values,
                                                            const mpz_class& max_height) {
  const std::size_t n = values.size();
  if (n == 0) return std::nullopt;
  if (max_height <= 0) throw std::invalid_argument("height must be positive");
  mpfr_prec_t p = values.front().precision();
  for (const auto& v : values) p = std::min(p, v.precision());
  const long need = 4L * static_cast<long>(mpz_sizeinbase(max_height.get_mpz_t(), 2)) * static_cast<long>(n);
  if (p < need)
    throw NumericError(NumericError::Kind::InsufficientPrecision,
                       "relation search needs " + std::to_string(need) + " bits, values carry " + std::to_string(p));
  const long weight = 3L * p / 4;
  std::vector<std::vector<mpz_class>> basis(n, std::vector<mpz_class>(n + 2));
  for (std::size_t i = 0; i < n; ++i) {
    basis[i][i] = 1;
    Float x(p + 8);
    mpfr_mul_2si(x.get(), values[i].re().get(), weight, MPFR_RNDN);
    mpfr_get_z(basis[i][n].get_mpz_t(), x.get(), MPFR_RNDN);
    mpfr_mul_2si(x.get(), values[i].im().get(), weight, MPFR_RNDN);
    mpfr_get_z(basis[i][n + 1].get_mpz_t(), x.get(), MPFR_RNDN);
  }
  lll_reduce(basis);
  const Float threshold = power_of_two(-static_cast<long>(p / 2));
  for (const auto& row : basis) {
    std::vector<mpz_class> q(row.begin(), row.begin() + static_cast<long>(n));
    bool nonzero = false, small = true;
    for (const auto& c : q) {
      nonzero |= c != 0;
      small &= abs(c) <= max_height;
    }
    if (!nonzero || !small) continue;
    Ball s(p);
    for (std::size_t i = 0; i < n; ++i)
      if (q[i] != 0) s = s + scale(values[i], q[i]);
    if (mpfr_cmp(s.abs_upper().get(), threshold.get()) >= 0) continue;
    normalize_relation(q);
    return q;
  }
  return std::nullopt;
}

const char* confirmation_name(Confirmation c) {
  switch (c) {
    case Confirmation::None:
      return "none";
    case Confirmation::LinearZero:
      return "linear-zero";
    case Confirmation::BranchExpansion:
      return "branch-expansion";
    case Confirmation::MonomialImage:
      return "monomial-image";
  }
  return "?";
}

Term expand_branches(Term t) {
  std::unordered_map<Term, Term> memo;
  for (Term u : subterms(t)) {
    std::vector<Term> kids;
    for (Term c : u->children()) kids.push_back(memo.at(c));
    Term out = u;
    switch (u->kind()) {
      case Kind::Sum:
        out = sum(kids);
        break;
      case Kind::Product:
        out = product(kids);
        break;
      case Kind::IntPow:
        out = pow(kids[0], u->exponent());
        break;
      case Kind::Exp:
        out = exp(kids[0]);
        break;
      case Kind::Log:
        out = log(kids[0], 0);
        if (u->branch() != 0) out = sum({out, product({rational(2 * u->branch()), i_pi()})});
        break;
      default:
        break;
    }
    memo.emplace(u, out);
  }
  return memo.at(t);
}

Confirmation confirm_linear_relation(const std::vector<Term>& terms, const std::vector<mpz_class>& q) {
  if (terms.size() != q.size() || terms.empty()) return Confirmation::None;
  std::vector<Term> parts;
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (q[i] != 0) parts.push_back(product({rational(mpq_class(q[i])), terms[i]}));
  if (parts.empty()) return Confirmation::None;
  Term combo = sum(parts);
  if (is_rational(combo, 0)) return Confirmation::LinearZero;
  if (is_rational(expand_branches(combo), 0)) return Confirmation::BranchExpansion;

  // exp of the combination is exactly 1, so the combination lies in 2 pi i Z;
  // an enclosure of modulus below 2 pi pins it to 0.
  std::vector<Term> factors;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (q[i] == 0) continue;
    if (!q[i].fits_slong_p()) return Confirmation::None;
    factors.push_back(pow(exp(terms[i]), q[i].get_si()));
  }
  if (!is_rational(product(factors), 1)) return Confirmation::None;
  try {
    Ball v = eval(combo, 128);
    if (mpfr_cmp_ui(v.abs_upper().get(), 6) < 0) return Confirmation::MonomialImage;
  } catch (const NumericError&) {
  }
  return Confirmation::None;
}

std::optional<RelationVector> falsify_linear_independence(const std::vector<Term>& terms, mpfr_prec_t precision,
                                                          const mpz_class& max_height, Confirmation* how) {
  std::vector<Ball> values;
  for (Term t : terms) values.push_back(eval(t, precision).with_precision(precision));
  auto q = find_integer_relation(values, max_height);
  if (!q) return std::nullopt;
  Confirmation c = confirm_linear_relation(terms, *q);
  if (how) *how = c;
  if (c == Confirmation::None) return std::nullopt;
  return RelationVector{terms, *q, RelationKind::Linear};
}

}  // namespace schanuel
