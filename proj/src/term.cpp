#include "schanuel/term.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace schanuel {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Rational:
      return "Rational";
    case Kind::Algebraic:
      return "Algebraic";
    case Kind::Sum:
      return "Sum";
    case Kind::Product:
      return "Product";
    case Kind::IntPow:
      return "IntPow";
    case Kind::Exp:
      return "Exp";
    case Kind::Log:
      return "Log";
  }
  return "?";
}

struct NodeFactory {
  static Term make(Kind kind, const mpq_class& value, AlgebraicId alg, std::vector<Term> children, long integer) {
    std::string key;
    key.reserve(16 + 8 * children.size());
    key += static_cast<char>('a' + static_cast<int>(kind));
    switch (kind) {
      case Kind::Rational:
        key += value.get_str();
        break;
      case Kind::Algebraic:
        key += std::to_string(alg.index);
        break;
      default:
        key += std::to_string(integer);
        for (Term c : children) {
          key += ':';
          key += std::to_string(c->id());
        }
    }
    static std::mutex mutex;
    static std::unordered_map<std::string, const Node*> table;
    std::lock_guard lock(mutex);
    auto it = table.find(key);
    if (it != table.end()) return it->second;

    auto* n = new Node();
    n->kind_ = kind;
    n->value_ = value;
    n->alg_ = alg;
    n->children_ = std::move(children);
    n->integer_ = integer;
    n->id_ = table.size() + 1;
    for (Term c : n->children_) {
      n->has_exp_ = n->has_exp_ || c->has_exp_;
      n->has_log_ = n->has_log_ || c->has_log_;
      n->exp_depth_ = std::max(n->exp_depth_, c->exp_depth_);
      n->log_depth_ = std::max(n->log_depth_, c->log_depth_);
    }
    if (kind == Kind::Exp) {
      n->has_exp_ = true;
      ++n->exp_depth_;
    } else if (kind == Kind::Log) {
      n->has_log_ = true;
      ++n->log_depth_;
    }
    table.emplace(std::move(key), n);
    ++created;
    return n;
  }
  static inline std::atomic<std::size_t> created{0};
};

namespace {

Term make(Kind kind, std::vector<Term> children, long integer = 0) {
  return NodeFactory::make(kind, mpq_class(0), AlgebraicId{}, std::move(children), integer);
}

}  // namespace

namespace raw {

Term rational(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return NodeFactory::make(Kind::Rational, c, AlgebraicId{}, {}, 0);
}

Term algebraic(const AlgebraicConst& a) { return NodeFactory::make(Kind::Algebraic, mpq_class(0), a.id(), {}, 0); }

Term sum(std::vector<Term> children) {
  if (children.empty()) throw TermError("empty sum");
  return make(Kind::Sum, std::move(children));
}

Term product(std::vector<Term> children) {
  if (children.empty()) throw TermError("empty product");
  return make(Kind::Product, std::move(children));
}

Term pow(Term base, long exponent) {
  if (exponent == 0) throw TermError("IntPow exponent must be nonzero");
  return make(Kind::IntPow, {base}, exponent);
}

Term exp(Term arg) { return make(Kind::Exp, {arg}); }

Term log(Term arg, long branch) { return make(Kind::Log, {arg}, branch); }

}  // namespace raw

namespace {

// A constant coefficient: exact rational unless an algebraic value is needed.
struct Coef {
  mpq_class q = 0;
  std::optional<AlgebraicConst> alg;

  static Coef of(Term t) {
    Coef c;
    if (t->kind() == Kind::Rational)
      c.q = t->rational();
    else
      c.alg = constant(t->algebraic());
    return c;
  }
  AlgebraicConst value() const { return alg ? *alg : make_rational_constant(q); }
  void settle() {
    if (alg && alg->is_rational()) {
      q = alg->as_rational();
      alg.reset();
    }
  }
  bool is_zero() const { return !alg && q == 0; }
  bool is_one() const { return !alg && q == 1; }
  Coef operator+(const Coef& o) const {
    Coef r;
    if (!alg && !o.alg)
      r.q = q + o.q;
    else
      r.alg = add(value(), o.value());
    r.settle();
    return r;
  }
  Coef operator*(const Coef& o) const {
    Coef r;
    if (!alg && !o.alg)
      r.q = q * o.q;
    else
      r.alg = multiply(value(), o.value());
    r.settle();
    return r;
  }
  Term term() const { return alg ? raw::algebraic(*alg) : raw::rational(q); }
};

// Splits coeff * core for like-term collection in sums.
std::pair<Coef, Term> split_coefficient(Term t) {
  if (t->kind() == Kind::Product && t->children().front()->is_constant()) {
    const auto& ch = t->children();
    Term core = ch.size() == 2 ? ch[1] : raw::product(std::vector<Term>(ch.begin() + 1, ch.end()));
    return {Coef::of(ch.front()), core};
  }
  Coef one;
  one.q = 1;
  return {one, t};
}

std::pair<Term, long> split_power(Term t) {
  if (t->kind() == Kind::IntPow) return {t->arg(), t->exponent()};
  return {t, 1};
}

}  // namespace

Term rational(const mpq_class& q) { return raw::rational(q); }

Term algebraic(const AlgebraicConst& a) {
  if (a.is_rational()) return raw::rational(a.as_rational());
  return raw::algebraic(a);
}

std::optional<AlgebraicConst> constant_value(Term t) {
  if (t->kind() == Kind::Rational) return make_rational_constant(t->rational());
  if (t->kind() == Kind::Algebraic) return constant(t->algebraic());
  return std::nullopt;
}

bool is_rational(Term t, const mpq_class& q) { return t->kind() == Kind::Rational && t->rational() == q; }

Term sum(std::vector<Term> children) {
  std::vector<Term> flat;
  for (Term c : children) {
    if (c->kind() == Kind::Sum)
      flat.insert(flat.end(), c->children().begin(), c->children().end());
    else
      flat.push_back(c);
  }
  Coef constant_part;
  std::map<Term, Coef, TermLess> like;
  for (Term c : flat) {
    if (c->is_constant()) {
      constant_part = constant_part + Coef::of(c);
      continue;
    }
    auto [coef, core] = split_coefficient(c);
    auto it = like.find(core);
    if (it == like.end())
      like.emplace(core, coef);
    else
      it->second = it->second + coef;
  }
  std::vector<Term> out;
  if (!constant_part.is_zero()) out.push_back(constant_part.term());
  for (auto& [core, coef] : like) {
    if (coef.is_zero()) continue;
    out.push_back(coef.is_one() ? core : product({coef.term(), core}));
  }
  if (out.empty()) return raw::rational(0);
  if (out.size() == 1) return out.front();
  sort_terms(out);
  return raw::sum(std::move(out));
}

Term product(std::vector<Term> children) {
  std::vector<Term> flat;
  for (Term c : children) {
    if (c->kind() == Kind::Product)
      flat.insert(flat.end(), c->children().begin(), c->children().end());
    else
      flat.push_back(c);
  }
  Coef coef;
  coef.q = 1;
  std::map<Term, long, TermLess> powers;
  for (Term c : flat) {
    if (c->is_constant()) {
      coef = coef * Coef::of(c);
      continue;
    }
    auto [base, k] = split_power(c);
    powers[base] += k;
  }
  if (coef.is_zero()) return raw::rational(0);
  std::vector<Term> factors;
  for (auto& [base, k] : powers)
    if (k != 0) factors.push_back(k == 1 ? base : raw::pow(base, k));
  if (factors.empty()) return coef.term();
  if (coef.is_one() && factors.size() == 1) return factors.front();
  if (factors.size() == 1 && factors.front()->kind() == Kind::Sum) {
    std::vector<Term> terms;
    for (Term s : factors.front()->children()) terms.push_back(product({coef.term(), s}));
    return sum(std::move(terms));
  }
  sort_terms(factors);
  if (!coef.is_one()) factors.insert(factors.begin(), coef.term());
  return raw::product(std::move(factors));
}

Term pow(Term base, long exponent) {
  if (exponent == 0) return raw::rational(1);
  if (exponent == 1) return base;
  if (base->is_constant()) {
    auto value = *constant_value(base);
    if (value.is_rational() && value.as_rational() == 0) {
      if (exponent < 0) throw TermError("zero raised to a negative power");
      return base;
    }
    return algebraic(power(value, exponent));
  }
  if (base->kind() == Kind::IntPow) return pow(base->arg(), base->exponent() * exponent);
  if (base->kind() == Kind::Product) {
    std::vector<Term> factors;
    for (Term f : base->children()) factors.push_back(pow(f, exponent));
    return product(std::move(factors));
  }
  return raw::pow(base, exponent);
}

Term exp(Term arg) {
  if (arg->kind() == Kind::Log) return arg->arg();
  return raw::exp(arg);
}

Term log(Term arg, long branch) {
  if (is_rational(arg, 0)) throw TermError("logarithm of zero");
  return raw::log(arg, branch);
}

Term negate(Term t) { return product({raw::rational(-1), t}); }

Term subtract(Term a, Term b) { return sum({a, negate(b)}); }

Term normalize(Term t) {
  std::unordered_map<Term, Term> memo;
  auto go = [&](auto&& self, Term u) -> Term {
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    Term out = nullptr;
    auto kids = [&] {
      std::vector<Term> v;
      for (Term c : u->children()) v.push_back(self(self, c));
      return v;
    };
    switch (u->kind()) {
      case Kind::Rational:
        out = u;
        break;
      case Kind::Algebraic:
        out = algebraic(constant(u->algebraic()));
        break;
      case Kind::Sum:
        out = sum(kids());
        break;
      case Kind::Product:
        out = product(kids());
        break;
      case Kind::IntPow:
        out = pow(self(self, u->arg()), u->exponent());
        break;
      case Kind::Exp:
        out = exp(self(self, u->arg()));
        break;
      case Kind::Log:
        out = log(self(self, u->arg()), u->branch());
        break;
    }
    memo.emplace(u, out);
    return out;
  };
  return go(go, t);
}

bool is_normal(Term t) { return normalize(t) == t; }

std::optional<unsigned> e_level(Term t) {
  if (t->has_log()) return std::nullopt;
  return t->exp_depth();
}

std::optional<unsigned> l_level(Term t) {
  if (t->has_exp()) return std::nullopt;
  return t->log_depth();
}

int term_order(Term a, Term b) {
  if (a == b) return 0;
  if (a->kind() != b->kind()) return static_cast<int>(a->kind()) < static_cast<int>(b->kind()) ? -1 : 1;
  switch (a->kind()) {
    case Kind::Rational: {
      const int c = cmp(a->rational(), b->rational());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Algebraic:
      return compare(a->algebraic(), b->algebraic());
    default:
      break;
  }
  const auto& x = a->children();
  const auto& y = b->children();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = term_order(x[i], y[i]); c != 0) return c;
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  if (a->exponent() != b->exponent())
    return a->exponent() < b->exponent() ? -1 : 1;
  return 0;
}

void sort_terms(std::vector<Term>& terms) { std::sort(terms.begin(), terms.end(), TermLess{}); }

std::vector<Term> term_set(std::vector<Term> terms) {
  sort_terms(terms);
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

std::vector<Term> subterms(Term t) {
  std::vector<Term> out;
  std::unordered_set<Term> seen;
  std::vector<std::pair<Term, std::size_t>> stack{{t, 0}};
  seen.insert(t);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->children().size()) {
      Term c = node->children()[next++];
      if (seen.insert(c).second) stack.emplace_back(c, 0);
      continue;
    }
    out.push_back(node);
    stack.pop_back();
  }
  return out;
}

Term one() { return raw::rational(1); }

Term i_pi() { return raw::log(raw::rational(-1), 0); }

Term pi() {
  static const Term value = product({algebraic(negate(*lookup_name("i"))), i_pi()});
  return value;
}

Term iterated_exp(unsigned n) {
  Term t = one();
  for (unsigned k = 0; k < n; ++k) t = exp(t);
  return t;
}

Term iterated_log_pi(unsigned k) {
  Term t = pi();
  for (unsigned j = 0; j < k; ++j) t = log(t, 0);
  return t;
}

std::size_t interned_count() { return NodeFactory::created.load(); }

// ---------------------------------------------------------------- printing

namespace {

std::string print_algebraic(AlgebraicId id) {
  AlgebraicConst a = constant(id);
  if (auto name = a.name()) return "alg(" + *name + ")";
  return "alg[" + a.min_poly().key() + "|" + canonical_box(id).to_string() + "]";
}

void print_into(Term t, std::string& out) {
  if (t == pi()) {
    out += "pi";
    return;
  }
  switch (t->kind()) {
    case Kind::Rational:
      out += t->rational().get_str();
      return;
    case Kind::Algebraic:
      out += print_algebraic(t->algebraic());
      return;
    case Kind::Sum:
    case Kind::Product: {
      const char* sep = t->kind() == Kind::Sum ? " + " : " * ";
      out += '(';
      bool first = true;
      for (Term c : t->children()) {
        if (!first) out += sep;
        first = false;
        print_into(c, out);
      }
      out += ')';
      return;
    }
    case Kind::IntPow:
      out += '(';
      if (t->arg()->kind() == Kind::Rational && t->arg()->rational() < 0) {
        out += '(';
        print_into(t->arg(), out);
        out += ')';
      } else {
        print_into(t->arg(), out);
      }
      out += '^';
      out += std::to_string(t->exponent());
      out += ')';
      return;
    case Kind::Exp:
      out += "exp(";
      print_into(t->arg(), out);
      out += ')';
      return;
    case Kind::Log:
      out += "log(";
      print_into(t->arg(), out);
      out += ';';
      out += std::to_string(t->branch());
      out += ')';
      return;
  }
}

// ---------------------------------------------------------------- parsing

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Term run() {
    Term t = parse_sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool peek_word(const char* w) {
    skip();
    std::size_t n = std::char_traits<char>::length(w);
    return s_.compare(pos_, n, w) == 0;
  }

  Term parse_sum() {
    Term t = parse_product();
    for (;;) {
      if (accept('+'))
        t = sum({t, parse_product()});
      else if (accept('-'))
        t = subtract(t, parse_product());
      else
        return t;
    }
  }

  Term parse_product() {
    Term t = parse_unary();
    while (accept('*')) t = product({t, parse_unary()});
    return t;
  }

  Term parse_unary() {
    if (accept('-')) return negate(parse_unary());
    return parse_power();
  }

  Term parse_power() {
    Term t = parse_atom();
    while (accept('^')) {
      skip();
      const std::size_t at = pos_;
      mpz_class k = parse_integer(true);
      if (k == 0) {
        pos_ = at;
        fail("exponent must be nonzero");
      }
      if (!k.fits_slong_p()) fail("exponent too large");
      t = pow(t, k.get_si());
    }
    return t;
  }

  mpz_class parse_integer(bool allow_sign) {
    skip();
    std::string digits;
    if (allow_sign && pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      if (s_[pos_] == '-') digits += '-';
      ++pos_;
      skip();
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected integer");
    digits += s_.substr(start, pos_ - start);
    return mpz_class(digits);
  }

  std::string parse_name() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected name");
    return s_.substr(start, pos_ - start);
  }

  Term named(const std::string& name, std::size_t at) {
    if (name == "pi") return pi();
    if (name == "e") return exp(one());
    if (auto a = lookup_name(name)) return algebraic(*a);
    pos_ = at;
    fail("unknown constant '" + name + "'");
  }

  Term parse_alg_literal() {
    const std::size_t at = pos_;
    const std::size_t close = s_.find(']', pos_);
    if (close == std::string::npos) fail("unterminated alg[...]");
    std::string body = s_.substr(pos_, close - pos_);
    pos_ = close + 1;
    const std::size_t bar = body.find('|');
    if (bar == std::string::npos) {
      pos_ = at;
      fail("alg[...] needs coefficients|box");
    }
    try {
      std::vector<mpz_class> coeffs;
      std::string coeff_text = body.substr(0, bar);
      std::size_t start = 0;
      while (start <= coeff_text.size()) {
        std::size_t comma = coeff_text.find(',', start);
        if (comma == std::string::npos) comma = coeff_text.size();
        mpq_class q = parse_rational(coeff_text.substr(start, comma - start));
        if (q.get_den() != 1) throw std::invalid_argument("integer coefficients required");
        coeffs.push_back(q.get_num());
        start = comma + 1;
      }
      return algebraic(make_algebraic(IntPoly(coeffs), RationalBox::parse(body.substr(bar + 1))));
    } catch (const AlgebraicError& e) {
      pos_ = at;
      fail(e.what());
    } catch (const std::invalid_argument& e) {
      pos_ = at;
      fail(e.what());
    }
  }

  Term parse_atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class num = parse_integer(false);
      const std::size_t save = pos_;
      if (accept('/')) {
        skip();
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          mpz_class den = parse_integer(false);
          if (den == 0) fail("zero denominator");
          return rational(mpq_class(num, den));
        }
        pos_ = save;
        fail("'/' only forms rational literals");
      }
      return rational(mpq_class(num));
    }
    if (accept('(')) {
      Term t = parse_sum();
      expect(')');
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t at = pos_;
      std::string name = parse_name();
      if (name == "exp" && accept('(')) {
        Term t = parse_sum();
        expect(')');
        return exp(t);
      }
      if (name == "log" && accept('(')) {
        Term t = parse_sum();
        long branch = 0;
        if (accept(';')) {
          mpz_class k = parse_integer(true);
          if (!k.fits_slong_p()) fail("branch too large");
          branch = k.get_si();
        }
        expect(')');
        if (is_rational(t, 0)) {
          pos_ = at;
          fail("logarithm of zero");
        }
        return log(t, branch);
      }
      if (name == "alg") {
        if (accept('(')) {
          const std::size_t name_at = pos_;
          std::string ref = parse_name();
          expect(')');
          auto a = lookup_name(ref);
          if (!a) {
            pos_ = name_at;
            fail("unknown algebraic constant '" + ref + "'");
          }
          return algebraic(*a);
        }
        if (accept('[')) return parse_alg_literal();
      }
      return named(name, at);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string print(Term t) {
  std::string out;
  print_into(t, out);
  return out;
}

Term parse(const std::string& text) { return Parser(text).run(); }

}  // namespace schanuel
