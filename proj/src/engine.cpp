#include "schanuel/engine.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

namespace schanuel {

using nlohmann::json;

// ---------------------------------------------------------------- names

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "Exact";
    case Provenance::ConditionalOnSC: return "ConditionalOnSC";
    case Provenance::HeuristicNumeric: return "HeuristicNumeric";
  }
  return "?";
}

std::optional<Provenance> parse_provenance(const std::string& name) {
  for (Provenance p : {Provenance::Exact, Provenance::ConditionalOnSC, Provenance::HeuristicNumeric})
    if (name == provenance_name(p)) return p;
  return std::nullopt;
}

const char* field_name(Field f) {
  switch (f) {
    case Field::Q: return "Q";
    case Field::Qbar: return "Qbar";
    case Field::E: return "E";
    case Field::L: return "L";
  }
  return "?";
}

namespace {

constexpr Stmt kAllKinds[] = {
    Stmt::QLinearlyIndependent, Stmt::QbarLinearlyIndependent, Stmt::AlgebraicallyIndependent,
    Stmt::AlgebraicOver,        Stmt::TrdegAtLeast,            Stmt::TrdegAtMost,
    Stmt::TrdegEquals,          Stmt::TrdegEqualSets,          Stmt::MemberE,
    Stmt::MemberL,              Stmt::MemberQbar,              Stmt::NotMemberE,
    Stmt::NotMemberL,           Stmt::NotMemberQbar,           Stmt::LinearlyDisjoint,
    Stmt::IntersectionIsQbar,   Stmt::ClosuresFree,            Stmt::ClosuresLinearlyDisjoint,
    Stmt::LinearImpliesMonomial, Stmt::MonomialTrivial,        Stmt::ExpSupport,
    Stmt::LogSupport,           Stmt::TranscendenceBasis,      Stmt::WitnessRelation,
    Stmt::Contradiction,
};

// Which fields a kind carries.
struct Schema {
  bool set = false, over = false, x = false, n = false, m = false, level = false, base = false;
  bool zero = false, even = false, text = false;
};

Schema schema(Stmt k) {
  Schema s;
  switch (k) {
    case Stmt::QLinearlyIndependent:
    case Stmt::QbarLinearlyIndependent:
      s.set = true;
      break;
    case Stmt::AlgebraicallyIndependent:
      s.set = s.base = s.level = true;
      break;
    case Stmt::AlgebraicOver:
    case Stmt::TrdegEqualSets:
    case Stmt::ClosuresFree:
    case Stmt::ClosuresLinearlyDisjoint:
    case Stmt::TranscendenceBasis:
      s.set = s.over = true;
      break;
    case Stmt::TrdegAtLeast:
    case Stmt::TrdegAtMost:
    case Stmt::TrdegEquals:
      s.set = s.n = true;
      break;
    case Stmt::MemberE:
    case Stmt::MemberL:
      s.x = s.level = true;
      break;
    case Stmt::MemberQbar:
    case Stmt::NotMemberE:
    case Stmt::NotMemberL:
    case Stmt::NotMemberQbar:
      s.x = true;
      break;
    case Stmt::LinearlyDisjoint:
    case Stmt::IntersectionIsQbar:
      s.m = s.n = true;
      break;
    case Stmt::LinearImpliesMonomial:
      s.set = s.over = s.text = true;
      break;
    case Stmt::MonomialTrivial:
      s.set = s.zero = s.even = true;
      break;
    case Stmt::ExpSupport:
    case Stmt::LogSupport:
      s.x = s.set = s.level = true;
      break;
    case Stmt::WitnessRelation:
      s.set = s.over = s.m = s.n = true;
      break;
    case Stmt::Contradiction:
      break;
  }
  return s;
}

json level_json(long v) { return v == kAnyLevel ? json(nullptr) : json(v); }

long level_from(const json& j) {
  if (j.is_null()) return kAnyLevel;
  if (!j.is_number_integer()) throw std::invalid_argument("level must be an integer or null");
  const long v = j.get<long>();
  if (v < 0) throw std::invalid_argument("negative level");
  return v;
}

json terms_json(const std::vector<Term>& ts) {
  json a = json::array();
  for (Term t : ts) a.push_back(print(t));
  return a;
}

std::vector<Term> terms_from(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of terms");
  std::vector<Term> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw std::invalid_argument("expected a term string");
    out.push_back(parse(e.get<std::string>()));
  }
  return out;
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string out = "{";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += print(ts[i]);
  }
  return out + "}";
}

std::string level_text(const char* tower, long v) {
  return v == kAnyLevel ? std::string(tower) : std::string(tower) + "_" + std::to_string(v);
}

}  // namespace

const char* stmt_name(Stmt k) {
  switch (k) {
    case Stmt::QLinearlyIndependent: return "QLinearlyIndependent";
    case Stmt::QbarLinearlyIndependent: return "QbarLinearlyIndependent";
    case Stmt::AlgebraicallyIndependent: return "AlgebraicallyIndependent";
    case Stmt::AlgebraicOver: return "AlgebraicOver";
    case Stmt::TrdegAtLeast: return "TrdegAtLeast";
    case Stmt::TrdegAtMost: return "TrdegAtMost";
    case Stmt::TrdegEquals: return "TrdegEquals";
    case Stmt::TrdegEqualSets: return "TrdegEqualSets";
    case Stmt::MemberE: return "MemberE";
    case Stmt::MemberL: return "MemberL";
    case Stmt::MemberQbar: return "MemberQbar";
    case Stmt::NotMemberE: return "NotMemberE";
    case Stmt::NotMemberL: return "NotMemberL";
    case Stmt::NotMemberQbar: return "NotMemberQbar";
    case Stmt::LinearlyDisjoint: return "LinearlyDisjoint";
    case Stmt::IntersectionIsQbar: return "IntersectionIsQbar";
    case Stmt::ClosuresFree: return "ClosuresFree";
    case Stmt::ClosuresLinearlyDisjoint: return "ClosuresLinearlyDisjoint";
    case Stmt::LinearImpliesMonomial: return "LinearImpliesMonomial";
    case Stmt::MonomialTrivial: return "MonomialTrivial";
    case Stmt::ExpSupport: return "ExpSupport";
    case Stmt::LogSupport: return "LogSupport";
    case Stmt::TranscendenceBasis: return "TranscendenceBasis";
    case Stmt::WitnessRelation: return "WitnessRelation";
    case Stmt::Contradiction: return "Contradiction";
  }
  return "?";
}

bool is_ordered(Stmt k) {
  return k == Stmt::LinearImpliesMonomial || k == Stmt::MonomialTrivial || k == Stmt::WitnessRelation;
}

Statement canonical(Statement s) {
  if (!is_ordered(s.kind)) {
    s.set = term_set(std::move(s.set));
    s.over = term_set(std::move(s.over));
  }
  return s;
}

json to_json(const Statement& s) {
  const Schema sc = schema(s.kind);
  json j;
  j["kind"] = stmt_name(s.kind);
  if (sc.set) j["set"] = terms_json(s.set);
  if (sc.over) j["over"] = terms_json(s.over);
  if (sc.x) j["x"] = s.x ? json(print(s.x)) : json(nullptr);
  if (sc.n) j["n"] = level_json(s.n);
  if (sc.m) j["m"] = level_json(s.m);
  if (sc.base) j["base"] = field_name(s.base);
  if (sc.level && (!sc.base || s.base == Field::E || s.base == Field::L)) j["level"] = level_json(s.level);
  if (sc.zero) j["zero"] = s.zero;
  if (sc.even) j["even"] = s.even;
  if (sc.text) j["display"] = s.text;
  return j;
}

std::string Statement::key() const { return to_json(*this).dump(); }

Statement statement_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("statement needs a kind");
  const std::string name = j["kind"].get<std::string>();
  Statement s;
  bool found = false;
  for (Stmt k : kAllKinds)
    if (name == stmt_name(k)) {
      s.kind = k;
      found = true;
    }
  if (!found) throw std::invalid_argument("unknown statement kind " + name);
  const Schema sc = schema(s.kind);
  auto need = [&](const char* f) -> const json& {
    if (!j.contains(f)) throw std::invalid_argument(name + " needs field " + f);
    return j[f];
  };
  if (sc.set) s.set = terms_from(need("set"));
  if (sc.over) s.over = terms_from(need("over"));
  if (sc.x) {
    const json& x = need("x");
    if (!x.is_string()) throw std::invalid_argument("x must be a term string");
    s.x = parse(x.get<std::string>());
  }
  if (sc.n) s.n = level_from(need("n"));
  if (sc.m) s.m = level_from(need("m"));
  if (sc.base) {
    const std::string b = need("base").get<std::string>();
    bool ok = false;
    for (Field f : {Field::Q, Field::Qbar, Field::E, Field::L})
      if (b == field_name(f)) {
        s.base = f;
        ok = true;
      }
    if (!ok) throw std::invalid_argument("unknown base field " + b);
  }
  if (sc.level && (!sc.base || s.base == Field::E || s.base == Field::L)) s.level = level_from(need("level"));
  if (sc.zero) s.zero = need("zero").get<std::vector<long>>();
  if (sc.even) s.even = need("even").get<std::vector<long>>();
  if (sc.text) s.text = need("display").get<std::string>();
  if ((s.kind == Stmt::TrdegAtLeast || s.kind == Stmt::TrdegAtMost || s.kind == Stmt::TrdegEquals) &&
      s.n == kAnyLevel)
    throw std::invalid_argument("trdeg bound must be a natural number");
  return canonical(std::move(s));
}

std::string describe(const Statement& s) {
  const std::string k = stmt_name(s.kind);
  switch (s.kind) {
    case Stmt::QLinearlyIndependent:
    case Stmt::QbarLinearlyIndependent:
      return k + join_terms(s.set);
    case Stmt::AlgebraicallyIndependent: {
      std::string base = field_name(s.base);
      if (s.base == Field::E || s.base == Field::L) base = level_text(field_name(s.base), s.level);
      return k + join_terms(s.set) + " over " + base;
    }
    case Stmt::AlgebraicOver:
      return k + "(" + join_terms(s.set) + ", Q" + join_terms(s.over) + ")";
    case Stmt::TrdegAtLeast:
    case Stmt::TrdegAtMost:
    case Stmt::TrdegEquals:
      return k + "(Q" + join_terms(s.set) + ", " + std::to_string(s.n) + ")";
    case Stmt::TrdegEqualSets:
    case Stmt::ClosuresFree:
    case Stmt::ClosuresLinearlyDisjoint:
    case Stmt::TranscendenceBasis:
      return k + "(" + join_terms(s.set) + ", " + join_terms(s.over) + ")";
    case Stmt::MemberE:
      return k + "(" + print(s.x) + ", " + level_text("E", s.level) + ")";
    case Stmt::MemberL:
      return k + "(" + print(s.x) + ", " + level_text("L", s.level) + ")";
    case Stmt::MemberQbar:
    case Stmt::NotMemberE:
    case Stmt::NotMemberL:
    case Stmt::NotMemberQbar:
      return k + "(" + print(s.x) + ")";
    case Stmt::LinearlyDisjoint:
    case Stmt::IntersectionIsQbar:
      return k + "(" + level_text("E", s.m) + ", " + level_text("L", s.n) + ")";
    case Stmt::LinearImpliesMonomial:
      return k + "(" + s.text + ")";
    case Stmt::MonomialTrivial: {
      std::string out = k + join_terms(s.set) + " zero q:";
      for (long i : s.zero) out += " " + std::to_string(i);
      if (!s.even.empty()) {
        out += ", even q:";
        for (long i : s.even) out += " " + std::to_string(i);
      }
      return out;
    }
    case Stmt::ExpSupport:
    case Stmt::LogSupport:
      return k + "(" + print(s.x) + ") = " + join_terms(s.set);
    case Stmt::WitnessRelation:
      return k + "(l = " + join_terms(s.set) + ", e = " + join_terms(s.over) + ")";
    case Stmt::Contradiction:
      return k;
  }
  return k;
}

namespace stmt {

Statement qli(std::vector<Term> s) {
  Statement st;
  st.kind = Stmt::QLinearlyIndependent;
  st.set = std::move(s);
  return canonical(std::move(st));
}

Statement qbar_li(std::vector<Term> s) {
  Statement st = qli(std::move(s));
  st.kind = Stmt::QbarLinearlyIndependent;
  return st;
}

Statement ai(std::vector<Term> s, Field base, long level) {
  Statement st;
  st.kind = Stmt::AlgebraicallyIndependent;
  st.set = std::move(s);
  st.base = base;
  st.level = (base == Field::E || base == Field::L) ? level : kAnyLevel;
  return canonical(std::move(st));
}

Statement algebraic_over(std::vector<Term> x, std::vector<Term> over) {
  Statement st;
  st.kind = Stmt::AlgebraicOver;
  st.set = std::move(x);
  st.over = std::move(over);
  return canonical(std::move(st));
}

namespace {
Statement bound(Stmt k, std::vector<Term> s, long n) {
  Statement st;
  st.kind = k;
  st.set = std::move(s);
  st.n = n;
  return canonical(std::move(st));
}
}  // namespace

Statement trdeg_at_least(std::vector<Term> s, long n) { return bound(Stmt::TrdegAtLeast, std::move(s), n); }
Statement trdeg_at_most(std::vector<Term> s, long n) { return bound(Stmt::TrdegAtMost, std::move(s), n); }
Statement trdeg_equals(std::vector<Term> s, long n) { return bound(Stmt::TrdegEquals, std::move(s), n); }

Statement trdeg_equal_sets(std::vector<Term> a, std::vector<Term> b) {
  Statement st = algebraic_over(std::move(a), std::move(b));
  st.kind = Stmt::TrdegEqualSets;
  return st;
}

Statement member(Stmt kind, Term x, long level) {
  Statement st;
  st.kind = kind;
  st.x = x;
  if (kind == Stmt::MemberE || kind == Stmt::MemberL) st.level = level;
  return st;
}

Statement linearly_disjoint(long m, long n) {
  Statement st;
  st.kind = Stmt::LinearlyDisjoint;
  st.m = m;
  st.n = n;
  return st;
}

Statement intersection_is_qbar(long m, long n) {
  Statement st = linearly_disjoint(m, n);
  st.kind = Stmt::IntersectionIsQbar;
  return st;
}

Statement closures(Stmt kind, std::vector<Term> a, std::vector<Term> b) {
  Statement st = algebraic_over(std::move(a), std::move(b));
  st.kind = kind;
  return st;
}

Statement support(SupportKind kind, Term x, std::vector<Term> elements, long level) {
  Statement st;
  st.kind = kind == SupportKind::Exp ? Stmt::ExpSupport : Stmt::LogSupport;
  st.x = x;
  st.set = std::move(elements);
  st.level = level;
  return canonical(std::move(st));
}

Statement transcendence_basis(std::vector<Term> basis, std::vector<Term> of) {
  Statement st = algebraic_over(std::move(basis), std::move(of));
  st.kind = Stmt::TranscendenceBasis;
  return st;
}

Statement witness(std::vector<Term> l, std::vector<Term> e, long m, long n) {
  Statement st;
  st.kind = Stmt::WitnessRelation;
  st.set = std::move(l);
  st.over = std::move(e);
  st.m = m;
  st.n = n;
  return st;
}

Statement contradiction() { return Statement{}; }

}  // namespace stmt

// ---------------------------------------------------------------- closure

Closure::Closure(const std::vector<Term>& base) {
  for (Term t : base) add(t);
}

void Closure::add(Term t) {
  if (!members_.insert(t).second) return;
  memo_.clear();
  // Q(t) also contains t / c, t - c and, algebraically, the base of t = y^k.
  switch (t->kind()) {
    case Kind::Product:
    case Kind::Sum: {
      std::vector<Term> rest;
      for (Term c : t->children())
        if (!c->is_constant()) rest.push_back(c);
      if (rest.empty() || rest.size() == t->children().size()) break;
      add(t->kind() == Kind::Product ? product(rest) : sum(rest));
      break;
    }
    case Kind::IntPow:
      add(t->arg());
      break;
    default:
      break;
  }
}

bool Closure::contains(Term x) const {
  if (members_.count(x) || x->is_constant()) return true;
  if (auto it = memo_.find(x); it != memo_.end()) return it->second;
  bool ok = false;
  if (x->kind() == Kind::Sum || x->kind() == Kind::Product || x->kind() == Kind::IntPow) {
    ok = true;
    for (Term c : x->children())
      if (!contains(c)) {
        ok = false;
        break;
      }
  }
  memo_[x] = ok;
  return ok;
}

bool Closure::contains_all(const std::vector<Term>& xs) const {
  return std::all_of(xs.begin(), xs.end(), [&](Term t) { return contains(t); });
}

std::vector<bool> Closure::saturate(const std::vector<Dependency>& deps) {
  std::vector<bool> fired(deps.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < deps.size(); ++i) {
      if (fired[i] || !contains_all(deps[i].over)) continue;
      fired[i] = true;
      changed = true;
      for (Term t : deps[i].x) add(t);
    }
  }
  return fired;
}

// ---------------------------------------------------------------- rule helpers

namespace {

bool has(const std::vector<Term>& s, Term t) { return std::find(s.begin(), s.end(), t) != s.end(); }

bool subset(const std::vector<Term>& a, const std::vector<Term>& b) {
  return std::all_of(a.begin(), a.end(), [&](Term t) { return has(b, t); });
}

std::vector<Term> unite(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return term_set(std::move(a));
}

bool distinct(const std::vector<Term>& ts) { return term_set(ts).size() == ts.size(); }

bool within(long have, long bound) { return bound == kAnyLevel || (have != kAnyLevel && have <= bound); }

bool rational_nonzero(Term t) { return t->is_constant() && !is_rational(t, 0); }

// Check-building shorthands: each returns an empty string when satisfied.
struct Check {
  std::string error;
  Check& need(bool cond, const std::string& msg) {
    if (error.empty() && !cond) error = msg;
    return *this;
  }
  bool failed() const { return !error.empty(); }
};

std::string premise_count(const RuleContext& c, std::size_t n) {
  if (c.premises.size() != n)
    return "expected " + std::to_string(n) + " premises, got " + std::to_string(c.premises.size());
  return {};
}

std::string kind_is(const Statement& s, Stmt k, const char* role) {
  if (s.kind != k) return std::string(role) + " must be " + stmt_name(k) + ", got " + stmt_name(s.kind);
  return {};
}

bool qbase(const Statement& s) {
  return s.kind == Stmt::AlgebraicallyIndependent && (s.base == Field::Q || s.base == Field::Qbar);
}

bool is_lower(const Statement& s) { return s.kind == Stmt::TrdegAtLeast || s.kind == Stmt::TrdegEquals; }
bool is_upper(const Statement& s) { return s.kind == Stmt::TrdegAtMost || s.kind == Stmt::TrdegEquals; }

Dependency dependency_of(const Statement& s) {
  if (s.kind == Stmt::TranscendenceBasis) return {s.over, s.set};
  return {s.set, s.over};
}

long data_long(const json& d, const char* key) {
  if (!d.is_object() || !d.contains(key) || !d[key].is_number_integer())
    throw std::invalid_argument(std::string("data needs integer ") + key);
  return d[key].get<long>();
}

mpz_class data_mpz(const json& d, const char* key) {
  if (!d.is_object() || !d.contains(key) || !d[key].is_string())
    throw std::invalid_argument(std::string("data needs integer string ") + key);
  return mpz_class(d[key].get<std::string>());
}

std::vector<Term> monomials_upto_two(const std::vector<Term>& s) {
  std::vector<Term> out{one()};
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back(s[i]);
    for (std::size_t j = i; j < s.size(); ++j) out.push_back(product({s[i], s[j]}));
  }
  return out;
}

std::string no_relation(const std::vector<Term>& terms, long precision, const mpz_class& height) {
  if (precision <= 0 || precision > kPrecisionCap) return "precision out of range";
  try {
    std::vector<Ball> values;
    for (Term t : terms) values.push_back(eval(t, precision).with_precision(precision));
    if (auto q = find_integer_relation(values, height)) return "an integer relation exists at this precision";
  } catch (const std::exception& e) {
    return std::string("numeric check failed: ") + e.what();
  }
  return {};
}

std::string check_support(const RuleContext& c, SupportKind kind) {
  if (auto e = premise_count(c, 0); !e.empty()) return e;
  const Statement& s = c.conclusion;
  if (auto e = kind_is(s, kind == SupportKind::Exp ? Stmt::ExpSupport : Stmt::LogSupport, "conclusion"); !e.empty())
    return e;
  if (!c.data.is_object() || !c.data.contains("support")) return "data needs the support certificate";
  SupportSet sup;
  try {
    sup = support_from_json(c.data["support"]);
  } catch (const std::exception& e) {
    return std::string("malformed support: ") + e.what();
  }
  Check ch;
  ch.need(sup.kind == kind, "support kind mismatch")
      .need(sup.subject == s.x, "support subject differs from x")
      .need(sup.elements == s.set, "support elements differ from the statement")
      .need(static_cast<long>(sup.level_witness) == s.level, "level witness mismatch");
  if (ch.failed()) return ch.error;
  auto report = verify_closure(sup);
  if (!report.ok) {
    std::string msg = "closure check failed";
    for (const auto& d : report.diagnostics) msg += "; " + d;
    return msg;
  }
  return {};
}

// Exponent vector of a monomial in its non-constant bases; constant factors
// are ignored.
std::map<Term, mpz_class> exponents(Term t) {
  std::map<Term, mpz_class> out;
  auto one_factor = [&](Term f) {
    if (f->is_constant()) return;
    if (f->kind() == Kind::IntPow)
      out[f->arg()] += f->exponent();
    else
      out[f] += 1;
  };
  if (t->kind() == Kind::Product)
    for (Term c : t->children()) one_factor(c);
  else
    one_factor(t);
  return out;
}

// Rank over Q of the exponent vectors, columns indexed by `bases`.
std::size_t exponent_rank(const std::vector<std::map<Term, mpz_class>>& rows) {
  std::set<Term> bases;
  for (const auto& r : rows)
    for (const auto& [b, k] : r) bases.insert(b);
  std::vector<std::vector<mpq_class>> m;
  for (const auto& r : rows) {
    std::vector<mpq_class> v;
    for (Term b : bases) {
      auto it = r.find(b);
      v.push_back(it == r.end() ? mpq_class(0) : mpq_class(it->second));
    }
    m.push_back(std::move(v));
  }
  std::size_t rank = 0;
  const std::size_t cols = bases.size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / m[rank][c];
      for (std::size_t j = c; j < cols; ++j) m[r][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

std::map<std::string, Rule> build_registry() {
  std::map<std::string, Rule> r;
  auto add = [&](std::string name, Provenance floor, std::function<std::string(const RuleContext&)> f) {
    r[name] = Rule{name, floor, std::move(f)};
  };
  const auto X = Provenance::Exact;

  add("certify-nonzero", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::QLinearlyIndependent, "conclusion"); !e.empty()) return e;
    if (c.conclusion.set.size() != 1) return "nonzeroness certifies a single term";
    Term t = c.conclusion.set[0];
    if (!is_normal(t) || is_rational(t, 0)) return "term is zero or not normal";
    long p = 0;
    try {
      p = data_long(c.data, "precision");
    } catch (const std::exception& e) {
      return e.what();
    }
    if (p < 2 || p > kPrecisionCap) return "precision out of range";
    if (!recheck_nonzero(t, p)) return "enclosure at the recorded precision contains 0";
    return {};
  });

  add("numeric-no-relation", Provenance::HeuristicNumeric, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::QLinearlyIndependent, "conclusion"); !e.empty()) return e;
    if (c.conclusion.set.empty()) return "empty set";
    try {
      return no_relation(c.conclusion.set, data_long(c.data, "precision"), data_mpz(c.data, "height"));
    } catch (const std::exception& e) {
      return e.what();
    }
  });

  add("numeric-no-algebraic-relation", Provenance::HeuristicNumeric, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (!qbase(c.conclusion) || c.conclusion.base != Field::Q) return "conclusion must be AI over Q";
    if (c.conclusion.set.empty()) return "empty set";
    try {
      return no_relation(monomials_upto_two(c.conclusion.set), data_long(c.data, "precision"),
                         data_mpz(c.data, "height"));
    } catch (const std::exception& e) {
      return e.what();
    }
  });

  add("schanuel-conjecture", Provenance::ConditionalOnSC, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& li = *c.premises[0];
    if (auto e = kind_is(li, Stmt::QLinearlyIndependent, "premise"); !e.empty()) return e;
    if (li.set.empty()) return "the conjecture needs n >= 1";
    Statement want = stmt::trdeg_at_least(unite(li.set, exp_images(li.set)), static_cast<long>(li.set.size()));
    if (!(want == c.conclusion)) return "conclusion must be " + describe(want);
    return {};
  });

  add("algebraic-closure", X, [](const RuleContext& c) -> std::string {
    if (auto e = kind_is(c.conclusion, Stmt::AlgebraicOver, "conclusion"); !e.empty()) return e;
    std::vector<Dependency> deps;
    for (const Statement* p : c.premises) {
      if (p->kind != Stmt::AlgebraicOver && p->kind != Stmt::TranscendenceBasis)
        return "premises must be AlgebraicOver or TranscendenceBasis";
      deps.push_back(dependency_of(*p));
    }
    Closure cl(c.conclusion.over);
    auto fired = cl.saturate(deps);
    for (std::size_t i = 0; i < fired.size(); ++i)
      if (!fired[i]) return "premise " + std::to_string(i) + " is never used";
    for (Term t : c.conclusion.set)
      if (!cl.contains(t)) return print(t) + " is not shown algebraic over the base";
    return {};
  });

  add("monomial-dependence", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::AlgebraicOver, "conclusion"); !e.empty()) return e;
    std::vector<std::map<Term, mpz_class>> rows;
    for (Term t : c.conclusion.over) rows.push_back(exponents(t));
    const std::size_t base_rank = exponent_rank(rows);
    for (Term x : c.conclusion.set) {
      auto with = rows;
      with.push_back(exponents(x));
      if (exponent_rank(with) != base_rank) return print(x) + " is not a power product of the base up to a root";
    }
    return {};
  });

  add("monomial-independence", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& g = *c.premises[0];
    if (!qbase(g)) return "premise must be AI over Q or Qbar";
    const Statement& s = c.conclusion;
    if (s.kind != Stmt::AlgebraicallyIndependent || s.base != g.base || s.set.empty())
      return "conclusion: nonempty AI over the same base";
    std::vector<std::map<Term, mpz_class>> rows;
    for (Term t : s.set) {
      rows.push_back(exponents(t));
      for (const auto& [b, k] : rows.back())
        if (!has(g.set, b)) return print(b) + " is not among the independent generators";
    }
    if (exponent_rank(rows) != rows.size()) return "exponent vectors are dependent";
    return {};
  });

  add("exp-additive", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::AlgebraicOver, "conclusion"); !e.empty()) return e;
    try {
      Term a = parse(c.data.at("argument").get<std::string>());
      std::vector<Term> basis = terms_from(c.data.at("basis"));
      std::vector<mpz_class> q;
      for (const auto& v : c.data.at("coefficients")) q.emplace_back(v.get<std::string>());
      std::vector<Term> terms{a};
      terms.insert(terms.end(), basis.begin(), basis.end());
      Check ch;
      ch.need(q.size() == terms.size(), "coefficient count mismatch")
          .need(!q.empty() && q[0] != 0, "the argument's coefficient must be nonzero")
          .need(c.conclusion.set == std::vector<Term>{exp(a)}, "subject must be exp(argument)")
          .need(c.conclusion.over == term_set(exp_images(basis)), "base must be exp of the basis");
      if (ch.failed()) return ch.error;
      if (confirm_linear_relation(terms, q) == Confirmation::None) return "linear relation not confirmed";
    } catch (const std::exception& e) {
      return std::string("malformed data: ") + e.what();
    }
    return {};
  });

  add("key-lemma-exp", X, [](const RuleContext& c) { return check_support(c, SupportKind::Exp); });
  add("key-lemma-log", X, [](const RuleContext& c) { return check_support(c, SupportKind::Log); });

  add("support-algebraic-over", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& s = *c.premises[0];
    Statement want;
    if (s.kind == Stmt::ExpSupport)
      want = stmt::algebraic_over(unite(s.set, {s.x}), exp_images(s.set));
    else if (s.kind == Stmt::LogSupport)
      want = stmt::algebraic_over(unite(exp_images(s.set), {s.x}), s.set);
    else
      return "premise must be a support";
    if (!(want == c.conclusion)) return "conclusion must be " + describe(want);
    Closure cl(want.over);
    for (Term t : want.set)
      if (!cl.contains(t)) return print(t) + " is not a field expression in the base";
    return {};
  });

  add("trdeg-trivial", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::TrdegAtLeast, "conclusion"); !e.empty()) return e;
    if (c.conclusion.n != 0) return "only the bound 0 is trivial";
    return {};
  });

  add("trdeg-transfer", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 2); !e.empty()) return e;
    const Statement& b = *c.premises[0];
    const Statement& a = *c.premises[1];
    if (auto e = kind_is(a, Stmt::AlgebraicOver, "second premise"); !e.empty()) return e;
    const Statement& s = c.conclusion;
    Check ch;
    if (s.kind == Stmt::TrdegAtLeast) {
      ch.need(is_lower(b), "first premise must be a lower bound")
          .need(subset(b.set, a.set), "bounded set must be algebraic over the target")
          .need(a.over == s.set, "target must be the algebraic base")
          .need(s.n <= b.n, "bound cannot grow");
    } else if (s.kind == Stmt::TrdegAtMost) {
      ch.need(is_upper(b), "first premise must be an upper bound")
          .need(a.over == b.set, "algebraic base must be the bounded set")
          .need(subset(s.set, a.set), "target must be algebraic over the bounded set")
          .need(s.n >= b.n, "bound cannot shrink");
    } else {
      return "conclusion must be a trdeg bound";
    }
    return ch.error;
  });

  add("trdeg-equal-sets", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 2); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::TrdegEqualSets, "conclusion"); !e.empty()) return e;
    const Statement& p = *c.premises[0];
    const Statement& q = *c.premises[1];
    if (p.kind != Stmt::AlgebraicOver || q.kind != Stmt::AlgebraicOver) return "premises must be AlgebraicOver";
    const auto& a = c.conclusion.set;
    const auto& b = c.conclusion.over;
    Check ch;
    ch.need(subset(a, p.set) && p.over == b, "first premise must show the left set algebraic over the right")
        .need(subset(b, q.set) && q.over == a, "second premise must show the right set algebraic over the left");
    return ch.error;
  });

  add("trdeg-transfer-equal", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 2); !e.empty()) return e;
    const Statement& eq = *c.premises[0];
    const Statement& b = *c.premises[1];
    if (auto e = kind_is(eq, Stmt::TrdegEqualSets, "first premise"); !e.empty()) return e;
    const Statement& s = c.conclusion;
    Check ch;
    ch.need(b.kind == s.kind && (is_lower(b) || is_upper(b)), "bound kinds must agree")
        .need(b.n == s.n, "bound value must agree")
        .need((b.set == eq.set && s.set == eq.over) || (b.set == eq.over && s.set == eq.set),
              "sets must be the two sides of the equality");
    return ch.error;
  });

  add("trdeg-upper", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    if (auto e = kind_is(a, Stmt::AlgebraicOver, "premise"); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::TrdegAtMost, "conclusion"); !e.empty()) return e;
    Check ch;
    ch.need(subset(c.conclusion.set, a.set), "bounded set must be algebraic over the base")
        .need(c.conclusion.n >= static_cast<long>(a.over.size()), "bound below the size of the base");
    return ch.error;
  });

  add("trdeg-squeeze", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 2); !e.empty()) return e;
    const Statement& lo = *c.premises[0];
    const Statement& hi = *c.premises[1];
    Check ch;
    ch.need(lo.kind == Stmt::TrdegAtLeast && hi.kind == Stmt::TrdegAtMost, "premises: lower then upper bound")
        .need(lo.set == hi.set && lo.n == hi.n, "bounds must meet on the same set")
        .need(c.conclusion == stmt::trdeg_equals(lo.set, lo.n), "conclusion must be the equality");
    return ch.error;
  });

  add("ai-from-trdeg", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& b = *c.premises[0];
    Check ch;
    ch.need(is_lower(b), "premise must be a lower bound")
        .need(!b.set.empty() && b.n >= static_cast<long>(b.set.size()), "bound must reach the set size")
        .need(c.conclusion == stmt::ai(b.set, Field::Q), "conclusion must be AI over Q of the same set");
    return ch.error;
  });

  add("trdeg-from-ai", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    Check ch;
    ch.need(qbase(a), "premise must be AI over Q or Qbar")
        .need(c.conclusion.kind == Stmt::TrdegAtLeast && c.conclusion.set == a.set, "conclusion: trdeg of the set")
        .need(c.conclusion.n <= static_cast<long>(a.set.size()), "bound above the set size");
    return ch.error;
  });

  add("ai-base-change", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    Check ch;
    ch.need(qbase(a) && qbase(c.conclusion), "Q and Qbar only").need(a.set == c.conclusion.set, "same set");
    return ch.error;
  });

  add("ai-subset", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    Check ch;
    ch.need(a.kind == Stmt::AlgebraicallyIndependent && c.conclusion.kind == Stmt::AlgebraicallyIndependent,
            "AI premise and conclusion")
        .need(a.base == c.conclusion.base && a.level == c.conclusion.level, "same base field")
        .need(!c.conclusion.set.empty() && subset(c.conclusion.set, a.set), "nonempty subset");
    return ch.error;
  });

  add("li-from-ai", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    const Statement& s = c.conclusion;
    if (!qbase(a)) return "premise must be AI over Q or Qbar";
    if (s.kind != Stmt::QLinearlyIndependent && s.kind != Stmt::QbarLinearlyIndependent)
      return "conclusion must be linear independence";
    std::size_t extra = 0;
    for (Term t : s.set) {
      if (has(a.set, t)) continue;
      if (!rational_nonzero(t)) return print(t) + " is neither independent nor a nonzero constant";
      ++extra;
    }
    if (s.set.empty() || extra > 1) return "at most one constant may join the independent set";
    return {};
  });

  add("qbar-li-single", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    Check ch;
    ch.need(a.kind == Stmt::QLinearlyIndependent && a.set.size() == 1, "premise: one nonzero term")
        .need(c.conclusion == stmt::qbar_li(a.set), "conclusion: the same singleton over Qbar");
    return ch.error;
  });

  add("reduce-linear-to-monomial", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    const Statement& s = c.conclusion;
    if (auto e = kind_is(s, Stmt::LinearImpliesMonomial, "conclusion"); !e.empty()) return e;
    Check ch;
    ch.need(distinct(s.set), "terms must be distinct")
        .need(s.over == exp_images(s.set), "images must be exp of the terms")
        .need(s.text == monomial_display(s.set), "display must match the images");
    return ch.error;
  });

  add("monomial-triviality", X, [](const RuleContext& c) -> std::string {
    if (c.premises.empty() || c.premises.size() > 2) return "expected 1 or 2 premises";
    const Statement& lim = *c.premises[0];
    if (auto e = kind_is(lim, Stmt::LinearImpliesMonomial, "first premise"); !e.empty()) return e;
    const Statement& s = c.conclusion;
    if (auto e = kind_is(s, Stmt::MonomialTrivial, "conclusion"); !e.empty()) return e;
    if (s.set != lim.set || lim.over.size() != lim.set.size()) return "terms must match the monomial image";
    std::vector<long> zero, rest;
    std::vector<Term> covered;
    for (std::size_t i = 0; i < lim.over.size(); ++i) {
      if (lim.over[i]->is_constant()) {
        rest.push_back(static_cast<long>(i));
      } else {
        zero.push_back(static_cast<long>(i));
        covered.push_back(lim.over[i]);
      }
    }
    if (!distinct(covered)) return "images of forced coefficients must be distinct";
    if (!zero.empty()) {
      if (c.premises.size() != 2) return "coverage: no independence certificate for the images";
      const Statement& a = *c.premises[1];
      if (!qbase(a)) return "second premise must be AI over Q or Qbar";
      for (Term u : covered)
        if (!has(a.set, u)) return "coverage: " + print(u) + " lacks an independence certificate";
    } else if (c.premises.size() != 1) {
      return "no independence certificate is needed";
    }
    std::vector<long> even;
    if (rest.size() == 1 && is_rational(lim.over[static_cast<std::size_t>(rest[0])], -1)) even = rest;
    Check ch;
    ch.need(s.zero == zero, "forced coefficients must be exactly the non-constant images")
        .need(s.even == even, "parity record mismatch");
    return ch.error;
  });

  add("li-from-monomial", X, [](const RuleContext& c) -> std::string {
    if (c.premises.size() < 2 || c.premises.size() > 3) return "expected 2 or 3 premises";
    const Statement& lim = *c.premises[0];
    const Statement& mt = *c.premises[1];
    if (lim.kind != Stmt::LinearImpliesMonomial || mt.kind != Stmt::MonomialTrivial)
      return "premises: monomial image, then its triviality";
    if (lim.set != mt.set) return "premises concern different terms";
    std::vector<Term> rest;
    for (std::size_t i = 0; i < mt.set.size(); ++i)
      if (!std::count(mt.zero.begin(), mt.zero.end(), static_cast<long>(i))) rest.push_back(mt.set[i]);
    rest = term_set(rest);
    if (rest.empty() != (c.premises.size() == 2)) return "remaining terms need exactly one independence premise";
    if (!rest.empty()) {
      const Statement& r = *c.premises[2];
      if (!(r == stmt::qli(rest))) return "third premise must be QLinearlyIndependent" + join_terms(rest);
    }
    if (!(c.conclusion == stmt::qli(mt.set))) return "conclusion must be QLinearlyIndependent of the terms";
    return {};
  });

  add("li-split-disjoint", X, [](const RuleContext& c) -> std::string {
    if (c.premises.size() < 5) return "expected intersection, QLI(B), AI(D), memberships";
    const Statement& in = *c.premises[0];
    const Statement& lb = *c.premises[1];
    const Statement& ad = *c.premises[2];
    if (auto e = kind_is(in, Stmt::IntersectionIsQbar, "first premise"); !e.empty()) return e;
    if (auto e = kind_is(lb, Stmt::QLinearlyIndependent, "second premise"); !e.empty()) return e;
    if (!qbase(ad) || ad.base != Field::Qbar) return "third premise must be AI over Qbar";
    const auto& b = lb.set;
    const auto& d = ad.set;
    if (c.premises.size() != 3 + b.size() + d.size()) return "one membership premise per element";
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Statement& p = *c.premises[3 + i];
      if (p.kind != Stmt::MemberE || p.x != b[i] || !within(p.level, in.m))
        return print(b[i]) + " must be shown in E at the intersection level";
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      const Statement& p = *c.premises[3 + b.size() + i];
      if (p.kind != Stmt::MemberL || p.x != d[i] || !within(p.level, in.n))
        return print(d[i]) + " must be shown in L at the intersection level";
    }
    for (Term t : b)
      if (has(d, t)) return "B and D must be disjoint";
    if (!(c.conclusion == stmt::qli(unite(b, d)))) return "conclusion must be QLinearlyIndependent(B u D)";
    return {};
  });

  auto syntactic_member = [&](const char* name, Stmt kind) {
    add(name, X, [kind](const RuleContext& c) -> std::string {
      if (auto e = premise_count(c, 0); !e.empty()) return e;
      const Statement& s = c.conclusion;
      if (auto e = kind_is(s, kind, "conclusion"); !e.empty()) return e;
      if (!is_normal(s.x)) return "term not normal";
      if (kind == Stmt::MemberQbar) return s.x->is_constant() ? std::string{} : "not a constant";
      auto lvl = kind == Stmt::MemberE ? e_level(s.x) : l_level(s.x);
      if (!lvl) return "level undefined for " + print(s.x);
      if (!within(static_cast<long>(*lvl), s.level)) return "level exceeds the claim";
      return {};
    });
  };
  syntactic_member("member-e-syntactic", Stmt::MemberE);
  syntactic_member("member-l-syntactic", Stmt::MemberL);
  syntactic_member("member-qbar-syntactic", Stmt::MemberQbar);

  add("member-from-qbar", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& q = *c.premises[0];
    if (auto e = kind_is(q, Stmt::MemberQbar, "premise"); !e.empty()) return e;
    const Statement& s = c.conclusion;
    Check ch;
    ch.need(s.kind == Stmt::MemberE || s.kind == Stmt::MemberL, "conclusion: membership in a tower")
        .need(s.x == q.x, "same element")
        .need(s.level == 0 || s.level == kAnyLevel, "algebraic numbers sit at level 0");
    return ch.error;
  });

  add("disjoint-base", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (auto e = kind_is(c.conclusion, Stmt::LinearlyDisjoint, "conclusion"); !e.empty()) return e;
    if (c.conclusion.m != 0 && c.conclusion.n != 0) return "only level 0 (the algebraic numbers) is trivial";
    return {};
  });

  add("theorem-lemma", Provenance::ConditionalOnSC, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    if (!(c.conclusion == stmt::linearly_disjoint(kAnyLevel, kAnyLevel))) return "cites only E, L disjointness";
    return {};
  });

  add("disjoint-intersection", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& d = *c.premises[0];
    if (auto e = kind_is(d, Stmt::LinearlyDisjoint, "premise"); !e.empty()) return e;
    if (!(c.conclusion == stmt::intersection_is_qbar(d.m, d.n))) return "conclusion: intersection at same levels";
    return {};
  });

  add("disjoint-membership", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 3); !e.empty()) return e;
    const Statement& in = *c.premises[0];
    const Statement& me = *c.premises[1];
    const Statement& ml = *c.premises[2];
    Check ch;
    ch.need(in.kind == Stmt::IntersectionIsQbar, "first premise: intersection")
        .need(me.kind == Stmt::MemberE && within(me.level, in.m), "second premise: member of E at level")
        .need(ml.kind == Stmt::MemberL && within(ml.level, in.n), "third premise: member of L at level")
        .need(me.x == ml.x, "same element")
        .need(c.conclusion == stmt::member(Stmt::MemberQbar, me.x), "conclusion: algebraic");
    return ch.error;
  });

  auto not_member_tower = [&](const char* name, Stmt member_kind, Stmt conclusion_kind) {
    add(name, X, [member_kind, conclusion_kind](const RuleContext& c) -> std::string {
      if (auto e = premise_count(c, 3); !e.empty()) return e;
      const Statement& in = *c.premises[0];
      const Statement& mem = *c.premises[1];
      const Statement& nq = *c.premises[2];
      const bool in_e = member_kind == Stmt::MemberE;
      Check ch;
      ch.need(in.kind == Stmt::IntersectionIsQbar, "first premise: intersection")
          .need((in_e ? in.n : in.m) == kAnyLevel, "the other tower must be taken whole")
          .need(mem.kind == member_kind && within(mem.level, in_e ? in.m : in.n), "membership at level")
          .need(nq.kind == Stmt::NotMemberQbar && nq.x == mem.x, "third premise: not algebraic")
          .need(c.conclusion == stmt::member(conclusion_kind, mem.x), "conclusion mismatch");
      return ch.error;
    });
  };
  not_member_tower("not-member-l", Stmt::MemberE, Stmt::NotMemberL);
  not_member_tower("not-member-e", Stmt::MemberL, Stmt::NotMemberE);

  add("not-member-qbar", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    if (auto e = kind_is(c.conclusion, Stmt::NotMemberQbar, "conclusion"); !e.empty()) return e;
    if (qbase(a) && has(a.set, c.conclusion.x)) return {};
    if (is_lower(a) && a.n >= 1 && a.set == std::vector<Term>{c.conclusion.x}) return {};
    return "premise must show the element transcendental";
  });

  add("not-member-transfer", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 2); !e.empty()) return e;
    const Statement& nm = *c.premises[0];
    const Statement& a = *c.premises[1];
    Check ch;
    ch.need(nm.kind == Stmt::NotMemberE || nm.kind == Stmt::NotMemberL || nm.kind == Stmt::NotMemberQbar,
            "first premise: a non-membership")
        .need(a.kind == Stmt::AlgebraicOver && has(a.set, nm.x), "second premise: the element is algebraic over y")
        .need(a.over.size() == 1, "base must be a single element")
        .need(c.conclusion.kind == nm.kind && !a.over.empty() && c.conclusion.x == a.over[0],
              "conclusion: y is outside the same field");
    return ch.error;
  });

  add("freeness-transfer", X, [](const RuleContext& c) -> std::string {
    if (c.premises.size() < 3) return "expected disjointness, AI over Qbar, memberships";
    const Statement& d = *c.premises[0];
    const Statement& a = *c.premises[1];
    const Statement& s = c.conclusion;
    if (auto e = kind_is(d, Stmt::LinearlyDisjoint, "first premise"); !e.empty()) return e;
    if (!qbase(a) || a.base != Field::Qbar) return "second premise must be AI over Qbar";
    if (s.kind != Stmt::AlgebraicallyIndependent || s.set != a.set) return "conclusion: AI of the same set";
    Stmt member_kind;
    long member_level;
    if (s.base == Field::L) {
      member_kind = Stmt::MemberE;
      member_level = d.m;
      if (s.level != d.n) return "L level must match the disjointness";
    } else if (s.base == Field::E) {
      member_kind = Stmt::MemberL;
      member_level = d.n;
      if (s.level != d.m) return "E level must match the disjointness";
    } else {
      return "conclusion must be over E or L";
    }
    if (c.premises.size() != 2 + a.set.size()) return "one membership premise per element";
    for (std::size_t i = 0; i < a.set.size(); ++i) {
      const Statement& p = *c.premises[2 + i];
      if (p.kind != member_kind || p.x != a.set[i] || !within(p.level, member_level))
        return print(a.set[i]) + " must lie in the other tower";
    }
    return {};
  });

  add("transcendence-basis", X, [](const RuleContext& c) -> std::string {
    const Statement& s = c.conclusion;
    if (auto e = kind_is(s, Stmt::TranscendenceBasis, "conclusion"); !e.empty()) return e;
    if (!subset(s.set, s.over)) return "basis must be a subset";
    const std::size_t want = s.set.empty() ? 1 : 2;
    if (auto e = premise_count(c, want); !e.empty()) return e;
    if (!s.set.empty()) {
      const Statement& a = *c.premises[0];
      if (!qbase(a) || a.set != s.set) return "first premise must be AI of the basis";
    }
    const Statement& alg = *c.premises[want - 1];
    if (alg.kind != Stmt::AlgebraicOver || !subset(s.over, alg.set) || alg.over != s.set)
      return "last premise must show the field algebraic over the basis";
    return {};
  });

  add("closures-free", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& a = *c.premises[0];
    const Statement& s = c.conclusion;
    if (!qbase(a)) return "premise must be AI over Q or Qbar";
    if (auto e = kind_is(s, Stmt::ClosuresFree, "conclusion"); !e.empty()) return e;
    for (Term t : s.set)
      if (has(s.over, t)) return "the two bases must be disjoint";
    if (unite(s.set, s.over) != a.set) return "the union of the bases must be the independent set";
    return {};
  });

  add("lang-4.12", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 1); !e.empty()) return e;
    const Statement& f = *c.premises[0];
    if (auto e = kind_is(f, Stmt::ClosuresFree, "premise"); !e.empty()) return e;
    if (c.anchor != kLangAnchor) return std::string("anchor must be '") + kLangAnchor + "'";
    if (!(c.conclusion == stmt::closures(Stmt::ClosuresLinearlyDisjoint, f.set, f.over)))
      return "conclusion: linear disjointness of the same closures";
    return {};
  });

  add("assume", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 0); !e.empty()) return e;
    const Statement& s = c.conclusion;
    if (auto e = kind_is(s, Stmt::WitnessRelation, "conclusion"); !e.empty()) return e;
    Check ch;
    ch.need(!s.set.empty() && s.set.size() == s.over.size(), "witness lists must have equal positive length")
        .need(s.m >= 0 && s.n >= 0, "witness levels must be natural numbers");
    return ch.error;
  });

  add("witness-contradiction", X, [](const RuleContext& c) -> std::string {
    if (auto e = premise_count(c, 6); !e.empty()) return e;
    const Statement& w = *c.premises[0];
    const Statement& li = *c.premises[1];
    const Statement& al = *c.premises[2];
    const Statement& ae = *c.premises[3];
    const Statement& ld = *c.premises[4];
    const Statement& nz = *c.premises[5];
    if (auto e = kind_is(c.conclusion, Stmt::Contradiction, "conclusion"); !e.empty()) return e;
    if (auto e = kind_is(w, Stmt::WitnessRelation, "first premise"); !e.empty()) return e;
    Check ch;
    ch.need(li.kind == Stmt::QbarLinearlyIndependent && distinct(w.set) && li.set == term_set(w.set),
            "the l_i must be linearly independent over Qbar")
        .need(al.kind == Stmt::AlgebraicOver && subset(w.set, al.set), "the l_i must be algebraic over a base Y")
        .need(ae.kind == Stmt::AlgebraicOver && subset(w.over, ae.set), "the e_i must be algebraic over a base X")
        .need(ld.kind == Stmt::ClosuresLinearlyDisjoint &&
                  ((ld.set == ae.over && ld.over == al.over) || (ld.set == al.over && ld.over == ae.over)),
              "closures of X and Y must be linearly disjoint")
        .need(nz.kind == Stmt::QLinearlyIndependent && nz.set.size() == 1 && has(w.over, nz.set[0]),
              "some e_i must be nonzero");
    return ch.error;
  });

  add("discharge", X, [](const RuleContext& c) -> std::string {
    if (c.premises.size() < 2) return "expected contradiction, hypothesis, memberships";
    const Statement& k = *c.premises[0];
    const Statement& w = *c.premises[1];
    if (auto e = kind_is(k, Stmt::Contradiction, "first premise"); !e.empty()) return e;
    if (auto e = kind_is(w, Stmt::WitnessRelation, "second premise"); !e.empty()) return e;
    if (!(c.conclusion == stmt::linearly_disjoint(w.m, w.n))) return "conclusion: disjointness at the witness levels";
    const auto es = term_set(w.over);
    const auto ls = term_set(w.set);
    if (c.premises.size() != 2 + es.size() + ls.size()) return "one membership premise per witness element";
    for (std::size_t i = 0; i < es.size(); ++i) {
      const Statement& p = *c.premises[2 + i];
      if (p.kind != Stmt::MemberE || p.x != es[i] || !within(p.level, w.m)) return "e_i must lie in E_m";
    }
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const Statement& p = *c.premises[2 + es.size() + i];
      if (p.kind != Stmt::MemberL || p.x != ls[i] || !within(p.level, w.n)) return "l_i must lie in L_n";
    }
    return {};
  });

  return r;
}

const std::map<std::string, Rule>& registry() {
  static const std::map<std::string, Rule> r = build_registry();
  return r;
}

}  // namespace

const Rule* find_rule(const std::string& name) {
  auto it = registry().find(name);
  return it == registry().end() ? nullptr : &it->second;
}

std::vector<std::string> rule_names() {
  std::vector<std::string> out;
  for (const auto& [name, rule] : registry()) out.push_back(name);
  return out;
}

DerivedTags derived_tags(const Rule& rule, FactId self, const std::vector<const Fact*>& premises) {
  DerivedTags tags;
  tags.provenance = rule.floor;
  std::set<FactId> open;
  for (const Fact* p : premises) {
    tags.provenance = weaker(tags.provenance, p->provenance);
    open.insert(p->assumptions.begin(), p->assumptions.end());
  }
  if (rule.name == "assume") open = {self};
  if (rule.name == "discharge") {
    if (premises.size() < 2) throw ObligationError(rule.name, "missing hypothesis");
    const Fact& h = *premises[1];
    if (h.rule != "assume" || h.assumptions != std::vector<FactId>{h.id})
      throw ObligationError(rule.name, "second premise must be an open hypothesis");
    const auto& used = premises[0]->assumptions;
    if (std::find(used.begin(), used.end(), h.id) == used.end())
      throw ObligationError(rule.name, "the contradiction does not depend on the hypothesis");
    open.erase(h.id);
  }
  tags.assumptions.assign(open.begin(), open.end());
  return tags;
}

// ---------------------------------------------------------------- knowledge base

namespace {

std::string fact_key(const Statement& s, const std::string& rule, const std::vector<FactId>& assumptions) {
  std::string k = s.key() + "#";
  if (rule == "assume") return k + "assume";
  for (FactId a : assumptions) k += std::to_string(a) + ",";
  return k;
}

}  // namespace

FactId KnowledgeBase::derive(const std::string& rule_name, const std::vector<FactId>& premises, Statement conclusion,
                             json data, std::string anchor) {
  const Rule* rule = find_rule(rule_name);
  if (!rule) throw ObligationError(rule_name, "unknown rule");
  conclusion = canonical(std::move(conclusion));
  if (!data.is_object()) data = json::object();

  std::unique_lock lock(mutex_);
  std::vector<const Fact*> ps;
  std::vector<const Statement*> statements;
  for (FactId id : premises) {
    if (id >= facts_.size()) throw ObligationError(rule_name, "missing premise " + std::to_string(id));
    ps.push_back(&facts_[id]);
    statements.push_back(&facts_[id].statement);
  }
  const RuleContext ctx{conclusion, statements, data, anchor};
  if (std::string err = rule->check(ctx); !err.empty()) throw ObligationError(rule_name, err);
  const FactId self = facts_.size();
  DerivedTags tags = derived_tags(*rule, self, ps);

  const std::string key = fact_key(conclusion, rule_name, tags.assumptions);
  if (auto it = by_key_.find(key); it != by_key_.end())
    for (FactId id : it->second)
      if (facts_[id].provenance <= tags.provenance) return id;

  Fact f;
  f.id = self;
  f.statement = std::move(conclusion);
  f.provenance = tags.provenance;
  f.rule = rule_name;
  f.premises = premises;
  f.anchor = std::move(anchor);
  f.data = std::move(data);
  f.assumptions = std::move(tags.assumptions);
  facts_.push_back(std::move(f));
  by_key_[key].push_back(self);
  return self;
}

std::size_t KnowledgeBase::size() const {
  std::shared_lock lock(mutex_);
  return facts_.size();
}

Fact KnowledgeBase::fact(FactId id) const {
  std::shared_lock lock(mutex_);
  if (id >= facts_.size()) throw std::out_of_range("no fact " + std::to_string(id));
  return facts_[id];
}

std::optional<FactId> KnowledgeBase::find(const Statement& s, bool allow_heuristic) const {
  std::shared_lock lock(mutex_);
  auto it = by_key_.find(canonical(s).key() + "#");
  if (it == by_key_.end()) return std::nullopt;
  std::optional<FactId> best;
  for (FactId id : it->second) {
    const Fact& f = facts_[id];
    if (!allow_heuristic && f.provenance == Provenance::HeuristicNumeric) continue;
    if (!best || f.provenance < facts_[*best].provenance) best = id;
  }
  return best;
}

std::vector<FactId> KnowledgeBase::of_kind(Stmt kind, bool allow_heuristic) const {
  std::shared_lock lock(mutex_);
  std::vector<FactId> out;
  for (const Fact& f : facts_)
    if (f.statement.kind == kind && f.assumptions.empty() &&
        (allow_heuristic || f.provenance != Provenance::HeuristicNumeric))
      out.push_back(f.id);
  return out;
}

std::vector<FactId> KnowledgeBase::cone(const std::vector<FactId>& results) const {
  std::shared_lock lock(mutex_);
  std::set<FactId> seen;
  std::vector<FactId> stack(results.begin(), results.end());
  while (!stack.empty()) {
    FactId id = stack.back();
    stack.pop_back();
    if (id >= facts_.size() || !seen.insert(id).second) continue;
    for (FactId p : facts_[id].premises) stack.push_back(p);
  }
  return {seen.begin(), seen.end()};
}

std::vector<std::pair<FactId, Dependency>> KnowledgeBase::dependencies(bool allow_heuristic) const {
  std::vector<std::pair<FactId, Dependency>> out;
  for (Stmt k : {Stmt::AlgebraicOver, Stmt::TranscendenceBasis})
    for (FactId id : of_kind(k, allow_heuristic)) out.emplace_back(id, dependency_of(fact(id).statement));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::pair<FactId, std::pair<std::vector<Term>, long>>> KnowledgeBase::lower_bounds(
    bool allow_heuristic) const {
  std::vector<std::pair<FactId, std::pair<std::vector<Term>, long>>> out;
  for (FactId id : of_kind(Stmt::AlgebraicallyIndependent, allow_heuristic)) {
    Fact f = fact(id);
    if (qbase(f.statement)) out.push_back({id, {f.statement.set, static_cast<long>(f.statement.set.size())}});
  }
  for (Stmt k : {Stmt::TrdegAtLeast, Stmt::TrdegEquals})
    for (FactId id : of_kind(k, allow_heuristic)) {
      Fact f = fact(id);
      out.push_back({id, {f.statement.set, f.statement.n}});
    }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

// ---------------------------------------------------------------- operations

std::vector<Term> exp_images(const std::vector<Term>& terms) {
  std::vector<Term> out;
  for (Term t : terms) out.push_back(exp(t));
  return out;
}

std::string monomial_display(const std::vector<Term>& terms) {
  if (terms.empty()) return "1 = 1";
  std::string out;
  const auto images = exp_images(terms);
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::string base = print(images[i]);
    if (base[0] == '-' || base.find(' ') != std::string::npos) base = "(" + base + ")";
    if (i) out += " * ";
    out += base + "^q" + std::to_string(i);
  }
  return out + " = 1";
}

FactId schanuel_apply(KnowledgeBase& kb, const std::vector<Term>& s, FactId li, const std::string& anchor) {
  const std::vector<Term> set = term_set(s);
  if (set.empty()) throw ObligationError("schanuel-conjecture", "the conjecture needs n >= 1");
  if (li >= kb.size()) throw ObligationError("schanuel-conjecture", "missing-certificate: no such fact");
  const Fact f = kb.fact(li);
  if (!(f.statement == stmt::qli(set)))
    throw ObligationError("schanuel-conjecture", "missing-certificate: fact does not prove " + describe(stmt::qli(set)));
  return kb.derive("schanuel-conjecture", {li},
                   stmt::trdeg_at_least(unite(set, exp_images(set)), static_cast<long>(set.size())), json::object(),
                   anchor);
}

RelationVector reduce_linear_to_monomial(const RelationVector& r) {
  RelationVector m = r;
  m.kind = RelationKind::Monomial;
  return m;
}

Term monomial_value(const RelationVector& r) {
  std::vector<Term> factors;
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    if (r.coefficients[i] == 0) continue;
    if (!r.coefficients[i].fits_slong_p()) throw std::overflow_error("exponent too large");
    factors.push_back(pow(exp(r.terms[i]), r.coefficients[i].get_si()));
  }
  return product(factors);
}

FactId record_linear_to_monomial(KnowledgeBase& kb, const std::vector<Term>& terms, const std::string& anchor) {
  Statement s;
  s.kind = Stmt::LinearImpliesMonomial;
  s.set = terms;
  s.over = exp_images(terms);
  s.text = monomial_display(terms);
  return kb.derive("reduce-linear-to-monomial", {}, s, json::object(), anchor);
}

FactId monomial_triviality(KnowledgeBase& kb, FactId monomial, std::optional<FactId> ai, const std::string& anchor) {
  const Fact lim = kb.fact(monomial);
  if (lim.statement.kind != Stmt::LinearImpliesMonomial)
    throw ObligationError("monomial-triviality", "first fact is not a monomial image");
  Statement s;
  s.kind = Stmt::MonomialTrivial;
  s.set = lim.statement.set;
  std::vector<long> rest;
  for (std::size_t i = 0; i < lim.statement.over.size(); ++i) {
    Term u = lim.statement.over[i];
    if (u->is_constant()) {
      rest.push_back(static_cast<long>(i));
      continue;
    }
    s.zero.push_back(static_cast<long>(i));
    if (!ai || !has(kb.fact(*ai).statement.set, u))
      throw ObligationError("monomial-triviality", "coverage: " + print(u) + " lacks an independence certificate");
  }
  if (rest.size() == 1 && is_rational(lim.statement.over[static_cast<std::size_t>(rest[0])], -1)) s.even = rest;
  std::vector<FactId> premises{monomial};
  if (!s.zero.empty()) premises.push_back(*ai);
  return kb.derive("monomial-triviality", premises, s, json::object(), anchor);
}

std::optional<FactId> derive_algebraic_over(KnowledgeBase& kb, const std::vector<Term>& x,
                                            const std::vector<Term>& over, const std::string& anchor) {
  const Statement target = stmt::algebraic_over(x, over);
  if (auto f = kb.find(target)) return f;
  Closure plain(target.over);
  if (plain.contains_all(target.set)) return kb.derive("algebraic-closure", {}, target, json::object(), anchor);

  auto all = kb.dependencies();
  std::vector<Dependency> deps;
  for (const auto& [id, d] : all) deps.push_back(d);
  Closure cl(target.over);
  auto fired = cl.saturate(deps);
  if (!cl.contains_all(target.set)) return std::nullopt;

  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < fired.size(); ++i)
    if (fired[i]) chosen.push_back(i);
  auto closes = [&](const std::vector<std::size_t>& idx) {
    std::vector<Dependency> ds;
    for (std::size_t i : idx) ds.push_back(deps[i]);
    Closure c(target.over);
    c.saturate(ds);
    return c.contains_all(target.set);
  };
  // Drop premises that are not needed; newest first keeps older, more basic facts.
  for (std::size_t k = chosen.size(); k-- > 0;) {
    auto trial = chosen;
    trial.erase(trial.begin() + static_cast<long>(k));
    if (closes(trial)) chosen = trial;
  }
  std::vector<FactId> premises;
  for (std::size_t i : chosen) premises.push_back(all[i].first);
  return kb.derive("algebraic-closure", premises, target, json::object(), anchor);
}

namespace {

std::optional<FactId> find_independence_impl(KnowledgeBase& kb, const std::vector<Term>& s, Field base,
                                             const std::string& anchor, bool allow_heuristic) {
  const Statement target = stmt::ai(s, base);
  if (auto f = kb.find(target, allow_heuristic)) return f;
  if (target.set.empty()) return std::nullopt;
  std::optional<FactId> best;
  Provenance best_p = Provenance::HeuristicNumeric;
  for (FactId id : kb.of_kind(Stmt::AlgebraicallyIndependent, allow_heuristic)) {
    const Fact f = kb.fact(id);
    if (!qbase(f.statement) || !subset(target.set, f.statement.set)) continue;
    if (!best || f.provenance < best_p) {
      best = id;
      best_p = f.provenance;
    }
  }
  if (!best) {
    // A lower bound reaching the size of the set is independence.
    for (const auto& [id, b] : kb.lower_bounds(allow_heuristic))
      if (b.first == target.set && b.second >= static_cast<long>(target.set.size())) {
        FactId ai = kb.derive("ai-from-trdeg", {id}, stmt::ai(target.set, Field::Q), json::object(), anchor);
        if (base == Field::Q) return ai;
        return kb.derive("ai-base-change", {ai}, target, json::object(), anchor);
      }
    return std::nullopt;
  }
  FactId id = *best;
  Statement have = kb.fact(id).statement;
  if (have.set != target.set)
    id = kb.derive("ai-subset", {id}, stmt::ai(target.set, have.base), json::object(), anchor);
  if (have.base != base) id = kb.derive("ai-base-change", {id}, target, json::object(), anchor);
  return id;
}

}  // namespace

std::optional<FactId> find_independence(KnowledgeBase& kb, const std::vector<Term>& s, Field base,
                                        const std::string& anchor) {
  return find_independence_impl(kb, s, base, anchor, false);
}

std::optional<FactId> numeric_independence(KnowledgeBase& kb, const std::vector<Term>& s,
                                           const NumericConfig& config) {
  const std::vector<Term> set = term_set(s);
  if (set.empty()) return std::nullopt;
  if (auto known = kb.find(stmt::ai(set, Field::Q), true)) return known;
  const auto monomials = monomials_upto_two(set);
  const long bits = static_cast<long>(mpz_sizeinbase(config.height.get_mpz_t(), 2));
  const long precision = std::max<long>(config.precision, 4 * bits * static_cast<long>(monomials.size()) + 64);
  json data{{"precision", precision}, {"height", config.height.get_str()}};
  try {
    return kb.derive("numeric-no-algebraic-relation", {}, stmt::ai(set, Field::Q), data);
  } catch (const ObligationError&) {
    return std::nullopt;
  }
}

LIResult check_q_linear_independence(KnowledgeBase& kb, const std::vector<Term>& input, unsigned depth_budget,
                                     const NumericConfig& config) {
  LIResult out;
  std::vector<Term> s;
  for (Term t : input) s.push_back(normalize(t));
  s = term_set(s);
  if (s.empty()) return out;
  for (Term t : s)
    if (is_rational(t, 0)) {
      out.outcome = LIOutcome::CounterRelation;
      out.relation = RelationVector{{t}, {mpz_class(1)}, RelationKind::Linear};
      out.confirmation = Confirmation::LinearZero;
      return out;
    }
  auto certified = [&](FactId id) {
    out.outcome = LIOutcome::Certificate;
    out.certificate = id;
    return out;
  };
  if (auto f = kb.find(stmt::qli(s))) return certified(*f);

  if (s.size() == 1) {
    if (auto c = certify_nonzero(s[0]))
      return certified(kb.derive("certify-nonzero", {}, stmt::qli(s), json{{"precision", c->precision},
                                                                           {"lower_bound", c->lower_bound}}));
  }

  // Independent set plus at most one constant.
  std::vector<Term> nonconst, consts;
  for (Term t : s) (t->is_constant() ? consts : nonconst).push_back(t);
  if (consts.size() <= 1 && !nonconst.empty()) {
    if (auto ai = find_independence(kb, nonconst, Field::Q))
      return certified(kb.derive("li-from-ai", {*ai}, stmt::qli(s)));
  }

  // Exponentiate: a relation becomes a monomial identity among the images.
  if (depth_budget > 0 && s.size() > 1) {
    std::vector<Term> images = exp_images(s), covered, rest;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (images[i]->is_constant())
        rest.push_back(s[i]);
      else
        covered.push_back(images[i]);
    }
    if (!covered.empty() && distinct(covered)) {
      if (auto ai = find_independence(kb, covered, Field::Q)) {
        std::optional<FactId> rest_li;
        bool ok = true;
        if (!rest.empty()) {
          LIResult sub = check_q_linear_independence(kb, rest, depth_budget - 1, config);
          if (sub.outcome == LIOutcome::Certificate)
            rest_li = sub.certificate;
          else
            ok = false;
        }
        if (ok) {
          FactId lim = record_linear_to_monomial(kb, s);
          FactId mt = monomial_triviality(kb, lim, ai);
          std::vector<FactId> premises{lim, mt};
          if (rest_li) premises.push_back(*rest_li);
          return certified(kb.derive("li-from-monomial", premises, stmt::qli(s)));
        }
      }
    }
  }

  try {
    Confirmation how = Confirmation::None;
    if (auto r = falsify_linear_independence(s, config.precision, config.height, &how)) {
      out.outcome = LIOutcome::CounterRelation;
      out.relation = r;
      out.confirmation = how;
      return out;
    }
  } catch (const std::exception&) {
  }
  return out;
}

TrdegInterval trdeg_bound(const KnowledgeBase& kb, const std::vector<Term>& input) {
  const std::vector<Term> s = term_set(input);
  std::vector<Dependency> deps;
  for (const auto& [id, d] : kb.dependencies()) deps.push_back(d);
  Closure cs(s);
  cs.saturate(deps);
  TrdegInterval iv;
  for (const auto& [id, b] : kb.lower_bounds())
    if (cs.contains_all(b.first)) iv.lo = std::max(iv.lo, b.second);
  std::vector<Term> basis;
  for (Term t : s) {
    Closure cb(basis);
    cb.saturate(deps);
    if (!cb.contains(t)) basis.push_back(t);
  }
  iv.hi = static_cast<long>(basis.size());
  for (Stmt k : {Stmt::TrdegAtMost, Stmt::TrdegEquals})
    for (FactId id : kb.of_kind(k)) {
      const Fact f = kb.fact(id);
      Closure ct(f.statement.set);
      ct.saturate(deps);
      if (ct.contains_all(s)) iv.hi = std::min(iv.hi, f.statement.n);
    }
  return iv;
}

std::optional<FactId> certify_trdeg(KnowledgeBase& kb, const std::vector<Term>& input) {
  const std::vector<Term> s = term_set(input);
  const TrdegInterval iv = trdeg_bound(kb, s);
  if (iv.lo != iv.hi) return std::nullopt;
  const long k = iv.lo;
  if (auto f = kb.find(stmt::trdeg_equals(s, k))) return f;

  std::vector<Dependency> deps;
  for (const auto& [id, d] : kb.dependencies()) deps.push_back(d);

  FactId lower;
  if (k == 0) {
    lower = kb.derive("trdeg-trivial", {}, stmt::trdeg_at_least(s, 0));
  } else {
    Closure cs(s);
    cs.saturate(deps);
    std::optional<FactId> source;
    for (const auto& [id, b] : kb.lower_bounds())
      if (b.second == k && cs.contains_all(b.first)) {
        source = id;
        break;
      }
    if (!source) return std::nullopt;
    Fact f = kb.fact(*source);
    FactId bound = *source;
    if (f.statement.kind == Stmt::AlgebraicallyIndependent)
      bound = kb.derive("trdeg-from-ai", {bound}, stmt::trdeg_at_least(f.statement.set, k));
    auto alg = derive_algebraic_over(kb, f.statement.set, s);
    if (!alg) return std::nullopt;
    lower = kb.derive("trdeg-transfer", {bound, *alg}, stmt::trdeg_at_least(s, k));
  }

  std::vector<Term> basis;
  for (Term t : s) {
    Closure cb(basis);
    cb.saturate(deps);
    if (!cb.contains(t)) basis.push_back(t);
  }
  FactId upper;
  if (static_cast<long>(basis.size()) == k) {
    auto alg = derive_algebraic_over(kb, s, basis);
    if (!alg) return std::nullopt;
    upper = kb.derive("trdeg-upper", {*alg}, stmt::trdeg_at_most(s, k));
  } else {
    std::optional<FactId> via;
    for (Stmt kind : {Stmt::TrdegAtMost, Stmt::TrdegEquals})
      for (FactId id : kb.of_kind(kind)) {
        const Fact f = kb.fact(id);
        if (via || f.statement.n != k) continue;
        if (auto alg = derive_algebraic_over(kb, s, f.statement.set)) {
          FactId b = id;
          if (kind == Stmt::TrdegEquals) {
            // Equality gives the upper bound directly through transfer.
          }
          via = kb.derive("trdeg-transfer", {b, *alg}, stmt::trdeg_at_most(s, k));
        }
      }
    if (!via) return std::nullopt;
    upper = *via;
  }
  return kb.derive("trdeg-squeeze", {lower, upper}, stmt::trdeg_equals(s, k));
}

BasisResult select_transcendence_basis(KnowledgeBase& kb, const std::vector<Term>& input, BasisTarget target,
                                       bool allow_heuristic, const NumericConfig& config) {
  const std::vector<Term> a = term_set(input);
  auto image = [&](Term t) { return target == BasisTarget::ExpImage ? exp(t) : t; };
  std::vector<Term> basis, basis_images, all_images;
  for (Term t : a) all_images.push_back(image(t));

  for (Term t : a) {
    const Term u = image(t);
    std::vector<Dependency> deps;
    for (const auto& [id, d] : kb.dependencies(allow_heuristic)) deps.push_back(d);
    Closure cl(basis_images);
    cl.saturate(deps);
    if (cl.contains(u)) continue;
    std::vector<Term> candidate = basis_images;
    candidate.push_back(u);
    if (find_independence_impl(kb, candidate, Field::Q, {}, allow_heuristic)) {
      basis.push_back(t);
      basis_images.push_back(u);
      continue;
    }
    if (target == BasisTarget::ExpImage && !basis.empty()) {
      std::vector<Term> terms{t};
      terms.insert(terms.end(), basis.begin(), basis.end());
      Confirmation how = Confirmation::None;
      std::optional<RelationVector> r;
      try {
        r = falsify_linear_independence(terms, config.precision, config.height, &how);
      } catch (const std::exception&) {
      }
      if (r && r->coefficients[0] != 0) {
        json coeffs = json::array();
        for (const auto& q : r->coefficients) coeffs.push_back(q.get_str());
        json data{{"argument", print(t)}, {"basis", terms_json(basis)}, {"coefficients", coeffs}};
        kb.derive("exp-additive", {}, stmt::algebraic_over({u}, basis_images), data);
        continue;
      }
    }
    if (allow_heuristic && numeric_independence(kb, candidate, config)) {
      basis.push_back(t);
      basis_images.push_back(u);
      continue;
    }
    throw ObligationError("transcendence-basis", "cannot classify " + print(u) + " over the basis so far");
  }

  std::vector<FactId> premises;
  if (!basis_images.empty()) {
    auto ai = find_independence_impl(kb, basis_images, Field::Q, {}, allow_heuristic);
    if (!ai) throw ObligationError("transcendence-basis", "basis lost its independence certificate");
    premises.push_back(*ai);
  }
  auto alg = derive_algebraic_over(kb, all_images, basis_images);
  if (!alg) {
    // Heuristic dependencies are not used by the closure search.
    throw ObligationError("transcendence-basis", "field is not certified algebraic over the basis");
  }
  premises.push_back(*alg);
  BasisResult out;
  out.basis = basis;
  out.fact = kb.derive("transcendence-basis", premises, stmt::transcendence_basis(basis_images, all_images));
  return out;
}

}  // namespace schanuel
