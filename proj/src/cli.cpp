#include "schanuel/cli.hpp"

#include "schanuel/algebraic.hpp"
#include "schanuel/numeric.hpp"
#include "schanuel/support.hpp"
#include "schanuel/trace.hpp"

#include <CLI11.hpp>

#include <ctime>
#include <fstream>
#include <sstream>

namespace schanuel {

namespace {

struct Options {
  long precision = 256;
  std::string height = "1000";
  long degcap = 64;
  std::string registry;
  std::string output;
  std::string timestamp;

  NumericConfig numeric() const {
    NumericConfig c;
    c.precision = precision;
    c.height = mpz_class(height);
    return c;
  }
};

std::string now_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<Term> parse_all(const std::vector<std::string>& texts) {
  std::vector<Term> out;
  for (const auto& s : texts) out.push_back(normalize(parse(s)));
  return out;
}

std::string join_terms(const std::vector<Term>& ts) {
  std::string s = "{";
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + print(ts[i]);
  return s + "}";
}

std::string vector_text(const std::vector<mpz_class>& q) {
  std::string s = "(";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? ", " : "") + q[i].get_str();
  return s + ")";
}

std::string level_text(std::optional<unsigned> l) { return l ? std::to_string(*l) : "none"; }

int cmd_level(const std::string& text, std::ostream& out) {
  Term t = normalize(parse(text));
  out << "E-level: " << level_text(e_level(t)) << ", L-level: " << level_text(l_level(t)) << "\n";
  return kExitOk;
}

int cmd_support(const std::string& text, const std::string& kind, bool as_json, std::ostream& out,
                std::ostream& err) {
  Term t = normalize(parse(text));
  SupportSet s;
  try {
    s = kind == "exp" ? exp_support(t) : log_support(t);
  } catch (const SupportError& e) {
    err << "no " << kind << " support: " << e.what() << "\n";
    return kExitUnknown;
  }
  const ClosureReport report = verify_closure(s);
  if (as_json) {
    out << to_json(s).dump() << "\n";
  } else {
    out << kind << "-support of " << print(t) << ": " << join_terms(s.elements) << "\n";
    out << "level: " << s.level_witness << "\n";
    out << "closure: " << (report.ok ? "verified" : "FAILED") << "\n";
  }
  for (const auto& d : report.diagnostics) err << d << "\n";
  return report.ok ? kExitOk : kExitObligation;
}

int cmd_check_li(const std::vector<std::string>& texts, const Options& o, std::ostream& out) {
  const auto terms = parse_all(texts);
  KnowledgeBase kb;
  seed_knowledge(kb, 3, 3);
  LIResult r = check_q_linear_independence(kb, terms, 2, o.numeric());
  switch (r.outcome) {
    case LIOutcome::Certificate: {
      const Fact f = kb.fact(*r.certificate);
      out << "independent: " << describe(f.statement) << " [" << provenance_name(f.provenance) << "]\n";
      return kExitOk;
    }
    case LIOutcome::CounterRelation:
      out << "dependent: relation " << vector_text(r.relation->coefficients) << " on "
          << join_terms(r.relation->terms) << ", confirmed by " << confirmation_name(r.confirmation) << "\n";
      return kExitCounterexample;
    case LIOutcome::Unknown:
      break;
  }
  out << "unknown\n";
  return kExitUnknown;
}

int cmd_trdeg(const std::vector<std::string>& texts, std::ostream& out) {
  const auto terms = term_set(parse_all(texts));
  KnowledgeBase kb;
  seed_knowledge(kb, 3, 3);
  const TrdegInterval iv = trdeg_bound(kb, terms);
  if (auto f = certify_trdeg(kb, terms)) {
    out << "trdeg = " << iv.lo << " [" << provenance_name(kb.fact(*f).provenance) << "]\n";
    return kExitOk;
  }
  out << "trdeg in [" << iv.lo << ", " << iv.hi << "]\n";
  return kExitUnknown;
}

int cmd_relate(const std::vector<std::string>& texts, const Options& o, std::ostream& out) {
  const auto terms = parse_all(texts);
  std::vector<Ball> values;
  for (Term t : terms) values.push_back(eval(t, o.precision));
  auto q = find_integer_relation(values, mpz_class(o.height));
  if (!q) {
    out << "absent: no relation of height <= " << o.height << " at " << o.precision << " bits\n";
    return kExitUnknown;
  }
  normalize_relation(*q);
  const Confirmation how = confirm_linear_relation(terms, *q);
  out << "relation " << vector_text(*q);
  if (how == Confirmation::None) {
    out << " (numerical only, not confirmed)\n";
    return kExitUnknown;
  }
  out << " confirmed by " << confirmation_name(how) << "\n";
  return kExitCounterexample;
}

int emit(const KnowledgeBase& kb, const ProofOutcome& outcome, const Options& o, std::ostream& out,
         std::ostream& err) {
  TraceConfig cfg;
  cfg.precision = o.precision;
  cfg.height = o.height;
  cfg.degcap = o.degcap;
  cfg.timestamp = o.timestamp.empty() ? now_utc() : o.timestamp;
  const ProofTrace t = make_trace(kb, outcome, cfg);
  const TraceVerdict v = check_trace(t.text());
  if (!v.valid) {
    err << "emitted trace fails its own check: " << v.reason << "\n";
    return kExitObligation;
  }
  std::ostream* summary = &out;
  if (o.output.empty() || o.output == "-") {
    out << t.text();
    summary = &err;
  } else {
    std::ofstream f(o.output);
    if (!f) {
      err << "cannot write " << o.output << "\n";
      return kExitUsage;
    }
    f << t.text();
  }
  for (FactId r : outcome.results) {
    const Fact f = kb.fact(r);
    *summary << describe(f.statement) << " [" << provenance_name(f.provenance) << "]\n";
  }
  *summary << t.steps.size() << " steps\n";
  return kExitOk;
}

int cmd_check_trace(const std::string& path, std::ostream& out) {
  std::ifstream f(path);
  if (!f) {
    out << "cannot read " << path << "\n";
    return kExitUsage;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  const TraceVerdict v = check_trace(ss.str());
  if (v.valid) {
    out << "valid\n";
    return kExitOk;
  }
  out << "invalid";
  if (v.failing_step) out << " at step " << *v.failing_step;
  if (v.line) out << " (line " << *v.line << ")";
  out << ": " << v.reason << "\n";
  return kExitObligation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schanuel-conditional certificates for exp-log constants"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--prec", o.precision, "working precision in bits")->envname("SCHANUEL_PREC")->check(CLI::PositiveNumber);
  app.add_option("--height", o.height, "relation height bound")->envname("SCHANUEL_HEIGHT");
  app.add_option("--degcap", o.degcap, "degree cap for algebraic numbers")
      ->envname("SCHANUEL_DEGCAP")
      ->check(CLI::PositiveNumber);
  app.add_option("--registry", o.registry, "named algebraic constants")->check(CLI::ExistingFile);

  std::string term, kind = "exp", path;
  std::vector<std::string> terms;
  bool as_json = false;
  unsigned m = 1, n = 1, depth = 1;

  auto* level = app.add_subcommand("level", "E- and L-levels of a term");
  level->add_option("term", term)->required();
  auto* support = app.add_subcommand("support", "Exp- or Log-support with its closure check");
  support->add_option("term", term)->required();
  support->add_option("--kind", kind)->check(CLI::IsMember({"exp", "log"}));
  support->add_flag("--json", as_json);
  auto* check_li = app.add_subcommand("check-li", "Q-linear independence: certificate or relation");
  check_li->add_option("terms", terms)->required();
  auto* trdeg = app.add_subcommand("trdeg", "transcendence degree bounds");
  trdeg->add_option("terms", terms)->required();
  auto* relate = app.add_subcommand("relate", "integer relation search");
  relate->add_option("terms", terms)->required();
  auto* check = app.add_subcommand("check-trace", "replay a proof trace");
  check->add_option("file", path)->required();

  auto* prove = app.add_subcommand("prove", "replay a proof and write its trace");
  prove->require_subcommand(1);
  prove->add_option("-o,--output", o.output, "trace file ('-' for stdout)");
  prove->add_option("--timestamp", o.timestamp, "fixed header timestamp");
  auto* theorem = prove->add_subcommand("theorem", "linear disjointness of E_m and L_n");
  theorem->add_option("--m", m)->check(CLI::NonNegativeNumber);
  theorem->add_option("--n", n)->check(CLI::NonNegativeNumber);
  auto* cor1 = prove->add_subcommand("cor1", "E and L intersect in Qbar");
  auto* cor2 = prove->add_subcommand("cor2", "pi is not in E, e is not in L");
  auto* cor3 = prove->add_subcommand("cor3", "i*pi and iterated logs of pi");
  cor3->add_option("--depth", depth)->required()->check(CLI::PositiveNumber);
  auto* cor4 = prove->add_subcommand("cor4", "iterated exponentials of 1");
  cor4->add_option("--depth", depth)->required()->check(CLI::PositiveNumber);
  for (auto* sub : {level, support, check_li, trdeg, relate, check, prove, theorem, cor1, cor2, cor3, cor4})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_degree_cap(static_cast<int>(o.degcap));
    if (!o.registry.empty()) load_registry(o.registry);
    if (*level) return cmd_level(term, out);
    if (*support) return cmd_support(term, kind, as_json, out, err);
    if (*check_li) return cmd_check_li(terms, o, out);
    if (*trdeg) return cmd_trdeg(terms, out);
    if (*relate) return cmd_relate(terms, o, out);
    if (*check) return cmd_check_trace(path, out);
    KnowledgeBase kb;
    ProofOutcome outcome;
    if (*theorem) outcome = replay_theorem(kb, m, n);
    if (*cor1) outcome = prove_cor1(kb);
    if (*cor2) outcome = prove_cor2(kb);
    if (*cor3) outcome = prove_cor3(kb, depth);
    if (*cor4) outcome = prove_cor4(kb, depth);
    return emit(kb, outcome, o, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const AlgebraicError& e) {
    err << "algebraic constant: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric: " << e.what() << "\n";
    return e.kind() == NumericError::Kind::InsufficientPrecision ? kExitUsage : kExitUnknown;
  } catch (const ObligationError& e) {
    err << "obligation failed: " << e.what() << "\n";
    return kExitObligation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitObligation;
  }
}

}  // namespace schanuel
