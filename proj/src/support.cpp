#include "schanuel/support.hpp"

#include <algorithm>
#include <unordered_set>

namespace schanuel {

namespace {

template <typename Stop>
std::vector<Term> harvest(Term t, Kind kind, Stop take) {
  std::vector<Term> out;
  std::unordered_set<Term> seen;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    if (u->kind() == kind) {
      out.push_back(take(u));
      continue;
    }
    for (Term c : u->children()) stack.push_back(c);
  }
  return term_set(std::move(out));
}

bool contains(const std::vector<Term>& sorted, Term t) {
  return std::binary_search(sorted.begin(), sorted.end(), t, TermLess{});
}

std::vector<Term> harvest_for(SupportKind kind, Term t) {
  return kind == SupportKind::Exp ? maximal_exp_arguments(t) : maximal_log_subterms(t);
}

// Term whose maximal subterms a support element must cover: the element
// itself on the exp side, exp(c) = argument of c on the log side.
Term closure_target(SupportKind kind, Term element) {
  return kind == SupportKind::Exp ? element : element->arg();
}

}  // namespace

std::vector<Term> maximal_exp_arguments(Term t) {
  return harvest(t, Kind::Exp, [](Term u) { return u->arg(); });
}

std::vector<Term> maximal_log_subterms(Term t) {
  return harvest(t, Kind::Log, [](Term u) { return u; });
}

SupportSet exp_support(Term x) {
  auto level = e_level(x);
  if (!level) throw SupportError("undefined e-level: " + print(x) + " contains a logarithm");
  if (*level == 0) throw SupportError("exp support needs e-level >= 1, got 0 for " + print(x));
  SupportSet s;
  s.kind = SupportKind::Exp;
  s.subject = x;
  s.level_witness = *level - 1;
  std::vector<Term> frontier = maximal_exp_arguments(x);
  std::vector<Term> all;
  std::unordered_set<Term> seen;
  s.certificate.push_back({x, frontier});
  while (!frontier.empty()) {
    std::vector<Term> next;
    for (Term a : frontier) {
      if (!seen.insert(a).second) continue;
      all.push_back(a);
      auto below = maximal_exp_arguments(a);
      next.insert(next.end(), below.begin(), below.end());
    }
    frontier = term_set(std::move(next));
  }
  s.elements = term_set(std::move(all));
  for (Term a : s.elements) s.certificate.push_back({a, maximal_exp_arguments(a)});
  return s;
}

SupportSet log_support(Term x) {
  auto level = l_level(x);
  if (!level) throw SupportError("undefined l-level: " + print(x) + " contains an exponential");
  if (*level == 0) throw SupportError("log support needs l-level >= 1, got 0 for " + print(x));
  SupportSet s;
  s.kind = SupportKind::Log;
  s.subject = x;
  s.level_witness = *level - 1;
  std::vector<Term> all;
  for (Term u : subterms(x))
    if (u->kind() == Kind::Log) all.push_back(u);
  s.elements = term_set(std::move(all));
  s.certificate.push_back({x, maximal_log_subterms(x)});
  for (Term c : s.elements) s.certificate.push_back({c, maximal_log_subterms(c->arg())});
  return s;
}

ClosureReport verify_closure(const SupportSet& s) {
  ClosureReport r;
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.diagnostics.push_back(std::move(msg));
  };
  if (!s.subject) {
    fail("missing subject");
    return r;
  }
  const bool exp_side = s.kind == SupportKind::Exp;
  const char* what = exp_side ? "Exp-argument" : "Log-subterm";
  const char* set_name = exp_side ? "A" : "C";
  if (!is_normal(s.subject)) fail("subject " + print(s.subject) + " is not in normal form");
  auto level = exp_side ? e_level(s.subject) : l_level(s.subject);
  if (!level) {
    fail(std::string("subject has no ") + (exp_side ? "e-level" : "l-level"));
    return r;
  }
  if (*level == 0) {
    if (!s.elements.empty()) fail("algebraic subject with a nonempty support");
    return r;
  }
  if (*level > s.level_witness + 1)
    fail("subject level " + std::to_string(*level) + " exceeds witness " + std::to_string(s.level_witness) + " + 1");

  std::vector<Term> sorted = s.elements;
  if (term_set(sorted) != s.elements) fail(std::string(set_name) + " is not sorted and duplicate-free");
  sort_terms(sorted);

  for (Term a : s.elements) {
    if (!is_normal(a)) fail("element " + print(a) + " is not in normal form");
    if (!exp_side && a->kind() != Kind::Log) {
      fail("element " + print(a) + " of C is not a logarithm");
      continue;
    }
    Term below = closure_target(s.kind, a);
    auto l = exp_side ? e_level(below) : l_level(below);
    if (!l || *l > s.level_witness)
      fail((exp_side ? "element " : "exp of element ") + print(a) + " is not at level " +
           std::to_string(s.level_witness));
  }

  auto check_cover = [&](Term source) {
    for (Term c : harvest_for(s.kind, source))
      if (!contains(sorted, c)) fail(std::string(what) + " " + print(c) + " not in " + set_name);
  };
  check_cover(s.subject);
  for (Term a : s.elements)
    if (exp_side || a->kind() == Kind::Log) check_cover(closure_target(s.kind, a));

  // The recorded certificate must agree with a fresh walk.
  if (s.certificate.size() != s.elements.size() + 1) {
    fail("certificate has " + std::to_string(s.certificate.size()) + " entries, expected " +
         std::to_string(s.elements.size() + 1));
  } else {
    for (std::size_t k = 0; k < s.certificate.size(); ++k) {
      const ClosureFact& f = s.certificate[k];
      Term expected_term = k == 0 ? s.subject : s.elements[k - 1];
      if (f.term != expected_term) {
        fail("certificate entry " + std::to_string(k) + " names " + print(f.term));
        continue;
      }
      Term source = k == 0 ? s.subject : closure_target(s.kind, f.term);
      if (!exp_side && k > 0 && f.term->kind() != Kind::Log) continue;
      if (f.consumed != harvest_for(s.kind, source))
        fail("certificate entry for " + print(f.term) + " does not match its subterms");
    }
  }
  return r;
}

nlohmann::json to_json(const SupportSet& s) {
  auto terms = [](const std::vector<Term>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Term t : v) a.push_back(print(t));
    return a;
  };
  nlohmann::json cert = nlohmann::json::array();
  for (const auto& f : s.certificate) cert.push_back({{"term", print(f.term)}, {"consumed", terms(f.consumed)}});
  return {{"kind", s.kind == SupportKind::Exp ? "exp" : "log"},
          {"subject", print(s.subject)},
          {"elements", terms(s.elements)},
          {"level_witness", s.level_witness},
          {"certificate", cert}};
}

SupportSet support_from_json(const nlohmann::json& j) {
  try {
    SupportSet s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "exp" && kind != "log") throw SupportError("unknown support kind " + kind);
    s.kind = kind == "exp" ? SupportKind::Exp : SupportKind::Log;
    s.subject = parse(j.at("subject").get<std::string>());
    for (const auto& e : j.at("elements")) s.elements.push_back(parse(e.get<std::string>()));
    s.level_witness = j.at("level_witness").get<unsigned>();
    for (const auto& f : j.at("certificate")) {
      ClosureFact c{parse(f.at("term").get<std::string>()), {}};
      for (const auto& e : f.at("consumed")) c.consumed.push_back(parse(e.get<std::string>()));
      s.certificate.push_back(std::move(c));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SupportError(std::string("malformed support set: ") + e.what());
  }
}

}  // namespace schanuel
