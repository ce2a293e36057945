#pragma once

#include "schanuel/term.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace schanuel {

enum class SupportKind { Exp, Log };

/// One checked closure requirement: the arguments harvested from `term`
/// (maximal Exp-arguments, or maximal Log-subterms).
struct ClosureFact {
  Term term;
  std::vector<Term> consumed;
};

struct SupportSet {
  SupportKind kind = SupportKind::Exp;
  Term subject = nullptr;
  std::vector<Term> elements;  ///< sorted under term_order
  unsigned level_witness = 0;  ///< elements live at this level (n - 1)
  /// First entry is the subject, then one entry per element.
  std::vector<ClosureFact> certificate;
};

class SupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClosureReport {
  bool ok = true;
  std::vector<std::string> diagnostics;
  explicit operator bool() const { return ok; }
};

/// Arguments of Exp nodes not nested inside another Exp, sorted.
std::vector<Term> maximal_exp_arguments(Term t);
/// Log nodes not nested inside another Log, sorted.
std::vector<Term> maximal_log_subterms(Term t);

SupportSet exp_support(Term x);
SupportSet log_support(Term x);
ClosureReport verify_closure(const SupportSet& s);

nlohmann::json to_json(const SupportSet& s);
/// Throws SupportError or ParseError on malformed input.
SupportSet support_from_json(const nlohmann::json& j);

}  // namespace schanuel
