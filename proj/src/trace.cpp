#include "schanuel/trace.hpp"

#include "schanuel/algebraic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace schanuel {

using nlohmann::json;

namespace {

const std::vector<std::string> kAxioms{"schanuel-conjecture", "lang-4.12"};

}  // namespace

std::string ProofTrace::text() const {
  std::string out = header.dump() + "\n";
  for (const auto& s : steps) out += s.dump() + "\n";
  return out;
}

ProofTrace ProofTrace::parse(const std::string& text) {
  ProofTrace t;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw std::invalid_argument("line " + std::to_string(lineno) + ": not a JSON object");
    const std::string type = j.value("type", "");
    if (type == "header") {
      if (!t.header.is_null()) throw std::invalid_argument("line " + std::to_string(lineno) + ": second header");
      t.header = std::move(j);
    } else if (type == "step") {
      if (t.header.is_null()) throw std::invalid_argument("line " + std::to_string(lineno) + ": step before header");
      t.steps.push_back(std::move(j));
    } else {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown record type");
    }
  }
  if (t.header.is_null()) throw std::invalid_argument("missing header");
  return t;
}

ProofTrace make_trace(const KnowledgeBase& kb, const ProofOutcome& outcome, const TraceConfig& config) {
  if (outcome.results.empty()) throw std::invalid_argument("nothing to trace");
  std::vector<FactId> cone = kb.cone(outcome.results);
  // The final claim closes the trace.
  const FactId last = outcome.results.back();
  cone.erase(std::remove(cone.begin(), cone.end(), last), cone.end());
  cone.push_back(last);
  std::map<FactId, long> number;
  for (std::size_t i = 0; i < cone.size(); ++i) number[cone[i]] = static_cast<long>(i + 1);

  ProofTrace t;
  json registry = json::array();
  for (const auto& [name, value] : user_registry())
    registry.push_back(name + " : " + value.min_poly().key() + " : " + canonical_box(value.id()).to_string());
  json results = json::array();
  for (FactId r : outcome.results) results.push_back(number.at(r));
  t.header = {{"type", "header"},
              {"tool", kToolName},
              {"version", kToolVersion},
              {"config", {{"precision", config.precision}, {"height", config.height}, {"degcap", config.degcap}}},
              {"axioms", kAxioms},
              {"script", outcome.script},
              {"results", results},
              {"registry", registry},
              {"timestamp", config.timestamp}};
  for (FactId id : cone) {
    const Fact f = kb.fact(id);
    json premises = json::array(), assumptions = json::array();
    for (FactId p : f.premises) premises.push_back(number.at(p));
    std::vector<long> open;
    for (FactId a : f.assumptions) open.push_back(number.at(a));
    std::sort(open.begin(), open.end());
    for (long a : open) assumptions.push_back(a);
    t.steps.push_back({{"type", "step"},
                       {"id", number.at(id)},
                       {"rule", f.rule},
                       {"premises", premises},
                       {"conclusion", to_json(f.statement)},
                       {"anchor", f.anchor},
                       {"provenance", provenance_name(f.provenance)},
                       {"assumptions", assumptions},
                       {"data", f.data}});
  }
  return t;
}

TraceVerdict check_trace(const std::string& text) {
  TraceVerdict v;
  auto fail = [&](std::optional<long> step, std::optional<std::size_t> line, std::string why) {
    v.valid = false;
    v.failing_step = step;
    v.line = line;
    v.reason = std::move(why);
    return v;
  };

  ProofTrace t;
  try {
    t = ProofTrace::parse(text);
  } catch (const std::exception& e) {
    return fail(std::nullopt, std::nullopt, e.what());
  }
  const json& h = t.header;
  if (h.value("tool", "") != kToolName) return fail(std::nullopt, 1, "unknown tool");
  if (!h.contains("axioms") || h["axioms"] != json(kAxioms)) return fail(std::nullopt, 1, "unexpected axiom list");
  if (!h.contains("results") || !h["results"].is_array() || h["results"].empty())
    return fail(std::nullopt, 1, "header lists no results");
  try {
    std::string reg;
    for (const auto& line : h.value("registry", json::array())) reg += line.get<std::string>() + "\n";
    load_registry_text(reg);
  } catch (const std::exception& e) {
    return fail(std::nullopt, 1, std::string("registry: ") + e.what());
  }

  // Facts rebuilt from the trace, keyed by step id.
  std::map<long, Fact> facts;
  std::set<long> referenced;
  long previous = 0;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const json& s = t.steps[i];
    const std::size_t line = i + 2;
    long id = 0;
    try {
      id = s.at("id").get<long>();
      if (id <= previous) return fail(id, line, "step ids must increase");
      previous = id;
      const std::string rule_name = s.at("rule").get<std::string>();
      const Rule* rule = find_rule(rule_name);
      if (!rule) return fail(id, line, "unknown rule " + rule_name);

      Fact f;
      f.id = static_cast<FactId>(id);
      f.rule = rule_name;
      f.anchor = s.at("anchor").get<std::string>();
      f.data = s.at("data");
      f.statement = statement_from_json(s.at("conclusion"));
      if (to_json(f.statement) != s.at("conclusion")) return fail(id, line, "conclusion is not in canonical form");

      std::vector<const Fact*> premise_facts;
      std::vector<const Statement*> premise_statements;
      for (const auto& p : s.at("premises")) {
        const long pid = p.get<long>();
        auto it = facts.find(pid);
        if (it == facts.end()) return fail(id, line, "premise " + std::to_string(pid) + " is not an earlier step");
        premise_facts.push_back(&it->second);
        premise_statements.push_back(&it->second.statement);
        f.premises.push_back(static_cast<FactId>(pid));
        referenced.insert(pid);
      }
      const RuleContext ctx{f.statement, premise_statements, f.data, f.anchor};
      if (std::string err = rule->check(ctx); !err.empty()) return fail(id, line, rule_name + ": " + err);

      const DerivedTags tags = derived_tags(*rule, f.id, premise_facts);
      auto recorded = parse_provenance(s.at("provenance").get<std::string>());
      if (!recorded) return fail(id, line, "unknown provenance");
      if (*recorded != tags.provenance)
        return fail(id, line,
                    std::string("provenance must be ") + provenance_name(tags.provenance) + ", trace claims " +
                        provenance_name(*recorded));
      std::vector<FactId> open;
      for (const auto& a : s.at("assumptions")) open.push_back(a.get<FactId>());
      if (open != tags.assumptions) return fail(id, line, "open assumptions do not match the premises");
      f.provenance = tags.provenance;
      f.assumptions = tags.assumptions;
      facts.emplace(id, std::move(f));
    } catch (const ObligationError& e) {
      return fail(id, line, e.what());
    } catch (const std::exception& e) {
      return fail(id ? std::optional<long>(id) : std::nullopt, line, std::string("malformed step: ") + e.what());
    }
  }
  if (t.steps.empty()) return fail(std::nullopt, std::nullopt, "no steps");

  std::set<long> results;
  for (const auto& r : h["results"]) {
    if (!r.is_number_integer()) return fail(std::nullopt, 1, "result ids must be integers");
    const long id = r.get<long>();
    auto it = facts.find(id);
    if (it == facts.end()) return fail(std::nullopt, 1, "result " + std::to_string(id) + " is not a step");
    if (!it->second.assumptions.empty())
      return fail(id, std::nullopt, "result depends on an undischarged hypothesis");
    results.insert(id);
  }
  if (h["results"].back().get<long>() != previous) return fail(previous, t.steps.size() + 1, "final step is not the final result");
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const long id = t.steps[i]["id"].get<long>();
    if (!referenced.count(id) && !results.count(id)) return fail(id, i + 2, "step is never used");
  }
  v.valid = true;
  return v;
}

}  // namespace schanuel
