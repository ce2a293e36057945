#include "doctest.h"

#include "schanuel/trace.hpp"

#include <functional>

using namespace schanuel;
using nlohmann::json;

namespace {

struct Script {
  std::string name;
  std::function<ProofOutcome(KnowledgeBase&)> run;
};

std::vector<Script> scripts() {
  return {{"cor1", [](KnowledgeBase& kb) { return prove_cor1(kb); }},
          {"cor2", [](KnowledgeBase& kb) { return prove_cor2(kb); }},
          {"cor3", [](KnowledgeBase& kb) { return prove_cor3(kb, 2); }},
          {"cor4", [](KnowledgeBase& kb) { return prove_cor4(kb, 3); }},
          {"theorem 1,1", [](KnowledgeBase& kb) { return replay_theorem(kb, 1, 1); }},
          {"theorem 2,2", [](KnowledgeBase& kb) { return replay_theorem(kb, 2, 2); }}};
}

ProofTrace trace_of(const Script& s, const std::string& stamp = "2026-01-01T00:00:00Z") {
  KnowledgeBase kb;
  const ProofOutcome o = s.run(kb);
  TraceConfig cfg;
  cfg.timestamp = stamp;
  return make_trace(kb, o, cfg);
}

}  // namespace

TEST_CASE("parse inverts text") {
  for (const auto& s : scripts()) {
    const ProofTrace t = trace_of(s);
    const ProofTrace u = ProofTrace::parse(t.text());
    CHECK(u.header == t.header);
    CHECK(u.steps == t.steps);
    CHECK(u.text() == t.text());
  }
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(ProofTrace::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(ProofTrace::parse("not json\n"), std::invalid_argument);
  CHECK_THROWS_AS(ProofTrace::parse("{\"type\":\"step\",\"id\":1}\n"), std::invalid_argument);
  CHECK_FALSE(check_trace("").valid);
  CHECK_FALSE(check_trace("{\"type\":\"header\",\"tool\":\"other\"}\n").valid);
}

TEST_CASE("every emitted trace checks") {
  for (const auto& s : scripts()) {
    const ProofTrace t = trace_of(s);
    const TraceVerdict v = check_trace(t.text());
    CHECK_MESSAGE(v.valid, s.name << ": " << v.reason);
    CHECK(t.steps.back()["id"] == t.header["results"].back());
  }
}

TEST_CASE("deleting any step invalidates the trace") {
  for (const auto& s : scripts()) {
    const ProofTrace t = trace_of(s);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      ProofTrace u = t;
      u.steps.erase(u.steps.begin() + static_cast<long>(i));
      CHECK_MESSAGE(!check_trace(u.text()).valid, s.name << " without step " << i + 1);
    }
  }
}

TEST_CASE("dropping a premise is caught") {
  const ProofTrace t = trace_of(scripts()[4]);
  std::size_t tried = 0;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    // A closure step may cite more dependencies than it strictly needs.
    if (t.steps[i]["premises"].empty() || t.steps[i]["rule"] == "algebraic-closure") continue;
    ProofTrace u = t;
    u.steps[i]["premises"].erase(u.steps[i]["premises"].size() - 1);
    const TraceVerdict v = check_trace(u.text());
    CHECK_FALSE(v.valid);
    // Either the rule rejects the step, or the premise becomes an orphan.
    CHECK(v.failing_step.has_value());
    ++tried;
  }
  CHECK(tried > 10);
}

TEST_CASE("tampered steps are rejected") {
  const ProofTrace t = trace_of(scripts()[3]);
  const std::size_t last = t.steps.size() - 1;

  ProofTrace u = t;
  u.steps[last]["rule"] = "no-such-rule";
  TraceVerdict v = check_trace(u.text());
  CHECK_FALSE(v.valid);
  CHECK(v.failing_step == t.steps[last]["id"].get<long>());

  u = t;
  u.steps[0]["premises"].push_back(t.steps[last]["id"]);
  CHECK_FALSE(check_trace(u.text()).valid);

  u = t;
  u.steps[last]["conclusion"]["set"].push_back("exp(exp(exp(exp(1))))");
  CHECK_FALSE(check_trace(u.text()).valid);

  u = t;
  u.steps[last]["provenance"] = "Exact";
  v = check_trace(u.text());
  CHECK_FALSE(v.valid);
  CHECK(v.reason.find("provenance") != std::string::npos);

  u = t;
  u.header["results"] = json::array({1});
  CHECK_FALSE(check_trace(u.text()).valid);

  u = t;
  std::swap(u.steps[0], u.steps[1]);
  CHECK_FALSE(check_trace(u.text()).valid);
}

TEST_CASE("a heuristic step cannot be promoted") {
  KnowledgeBase kb;
  NumericConfig cfg;
  cfg.precision = 192;
  cfg.height = 50;
  auto h = numeric_independence(kb, {pi(), parse("log(2)")}, cfg);
  REQUIRE(h);
  const FactId li = kb.derive("li-from-ai", {*h}, stmt::qli({pi(), parse("log(2)")}));
  REQUIRE(kb.fact(li).provenance == Provenance::HeuristicNumeric);
  const ProofTrace t = make_trace(kb, {"custom", {li}}, {});
  REQUIRE(check_trace(t.text()).valid);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    ProofTrace u = t;
    u.steps[i]["provenance"] = "Exact";
    const TraceVerdict v = check_trace(u.text());
    CHECK_FALSE(v.valid);
    CHECK(v.failing_step == t.steps[i]["id"].get<long>());
  }
}

TEST_CASE("undischarged hypotheses cannot be results") {
  KnowledgeBase kb;
  const FactId a = kb.derive("assume", {}, stmt::witness({one()}, {iterated_exp(1)}, 1, 1));
  REQUIRE_FALSE(kb.fact(a).assumptions.empty());
  const ProofTrace t = make_trace(kb, {"custom", {a}}, {});
  CHECK_FALSE(check_trace(t.text()).valid);

  // The same hypothesis, cleared of its assumption list, still fails.
  ProofTrace u = t;
  u.steps[0]["assumptions"] = json::array();
  CHECK_FALSE(check_trace(u.text()).valid);
}

TEST_CASE("output is deterministic for a fixed timestamp") {
  for (const auto& s : scripts()) CHECK(trace_of(s).text() == trace_of(s).text());
  CHECK(trace_of(scripts()[0], "a").text() != trace_of(scripts()[0], "b").text());
}

TEST_CASE("header records configuration and axioms") {
  KnowledgeBase kb;
  const ProofOutcome o = prove_cor3(kb, 2);
  TraceConfig cfg;
  cfg.precision = 512;
  cfg.height = "10000";
  cfg.degcap = 16;
  const ProofTrace t = make_trace(kb, o, cfg);
  CHECK(t.header["tool"] == kToolName);
  CHECK(t.header["version"] == kToolVersion);
  CHECK(t.header["config"]["precision"] == 512);
  CHECK(t.header["config"]["height"] == "10000");
  CHECK(t.header["config"]["degcap"] == 16);
  CHECK(t.header["script"] == "cor3 depth=2");
  CHECK(t.header["axioms"].size() == 2);
  bool reduced = false;
  for (const auto& s : t.steps) reduced = reduced || s["rule"] == "reduce-linear-to-monomial";
  CHECK(reduced);
  CHECK(check_trace(ProofTrace::parse(t.text()).text()).valid);
}
