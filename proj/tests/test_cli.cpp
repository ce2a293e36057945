#include "doctest.h"

#include "schanuel/cli.hpp"
#include "schanuel/trace.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace schanuel;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "schanuel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("schanuel-test-" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("level") {
  Run r = run({"level", "exp(exp(1))"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "E-level: 2, L-level: none\n");
  CHECK(run({"level", "log(2)"}).out == "E-level: none, L-level: 1\n");
  CHECK(run({"level", "log(pi)"}).out == "E-level: none, L-level: 2\n");
  CHECK(run({"level", "sqrt2"}).out == "E-level: 0, L-level: 0\n");
}

TEST_CASE("support") {
  Run r = run({"support", "exp(exp(exp(1)))", "--kind", "exp"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("{1, exp(1), exp(exp(1))}") != std::string::npos);
  CHECK(r.out.find("closure: verified") != std::string::npos);
  r = run({"support", "log(log(pi))", "--kind", "log", "--json"});
  CHECK(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out).contains("elements"));
  CHECK(run({"support", "exp(log(2))", "--kind", "exp"}).code == kExitUnknown);
  CHECK(run({"support", "exp(1)", "--kind", "both"}).code == kExitUsage);
}

TEST_CASE("check-li") {
  Run r = run({"check-li", "log(2;0)", "log(3;0)", "log(6;0)"});
  CHECK(r.code == kExitCounterexample);
  CHECK(r.out.find("(1, 1, -1)") != std::string::npos);
  r = run({"check-li", "1", "log(-1;0)", "log(pi)"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("ConditionalOnSC") != std::string::npos);
}

TEST_CASE("trdeg") {
  Run r = run({"trdeg", "exp(1)", "exp(exp(1))", "exp(1)^2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "trdeg = 2 [ConditionalOnSC]\n");
  CHECK(run({"trdeg", "log(2)", "log(3)"}).code == kExitUnknown);
}

TEST_CASE("relate") {
  Run r = run({"relate", "log(2)", "log(3)", "log(6)", "--prec", "200"});
  CHECK(r.code == kExitCounterexample);
  CHECK(r.out.find("(1, 1, -1)") != std::string::npos);
  r = run({"relate", "1", "log(-1;0)", "log(pi)", "log(log(pi))", "--height", "100", "--prec", "400"});
  CHECK(r.code == kExitUnknown);
  CHECK(r.out.rfind("absent", 0) == 0);
  CHECK(run({"relate", "log(2)", "log(3)", "--prec", "20"}).code == kExitUsage);
}

TEST_CASE("environment supplies defaults") {
  setenv("SCHANUEL_PREC", "20", 1);
  CHECK(run({"relate", "log(2)", "log(3)"}).code == kExitUsage);
  CHECK(run({"relate", "log(2)", "log(3)", "--prec", "300"}).code == kExitUnknown);
  unsetenv("SCHANUEL_PREC");
}

TEST_CASE("prove writes a checkable trace") {
  const auto path = scratch("cor4.jsonl");
  Run r = run({"prove", "cor4", "--depth", "3", "-o", path.string(), "--timestamp", "t0"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("AlgebraicallyIndependent{exp(1), exp(exp(1)), exp(exp(exp(1)))} over Q [ConditionalOnSC]") !=
        std::string::npos);
  CHECK(check_trace(slurp(path)).valid);
  r = run({"check-trace", path.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "valid\n");

  // Same invocation, same bytes.
  const std::string first = slurp(path);
  run({"prove", "cor4", "--depth", "3", "-o", path.string(), "--timestamp", "t0"});
  CHECK(slurp(path) == first);

  // Corrupt the last line.
  std::string text = first;
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  std::ofstream(path) << text;
  r = run({"check-trace", path.string()});
  CHECK(r.code == kExitObligation);
  CHECK(r.out.rfind("invalid", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("prove variants") {
  Run r = run({"prove", "theorem", "--m", "1", "--n", "1"});
  CHECK(r.code == kExitOk);
  CHECK(check_trace(r.out).valid);
  CHECK(r.err.find("LinearlyDisjoint(E_1, L_1)") != std::string::npos);
  CHECK(run({"prove", "cor1"}).code == kExitOk);
  CHECK(run({"prove", "cor2"}).code == kExitOk);
  CHECK(check_trace(run({"prove", "cor3", "--depth", "2"}).out).valid);
  CHECK(run({"prove", "cor3"}).code == kExitUsage);
  CHECK(run({"prove", "cor4", "--depth", "0"}).code == kExitUsage);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"level"}).code == kExitUsage);
  CHECK(run({"level", "exp(("}).code == kExitUsage);
  CHECK(run({"check-trace", scratch("missing").string()}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("registry file") {
  const auto path = scratch("registry.txt");
  std::ofstream(path) << "# golden ratio\nphi : -1,-1,1 : 1.6,1.7,-0.1,0.1\n";
  Run r = run({"--registry", path.string(), "level", "exp(phi)"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "E-level: 1, L-level: none\n");
  std::ofstream(path) << "bad : 1,0,1 : 5,6,0,1\n";
  CHECK(run({"--registry", path.string(), "level", "1"}).code == kExitUsage);
  std::filesystem::remove(path);
}
