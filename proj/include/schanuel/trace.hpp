#pragma once

#include "schanuel/engine.hpp"
#include "schanuel/proofs.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace schanuel {

struct TraceConfig {
  long precision = 256;
  std::string height = "1000";
  long degcap = 64;
  /// Recorded verbatim; set it to a fixed value for reproducible output.
  std::string timestamp;
};

/// JSON-lines proof trace: one header object, then one step per line.
struct ProofTrace {
  nlohmann::json header;
  std::vector<nlohmann::json> steps;

  std::string text() const;
  /// Throws std::invalid_argument on malformed lines.
  static ProofTrace parse(const std::string& text);
};

/// Steps are the dependency cone of the results, renumbered 1..N in
/// derivation order; the last result is the last step.
ProofTrace make_trace(const KnowledgeBase& kb, const ProofOutcome& outcome, const TraceConfig& config);

struct TraceVerdict {
  bool valid = false;
  std::optional<long> failing_step;
  std::optional<std::size_t> line;  ///< 1-based, header is line 1
  std::string reason;
};

/// Replays every step against the rule registry. Independent of the
/// knowledge base that wrote the trace; registers the constants listed in
/// the header.
TraceVerdict check_trace(const std::string& text);

constexpr const char* kToolName = "schanuel-cert";
constexpr const char* kToolVersion = "1.0.0";

}  // namespace schanuel
