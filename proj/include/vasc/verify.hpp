#pragma once

// Invariant battery behind `vasclab verify`. Every check runs; failures are
// itemised, never fatal.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vasc/config.hpp"

namespace vasc {

enum class CheckStatus { pass, fail, skip };
const char* to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
  double value = 0.0;  // the measured quantity compared against its tolerance
};

struct VerifyOptions {
  ExperimentConfig config{};
  /// Existing snapshot to validate in addition to the round-trip check.
  std::optional<std::string> snapshot_path;
  /// Directory for scratch files.
  std::string scratch_dir = ".";
  std::uint64_t seed = 0;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opts);
bool all_passed(const std::vector<CheckResult>& results);
/// One JSON object per line: name, status, value, detail.
void write_jsonl(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace vasc
