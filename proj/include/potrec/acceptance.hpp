#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace potrec {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured quantities, "key=value" pairs separated by spaces.
  std::string measured;
  /// The tolerance the measurement is held to.
  std::string target;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  /// Criterion ids to run; empty runs all fourteen.
  std::vector<int> only;
  /// Called after each criterion, e.g. to stream the table.
  std::function<void(const CriterionResult&)> on_result;
};

constexpr int kCriterionCount = 14;

/// Runs one criterion at its fixed desk-scale setup. Library errors inside a
/// criterion become a failed result carrying the message.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "[PASS] 01 herglotz-decay  slope2=-0.510 ... | target ... (1.2s)".
std::string format_result(const CriterionResult& r);

}  // namespace potrec
