#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace potrec {

/// Exit statuses of the command-line tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitUnknownCommand = 1,
  kExitValidation = 2,
  kExitDivergence = 3,
  /// verify-estimates ran but at least one criterion failed.
  kExitCriteriaFailed = 4,
};

const std::vector<std::string>& command_names();
bool is_command(const std::string& name);

struct CommandRequest {
  std::string command;
  std::string config_path;
  /// Flag overrides applied on top of the config, keyed (section, key).
  std::map<std::pair<std::string, std::string>, std::string> overrides;
  /// verify-estimates only: criterion ids to run (empty = all).
  std::vector<int> only;
};

/// Loads the config, runs the command and writes its artifacts into the
/// configured output directory. Artifacts are assembled in memory first and
/// only written once the whole command succeeded, so a failing run leaves no
/// partial outputs behind. Diagnostics go to `err`, summaries to `out`.
int run_command(const CommandRequest& request, std::ostream& out, std::ostream& err);

/// Fixed-width number rendering used in every CSV ("%.12e").
std::string csv_number(double x);

}  // namespace potrec
