#ifndef FPL_RUN_HPP_
#define FPL_RUN_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpl/config.hpp"

namespace fpl {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitRuntime = 4,
};

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json manifest;  // on failure: the error document
  std::vector<std::filesystem::path> files;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"solve-state", "solve-rocp", "solve-ocp", "sweep",
                                                 "check-invariants"};
  return names;
}

/// Runs one subcommand, writing manifest.json and CSVs under
/// cfg.output.directory. Never throws: failures become an error document
/// (also written as error.json) and a nonzero exit code.
RunOutcome run(const std::string& subcommand, const RunConfig& cfg);

/// Machine-readable description of an exception.
nlohmann::json error_document(const std::exception& e);
int exit_code_for(const std::exception& e);

std::string library_version();
std::string eigen_version();

}  // namespace fpl

#endif  // FPL_RUN_HPP_
