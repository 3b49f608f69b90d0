#ifndef QSWELD_TOOLS_CLI_HPP
#define QSWELD_TOOLS_CLI_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace qsweld::cli {

using Json = nlohmann::json;

enum Exit : int { kOk = 0, kToleranceFailure = 1, kInvalidConfig = 2, kSolverError = 3 };

/// Raised for anything the user can fix in the config; maps to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Logger {
 public:
  Logger(bool quiet, bool json) : quiet_(quiet), json_(json) {}
  void info(const std::string& msg) const;
  void error(const std::string& msg) const;

 private:
  void emit(const char* level, const std::string& msg) const;
  bool quiet_;
  bool json_;
};

struct Context {
  Json config;           // effective config after defaults, file and --set overrides
  std::string base_dir;  // directory relative paths are resolved against
  std::string output_dir;
  const Logger* log = nullptr;
};

/// What a command hands back: results for the manifest, hashes of the
/// inputs it read, the tolerance checks and any data files it wrote.
struct Outcome {
  Json results = Json::object();
  Json inputs = Json::object();
  Json checks = Json::array();
  Json files = Json::array();

  void check(const std::string& name, double value, double tolerance, bool below = true);
  [[nodiscard]] bool pass() const;
};

/// Applies "a.b.c=value"; value is parsed as JSON when possible, otherwise
/// taken as a string.
void apply_override(Json& config, const std::string& assignment);
Json default_config(const std::string& command);
const std::vector<std::string>& commands();

Outcome run_command(const std::string& command, const Context& ctx);

/// Full CLI entry point (argv[0] is the program name).
int run(int argc, const char* const* argv);

}  // namespace qsweld::cli

#endif  // QSWELD_TOOLS_CLI_HPP
