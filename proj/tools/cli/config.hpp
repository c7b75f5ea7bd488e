#pragma once

#include <istream>
#include <optional>
#include <string>

#include "optcbf/error.hpp"
#include "optcbf/sim.hpp"

namespace optcbf::cli {

enum class Command { kSimulate, kCompare, kSafeSet, kVerify };

std::optional<Command> parse_command(const std::string& name);

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<ControllerKind> controller;
  std::optional<double> dt;
};

// Parses key=value scenario text. `source` only labels error messages.
// Required keys depend on `command`; dt and T_end default to 1e-3 and 30.
ScenarioConfig parse_config(std::istream& in, Command command,
                            const std::string& source = "<config>",
                            const ConfigOverrides& overrides = {});

ScenarioConfig load_config(const std::string& path,
                           Command command = Command::kSimulate,
                           const ConfigOverrides& overrides = {});

// Emits every key so that parse_config reproduces `cfg` exactly.
std::string format_config(const ScenarioConfig& cfg);

}  // namespace optcbf::cli
