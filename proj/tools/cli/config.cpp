#include "cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace optcbf::cli {

namespace {

constexpr std::array<const char*, 15> kKeys = {
    "p0",  "v0", "v_star", "gamma",    "u_max",  "c1",         "cA",
    "cB",  "dt", "T_end",  "lead_kind", "delta0", "delta_dot0", "delta_ddot",
    "controller"};

struct Entry {
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const Entry& e) {
  double out = 0.0;
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("cannot parse '" + e.value + "' as a number for " + key,
                      e.line);
  }
  return out;
}

std::vector<std::string> required_keys(Command command,
                                       const std::map<std::string, Entry>& kv,
                                       const ConfigOverrides& overrides) {
  std::vector<std::string> keys{"gamma", "u_max", "lead_kind", "delta0",
                                "delta_dot0"};
  const auto lead = kv.find("lead_kind");
  if (lead != kv.end() && lead->second.value != "constant-speed") {
    keys.push_back("delta_ddot");
  }
  switch (command) {
    case Command::kSimulate: {
      keys.insert(keys.end(), {"p0", "v0", "v_star"});
      std::string controller;
      if (overrides.controller) {
        controller = to_string(*overrides.controller);
      } else if (const auto c = kv.find("controller"); c != kv.end()) {
        controller = c->second.value;
      } else {
        keys.push_back("controller");
      }
      if (controller == "optimal") keys.push_back("c1");
      if (controller == "linear") keys.insert(keys.end(), {"cA", "cB"});
      break;
    }
    case Command::kCompare:
      keys.insert(keys.end(), {"p0", "v0", "v_star", "c1", "cA", "cB"});
      break;
    case Command::kSafeSet:
    case Command::kVerify:
      break;
  }
  return keys;
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "simulate") return Command::kSimulate;
  if (name == "compare") return Command::kCompare;
  if (name == "safeset") return Command::kSafeSet;
  if (name == "verify") return Command::kVerify;
  return std::nullopt;
}

ScenarioConfig parse_config(std::istream& in, Command command,
                            const std::string& source,
                            const ConfigOverrides& overrides) {
  std::map<std::string, Entry> kv;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value in " + source, line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
    if (kv.count(key) != 0) {
      throw ConfigError("duplicate key '" + key + "' (first on line " +
                            std::to_string(kv[key].line) + ")",
                        line_no);
    }
    if (value.empty()) throw ConfigError("empty value for " + key, line_no);
    kv.emplace(key, Entry{value, line_no});
  }

  for (const std::string& key : required_keys(command, kv, overrides)) {
    if (kv.count(key) == 0) {
      throw ConfigError("missing required key '" + key + "' in " + source);
    }
  }

  ScenarioConfig cfg;
  const auto number = [&](const char* key, double& field) {
    const auto it = kv.find(key);
    if (it != kv.end()) field = parse_number(key, it->second);
  };
  number("p0", cfg.p0);
  number("v0", cfg.v0);
  number("v_star", cfg.v_star);
  number("gamma", cfg.gamma);
  number("u_max", cfg.u_max);
  number("c1", cfg.c1);
  number("cA", cfg.cA);
  number("cB", cfg.cB);
  number("dt", cfg.dt);
  number("T_end", cfg.T_end);
  number("delta0", cfg.lead.delta0);
  number("delta_dot0", cfg.lead.delta_dot0);
  number("delta_ddot", cfg.lead.delta_ddot);

  if (const auto it = kv.find("lead_kind"); it != kv.end()) {
    const auto kind = parse_lead_model_kind(it->second.value);
    if (!kind || *kind == LeadModelKind::kTabulated) {
      throw ConfigError("lead_kind must be constant-speed, "
                        "constant-acceleration or worst-case-braking",
                        it->second.line);
    }
    cfg.lead.kind = *kind;
  }
  if (const auto it = kv.find("controller"); it != kv.end()) {
    const auto kind = parse_controller_kind(it->second.value);
    if (!kind) {
      throw ConfigError("controller must be optimal, linear or none",
                        it->second.line);
    }
    cfg.controller = *kind;
  }

  if (overrides.controller) cfg.controller = *overrides.controller;
  if (overrides.dt) cfg.dt = *overrides.dt;

  const auto positive = [&](const char* key, double value) {
    if (value > 0.0) return;
    const auto it = kv.find(key);
    throw ConfigError(std::string(key) + " must be positive",
                      it != kv.end() ? it->second.line : 0);
  };
  positive("gamma", cfg.gamma);
  positive("u_max", cfg.u_max);
  positive("dt", cfg.dt);
  positive("T_end", cfg.T_end);
  positive("c1", cfg.c1);
  positive("cA", cfg.cA);
  positive("cB", cfg.cB);

  try {
    cfg.validate();
  } catch (const ParameterError& err) {
    throw ConfigError(std::string(err.what()) + " in " + source);
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path, Command command,
                           const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, command, path, overrides);
}

std::string format_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  char buf[64];
  const auto put = [&](const char* key, double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    os << key << '=' << buf << '\n';
  };
  put("p0", cfg.p0);
  put("v0", cfg.v0);
  put("v_star", cfg.v_star);
  put("gamma", cfg.gamma);
  put("u_max", cfg.u_max);
  put("c1", cfg.c1);
  put("cA", cfg.cA);
  put("cB", cfg.cB);
  put("dt", cfg.dt);
  put("T_end", cfg.T_end);
  os << "lead_kind=" << to_string(cfg.lead.kind) << '\n';
  put("delta0", cfg.lead.delta0);
  put("delta_dot0", cfg.lead.delta_dot0);
  put("delta_ddot", cfg.lead.delta_ddot);
  os << "controller=" << to_string(cfg.controller) << '\n';
  return os.str();
}

}  // namespace optcbf::cli
