#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "qsweld/common.hpp"
#include "qsweld/io.hpp"

#ifndef QSWELD_VERSION
#define QSWELD_VERSION "unknown"
#endif

namespace qsweld::cli {

namespace fs = std::filesystem;

void Logger::emit(const char* level, const std::string& msg) const {
  if (json_) {
    std::cerr << Json{{"level", level}, {"msg", msg}}.dump() << '\n';
  } else {
    std::cerr << "qsweld: " << (std::string(level) == "error" ? "error: " : "") << msg << '\n';
  }
}

void Logger::info(const std::string& msg) const {
  if (!quiet_) emit("info", msg);
}

void Logger::error(const std::string& msg) const { emit("error", msg); }

void Outcome::check(const std::string& name, double value, double tolerance, bool below) {
  const bool ok = std::isfinite(value) && (below ? value < tolerance : value > tolerance);
  checks.push_back({{"name", name}, {"value", value}, {"tolerance", tolerance},
                    {"relation", below ? "<" : ">"}, {"pass", ok}});
}

bool Outcome::pass() const {
  for (const auto& c : checks)
    if (!c.at("pass").get<bool>()) return false;
  return true;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::exception&) {
    value = raw;
  }
  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in --set path '" + path + "'");
    if (!node->is_object()) *node = Json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

namespace {

void merge(Json& base, const Json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

bool is_config_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidGrid:
    case ErrorCode::RadiiOrder:
    case ErrorCode::NonMonotone:
    case ErrorCode::WrongDegree:
    case ErrorCode::OrientationMismatch:
    case ErrorCode::Io:
    case ErrorCode::MissingSample:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::RealValuedSelector:
      return true;
    default:
      return false;
  }
}

void write_manifest(const Context& ctx, const std::string& command, const Outcome* out,
                    const std::string& error_code, const std::string& error_msg, double wall) {
  Json m;
  m["command"] = command;
  m["version"] = QSWELD_VERSION;
  m["config"] = ctx.config;
  if (out) {
    m["inputs"] = out->inputs;
    m["results"] = out->results;
    m["checks"] = out->checks;
    m["files"] = out->files;
    m["pass"] = error_code.empty() && out->pass();
  } else {
    m["pass"] = false;
  }
  if (!error_code.empty()) m["error"] = {{"code", error_code}, {"message", error_msg}};
  m["timestamp"] = {{"utc", utc_now()}, {"wall_time_s", wall}};
  write_file((fs::path(ctx.output_dir) / "manifest.json").string(), canonical_json(m.dump()) + "\n");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"qsweld: quasisymmetric welding and sewing experiments"};
  std::string command, config_path, output;
  std::vector<std::string> sets;
  bool quiet = false, json_logs = false;
  app.add_option("command", command, "weld | sew | caps | motion | family | holotest | qs | modulus");
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--set", sets, "dotted-path override key=value (repeatable)");
  app.add_option("--output", output, "output directory (overrides output_dir)");
  app.add_flag("--quiet", quiet, "suppress progress messages");
  app.add_flag("--json-logs", json_logs, "log as JSON lines on stderr");
  app.set_version_flag("--version", QSWELD_VERSION);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }
  const Logger log(quiet, json_logs);

  Context ctx;
  ctx.log = &log;
  Json file_config = Json::object();
  try {
    ctx.base_dir = ".";
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw ConfigError("config file not found: " + config_path);
      file_config = Json::parse(read_file(config_path));
      if (!file_config.is_object()) throw ConfigError("config must be a JSON object");
      ctx.base_dir = fs::absolute(config_path).parent_path().string();
    }
    if (command.empty()) command = file_config.value("command", "");
    if (command.empty()) throw ConfigError("no command given");
    if (file_config.contains("command") && file_config["command"] != command)
      throw ConfigError("command '" + command + "' conflicts with config command " +
                        file_config["command"].dump());
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      throw ConfigError("unknown command '" + command + "'");
    ctx.config = default_config(command);
    merge(ctx.config, file_config);
    for (const std::string& s : sets) apply_override(ctx.config, s);
    ctx.config["command"] = command;
    if (!output.empty()) ctx.config["output_dir"] = output;
    ctx.output_dir = ctx.config.value("output_dir", "qsweld_out");
    fs::create_directories(ctx.output_dir);
  } catch (const ConfigError& e) {
    log.error(e.what());
    return kInvalidConfig;
  } catch (const Json::exception& e) {
    log.error(std::string("config: ") + e.what());
    return kInvalidConfig;
  } catch (const std::exception& e) {
    log.error(e.what());
    return kInvalidConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  log.info("running " + command + " -> " + ctx.output_dir);
  try {
    const Outcome out = run_command(command, ctx);
    write_manifest(ctx, command, &out, "", "", elapsed());
    if (!out.pass()) {
      for (const auto& c : out.checks)
        if (!c["pass"].get<bool>())
          log.error("tolerance check failed: " + c["name"].get<std::string>() + " = " +
                    format_double(c["value"].is_number() ? c["value"].get<double>() : NAN));
      return kToleranceFailure;
    }
    log.info("all checks passed");
    return kOk;
  } catch (const ConfigError& e) {
    log.error(e.what());
    return kInvalidConfig;
  } catch (const Json::exception& e) {
    log.error(std::string("config: ") + e.what());
    return kInvalidConfig;
  } catch (const Error& e) {
    log.error(e.what());
    if (is_config_error(e.code())) return kInvalidConfig;
    try {
      write_manifest(ctx, command, nullptr, std::string(to_string(e.code())), e.what(), elapsed());
    } catch (const std::exception&) {
    }
    return kSolverError;
  } catch (const std::exception& e) {
    log.error(std::string("internal error: ") + e.what());
    return kSolverError;
  }
}

}  // namespace qsweld::cli
