#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "manifest.hpp"
#include "signet/types.hpp"

namespace signet::app {

namespace fs = std::filesystem;

/// One command invocation: resolved config, tracked inputs and outputs.
class Run {
 public:
  Run(std::string command, json config, int workers, std::ostream& log);

  const json& config() const { return manifest_.config; }
  int workers() const { return manifest_.workers; }
  std::ostream& log() { return log_; }
  json& details() { return manifest_.details; }
  void add_seed(std::uint64_t seed) { manifest_.seeds.push_back(seed); }

  bool has(const std::string& key) const;

  template <class T>
  T get(const std::string& key) const {
    try {
      return manifest_.config.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("config value '{}' is missing or has the wrong type", key));
    }
  }

  template <class T>
  std::optional<T> optional(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get<T>(key);
  }

  /// Input file named by a config key; stored back as an absolute path and digested.
  fs::path input(const std::string& key);
  std::optional<fs::path> optional_input(const std::string& key);
  /// Input files from a list-valued key; throws ConfigError when the list is empty.
  std::vector<fs::path> inputs(const std::string& key);
  std::vector<fs::path> optional_inputs(const std::string& key);

  /// Writes `relative` under the output directory and records it.
  void write(const std::string& relative, const std::function<void(std::ostream&)>& body);

  /// Checks inputs are unchanged, digests outputs and writes the manifest.
  void finish();

 private:
  fs::path out_dir();
  fs::path track(const fs::path& path);

  RunManifest manifest_;
  std::ostream& log_;
  std::optional<fs::path> out_;
  std::vector<fs::path> input_paths_;
  std::chrono::steady_clock::time_point start_;
};

struct CommandDef {
  std::string name;
  std::string help;
  json defaults;
  std::function<void(CLI::App&, json&)> add_flags;
  std::function<int(Run&)> body;
};

CommandDef generate_command();
CommandDef fit_command();
CommandDef estimate_command();
CommandDef evaluate_command();
CommandDef ingest_command();

template <class T>
CLI::Option* option(CLI::App& app, json& flags, const std::string& name, const std::string& key,
                    const std::string& help) {
  return app.add_option_function<T>(
      name, [&flags, key](const T& v) { flags[key] = v; }, help);
}

inline CLI::Option* toggle(CLI::App& app, json& flags, const std::string& name,
                           const std::string& key, bool value, const std::string& help) {
  return app.add_flag_function(
      name, [&flags, key, value](std::int64_t) { flags[key] = value; }, help);
}

inline void out_option(CLI::App& app, json& flags) {
  option<std::string>(app, flags, "--out,-o", "out", "Output directory");
}

inline void seed_option(CLI::App& app, json& flags) {
  option<std::uint64_t>(app, flags, "--seed", "seed", "Random seed");
}

}  // namespace signet::app
