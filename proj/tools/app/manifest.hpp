#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace signet::app {

using nlohmann::json;

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  json config = json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<FileDigest> inputs;
  /// Paths relative to the output directory.
  std::vector<FileDigest> outputs;
  double duration_seconds = 0.0;
  int workers = 1;
  /// Command-specific facts (break schedule, trial counts, chain status).
  json details = json::object();

  json to_json() const;
  static RunManifest from_json(const json& j);
};

/// Writes `dir/manifest.json` through a temporary file and a rename.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace signet::app
