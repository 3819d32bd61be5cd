#include <fstream>

#include "command.hpp"

namespace signet::app {

Run::Run(std::string command, json config, int workers, std::ostream& log)
    : log_(log), start_(std::chrono::steady_clock::now()) {
  manifest_.command = std::move(command);
  manifest_.config = std::move(config);
  manifest_.workers = workers;
}

bool Run::has(const std::string& key) const {
  const auto it = manifest_.config.find(key);
  return it != manifest_.config.end() && !it->is_null();
}

fs::path Run::track(const fs::path& path) {
  const auto abs = fs::absolute(path).lexically_normal();
  if (!fs::is_regular_file(abs)) throw DataError(fmt::format("cannot read {}", path.string()));
  manifest_.inputs.push_back({abs.string(), sha256_file(abs)});
  input_paths_.push_back(abs);
  return abs;
}

fs::path Run::input(const std::string& key) {
  if (!has(key)) throw ConfigError(fmt::format("missing required input '{}'", key));
  const auto abs = track(get<std::string>(key));
  manifest_.config[key] = abs.string();
  return abs;
}

std::optional<fs::path> Run::optional_input(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return input(key);
}

std::vector<fs::path> Run::optional_inputs(const std::string& key) {
  std::vector<fs::path> out;
  if (!has(key)) return out;
  json resolved = json::array();
  for (const auto& p : get<std::vector<std::string>>(key)) {
    out.push_back(track(p));
    resolved.push_back(out.back().string());
  }
  manifest_.config[key] = resolved;
  return out;
}

std::vector<fs::path> Run::inputs(const std::string& key) {
  auto out = optional_inputs(key);
  if (out.empty()) throw ConfigError(fmt::format("at least one '{}' file is required", key));
  return out;
}

fs::path Run::out_dir() {
  if (!out_) {
    if (!has("out")) throw ConfigError("missing output directory (--out)");
    out_ = fs::absolute(get<std::string>("out")).lexically_normal();
    manifest_.config["out"] = out_->string();
    fs::create_directories(*out_);
  }
  return *out_;
}

void Run::write(const std::string& relative, const std::function<void(std::ostream&)>& body) {
  const auto path = out_dir() / relative;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  body(out);
  out.close();
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  manifest_.outputs.push_back({relative, ""});
}

void Run::finish() {
  for (std::size_t k = 0; k < input_paths_.size(); ++k) {
    if (sha256_file(input_paths_[k]) != manifest_.inputs[k].sha256) {
      throw DataError(fmt::format("input {} changed during the run", input_paths_[k].string()));
    }
  }
  const auto dir = out_dir();
  for (auto& f : manifest_.outputs) f.sha256 = sha256_file(dir / f.path);
  manifest_.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_manifest(dir, manifest_);
}

}  // namespace signet::app
