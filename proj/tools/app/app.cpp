#include "app.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "command.hpp"

namespace signet::app {

int default_workers() {
  if (const char* env = std::getenv("SIGNET_WORKERS")) {
    int v = 0;
    const std::string s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec == std::errc{} && r.ptr == s.data() + s.size() && v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

json load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config {}: {}", path, e.what()));
  }
  if (!j.is_object()) throw ConfigError(fmt::format("config {} must be a JSON object", path));
  // A previous run's manifest replays its resolved config.
  if (j.contains("command") && j.contains("config")) {
    if (j["command"] != command) {
      throw ConfigError(fmt::format("manifest {} is for '{}', not '{}'", path,
                                    j["command"].get<std::string>(), command));
    }
    return j["config"];
  }
  return j;
}

void merge(json& dst, const json& src) {
  for (const auto& [key, value] : src.items()) {
    if (!dst.contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
    dst[key] = value;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signed network inference from pairwise interaction counts", "signet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "signet 0.1.0");
  int workers = default_workers();
  app.add_option("--workers,-j", workers, "Worker threads (default: SIGNET_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);

  std::vector<CommandDef> defs{generate_command(), fit_command(), estimate_command(),
                               evaluate_command(), ingest_command()};
  std::vector<json> flags(defs.size(), json::object());
  std::vector<std::string> configs(defs.size());
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < defs.size(); ++k) {
    auto* sub = app.add_subcommand(defs[k].name, defs[k].help);
    sub->add_option("--config", configs[k], "JSON config, or a manifest.json to replay");
    defs[k].add_flags(*sub, flags[k]);
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  const auto k = static_cast<std::size_t>(
      std::find_if(subs.begin(), subs.end(), [](CLI::App* s) { return s->parsed(); }) -
      subs.begin());
  const auto& def = defs[k];
  const auto fail = [&](int code, const std::string& what) {
    err << "signet " << def.name << ": " << what << '\n';
    return code;
  };
  try {
    json cfg = def.defaults;
    if (!configs[k].empty()) merge(cfg, load_config(configs[k], def.name));
    merge(cfg, flags[k]);
    Run r(def.name, std::move(cfg), workers, out);
    return def.body(r);
  } catch (const ConfigError& e) {
    return fail(1, e.what());
  } catch (const json::exception& e) {
    return fail(1, e.what());
  } catch (const DataError& e) {
    return fail(2, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(2, e.what());
  } catch (const std::exception& e) {
    return fail(3, fmt::format("internal error: {}", e.what()));
  }
}

}  // namespace signet::app
