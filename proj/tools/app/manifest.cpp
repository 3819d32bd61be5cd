#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "signet/types.hpp"

namespace signet::app {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot read {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", md[k]);
  return hex;
}

namespace {

json digests_json(const std::vector<FileDigest>& files) {
  json out = json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

std::vector<FileDigest> digests_from(const json& j) {
  std::vector<FileDigest> out;
  for (const auto& f : j) out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"command", command},
          {"config", config},
          {"seeds", seeds},
          {"inputs", digests_json(inputs)},
          {"outputs", digests_json(outputs)},
          {"duration_seconds", duration_seconds},
          {"workers", workers},
          {"details", details}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
  m.inputs = digests_from(j.value("inputs", json::array()));
  m.outputs = digests_from(j.value("outputs", json::array()));
  m.duration_seconds = j.value("duration_seconds", 0.0);
  m.workers = j.value("workers", 1);
  m.details = j.value("details", json::object());
  return m;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  const auto tmp = dir / ".manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError(fmt::format("cannot write {}", tmp.string()));
    out << manifest.to_json().dump(2) << '\n';
    if (!out) throw DataError(fmt::format("cannot write {}", tmp.string()));
  }
  std::filesystem::rename(tmp, dir / "manifest.json");
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot read {}", path.string()));
  try {
    return RunManifest::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace signet::app
