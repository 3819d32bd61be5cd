#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "app.hpp"
#include "manifest.hpp"
#include "signet/io.hpp"

namespace fs = std::filesystem;
using signet::app::json;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("SIGNET_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "signet_cli_tests";
  const auto dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = signet::app::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> output_digests(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& f : signet::app::read_manifest(dir / "manifest.json").outputs) out[f.path] = f.sha256;
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("generate writes a bundle and manifest") {
  const auto dir = scratch("generate");
  const auto a = dir / "a", b = dir / "b";
  REQUIRE(cli({"generate", "--out", a.string(), "--seed", "5"}).code == 0);
  REQUIRE(cli({"generate", "--out", b.string(), "--seed", "5"}).code == 0);
  const auto obs = signet::read_observation_file(a / "observations.txt");
  CHECK(obs.n() == 64);
  CHECK(obs[0].trials() == 50);
  const auto m = signet::app::read_manifest(a / "manifest.json");
  CHECK(m.command == "generate");
  CHECK(m.seeds == std::vector<std::uint64_t>{5});
  CHECK(m.outputs.size() == 4);
  CHECK(m.config["edge_density"] == 0.4);
  CHECK(output_digests(a) == output_digests(b));
  CHECK(signet::app::sha256_file(a / "network.txt") == m.outputs[1].sha256);

  const auto c = dir / "c";
  CHECK(cli({"generate", "--out", c.string(), "--seed", "6"}).code == 0);
  CHECK(output_digests(a) != output_digests(c));
}

TEST_CASE("usage and config errors exit with 1") {
  const auto dir = scratch("errors");
  const auto bad = cli({"generate", "--out", (dir / "x").string(), "--density", "1.5"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("density") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x" / "manifest.json"));
  CHECK(cli({"generate", "--bogus"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"generate"}).code == 1);  // no --out
  CHECK(cli({"fit", "--out", (dir / "f").string()}).code == 1);  // no --obs
  CHECK(cli({"--help"}).code == 0);

  write_text(dir / "cfg.json", R"({"nodes": 5})");
  CHECK(cli({"generate", "--config", (dir / "cfg.json").string(), "--out", (dir / "y").string()}).code == 1);
  write_text(dir / "typed.json", R"({"n": "five"})");
  CHECK(cli({"generate", "--config", (dir / "typed.json").string(), "--out", (dir / "y").string()}).code == 1);
}

TEST_CASE("data errors exit with 2") {
  const auto dir = scratch("data_errors");
  write_text(dir / "obs.txt", "n=3 t=4\n0 1 9\n");
  const auto r = cli({"fit", "--obs", (dir / "obs.txt").string(), "--out", (dir / "f").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(cli({"fit", "--obs", (dir / "missing.txt").string(), "--out", (dir / "f").string()}).code == 2);
}

TEST_CASE("config files and flags") {
  const auto dir = scratch("config");
  write_text(dir / "cfg.json", R"({"n": 12, "trials": 7, "seed": 3})");
  REQUIRE(cli({"generate", "--config", (dir / "cfg.json").string(), "--trials", "9", "--out",
               (dir / "g").string()}).code == 0);
  const auto obs = signet::read_observation_file(dir / "g" / "observations.txt");
  CHECK(obs.n() == 12);
  CHECK(obs[0].trials() == 9);
  CHECK(signet::app::read_manifest(dir / "g" / "manifest.json").config["n"] == 12);
}

TEST_CASE("fit, estimate and evaluate pipeline") {
  const auto dir = scratch("pipeline");
  const auto g = dir / "gen";
  REQUIRE(cli({"generate", "--out", g.string(), "--nodes", "10", "--seed", "2", "--periods", "2",
               "--trials", "20"}).code == 0);
  const auto obs = (g / "observations.txt").string();

  SUBCASE("chains and reproducibility") {
    const auto f1 = dir / "fit1", f2 = dir / "fit2";
    const std::vector<std::string> base{"fit", "--obs", obs, "--chains", "3", "--sweeps", "60",
                                        "--burn-in", "20", "--thin", "5", "--seed", "9"};
    auto args = base;
    args.insert(args.end(), {"--out", f1.string()});
    REQUIRE(cli(args).code == 0);
    for (int c = 0; c < 3; ++c) CHECK(fs::exists(f1 / fmt::format("chain_{:03}.jsonl", c)));
    CHECK(signet::read_sample_file(f1 / "chain_000.jsonl").size() == 8);
    CHECK(fs::exists(f1 / "marginals.tsv"));
    const auto m = signet::app::read_manifest(f1 / "manifest.json");
    CHECK(m.seeds.size() == 3);
    CHECK(m.inputs.size() == 1);

    // Worker count does not change results.
    args = base;
    args.insert(args.begin(), {"--workers", "3"});
    args.insert(args.end(), {"--out", f2.string()});
    REQUIRE(cli(args).code == 0);
    CHECK(output_digests(f1) == output_digests(f2));

    // Replaying the manifest reproduces every output.
    const auto f3 = dir / "fit3";
    REQUIRE(cli({"fit", "--config", (f1 / "manifest.json").string(), "--out", f3.string()}).code == 0);
    CHECK(output_digests(f1) == output_digests(f3));
    CHECK(cli({"generate", "--config", (f1 / "manifest.json").string()}).code == 1);
  }

  SUBCASE("tempering") {
    const auto f = dir / "tempered";
    REQUIRE(cli({"fit", "--obs", obs, "--tempering", "--sweeps", "40", "--burn-in", "10",
                 "--thin", "5", "--swap-interval", "5", "--out", f.string()}).code == 0);
    CHECK(signet::read_sample_file(f / "chain_000.jsonl").size() == 6);
    CHECK(slurp(f / "chains.tsv").find("\tok\t") != std::string::npos);
  }

  SUBCASE("estimate and evaluate") {
    const auto f = dir / "fit";
    REQUIRE(cli({"fit", "--obs", obs, "--sweeps", "64", "--burn-in", "0", "--thin", "1",
                 "--out", f.string()}).code == 0);
    const auto e = dir / "est";
    REQUIRE(cli({"estimate", "--samples", (f / "chain_000.jsonl").string(), "--out", e.string()}).code == 0);
    std::ifstream pin(e / "predictions.tsv");
    CHECK(signet::read_prediction_table(pin).rows.size() == 45);

    const auto truth = (g / "network.txt").string();
    const auto a = dir / "auc";
    REQUIRE(cli({"evaluate", "--mode", "auc", "--predictions", (e / "predictions.tsv").string(),
                 "--truth", truth, "--out", a.string()}).code == 0);
    CHECK(slurp(a / "auc.tsv").rfind("class\tauc\tpositives\tpairs\npositive\t", 0) == 0);

    const auto p = dir / "ppc";
    REQUIRE(cli({"evaluate", "--mode", "ppc", "--samples", (f / "chain_000.jsonl").string(),
                 "--obs", obs, "--out", p.string()}).code == 0);
    const auto ppc = slurp(p / "ppc.tsv");
    CHECK(std::count(ppc.begin(), ppc.end(), '\n') == 3);  // header + one row per period
    CHECK(ppc.find("\t64\n") != std::string::npos);

    REQUIRE(cli({"estimate", "--method", "cm", "--obs", obs, "--out", (dir / "cm").string()}).code == 0);
    REQUIRE(cli({"estimate", "--method", "probit", "--obs", obs, "--truth", truth, "--out",
                 (dir / "probit").string()}).code == 0);
    CHECK(fs::exists(dir / "probit" / "mask.tsv"));
    CHECK(cli({"evaluate", "--mode", "auc", "--predictions",
               (dir / "probit" / "predictions.tsv").string(), "--truth", truth, "--exclude",
               (dir / "probit" / "mask.tsv").string(), "--out", (dir / "pa").string()}).code == 0);
    CHECK(cli({"estimate", "--method", "magic", "--obs", obs, "--out", (dir / "m").string()}).code == 1);
  }
}

TEST_CASE("auc of perfect predictions is 1") {
  const auto dir = scratch("perfect");
  signet::SignedNetwork truth(4);
  truth.set(0, 1, signet::Sign::positive);
  truth.set(2, 3, signet::Sign::negative);
  truth.set(0, 3, signet::Sign::positive);
  {
    std::ofstream out(dir / "truth.txt");
    signet::write_network(out, truth);
  }
  signet::EdgeMarginals m(4);
  for (std::size_t k = 0; k < 6; ++k) m.at_index(k)[signet::sign_index(truth.at_index(k))] = 1.0;
  {
    std::ofstream out(dir / "pred.tsv");
    signet::write_prediction_table(out, signet::prediction_table(m));
  }
  REQUIRE(cli({"evaluate", "--mode", "auc", "--predictions", (dir / "pred.tsv").string(), "--truth",
               (dir / "truth.txt").string(), "--out", (dir / "a").string()}).code == 0);
  const auto text = slurp(dir / "a" / "auc.tsv");
  CHECK(text.find("positive\t1\t2\t6") != std::string::npos);
  CHECK(text.find("negative\t1\t1\t6") != std::string::npos);
}

TEST_CASE("friendship mode requires a questionnaire") {
  const auto dir = scratch("friendship");
  const auto r = cli({"evaluate", "--mode", "friendship", "--predictions", "x.tsv", "--out",
                      (dir / "o").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("questionnaire") != std::string::npos);
}

TEST_CASE("ingest splits a contact log by day") {
  const auto dir = scratch("ingest");
  std::ofstream log(dir / "contacts.txt");
  for (int day = 0; day < 5; ++day) {
    const long long base = day * 86400LL;
    for (long long s = 0; s < 900; s += 20) {
      log << base + 32100 + s << " 1 2 A B\n";  // 08:55 to 09:10
      log << base + 32100 + s << " 3 4 A B\n";
    }
    log << base + 20000 << " 1 3 A A\n";
    log << base + 40000 << " 2 4 B B\n";
  }
  log.close();
  write_text(dir / "meta.txt", "1 A\n2 B\n3 A\n4 B\n5 A\n");

  const auto out = dir / "detected";
  REQUIRE(cli({"ingest", "--contacts", (dir / "contacts.txt").string(), "--metadata",
               (dir / "meta.txt").string(), "--out", out.string()}).code == 0);
  for (int d = 0; d < 5; ++d) CHECK(fs::exists(out / fmt::format("day_{}", d) / "observations.txt"));
  CHECK_FALSE(fs::exists(out / "day_5"));
  const auto m = signet::app::read_manifest(out / "manifest.json");
  CHECK(m.details["trials"] == 12);
  CHECK(m.details["nodes"] == 5);
  CHECK(m.details["break_source"] == "detected");
  CHECK(m.details["breaks"][0]["clock"] == "08:55:00-09:10:00");
  const auto obs = signet::read_observation_file(out / "day_0" / "observations.txt");
  CHECK(obs.size() == 3);
  CHECK(obs[0].get(0, 1) == 12);

  const auto over = dir / "override";
  REQUIRE(cli({"ingest", "--contacts", (dir / "contacts.txt").string(), "--break", "08:55+15m",
               "--break", "11:00-11:30", "--window", "240", "--resolution", "20", "--out",
               over.string()}).code == 0);
  const auto mo = signet::app::read_manifest(over / "manifest.json");
  CHECK(mo.details["break_source"] == "override");
  CHECK(mo.details["breaks"].size() == 10);
  CHECK(cli({"ingest", "--contacts", (dir / "contacts.txt").string(), "--break", "8h", "--out",
             (dir / "bad").string()}).code == 1);

  write_text(dir / "broken.txt", "100 1 2 A B\n200 1 2 A\n");
  const auto r = cli({"ingest", "--contacts", (dir / "broken.txt").string(), "--out", (dir / "b").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}
