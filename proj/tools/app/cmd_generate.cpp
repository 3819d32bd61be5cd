#include <algorithm>

#include "command.hpp"
#include "signet/io.hpp"
#include "signet/synthetic.hpp"

namespace signet::app {

namespace {

synth::Range range(const Run& r, const std::string& key) {
  const auto v = r.get<std::vector<double>>(key);
  if (v.size() != 2) throw ConfigError(fmt::format("'{}' needs two values lo,hi", key));
  return {v[0], v[1]};
}

int generate(Run& r) {
  synth::SynthConfig cfg;
  cfg.n = r.get<std::size_t>("n");
  cfg.edge_density = r.get<double>("edge_density");
  cfg.max_groups = r.get<int>("max_groups");
  cfg.groups = r.optional<int>("groups");
  cfg.p_pos = range(r, "p_pos");
  cfg.p_zero = range(r, "p_zero");
  cfg.p_neg = range(r, "p_neg");
  cfg.q = range(r, "q");
  cfg.trials = r.get<int>("trials");
  cfg.periods = r.get<int>("periods");
  cfg.seed = r.get<std::uint64_t>("seed");
  cfg.validate();
  r.add_seed(cfg.seed);

  const auto inst = synth::generate_instance(cfg);
  std::vector<Partition> partitions;
  std::vector<RateParams> rates;
  json fractions = json::array();
  for (const auto& p : inst.periods) {
    partitions.push_back(p.partition);
    rates.push_back(p.rates);
    fractions.push_back(synth::internal_edge_fraction(inst.network, p.partition));
  }
  r.write("observations.txt", [&](std::ostream& o) { write_observations(o, inst.observations); });
  r.write("network.txt", [&](std::ostream& o) { write_network(o, inst.network); });
  r.write("partitions.txt", [&](std::ostream& o) { write_partitions(o, partitions); });
  r.write("rates.txt", [&](std::ostream& o) { write_rates(o, rates); });
  r.details()["internal_edge_fraction"] = fractions;
  r.finish();
  r.log() << fmt::format("generated n={} periods={} trials={} seed={}\n", cfg.n, cfg.periods,
                         cfg.trials, cfg.seed);
  return 0;
}

}  // namespace

CommandDef generate_command() {
  const synth::SynthConfig d;
  CommandDef c;
  c.name = "generate";
  c.help = "Generate a synthetic signed network with observed interaction counts";
  c.defaults = {{"n", d.n},
                {"edge_density", d.edge_density},
                {"max_groups", d.max_groups},
                {"groups", nullptr},
                {"p_pos", {d.p_pos.lo, d.p_pos.hi}},
                {"p_zero", {d.p_zero.lo, d.p_zero.hi}},
                {"p_neg", {d.p_neg.lo, d.p_neg.hi}},
                {"q", {d.q.lo, d.q.hi}},
                {"trials", d.trials},
                {"periods", d.periods},
                {"seed", d.seed},
                {"out", nullptr}};
  c.add_flags = [](CLI::App& app, json& f) {
    out_option(app, f);
    seed_option(app, f);
    option<std::size_t>(app, f, "--nodes,-n", "n", "Node count");
    option<double>(app, f, "--density", "edge_density", "Probability that a pair carries a tie");
    option<int>(app, f, "--max-groups", "max_groups", "Group count is drawn from 1..max");
    option<int>(app, f, "--groups", "groups", "Fix the group count");
    option<int>(app, f, "--trials,-t", "trials", "Trials per pair per period");
    option<int>(app, f, "--periods", "periods", "Observation periods");
    for (const char* key : {"p_pos", "p_zero", "p_neg", "q"}) {
      std::string flag = std::string("--") + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      option<std::vector<double>>(app, f, flag, key, fmt::format("Uniform range lo,hi for {}", key))
          ->delimiter(',')
          ->expected(2);
    }
  };
  c.body = generate;
  return c;
}

}  // namespace signet::app
