#include "command.hpp"
#include "signet/estimation.hpp"
#include "signet/io.hpp"
#include "signet/parallel.hpp"
#include "signet/sampler.hpp"

namespace signet::app {

namespace {

std::string chain_file(std::size_t c) { return fmt::format("chain_{:03}.jsonl", c); }

int fit(Run& r) {
  const auto obs = read_observation_files(r.inputs("obs"));

  SamplerConfig sc;
  sc.sweeps = r.get<int>("sweeps");
  sc.burn_in = r.get<int>("burn_in");
  sc.thin = r.get<int>("thin");
  sc.smart_init = r.get<bool>("smart_init");
  sc.init_sweeps = r.get<int>("init_sweeps");
  sc.flips_per_pair = r.get<int>("flips_per_pair");
  sc.edge_proposals = r.get<int>("edge_proposals");
  sc.sigma_intra = r.get<double>("sigma_intra");
  sc.sigma_inter = r.get<double>("sigma_inter");
  const auto rho = r.get<std::vector<double>>("rho");
  if (rho.size() != 3) throw ConfigError("'rho' needs three values (negative, absent, positive)");
  sc.priors.rho = {rho[0], rho[1], rho[2]};
  sc.validate();

  const bool tempering = r.get<bool>("tempering");
  TemperatureLadder ladder;
  ladder.betas = r.get<std::vector<double>>("betas");
  ladder.swap_interval = r.get<int>("swap_interval");
  if (tempering) ladder.validate();

  const int chains = r.get<int>("chains");
  if (chains < 1) throw ConfigError("chains must be at least 1");
  const auto master = r.get<std::uint64_t>("seed");
  std::vector<std::uint64_t> seeds;
  for (int c = 0; c < chains; ++c) {
    seeds.push_back(derive_seed(master, static_cast<std::uint64_t>(c)));
    r.add_seed(seeds.back());
  }

  std::vector<SampleSet> results(static_cast<std::size_t>(chains));
  std::vector<std::string> errors(static_cast<std::size_t>(chains));
  const int inner = chains == 1 ? r.workers() : 1;
  parallel_for(results.size(), r.workers(), [&](std::size_t c) {
    try {
      SamplerConfig cc = sc;
      cc.seed = seeds[c];
      Rng rng(seeds[c]);
      results[c] = tempering ? run_tempered(obs, cc, ladder, rng, inner) : run_chain(obs, cc, rng);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  });

  std::vector<SampleSet> good;
  json status = json::array();
  for (std::size_t c = 0; c < results.size(); ++c) {
    if (errors[c].empty()) {
      r.write(chain_file(c), [&](std::ostream& o) { write_samples(o, results[c]); });
      good.push_back(results[c]);
      status.push_back({{"chain", c}, {"status", "ok"}});
    } else {
      status.push_back({{"chain", c}, {"status", "failed"}, {"error", errors[c]}});
    }
  }
  r.write("chains.tsv", [&](std::ostream& o) {
    o << "chain\tseed\tstatus\tdraws\tedge_acc\tintra_acc\tinter_acc\tpartition_acc\tswap_acc\n";
    for (std::size_t c = 0; c < results.size(); ++c) {
      const auto& s = results[c].stats;
      o << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", c, seeds[c],
                       errors[c].empty() ? "ok" : "failed", results[c].size(),
                       format_real(s.edge.rate()), format_real(s.intra.rate()),
                       format_real(s.inter.rate()), format_real(s.partition.rate()),
                       format_real(s.swap.rate()));
    }
  });
  if (!good.empty()) {
    const auto table = prediction_table(edge_marginals(std::span<const SampleSet>(good)));
    r.write("marginals.tsv", [&](std::ostream& o) { write_prediction_table(o, table); });
  }
  r.details()["chains"] = status;
  r.details()["periods"] = obs.size();
  r.details()["n"] = obs.n();
  r.finish();

  const auto failed = results.size() - good.size();
  r.log() << fmt::format("fit {} chain(s), {} draw(s) each, {} failed\n", chains,
                         good.empty() ? 0 : good.front().size(), failed);
  if (failed > 0) {
    for (std::size_t c = 0; c < errors.size(); ++c) {
      if (!errors[c].empty()) r.log() << fmt::format("chain {} failed: {}\n", c, errors[c]);
    }
    return 3;
  }
  return 0;
}

}  // namespace

CommandDef fit_command() {
  const SamplerConfig d;
  const TemperatureLadder ladder;
  CommandDef c;
  c.name = "fit";
  c.help = "Run MCMC chains on observation files";
  c.defaults = {{"obs", json::array()},
                {"out", nullptr},
                {"chains", 1},
                {"sweeps", d.sweeps},
                {"burn_in", d.burn_in},
                {"thin", d.thin},
                {"seed", d.seed},
                {"smart_init", d.smart_init},
                {"init_sweeps", d.init_sweeps},
                {"flips_per_pair", d.flips_per_pair},
                {"edge_proposals", d.edge_proposals},
                {"sigma_intra", d.sigma_intra},
                {"sigma_inter", d.sigma_inter},
                {"rho", d.priors.rho},
                {"tempering", false},
                {"betas", ladder.betas},
                {"swap_interval", ladder.swap_interval}};
  c.add_flags = [](CLI::App& app, json& f) {
    option<std::vector<std::string>>(app, f, "--obs", "obs", "Observation file(s); periods are concatenated");
    out_option(app, f);
    seed_option(app, f);
    option<int>(app, f, "--chains", "chains", "Independent chains");
    option<int>(app, f, "--sweeps", "sweeps", "Sweeps per chain");
    option<int>(app, f, "--burn-in", "burn_in", "Sweeps discarded before recording");
    option<int>(app, f, "--thin", "thin", "Record every k-th sweep");
    option<int>(app, f, "--init-sweeps", "init_sweeps", "One-group phase length (negative: 20% of sweeps)");
    option<int>(app, f, "--flips-per-pair", "flips_per_pair", "Edge proposals per pair per sweep");
    option<int>(app, f, "--edge-proposals", "edge_proposals",
                "Edge proposals on random pairs per sweep (0: pass over every pair)");
    option<double>(app, f, "--sigma-intra", "sigma_intra", "Proposal scale for intra-group rates");
    option<double>(app, f, "--sigma-inter", "sigma_inter", "Proposal scale for the inter-group rate");
    option<std::vector<double>>(app, f, "--rho", "rho", "Sign prior: negative,absent,positive")
        ->delimiter(',')
        ->expected(3);
    toggle(app, f, "--no-smart-init", "smart_init", false, "Start partitions from singletons directly");
    toggle(app, f, "--tempering", "tempering", true, "Parallel tempering; samples from beta = 1");
    option<std::vector<double>>(app, f, "--betas", "betas", "Inverse temperatures, first = 1")
        ->delimiter(',');
    option<int>(app, f, "--swap-interval", "swap_interval", "Sweeps between replica swaps");
  };
  c.body = fit;
  return c;
}

}  // namespace signet::app
