#include <fstream>

#include "command.hpp"
#include "signet/baselines.hpp"
#include "signet/estimation.hpp"
#include "signet/io.hpp"

namespace signet::app {

namespace {

/// Counts summed over periods, with trial counts summed alike.
ObservationMatrix pooled_counts(const ObservationSet& obs) {
  int trials = 0;
  for (const auto& x : obs.periods()) trials += x.trials();
  ObservationMatrix out(obs.n(), trials);
  for (const auto& x : obs.periods()) {
    for (std::size_t k = 0; k < out.upper().size(); ++k) {
      out.set_at_index(k, out.at_index(k) + x.at_index(k));
    }
  }
  return out;
}

PredictionTable cm_table(const PairMatrix& residuals) {
  PredictionTable t;
  t.n = residuals.n();
  const auto labels = baselines::cm_classify(residuals);
  std::size_t k = 0;
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = i + 1; j < t.n; ++j, ++k) {
      PredictionRow row;
      row.i = i;
      row.j = j;
      const Sign s = labels.at_index(k);
      row.probs[static_cast<std::size_t>(sign_index(s))] = 1.0;
      row.mean = sign_value(s);
      row.score_pos = residuals.at_index(k);
      row.score_neg = -residuals.at_index(k);
      t.rows.push_back(row);
    }
  }
  return t;
}

PredictionTable probit_table(const baselines::ProbitModel& m, const ObservationMatrix& x) {
  PredictionTable t;
  t.n = x.n();
  const auto probs = baselines::probit_scores(m, x);
  std::size_t k = 0;
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = i + 1; j < t.n; ++j, ++k) {
      PredictionRow row;
      row.i = i;
      row.j = j;
      row.probs = probs[k].probs;
      row.mean = row.probs[2] - row.probs[0];
      row.entropy = triple_entropy(row.probs);
      row.score_pos = row.probs[2];
      row.score_neg = row.probs[0];
      t.rows.push_back(row);
    }
  }
  return t;
}

int estimate(Run& r) {
  const auto method = r.get<std::string>("method");
  PredictionTable table;
  if (method == "mcmc") {
    std::vector<SampleSet> sets;
    for (const auto& p : r.inputs("samples")) sets.push_back(read_sample_file(p));
    table = prediction_table(edge_marginals(std::span<const SampleSet>(sets)));
  } else if (method == "cm") {
    const auto norm_name = r.get<std::string>("normalization");
    if (norm_name != "printed" && norm_name != "standard") {
      throw ConfigError("normalization must be 'printed' or 'standard'");
    }
    const auto x = pooled_counts(read_observation_files(r.inputs("obs")));
    table = cm_table(baselines::cm_residuals(x, norm_name == "printed"
                                                     ? baselines::CmNormalization::printed
                                                     : baselines::CmNormalization::standard));
  } else if (method == "probit") {
    const auto x = pooled_counts(read_observation_files(r.inputs("obs")));
    std::ifstream tin(r.input("truth"));
    const auto truth = read_network(tin);
    if (truth.n() != x.n()) throw DataError("truth and observations have different node counts");
    const auto seed = r.get<std::uint64_t>("seed");
    r.add_seed(seed);
    Rng rng(seed);
    const auto mask = baselines::draw_reveal_mask(x.n(), r.get<double>("reveal"), rng);
    const auto fit = baselines::fit_ordered_probit(x, truth, mask);
    table = probit_table(fit.model, x);
    r.write("mask.tsv", [&](std::ostream& o) {
      o << "i\tj\n";
      for (auto k : mask.pairs) {
        const auto p = pair_from_index(k, x.n());
        o << p.i << '\t' << p.j << '\n';
      }
    });
    r.write("probit.tsv", [&](std::ostream& o) {
      o << "beta\ttau1\ttau2\tstatus\tlog_likelihood\titerations\trevealed\n";
      o << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", format_real(fit.model.beta),
                       format_real(fit.model.tau1), format_real(fit.model.tau2),
                       baselines::to_string(fit.status), format_real(fit.log_likelihood),
                       fit.iterations, mask.pairs.size());
    });
    r.details()["probit_status"] = baselines::to_string(fit.status);
  } else {
    throw ConfigError(fmt::format("unknown method '{}' (mcmc, cm or probit)", method));
  }
  r.write("predictions.tsv", [&](std::ostream& o) { write_prediction_table(o, table); });
  r.finish();
  r.log() << fmt::format("{} predictions for {} pairs\n", method, table.rows.size());
  return 0;
}

}  // namespace

CommandDef estimate_command() {
  CommandDef c;
  c.name = "estimate";
  c.help = "Per-pair sign predictions from MCMC samples or a baseline method";
  c.defaults = {{"method", "mcmc"},   {"samples", json::array()}, {"obs", json::array()},
                {"truth", nullptr},   {"reveal", 0.5},            {"seed", 1},
                {"normalization", "printed"}, {"out", nullptr}};
  c.add_flags = [](CLI::App& app, json& f) {
    option<std::string>(app, f, "--method", "method", "mcmc, cm or probit");
    option<std::vector<std::string>>(app, f, "--samples", "samples", "Sample files (mcmc), pooled");
    option<std::vector<std::string>>(app, f, "--obs", "obs", "Observation files (cm, probit)");
    option<std::string>(app, f, "--truth", "truth", "Network file with training labels (probit)");
    option<double>(app, f, "--reveal", "reveal", "Fraction of pairs revealed for training (probit)");
    option<std::string>(app, f, "--normalization", "normalization", "printed or standard (cm)");
    seed_option(app, f);
    out_option(app, f);
  };
  c.body = estimate;
  return c;
}

}  // namespace signet::app
