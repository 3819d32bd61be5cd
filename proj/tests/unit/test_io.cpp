#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "signet/io.hpp"

using namespace signet;

TEST_CASE("single-period observation files") {
  std::istringstream in(
      "# comment\n"
      "n=4 t=10\n"
      "0 1 3\n"
      "\n"
      "2 3 10\n"
      "3 0 1\n");
  const auto obs = read_observations(in);
  REQUIRE(obs.size() == 1);
  CHECK(obs.n() == 4);
  CHECK(obs[0].trials() == 10);
  CHECK(obs[0].get(1, 0) == 3);
  CHECK(obs[0].get(0, 3) == 1);
  CHECK(obs[0].get(1, 2) == 0);

  std::ostringstream out;
  write_observations(out, obs);
  std::istringstream back(out.str());
  CHECK(read_observations(back)[0] == obs[0]);
}

TEST_CASE("multi-period observation files") {
  std::istringstream in("n=3 periods=2 t=4,6\n0 0 1 2\n1 1 2 6\n");
  const auto obs = read_observations(in);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].trials() == 4);
  CHECK(obs[1].trials() == 6);
  CHECK(obs[1].get(2, 1) == 6);
  std::ostringstream out;
  write_observations(out, obs);
  std::istringstream back(out.str());
  const auto again = read_observations(back);
  CHECK(again[0] == obs[0]);
  CHECK(again[1] == obs[1]);
}

TEST_CASE("observation file errors name the line") {
  const auto fails_with = [](const std::string& text, const std::string& fragment) {
    std::istringstream in(text);
    try {
      read_observations(in);
    } catch (const DataError& e) {
      return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with("n=3 t=4\n0 1 5\n", "line 2"));
  CHECK(fails_with("n=3 t=4\n0 1 1\n1 0 2\n", "listed twice"));
  CHECK(fails_with("n=3 t=4\n0 3 1\n", "outside"));
  CHECK(fails_with("n=3 t=4\n0 1\n", "expected 3 fields"));
  CHECK(fails_with("n=3\n", "header"));
  CHECK(fails_with("n=3 t=4\n1 1 0\n", "self-pair"));
  CHECK(fails_with("n=3 periods=2 t=4\n", "trial counts"));
  CHECK(fails_with("", "empty"));
}

TEST_CASE("network, partition and rate files round-trip") {
  Rng rng(7);
  const auto net = fixtures::random_network(6, rng);
  std::ostringstream nout;
  write_network(nout, net);
  std::istringstream nin(nout.str());
  CHECK(read_network(nin) == net);

  const std::vector<Partition> parts{fixtures::random_partition(6, rng),
                                     fixtures::random_partition(6, rng)};
  std::ostringstream pout;
  write_partitions(pout, parts);
  std::istringstream pin(pout.str());
  CHECK(read_partitions(pin) == parts);

  const std::vector<RateParams> rates{fixtures::random_rates(rng), fixtures::random_rates(rng)};
  std::ostringstream rout;
  write_rates(rout, rates);
  std::istringstream rin(rout.str());
  CHECK(read_rates(rin) == rates);
}

TEST_CASE("sample files round-trip exactly") {
  Rng rng(9);
  const auto obs = fixtures::random_observations(5, 2, 4, rng);
  SampleSet set;
  for (int k = 0; k < 4; ++k) set.draws.push_back(fixtures::random_state(obs, {}, rng));
  std::ostringstream out;
  write_samples(out, set);
  std::istringstream in(out.str());
  const auto back = read_samples(in);
  REQUIRE(back.size() == set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    CHECK(back.draws[k].network == set.draws[k].network);
    CHECK(back.draws[k].periods == set.draws[k].periods);
    CHECK(back.draws[k].log_posterior == set.draws[k].log_posterior);
  }
  std::istringstream bad("{\"n\":3,\"signs\":\"+-\"}\n");
  CHECK_THROWS_AS(read_samples(bad), DataError);
}

TEST_CASE("prediction tables") {
  EdgeMarginals m(3);
  m(0, 1) = {0.1, 0.2, 0.7};
  m(0, 2) = {0.0, 1.0, 0.0};
  m(1, 2) = {0.5, 0.25, 0.25};
  const auto table = prediction_table(m);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].mean == doctest::Approx(0.6));
  CHECK(table.rows[2].score_neg == 0.5);
  std::ostringstream out;
  write_prediction_table(out, table);
  CHECK(out.str().rfind("# n=3\ni\tj\tp_neg\tp_zero\tp_pos\tmean\tentropy\tscore_pos\tscore_neg\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_prediction_table(in);
  CHECK(back.n == 3);
  REQUIRE(back.rows.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.rows[k].probs == table.rows[k].probs);
    CHECK(back.rows[k].entropy == table.rows[k].entropy);
  }
  CHECK(mean_matrix(back)(1, 0) == doctest::Approx(0.6));
  CHECK(format_real(0.1) == "0.1");
}
