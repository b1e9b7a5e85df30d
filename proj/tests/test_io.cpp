#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "admix/digest.hpp"
#include "admix/io.hpp"
#include "admix/rng.hpp"
#include "testutil.hpp"

using namespace admix;

TEST_CASE("digest is stable and sensitive") {
  CHECK(hex_digest("abc") == hex_digest("abc"));
  CHECK(hex_digest("abc") != hex_digest("abd"));
  CHECK(hex_digest("").size() == 16);
}

TEST_CASE("parameter JSON round trips") {
  Corpus c = testutil::make_corpus({{"A", "e1", "p", "x"},
                                    {"A", "e1", "p", "y"},
                                    {"B", "e2", "q", "z"},
                                    {"B", "e2", "q", "w"},
                                    {"B", "e2", "q", "v"}});
  ModelDims dims(3, c.table);
  Rng rng(7);
  ModelParams p = testutil::random_params(dims, rng);
  std::string text = params_to_json(p, dims, c.table);
  LoadedParams back = params_from_json(text);
  CHECK(back.dims.T == 3);
  CHECK((back.params.theta - p.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.params.phi - p.phi).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.params.delta == p.delta);
  CHECK(back.table.languages == c.table.languages);
  // serialization is byte-stable
  CHECK(params_to_json(back.params, back.dims, back.table) == text);
}

TEST_CASE("ground truth JSON round trips") {
  Hyperparams hp;
  hp.T = 2;
  hp.alpha = 0.3;
  auto sim = simulate(hp, {3, 2, 2, 6}, 55);
  std::string text = ground_truth_to_json(sim.truth);
  GroundTruth back = ground_truth_from_json(text);
  CHECK(back.z == sim.truth.z);
  CHECK(back.dims.T == sim.truth.dims.T);
  CHECK((back.params.theta - sim.truth.params.theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.environments == sim.truth.environments);
}

TEST_CASE("consensus JSON round trips") {
  Corpus c = testutil::make_corpus({{"A", "e1", "p", "x"}, {"A", "e1", "p", "y"}});
  ModelDims dims(2, c.table);
  Rng rng(3);
  ModelParams p = testutil::random_params(dims, rng);
  ConsensusEstimate est;
  est.dims = dims;
  est.theta_map = p.theta;
  est.phi_map = p.phi;
  est.usage = Eigen::VectorXd::Constant(2, 0.5);
  std::string text = consensus_to_json(est, c.table);
  EnvironmentTable table;
  ConsensusEstimate back = consensus_from_json(text, &table);
  CHECK((back.theta_map - est.theta_map).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.phi_map - est.phi_map).cwiseAbs().maxCoeff() == 0.0);
  CHECK(table.languages == c.table.languages);
}

TEST_CASE("fit result directory contains the four artifacts") {
  Corpus c = testutil::make_corpus({{"A", "e1", "p", "x"},
                                    {"A", "e1", "p", "y"},
                                    {"B", "e1", "p", "x"}});
  Hyperparams hp;
  hp.T = 2;
  hp.alpha = 1.0;
  FitConfig cfg;
  cfg.iterations = 200;
  cfg.runs = 1;
  cfg.posterior_draws = 3;
  cfg.seed = 2;
  auto results = fit(c, hp, cfg);
  ModelDims dims(hp.T, c.table);

  auto dir = std::filesystem::temp_directory_path() / "admix_io_test";
  std::filesystem::remove_all(dir);
  save_fit_result(dir.string(), results[0], dims, c.table, hp, cfg);
  for (const char* name :
       {"params_mean.json", "draws.ndjson", "elbo_trace.tsv", "config.json"})
    CHECK(std::filesystem::exists(dir / name));

  LoadedParams mean = params_from_json(read_text_file((dir / "params_mean.json").string()));
  CHECK((mean.params.theta - results[0].map_point.theta).cwiseAbs().maxCoeff() == 0.0);

  std::string nd = read_text_file((dir / "draws.ndjson").string());
  CHECK(std::count(nd.begin(), nd.end(), '\n') == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest serializes every field") {
  RunManifest m;
  m.config_digest = "deadbeef";
  m.seed = 42;
  m.input_file = "data.tsv";
  m.input_digest = "c0ffee";
  m.tool_version = "0.1.0";
  m.command = "fit";
  m.started_at = iso8601_utc_now();
  m.finished_at = m.started_at;
  std::string j = manifest_to_json(m);
  for (const char* key : {"config_digest", "seed", "input_digest", "seed_scheme"})
    CHECK(j.find(key) != std::string::npos);
}
