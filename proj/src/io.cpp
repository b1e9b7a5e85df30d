#include "admix/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "admix/digest.hpp"
#include "admix/errors.hpp"
#include "json.hpp"

namespace admix {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.begin(), v.end());
}

Eigen::VectorXd vec_from_json(const json& j) {
  auto vals = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

json theta_to_json(const Eigen::MatrixXd& theta) {
  json rows = json::array();
  for (Eigen::Index l = 0; l < theta.rows(); ++l) {
    json row = json::array();
    for (Eigen::Index t = 0; t < theta.cols(); ++t) row.push_back(theta(l, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

json phi_to_json(const Eigen::VectorXd& phi, const ModelDims& dims) {
  json comps = json::array();
  for (int t = 0; t < dims.T; ++t) {
    json envs = json::array();
    for (int s = 0; s < dims.S(); ++s) {
      json block = json::array();
      int off = dims.phi_index(t, s);
      for (int o = 0; o < dims.env_sizes[s]; ++o) block.push_back(phi[off + o]);
      envs.push_back(std::move(block));
    }
    comps.push_back(std::move(envs));
  }
  return comps;
}

json table_to_json(const EnvironmentTable& table) {
  json envs = json::array();
  for (const auto& e : table.environments)
    envs.push_back(
        {{"etymon", e.etymon}, {"sound", e.sound}, {"outcomes", e.outcomes}});
  return json{{"languages", table.languages}, {"environments", envs}};
}

EnvironmentTable table_from_json(const json& j) {
  EnvironmentTable table;
  table.languages = j.at("languages").get<std::vector<std::string>>();
  for (const auto& e : j.at("environments")) {
    EnvironmentTable::Environment env;
    env.etymon = e.at("etymon").get<std::string>();
    env.sound = e.at("sound").get<std::string>();
    env.outcomes = e.at("outcomes").get<std::vector<std::string>>();
    table.environments.push_back(std::move(env));
  }
  return table;
}

json params_core_json(const ModelParams& params, const ModelDims& dims) {
  return json{{"T", dims.T},
              {"beta_raw", vec_to_json(params.beta_raw)},
              {"beta", vec_to_json(params.beta)},
              {"theta", theta_to_json(params.theta)},
              {"phi", phi_to_json(params.phi, dims)},
              {"delta", params.delta},
              {"gamma", params.gamma}};
}

void params_core_from_json(const json& j, ModelParams& params, const ModelDims& dims) {
  params = ModelParams::zeros(dims);
  params.beta_raw = vec_from_json(j.at("beta_raw"));
  params.beta = vec_from_json(j.at("beta"));
  const auto& th = j.at("theta");
  for (int l = 0; l < dims.L; ++l)
    for (int t = 0; t < dims.T; ++t) params.theta(l, t) = th[l][t].get<double>();
  const auto& ph = j.at("phi");
  for (int t = 0; t < dims.T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      int off = dims.phi_index(t, s);
      for (int o = 0; o < dims.env_sizes[s]; ++o)
        params.phi[off + o] = ph[t][s][o].get<double>();
    }
  params.delta = j.at("delta").get<double>();
  params.gamma = j.at("gamma").get<double>();
}

}  // namespace

std::string params_to_json(const ModelParams& params, const ModelDims& dims,
                           const EnvironmentTable& table, int indent) {
  json j = params_core_json(params, dims);
  j["table"] = table_to_json(table);
  return j.dump(indent) + "\n";
}

LoadedParams params_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  LoadedParams loaded;
  loaded.table = table_from_json(j.at("table"));
  loaded.dims = ModelDims(j.at("T").get<int>(), loaded.table);
  params_core_from_json(j, loaded.params, loaded.dims);
  return loaded;
}

std::string params_to_ndjson_line(const ModelParams& params, const ModelDims& dims) {
  return params_core_json(params, dims).dump() + "\n";
}

std::string fit_config_to_json(const Hyperparams& hp, const FitConfig& config,
                               const std::string& digest) {
  json j{{"alpha", hp.alpha},
         {"T", hp.T},
         {"fixed_delta",
          hp.fixed_delta ? json(*hp.fixed_delta) : json(nullptr)},
         {"fixed_gamma",
          hp.fixed_gamma ? json(*hp.fixed_gamma) : json(nullptr)},
         {"iterations", config.iterations},
         {"runs", config.runs},
         {"learning_rate", config.learning_rate},
         {"adam_beta1", config.adam_beta1},
         {"adam_beta2", config.adam_beta2},
         {"adam_eps", config.adam_eps},
         {"mc_samples", config.mc_samples},
         {"posterior_draws", config.posterior_draws},
         {"seed", config.seed},
         {"parallel_runs", config.parallel_runs},
         {"convergence",
          {{"enabled", config.convergence.enabled},
           {"window_steps", config.convergence.window_steps},
           {"rel_tol", config.convergence.rel_tol}}},
         {"init_mu_sd", config.init_mu_sd},
         {"init_log_sigma", config.init_log_sigma},
         {"config_digest", digest}};
  return j.dump(2) + "\n";
}

void save_fit_result(const std::string& dir, const FitResult& result,
                     const ModelDims& dims, const EnvironmentTable& table,
                     const Hyperparams& hp, const FitConfig& config) {
  fs::create_directories(dir);
  write_text_file(dir + "/params_mean.json",
                  params_to_json(result.map_point, dims, table));
  std::string nd;
  for (const auto& draw : result.draws) nd += params_to_ndjson_line(draw, dims);
  write_text_file(dir + "/draws.ndjson", nd);
  std::string trace = "step\telbo\tsmoothed\n";
  char buf[64];
  for (const auto& cp : result.trace) {
    std::snprintf(buf, sizeof(buf), "%ld\t%.17g\t%.17g\n", cp.step, cp.raw,
                  cp.smoothed);
    trace += buf;
  }
  write_text_file(dir + "/elbo_trace.tsv", trace);
  write_text_file(dir + "/config.json",
                  fit_config_to_json(hp, config, result.config_digest));
}

std::string alignment_to_json(const std::vector<ComponentPermutation>& perms) {
  json runs = json::array();
  for (const auto& p : perms) runs.push_back(p.sigma);
  json j{{"reference_run", 0}, {"permutations", runs}};
  return j.dump(2) + "\n";
}

std::string consensus_to_json(const ConsensusEstimate& est,
                              const EnvironmentTable& table) {
  json j{{"T", est.dims.T},
         {"theta_map", theta_to_json(est.theta_map)},
         {"phi_map", phi_to_json(est.phi_map, est.dims)},
         {"usage", vec_to_json(est.usage)},
         {"table", table_to_json(table)}};
  return j.dump(2) + "\n";
}

ConsensusEstimate consensus_from_json(const std::string& json_text,
                                      EnvironmentTable* table_out) {
  json j = json::parse(json_text);
  EnvironmentTable table = table_from_json(j.at("table"));
  ModelDims dims(j.at("T").get<int>(), table);
  ConsensusEstimate est;
  est.dims = dims;
  est.theta_map = Eigen::MatrixXd::Zero(dims.L, dims.T);
  const auto& th = j.at("theta_map");
  for (int l = 0; l < dims.L; ++l)
    for (int t = 0; t < dims.T; ++t) est.theta_map(l, t) = th[l][t].get<double>();
  est.phi_map = Eigen::VectorXd::Zero(dims.phi_size());
  const auto& ph = j.at("phi_map");
  for (int t = 0; t < dims.T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      int off = dims.phi_index(t, s);
      for (int o = 0; o < dims.env_sizes[s]; ++o)
        est.phi_map[off + o] = ph[t][s][o].get<double>();
    }
  est.usage = vec_from_json(j.at("usage"));
  if (table_out) *table_out = std::move(table);
  return est;
}

std::string ground_truth_to_json(const GroundTruth& truth) {
  json envs = json::array();
  for (size_t s = 0; s < truth.environments.size(); ++s)
    envs.push_back({{"etymon", truth.environments[s].first},
                    {"sound", truth.environments[s].second},
                    {"outcomes", truth.outcome_names[s]}});
  json j{{"T", truth.dims.T},
         {"languages", truth.languages},
         {"environments", envs},
         {"params", params_core_json(truth.params, truth.dims)},
         {"z", truth.z}};
  return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  GroundTruth truth;
  truth.languages = j.at("languages").get<std::vector<std::string>>();
  std::vector<int> sizes;
  for (const auto& e : j.at("environments")) {
    truth.environments.emplace_back(e.at("etymon").get<std::string>(),
                                    e.at("sound").get<std::string>());
    truth.outcome_names.push_back(e.at("outcomes").get<std::vector<std::string>>());
    sizes.push_back(static_cast<int>(truth.outcome_names.back().size()));
  }
  truth.dims = ModelDims(j.at("T").get<int>(),
                         static_cast<int>(truth.languages.size()), sizes);
  params_core_from_json(j.at("params"), truth.params, truth.dims);
  truth.z = j.at("z").get<std::vector<int>>();
  return truth;
}

std::string recovery_report_to_json(const RecoveryReport& report) {
  json j{{"accuracy", report.accuracy},
         {"active_components", report.active_components},
         {"theta_mae", report.theta_mae},
         {"matching", report.matching},
         {"truth_components", report.truth_components},
         {"tokens", report.tokens}};
  return j.dump(2) + "\n";
}

std::string manifest_to_json(const RunManifest& manifest) {
  json j{{"config_digest", manifest.config_digest},
         {"seed", manifest.seed},
         {"input_file", manifest.input_file},
         {"input_digest", manifest.input_digest},
         {"tool_version", manifest.tool_version},
         {"command", manifest.command},
         {"started_at", manifest.started_at},
         {"finished_at", manifest.finished_at},
         {"seed_scheme", manifest.seed_scheme}};
  return j.dump(2) + "\n";
}

std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace admix
