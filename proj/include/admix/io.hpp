#pragma once

#include <string>
#include <vector>

#include "admix/align.hpp"
#include "admix/analytics.hpp"
#include "admix/oracle.hpp"
#include "admix/vinfer.hpp"

namespace admix {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// --- model parameters ---

/// Self-describing parameter dump (includes the environment table).
std::string params_to_json(const ModelParams& params, const ModelDims& dims,
                           const EnvironmentTable& table, int indent = 2);

struct LoadedParams {
  ModelParams params;
  ModelDims dims;
  EnvironmentTable table;
};
LoadedParams params_from_json(const std::string& json_text);

/// Compact single-line form for draws.ndjson (no table).
std::string params_to_ndjson_line(const ModelParams& params, const ModelDims& dims);

// --- fit results ---

/// Writes params_mean.json, draws.ndjson, elbo_trace.tsv, config.json into dir.
void save_fit_result(const std::string& dir, const FitResult& result,
                     const ModelDims& dims, const EnvironmentTable& table,
                     const Hyperparams& hp, const FitConfig& config);

std::string fit_config_to_json(const Hyperparams& hp, const FitConfig& config,
                               const std::string& digest);

// --- alignment / consensus ---

std::string alignment_to_json(const std::vector<ComponentPermutation>& perms);
std::string consensus_to_json(const ConsensusEstimate& est,
                              const EnvironmentTable& table);
ConsensusEstimate consensus_from_json(const std::string& json_text,
                                      EnvironmentTable* table_out = nullptr);

// --- simulation ground truth ---

std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const std::string& json_text);

// --- recovery report ---

std::string recovery_report_to_json(const RecoveryReport& report);

// --- run manifest ---

struct RunManifest {
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string input_file;
  std::string input_digest;
  std::string tool_version;
  std::string command;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  std::string seed_scheme =
      "run_seed = seed + run_index; substreams via splitmix64(run_seed ^ "
      "splitmix64(stream_id)); per-step noise stream_id = step";
};

std::string manifest_to_json(const RunManifest& manifest);

std::string iso8601_utc_now();

}  // namespace admix
