#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "admix/corpus.hpp"

namespace admix {

/// Simplex/log clamp; entries are floored here before any log or lgamma.
inline constexpr double kSimplexEps = 1e-12;

struct Hyperparams {
  double alpha = 1e-4;  // symmetric Dirichlet concentration on phi rows
  int T = 10;           // truncation level
  // delta, gamma carry Gamma(1,1) hyperpriors unless pinned to a point value
  // (the grid oracle and oracle-vs-VI comparisons need them fixed).
  std::optional<double> fixed_delta;
  std::optional<double> fixed_gamma;

  bool delta_free() const { return !fixed_delta.has_value(); }
  bool gamma_free() const { return !fixed_gamma.has_value(); }
  void check() const;  // alpha > 0, T >= 1
};

/// Shape bookkeeping shared by the density, transforms and oracle code.
/// phi is stored flat: index(t,s) starts a block of env_sizes[s] outcomes,
/// components are the major axis.
struct ModelDims {
  int T = 0;
  int L = 0;
  std::vector<int> env_sizes;     // outcomes per environment
  std::vector<int> env_offsets;   // prefix sums of env_sizes
  int phi_per_component = 0;      // sum of env_sizes

  ModelDims() = default;
  ModelDims(int T, const EnvironmentTable& table);
  ModelDims(int T, int L, std::vector<int> env_sizes);

  int S() const { return static_cast<int>(env_sizes.size()); }
  int phi_index(int t, int s) const {
    return t * phi_per_component + env_offsets[s];
  }
  int phi_size() const { return T * phi_per_component; }
};

/// One full draw of (beta', beta, theta, phi, delta, gamma) in constrained space.
struct ModelParams {
  Eigen::VectorXd beta_raw;  // T-1, entries in (0,1)
  Eigen::VectorXd beta;      // T, simplex
  Eigen::MatrixXd theta;     // L x T, rows are simplices
  Eigen::VectorXd phi;       // flat per ModelDims, each (t,s) block a simplex
  double delta = 1.0;
  double gamma = 1.0;

  static ModelParams zeros(const ModelDims& dims);
  /// checks simplex sums (1e-10), positivity, delta/gamma > 0
  bool valid(const ModelDims& dims, double tol = 1e-10) const;
};

/// beta_t = beta'_t prod_{i<t}(1-beta'_i); last entry takes the remainder.
/// Throws DomainError unless every entry is strictly inside (0,1).
Eigen::VectorXd stick_breaking(const Eigen::VectorXd& beta_raw);

/// d(objective)/d(beta_raw) given d(objective)/d(beta).
Eigen::VectorXd stick_breaking_backward(const Eigen::VectorXd& beta_raw,
                                        const Eigen::VectorXd& beta,
                                        const Eigen::VectorXd& grad_beta);

/// Gradient of log_joint with respect to the constrained parameters.
/// d_beta_raw holds only the direct Beta(1,gamma) prior term; the chain
/// through beta = stick_breaking(beta') is applied by the caller.
struct LogJointGrad {
  Eigen::MatrixXd d_theta;     // L x T
  Eigen::VectorXd d_phi;       // flat
  Eigen::VectorXd d_beta;      // T
  Eigen::VectorXd d_beta_raw;  // T-1
  double d_delta = 0.0;
  double d_gamma = 0.0;

  static LogJointGrad zeros(const ModelDims& dims);
  void set_zero();
};

/// log p(delta) + log p(gamma) + sum_t log Beta(beta'_t; 1, gamma)
/// + sum_l log Dir(theta_l; delta beta) + sum_{t,s} log Dir(phi_{t,s}; alpha)
/// + sum_i log sum_t theta_{l_i,t} phi_{t,x_i,y_i}.
/// All normalization constants included. Throws NonFiniteDensity.
double log_joint(const ModelParams& params, const Corpus& corpus,
                 const Hyperparams& hp, const ModelDims& dims);

/// Same value, also accumulating the gradient into `grad` (overwritten).
double log_joint_grad(const ModelParams& params, const Corpus& corpus,
                      const Hyperparams& hp, const ModelDims& dims,
                      LogJointGrad& grad);

// --- forward simulation ---

struct SimShape {
  int L = 2;
  int S = 2;
  int outcomes_per_env = 2;
  int tokens_per_language = 10;
  void check() const;  // all >= 1
};

struct GroundTruth {
  ModelParams params;         // every latent draw, full alphabets
  std::vector<int> z;         // component label per token, corpus order
  ModelDims dims;             // generating dims (full alphabets)
  std::vector<std::string> languages;
  std::vector<std::pair<std::string, std::string>> environments;
  std::vector<std::vector<std::string>> outcome_names;  // per environment
};

struct Simulation {
  Corpus corpus;      // alphabets restricted to observed outcomes
  GroundTruth truth;
};

/// Executes the generative process forward. Token i of language l is placed
/// in environment ((l*tokens_per_language)+i) mod S, a balanced deterministic
/// assignment; environments are observed covariates, not modeled.
/// Identical seed gives identical output.
Simulation simulate(const Hyperparams& hp, const SimShape& shape,
                    std::uint64_t seed);

}  // namespace admix
