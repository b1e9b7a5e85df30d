#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "admix/genmodel.hpp"
#include "admix/transforms.hpp"

namespace admix {

/// Per-coordinate Gaussian over the unconstrained vector plus Adam state.
struct VariationalState {
  Eigen::VectorXd mu;
  Eigen::VectorXd log_sigma;
  Eigen::VectorXd adam_m;
  Eigen::VectorXd adam_v;
  long step = 0;

  static VariationalState zeros(int dim);
  int dim() const { return static_cast<int>(mu.size()); }
};

struct ConvergenceConfig {
  bool enabled = false;   // default: the iteration cap decides
  int window_steps = 1000;
  double rel_tol = 1e-6;
};

struct FitConfig {
  long iterations = 100000;
  int runs = 4;
  double learning_rate = 0.01;
  double adam_beta1 = 0.8;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int mc_samples = 1;        // reparameterization samples per gradient
  int posterior_draws = 500;
  std::uint64_t seed = 1;
  ConvergenceConfig convergence;
  int parallel_runs = 1;
  // initialization: mu ~ Normal(0, init_mu_sd), log_sigma = init_log_sigma
  double init_mu_sd = 0.1;
  double init_log_sigma = -1.0;

  void check() const;
};

struct ElboCheckpoint {
  long step;
  double raw;       // single MC estimate at this step
  double smoothed;  // running mean over the last <=100 checkpoints
};

struct FitResult {
  VariationalState state;
  std::vector<ElboCheckpoint> trace;
  std::vector<ModelParams> draws;   // constrained posterior draws
  ModelParams map_point;            // to_constrained(mu)
  std::uint64_t run_seed = 0;
  int run_index = 0;
  std::string config_digest;
};

/// Scratch buffers for repeated objective evaluations.
struct ElboWorkspace {
  ModelParams params;
  LogJointGrad grad;
  explicit ElboWorkspace(const ModelDims& dims)
      : params(ModelParams::zeros(dims)), grad(LogJointGrad::zeros(dims)) {}
};

/// f(u) = log_joint(constrain(u)) + log|det J|(u); the integrand of the ELBO.
double elbo_point(const Eigen::VectorXd& u, const Corpus& corpus,
                  const ParamLayout& layout, ElboWorkspace& ws);

/// Same, also writing df/du into grad_u.
double elbo_point_grad(const Eigen::VectorXd& u, const Corpus& corpus,
                       const ParamLayout& layout, ElboWorkspace& ws,
                       Eigen::VectorXd& grad_u);

/// Monte-Carlo ELBO: mean of f over n reparameterized draws plus the
/// closed-form Gaussian entropy. Deterministic given the seed.
double elbo_estimate(const VariationalState& state, const Corpus& corpus,
                     const Hyperparams& hp, int n, std::uint64_t seed);

/// Gradient of the n-sample ELBO estimate with respect to (mu, log_sigma),
/// stacked as [d/dmu; d/dlog_sigma] (2D entries). Same noise stream as
/// elbo_estimate for the same seed. Throws NonFiniteGradient.
Eigen::VectorXd grad_elbo(const VariationalState& state, const Corpus& corpus,
                          const Hyperparams& hp, int n, std::uint64_t seed);

/// n constrained draws from the fitted Gaussian.
std::vector<ModelParams> draw_posterior(const VariationalState& state,
                                        const ParamLayout& layout, int n,
                                        std::uint64_t seed);

/// Multi-initialization SVI driver; run r uses seed config.seed + r.
std::vector<FitResult> fit(const Corpus& corpus, const Hyperparams& hp,
                           const FitConfig& config);

/// Single run (exposed for tests and custom drivers).
FitResult fit_single_run(const Corpus& corpus, const Hyperparams& hp,
                         const FitConfig& config, int run_index);

/// Gaussian entropy: sum(log_sigma) + D/2 log(2 pi e).
double gaussian_entropy(const Eigen::VectorXd& log_sigma);

/// Stable hash of the resolved configuration; identical across machines for
/// identical settings.
std::string config_digest(const Hyperparams& hp, const FitConfig& config);

}  // namespace admix
