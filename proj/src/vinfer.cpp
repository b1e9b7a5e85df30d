#include "admix/vinfer.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "admix/digest.hpp"
#include "admix/errors.hpp"
#include "admix/rng.hpp"
#include "json.hpp"

namespace admix {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;  // "init"
constexpr std::uint64_t kDrawStream = 0x706f7374;  // "post"

}  // namespace

VariationalState VariationalState::zeros(int dim) {
  VariationalState s;
  s.mu = Eigen::VectorXd::Zero(dim);
  s.log_sigma = Eigen::VectorXd::Zero(dim);
  s.adam_m = Eigen::VectorXd::Zero(2 * dim);
  s.adam_v = Eigen::VectorXd::Zero(2 * dim);
  return s;
}

void FitConfig::check() const {
  if (iterations < 1) throw DomainError("iterations must be >= 1");
  if (runs < 1) throw DomainError("runs must be >= 1");
  if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0)
    throw DomainError("adam_beta1 must be in [0,1)");
  if (adam_beta2 < 0.0 || adam_beta2 >= 1.0)
    throw DomainError("adam_beta2 must be in [0,1)");
  if (mc_samples < 1) throw DomainError("mc_samples must be >= 1");
  if (posterior_draws < 1) throw DomainError("posterior_draws must be >= 1");
}

double gaussian_entropy(const Eigen::VectorXd& log_sigma) {
  const double d = static_cast<double>(log_sigma.size());
  return log_sigma.sum() + 0.5 * d * std::log(2.0 * M_PI * M_E);
}

std::string config_digest(const Hyperparams& hp, const FitConfig& config) {
  nlohmann::json j{
      {"alpha", hp.alpha},
      {"T", hp.T},
      {"fixed_delta", hp.fixed_delta ? nlohmann::json(*hp.fixed_delta)
                                     : nlohmann::json(nullptr)},
      {"fixed_gamma", hp.fixed_gamma ? nlohmann::json(*hp.fixed_gamma)
                                     : nlohmann::json(nullptr)},
      {"iterations", config.iterations},
      {"runs", config.runs},
      {"learning_rate", config.learning_rate},
      {"adam_beta1", config.adam_beta1},
      {"adam_beta2", config.adam_beta2},
      {"adam_eps", config.adam_eps},
      {"mc_samples", config.mc_samples},
      {"posterior_draws", config.posterior_draws},
      {"seed", config.seed},
      {"convergence_enabled", config.convergence.enabled},
      {"convergence_window_steps", config.convergence.window_steps},
      {"convergence_rel_tol", config.convergence.rel_tol},
      {"init_mu_sd", config.init_mu_sd},
      {"init_log_sigma", config.init_log_sigma},
  };
  return hex_digest(j.dump());
}

double elbo_point(const Eigen::VectorXd& u, const Corpus& corpus,
                  const ParamLayout& layout, ElboWorkspace& ws) {
  double log_det = constrain_into(u, layout, ws.params);
  return log_joint(ws.params, corpus, layout.hp, layout.dims) + log_det;
}

double elbo_point_grad(const Eigen::VectorXd& u, const Corpus& corpus,
                       const ParamLayout& layout, ElboWorkspace& ws,
                       Eigen::VectorXd& grad_u) {
  double log_det = constrain_into(u, layout, ws.params);
  double value =
      log_joint_grad(ws.params, corpus, layout.hp, layout.dims, ws.grad) + log_det;
  grad_u = constrain_grad(u, layout, ws.params, ws.grad);
  return value;
}

namespace {

/// shared MC core: accumulates value and, if requested, (mu, log_sigma) grads
double elbo_mc(const VariationalState& state, const Corpus& corpus,
               const ParamLayout& layout, int n, std::uint64_t seed,
               Eigen::VectorXd* grad_out) {
  if (n < 1) throw DomainError("mc sample count must be >= 1");
  const int D = state.dim();
  Rng rng(seed);
  ElboWorkspace ws(layout.dims);
  Eigen::VectorXd sigma = state.log_sigma.array().exp();
  Eigen::VectorXd eta(D), u(D), gu(D);
  Eigen::VectorXd gmu = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd gls = Eigen::VectorXd::Zero(D);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < D; ++d) eta[d] = rng.normal();
    u = state.mu + sigma.cwiseProduct(eta);
    if (grad_out) {
      acc += elbo_point_grad(u, corpus, layout, ws, gu);
      gmu += gu;
      gls += gu.cwiseProduct(sigma.cwiseProduct(eta));
    } else {
      acc += elbo_point(u, corpus, layout, ws);
    }
  }
  double value = acc / n + gaussian_entropy(state.log_sigma);
  if (grad_out) {
    grad_out->resize(2 * D);
    grad_out->head(D) = gmu / n;
    grad_out->tail(D) = gls / n + Eigen::VectorXd::Ones(D);  // entropy term
    for (int d = 0; d < 2 * D; ++d)
      if (!std::isfinite((*grad_out)[d]))
        throw NonFiniteGradient(d, "elbo gradient");
  }
  return value;
}

}  // namespace

double elbo_estimate(const VariationalState& state, const Corpus& corpus,
                     const Hyperparams& hp, int n, std::uint64_t seed) {
  ParamLayout layout(ModelDims(hp.T, corpus.table), hp);
  return elbo_mc(state, corpus, layout, n, seed, nullptr);
}

Eigen::VectorXd grad_elbo(const VariationalState& state, const Corpus& corpus,
                          const Hyperparams& hp, int n, std::uint64_t seed) {
  ParamLayout layout(ModelDims(hp.T, corpus.table), hp);
  Eigen::VectorXd grad;
  elbo_mc(state, corpus, layout, n, seed, &grad);
  return grad;
}

std::vector<ModelParams> draw_posterior(const VariationalState& state,
                                        const ParamLayout& layout, int n,
                                        std::uint64_t seed) {
  if (n < 1) throw DomainError("posterior draw count must be >= 1");
  Rng rng(seed);
  const int D = state.dim();
  Eigen::VectorXd sigma = state.log_sigma.array().exp();
  Eigen::VectorXd u(D);
  std::vector<ModelParams> draws;
  draws.reserve(n);
  for (int j = 0; j < n; ++j) {
    for (int d = 0; d < D; ++d) u[d] = state.mu[d] + sigma[d] * rng.normal();
    draws.push_back(to_constrained(u, layout).params);
  }
  return draws;
}

FitResult fit_single_run(const Corpus& corpus, const Hyperparams& hp,
                         const FitConfig& config, int run_index) {
  hp.check();
  config.check();
  ParamLayout layout(ModelDims(hp.T, corpus.table), hp);
  const int D = layout.dim;
  const std::uint64_t run_seed = config.seed + static_cast<std::uint64_t>(run_index);

  VariationalState state = VariationalState::zeros(D);
  {
    Rng init_rng(mix64(run_seed, kInitStream));
    for (int d = 0; d < D; ++d) state.mu[d] = config.init_mu_sd * init_rng.normal();
    state.log_sigma.setConstant(config.init_log_sigma);
  }

  FitResult result;
  result.run_index = run_index;
  result.run_seed = run_seed;
  result.config_digest = config_digest(hp, config);

  const double b1 = config.adam_beta1, b2 = config.adam_beta2;
  Eigen::VectorXd grad;
  std::vector<double> raws;
  // convergence compares per-step values averaged over whole windows
  const long wsteps = std::max(1, config.convergence.window_steps);
  double window_acc = 0.0;
  double prev_window = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;

  for (long step = 1; step <= config.iterations; ++step) {
    double value;
    try {
      value = elbo_mc(state, corpus, layout, config.mc_samples,
                      mix64(run_seed, static_cast<std::uint64_t>(step)), &grad);
    } catch (const NonFiniteGradient& e) {
      throw NonFiniteGradient(e.coordinate, "run " + std::to_string(run_index) +
                                                " step " + std::to_string(step));
    } catch (const NonFiniteDensity& e) {
      throw NonFiniteDensity(std::string(e.what()) + " (run " +
                             std::to_string(run_index) + " step " +
                             std::to_string(step) + ")");
    }

    // Adam ascent on [mu; log_sigma]
    state.step = step;
    state.adam_m = b1 * state.adam_m + (1.0 - b1) * grad;
    state.adam_v = b2 * state.adam_v.array() + (1.0 - b2) * grad.array().square();
    double mc1 = 1.0 - std::pow(b1, static_cast<double>(step));
    double mc2 = 1.0 - std::pow(b2, static_cast<double>(step));
    Eigen::ArrayXd stepv = (config.learning_rate / mc1) * state.adam_m.array() /
                           ((state.adam_v.array() / mc2).sqrt() + config.adam_eps);
    state.mu += stepv.head(D).matrix();
    state.log_sigma += stepv.tail(D).matrix();

    if (step % 100 == 0) {
      raws.push_back(value);
      int nsm = std::min<int>(100, static_cast<int>(raws.size()));
      double smooth = std::accumulate(raws.end() - nsm, raws.end(), 0.0) / nsm;
      result.trace.push_back({step, value, smooth});
    }

    if (config.convergence.enabled) {
      window_acc += value;
      if (step % wsteps == 0) {
        double mean = window_acc / wsteps;
        window_acc = 0.0;
        if (!std::isnan(prev_window) &&
            std::abs(mean - prev_window) / std::max(1.0, std::abs(prev_window)) <
                config.convergence.rel_tol)
          converged = true;
        prev_window = mean;
      }
      if (converged) break;
    }
  }

  result.state = state;
  result.map_point = to_constrained(state.mu, layout).params;
  result.draws = draw_posterior(state, layout, config.posterior_draws,
                                mix64(run_seed, kDrawStream));
  return result;
}

std::vector<FitResult> fit(const Corpus& corpus, const Hyperparams& hp,
                           const FitConfig& config) {
  hp.check();
  config.check();
  if (corpus.size() == 0) throw DomainError("fit requires a non-empty corpus");

  const int R = config.runs;
  std::vector<FitResult> results(R);
  int workers = std::max(1, std::min(config.parallel_runs, R));
  if (workers == 1) {
    for (int r = 0; r < R; ++r) results[r] = fit_single_run(corpus, hp, config, r);
    return results;
  }
  // bounded fan-out; runs are independent and deterministic by seed
  std::vector<std::future<FitResult>> futs(R);
  int next = 0, active = 0, done = 0;
  while (done < R) {
    while (next < R && active < workers) {
      futs[next] = std::async(std::launch::async, fit_single_run, std::cref(corpus),
                              std::cref(hp), std::cref(config), next);
      ++next;
      ++active;
    }
    // collect in order; join the oldest outstanding run
    results[done] = futs[done].get();
    ++done;
    --active;
  }
  return results;
}

}  // namespace admix
