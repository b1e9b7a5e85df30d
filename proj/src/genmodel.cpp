#include "admix/genmodel.hpp"

#include <cmath>
#include <numeric>

#include "admix/errors.hpp"
#include "admix/rng.hpp"

namespace admix {

namespace {

inline double clamp_prob(double x) { return x < kSimplexEps ? kSimplexEps : x; }

/// digamma, good to ~1e-13 for x > 0 (recurrence up to 6, then asymptotic)
double digamma(double x) {
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
            inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result;
}

}  // namespace

void Hyperparams::check() const {
  if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
  if (T < 1) throw DomainError("truncation level T must be >= 1");
  if (fixed_delta && !(*fixed_delta > 0.0))
    throw DomainError("fixed delta must be > 0");
  if (fixed_gamma && !(*fixed_gamma > 0.0))
    throw DomainError("fixed gamma must be > 0");
}

ModelDims::ModelDims(int T, const EnvironmentTable& table) : T(T), L(table.num_languages()) {
  env_sizes.reserve(table.environments.size());
  for (const auto& e : table.environments)
    env_sizes.push_back(static_cast<int>(e.outcomes.size()));
  env_offsets.resize(env_sizes.size());
  std::exclusive_scan(env_sizes.begin(), env_sizes.end(), env_offsets.begin(), 0);
  phi_per_component = std::accumulate(env_sizes.begin(), env_sizes.end(), 0);
}

ModelDims::ModelDims(int T, int L, std::vector<int> sizes)
    : T(T), L(L), env_sizes(std::move(sizes)) {
  env_offsets.resize(env_sizes.size());
  std::exclusive_scan(env_sizes.begin(), env_sizes.end(), env_offsets.begin(), 0);
  phi_per_component = std::accumulate(env_sizes.begin(), env_sizes.end(), 0);
}

ModelParams ModelParams::zeros(const ModelDims& dims) {
  ModelParams p;
  p.beta_raw = Eigen::VectorXd::Zero(std::max(0, dims.T - 1));
  p.beta = Eigen::VectorXd::Zero(dims.T);
  p.theta = Eigen::MatrixXd::Zero(dims.L, dims.T);
  p.phi = Eigen::VectorXd::Zero(dims.phi_size());
  return p;
}

bool ModelParams::valid(const ModelDims& dims, double tol) const {
  if (!(delta > 0.0) || !(gamma > 0.0)) return false;
  if (beta.size() != dims.T) return false;
  if (beta.minCoeff() < 0.0 || std::abs(beta.sum() - 1.0) > tol) return false;
  for (int l = 0; l < dims.L; ++l) {
    if (theta.row(l).minCoeff() < 0.0) return false;
    if (std::abs(theta.row(l).sum() - 1.0) > tol) return false;
  }
  for (int t = 0; t < dims.T; ++t) {
    for (int s = 0; s < dims.S(); ++s) {
      auto block = phi.segment(dims.phi_index(t, s), dims.env_sizes[s]);
      if (block.minCoeff() < 0.0) return false;
      if (std::abs(block.sum() - 1.0) > tol) return false;
    }
  }
  return true;
}

Eigen::VectorXd stick_breaking(const Eigen::VectorXd& beta_raw) {
  const int T = static_cast<int>(beta_raw.size()) + 1;
  Eigen::VectorXd beta(T);
  double remaining = 1.0;
  for (int t = 0; t + 1 < T; ++t) {
    double b = beta_raw[t];
    if (!(b > 0.0) || !(b < 1.0))
      throw DomainError("stick_breaking: entry " + std::to_string(t) +
                        " outside (0,1)");
    beta[t] = b * remaining;
    remaining *= (1.0 - b);
  }
  beta[T - 1] = remaining;
  return beta;
}

Eigen::VectorXd stick_breaking_backward(const Eigen::VectorXd& beta_raw,
                                        const Eigen::VectorXd& beta,
                                        const Eigen::VectorXd& grad_beta) {
  const int T = static_cast<int>(beta.size());
  Eigen::VectorXd grad_raw(T - 1);
  // suffix[j] = sum_{t>j} beta_t * g_t; d beta_t / d raw_j = -beta_t/(1-raw_j)
  // for t > j and beta_j/raw_j for t == j
  double suffix = beta[T - 1] * grad_beta[T - 1];
  for (int j = T - 2; j >= 0; --j) {
    grad_raw[j] = grad_beta[j] * (beta[j] / beta_raw[j]) -
                  suffix / (1.0 - beta_raw[j]);
    suffix += beta[j] * grad_beta[j];
  }
  return grad_raw;
}

LogJointGrad LogJointGrad::zeros(const ModelDims& dims) {
  LogJointGrad g;
  g.d_theta = Eigen::MatrixXd::Zero(dims.L, dims.T);
  g.d_phi = Eigen::VectorXd::Zero(dims.phi_size());
  g.d_beta = Eigen::VectorXd::Zero(dims.T);
  g.d_beta_raw = Eigen::VectorXd::Zero(std::max(0, dims.T - 1));
  return g;
}

void LogJointGrad::set_zero() {
  d_theta.setZero();
  d_phi.setZero();
  d_beta.setZero();
  d_beta_raw.setZero();
  d_delta = 0.0;
  d_gamma = 0.0;
}

namespace {

/// shared implementation; grad may be null
double log_joint_impl(const ModelParams& params, const Corpus& corpus,
                      const Hyperparams& hp, const ModelDims& dims,
                      LogJointGrad* grad) {
  const int T = dims.T;
  const int L = dims.L;
  const int S = dims.S();
  const double alpha = hp.alpha;
  const double delta = params.delta;
  const double gamma = params.gamma;

  double value = 0.0;

  // Gamma(1,1) hyperpriors, log pdf = -x (normalizer is 1)
  if (hp.delta_free()) {
    value += -delta;
    if (grad) grad->d_delta += -1.0;
  }
  if (hp.gamma_free()) {
    value += -gamma;
    if (grad) grad->d_gamma += -1.0;
  }

  // GEM sticks: Beta(1,gamma), log pdf = log gamma + (gamma-1) log(1-b)
  for (int t = 0; t + 1 < T; ++t) {
    double b = params.beta_raw[t];
    double l1mb = std::log1p(-std::min(b, 1.0 - kSimplexEps));
    value += std::log(gamma) + (gamma - 1.0) * l1mb;
    if (grad) {
      grad->d_beta_raw[t] += -(gamma - 1.0) / std::max(1.0 - b, kSimplexEps);
      grad->d_gamma += 1.0 / gamma + l1mb;
    }
  }

  // theta rows: Dirichlet(delta * beta); sum of concentrations is delta
  {
    Eigen::VectorXd a(T), lga(T);
    for (int t = 0; t < T; ++t) {
      a[t] = delta * clamp_prob(params.beta[t]);
      lga[t] = std::lgamma(a[t]);
    }
    double norm = std::lgamma(delta) - lga.sum();
    value += L * norm;
    Eigen::VectorXd sum_log_theta = Eigen::VectorXd::Zero(T);
    for (int l = 0; l < L; ++l)
      for (int t = 0; t < T; ++t) {
        double th = clamp_prob(params.theta(l, t));
        double lt = std::log(th);
        sum_log_theta[t] += lt;
        value += (a[t] - 1.0) * lt;
        if (grad) grad->d_theta(l, t) += (a[t] - 1.0) / th;
      }
    if (grad) {
      double d_delta_acc = L * digamma(delta);
      for (int t = 0; t < T; ++t) {
        double psi = digamma(a[t]);
        double bt = clamp_prob(params.beta[t]);
        grad->d_beta[t] += delta * (sum_log_theta[t] - L * psi);
        d_delta_acc += bt * (sum_log_theta[t] - L * psi);
      }
      if (hp.delta_free()) grad->d_delta += d_delta_acc;
    }
  }

  // phi blocks: symmetric Dirichlet(alpha)
  for (int s = 0; s < S; ++s) {
    int K = dims.env_sizes[s];
    double norm = std::lgamma(K * alpha) - K * std::lgamma(alpha);
    value += T * norm;
    for (int t = 0; t < T; ++t) {
      int off = dims.phi_index(t, s);
      for (int o = 0; o < K; ++o) {
        double p = clamp_prob(params.phi[off + o]);
        value += (alpha - 1.0) * std::log(p);
        if (grad) grad->d_phi[off + o] += (alpha - 1.0) / p;
      }
    }
  }

  // marginal likelihood: sum_i log sum_t theta_{l_i,t} phi_{t,x_i,y_i}
  for (const Token& tok : corpus.tokens) {
    double m = 0.0;
    for (int t = 0; t < T; ++t)
      m += params.theta(tok.language, t) *
           params.phi[dims.phi_index(t, tok.environment) + tok.outcome];
    m = std::max(m, 1e-300);
    value += std::log(m);
    if (grad) {
      double inv = 1.0 / m;
      for (int t = 0; t < T; ++t) {
        int idx = dims.phi_index(t, tok.environment) + tok.outcome;
        grad->d_theta(tok.language, t) += params.phi[idx] * inv;
        grad->d_phi[idx] += params.theta(tok.language, t) * inv;
      }
    }
  }

  if (!std::isfinite(value))
    throw NonFiniteDensity("log_joint is not finite (delta=" +
                           std::to_string(delta) + ", gamma=" +
                           std::to_string(gamma) + ")");
  return value;
}

}  // namespace

double log_joint(const ModelParams& params, const Corpus& corpus,
                 const Hyperparams& hp, const ModelDims& dims) {
  return log_joint_impl(params, corpus, hp, dims, nullptr);
}

double log_joint_grad(const ModelParams& params, const Corpus& corpus,
                      const Hyperparams& hp, const ModelDims& dims,
                      LogJointGrad& grad) {
  grad.set_zero();
  return log_joint_impl(params, corpus, hp, dims, &grad);
}

void SimShape::check() const {
  if (L < 1 || S < 1 || outcomes_per_env < 1 || tokens_per_language < 1)
    throw DomainError("simulation shape fields must all be >= 1");
}

namespace {

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

Simulation simulate(const Hyperparams& hp, const SimShape& shape,
                    std::uint64_t seed) {
  hp.check();
  shape.check();
  Rng rng(mix64(seed, 0x73696d /* "sim" */));

  const int T = hp.T;
  std::vector<int> sizes(shape.S, shape.outcomes_per_env);
  ModelDims dims(T, shape.L, sizes);

  ModelParams p = ModelParams::zeros(dims);
  p.delta = hp.fixed_delta ? *hp.fixed_delta : rng.gamma(1.0);
  p.gamma = hp.fixed_gamma ? *hp.fixed_gamma : rng.gamma(1.0);
  for (int t = 0; t + 1 < T; ++t) p.beta_raw[t] = rng.beta_one(p.gamma);
  p.beta = T > 1 ? stick_breaking(p.beta_raw) : Eigen::VectorXd::Ones(1);

  std::vector<double> conc(T), row(T);
  for (int t = 0; t < T; ++t) conc[t] = p.delta * p.beta[t];
  for (int l = 0; l < shape.L; ++l) {
    rng.dirichlet(conc, row);
    for (int t = 0; t < T; ++t) p.theta(l, t) = row[t];
  }
  std::vector<double> outrow(shape.outcomes_per_env);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < shape.S; ++s) {
      rng.dirichlet_symmetric(hp.alpha, shape.outcomes_per_env, outrow);
      for (int o = 0; o < shape.outcomes_per_env; ++o)
        p.phi[dims.phi_index(t, s) + o] = outrow[o];
    }

  GroundTruth truth;
  truth.params = p;
  truth.dims = dims;
  for (int l = 0; l < shape.L; ++l)
    truth.languages.push_back("lang" + zero_pad(l, 3));
  for (int s = 0; s < shape.S; ++s) {
    truth.environments.emplace_back("etym" + zero_pad(s, 4), "x");
    std::vector<std::string> names;
    for (int o = 0; o < shape.outcomes_per_env; ++o)
      names.push_back("r" + zero_pad(o, 2));
    truth.outcome_names.push_back(std::move(names));
  }

  // draw tokens; environments are assigned by a global round robin so
  // coverage stays balanced
  std::string tsv = "language\tetymon\tsound\treflex\n";
  std::vector<double> theta_row(T), phi_row(shape.outcomes_per_env);
  int counter = 0;
  for (int l = 0; l < shape.L; ++l) {
    for (int t = 0; t < T; ++t) theta_row[t] = p.theta(l, t);
    for (int j = 0; j < shape.tokens_per_language; ++j) {
      int s = counter % shape.S;
      ++counter;
      int z = rng.categorical(theta_row);
      for (int o = 0; o < shape.outcomes_per_env; ++o)
        phi_row[o] = p.phi[dims.phi_index(z, s) + o];
      int y = rng.categorical(phi_row);
      truth.z.push_back(z);
      tsv += truth.languages[l];
      tsv += '\t';
      tsv += truth.environments[s].first;
      tsv += '\t';
      tsv += truth.environments[s].second;
      tsv += '\t';
      tsv += truth.outcome_names[s][y];
      tsv += '\n';
    }
  }

  Simulation sim;
  sim.corpus = parse_dataset_text(tsv);
  sim.truth = std::move(truth);
  return sim;
}

}  // namespace admix
