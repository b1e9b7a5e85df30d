#include "admix/oracle.hpp"

#include <cmath>
#include <limits>

#include "admix/errors.hpp"

namespace admix {

namespace {

// one free coordinate of the grid
struct FreeCoord {
  enum Kind { BetaRaw, Theta, Phi } kind;
  int l = 0;  // language (Theta)
  int t = 0;  // component (Theta index / Phi block)
  int s = 0;  // environment (Phi block)
  int k = 0;  // position within the simplex block
};

}  // namespace

GridMoments grid_posterior_moments(const Corpus& corpus, const Hyperparams& hp,
                                   const GridSpec& spec) {
  hp.check();
  ModelDims dims(hp.T, corpus.table);
  if (dims.T > 2 || dims.L > 2 || dims.S() > 2)
    throw GridTooLarge("grid oracle supports T<=2, L<=2, S<=2");

  const int T = dims.T;
  const int G = spec.points_per_dim;
  if (G < 2) throw DomainError("points_per_dim must be >= 2");

  std::vector<FreeCoord> coords;
  if (T == 2) coords.push_back({FreeCoord::BetaRaw});
  if (T == 2)
    for (int l = 0; l < dims.L; ++l) coords.push_back({FreeCoord::Theta, l, 0});
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < dims.S(); ++s)
      for (int k = 0; k + 1 < dims.env_sizes[s]; ++k)
        coords.push_back({FreeCoord::Phi, 0, t, s, k});

  const int ndim = static_cast<int>(coords.size());
  double cells_d = std::pow(static_cast<double>(G), ndim);
  if (cells_d > static_cast<double>(spec.max_cells))
    throw GridTooLarge("grid would have " + std::to_string(cells_d) +
                       " cells (guard " + std::to_string(spec.max_cells) + ")");
  const long cells = static_cast<long>(cells_d);

  Hyperparams hp_fixed = hp;
  hp_fixed.fixed_delta = spec.delta;
  hp_fixed.fixed_gamma = spec.gamma;

  ModelParams params = ModelParams::zeros(dims);
  params.delta = spec.delta;
  params.gamma = spec.gamma;
  if (T == 1) {
    params.beta = Eigen::VectorXd::Ones(1);
    params.theta.setOnes();
  }

  // running rescaled accumulation: sums are relative to exp(max_logp)
  double max_logp = -std::numeric_limits<double>::infinity();
  double wsum = 0.0;
  Eigen::MatrixXd theta_acc = Eigen::MatrixXd::Zero(dims.L, T);
  Eigen::VectorXd phi_acc = Eigen::VectorXd::Zero(dims.phi_size());
  double braw_acc = 0.0;

  std::vector<int> idx(ndim, 0);
  for (long cell = 0; cell < cells; ++cell) {
    // place coordinates; half-step offset keeps the grid off the boundary
    bool feasible = true;
    for (int d = 0; d < ndim; ++d) {
      double x = (idx[d] + 0.5) / G;
      const FreeCoord& c = coords[d];
      switch (c.kind) {
        case FreeCoord::BetaRaw:
          params.beta_raw[0] = x;
          break;
        case FreeCoord::Theta:
          params.theta(c.l, 0) = x;
          params.theta(c.l, 1) = 1.0 - x;
          break;
        case FreeCoord::Phi:
          params.phi[dims.phi_index(c.t, c.s) + c.k] = x;
          break;
      }
    }
    if (T == 2) params.beta = stick_breaking(params.beta_raw);
    // complete phi blocks and check the simplex constraint
    for (int t = 0; t < T && feasible; ++t)
      for (int s = 0; s < dims.S() && feasible; ++s) {
        int K = dims.env_sizes[s];
        int off = dims.phi_index(t, s);
        double sum = 0.0;
        for (int k = 0; k + 1 < K; ++k) sum += params.phi[off + k];
        if (sum >= 1.0) {
          feasible = false;
          break;
        }
        params.phi[off + K - 1] = 1.0 - sum;
      }

    if (feasible) {
      double logp = log_joint(params, corpus, hp_fixed, dims);
      if (logp > max_logp) {
        double scale = std::exp(max_logp - logp);
        wsum *= scale;
        theta_acc *= scale;
        phi_acc *= scale;
        braw_acc *= scale;
        max_logp = logp;
      }
      double w = std::exp(logp - max_logp);
      wsum += w;
      theta_acc += w * params.theta;
      phi_acc += w * params.phi;
      if (T == 2) braw_acc += w * params.beta_raw[0];
    }

    // odometer
    for (int d = ndim - 1; d >= 0; --d) {
      if (++idx[d] < G) break;
      idx[d] = 0;
    }
  }

  if (!(wsum > 0.0)) throw NonFiniteDensity("grid posterior has zero mass");

  GridMoments m;
  m.theta_mean = theta_acc / wsum;
  m.phi_mean = phi_acc / wsum;
  m.beta_raw_mean = (T == 2) ? braw_acc / wsum : 1.0;
  m.cells = cells;
  m.log_normalizer = max_logp + std::log(wsum) - ndim * std::log(static_cast<double>(G));
  return m;
}

RecoveryReport recovery_score(const GroundTruth& truth,
                              const ConsensusEstimate& consensus,
                              const std::vector<TokenPosterior>& posteriors) {
  const int K = truth.dims.T;
  const int T = consensus.dims.T;
  const long N = static_cast<long>(posteriors.size());
  if (N != static_cast<long>(truth.z.size()))
    throw DimensionMismatch("recovery_score: posterior/label count mismatch");

  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(K, T);
  for (long i = 0; i < N; ++i) {
    int t;
    posteriors[i].probs.maxCoeff(&t);
    confusion(truth.z[i], t) += 1.0;
  }
  // maximize matched tokens: Hungarian on the negated, square-padded matrix
  int n = std::max(K, T);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  cost.topLeftCorner(K, T) = -confusion;
  std::vector<int> assign = hungarian(cost);

  RecoveryReport report;
  report.truth_components = K;
  report.tokens = N;
  report.matching.assign(K, -1);
  double matched = 0.0;
  for (int k = 0; k < K; ++k) {
    int t = assign[k];
    if (t < T) {
      report.matching[k] = t;
      matched += confusion(k, t);
    }
  }
  report.accuracy = N > 0 ? matched / N : 0.0;

  for (int t = 0; t < T; ++t)
    if (consensus.usage[t] > 0.05) report.active_components++;

  double mae = 0.0;
  long terms = 0;
  for (int l = 0; l < truth.dims.L; ++l)
    for (int k = 0; k < K; ++k) {
      int t = report.matching[k];
      if (t < 0) continue;
      mae += std::abs(truth.params.theta(l, k) - consensus.theta_map(l, t));
      ++terms;
    }
  report.theta_mae = terms > 0 ? mae / terms : 0.0;
  return report;
}

}  // namespace admix
