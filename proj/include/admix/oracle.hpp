#pragma once

#include <Eigen/Dense>
#include <vector>

#include "admix/align.hpp"
#include "admix/analytics.hpp"
#include "admix/genmodel.hpp"

namespace admix {

/// Dense-grid posterior integration for tiny models (T<=2, L<=2, S<=2) with
/// delta and gamma pinned; the independent oracle for the VI stack.
struct GridSpec {
  int points_per_dim = 50;
  double delta = 1.0;
  double gamma = 1.0;
  long max_cells = 100000000;  // 1e8 guard
};

struct GridMoments {
  Eigen::MatrixXd theta_mean;  // L x T
  Eigen::VectorXd phi_mean;    // flat per ModelDims
  double beta_raw_mean = 0.0;  // meaningful only when T == 2
  long cells = 0;
  double log_normalizer = 0.0;
};

/// Midpoint-rule expectations over the open interior grid of the free
/// coordinates (beta'_1 when T=2; theta and phi simplex coordinates).
/// Throws GridTooLarge when the cell count exceeds the guard or the model
/// shape is outside the tiny-model envelope.
GridMoments grid_posterior_moments(const Corpus& corpus, const Hyperparams& hp,
                                   const GridSpec& spec);

struct RecoveryReport {
  double accuracy = 0.0;        // best-matching token assignment accuracy
  int active_components = 0;    // consensus usage > 5%
  double theta_mae = 0.0;       // after matching inferred to truth components
  std::vector<int> matching;    // truth component -> inferred component
  int truth_components = 0;
  long tokens = 0;
};

/// Hungarian best-match between truth labels and inferred argmax posteriors.
RecoveryReport recovery_score(const GroundTruth& truth,
                              const ConsensusEstimate& consensus,
                              const std::vector<TokenPosterior>& posteriors);

}  // namespace admix
