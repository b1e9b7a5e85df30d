#pragma once

#include <Eigen/Dense>
#include <vector>

#include "admix/vinfer.hpp"

namespace admix {

/// sigma[a] = component index in the other run matching reference component a.
struct ComponentPermutation {
  std::vector<int> sigma;
  bool valid() const;
};

/// Permutation-aligned average of run-level variational means.
struct ConsensusEstimate {
  Eigen::MatrixXd theta_map;  // L x T, rows renormalized
  Eigen::VectorXd phi_map;    // flat per ModelDims
  Eigen::VectorXd usage;      // overall component proportions (token-weighted)
  ModelDims dims;
};

/// Decomposed KL cost: C(a,b) is reference component a's contribution to
/// KL(run1 || permuted other) when a is relabeled to b, summed over theta
/// columns and phi blocks. Inputs clamped before logs.
Eigen::MatrixXd kl_cost_matrix(const ModelParams& ref, const ModelParams& other,
                               const ModelDims& dims);

/// Exact minimum-cost assignment (O(n^3) Hungarian). Returns, for each row,
/// the assigned column. Ties resolve deterministically.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

/// Align all runs to run 0 by minimizing total decomposed KL cost.
std::vector<ComponentPermutation> align(const std::vector<FitResult>& runs,
                                        const ModelDims& dims);

/// Average aligned variational-mean parameters and renormalize.
/// language_weights are token shares per language (sum 1); usage_t is the
/// weighted average of consensus theta columns.
ConsensusEstimate merge(const std::vector<FitResult>& runs,
                        const std::vector<ComponentPermutation>& permutations,
                        const std::vector<double>& language_weights,
                        const ModelDims& dims);

/// Token shares from corpus counts.
std::vector<double> language_token_shares(const Corpus& corpus);

}  // namespace admix
