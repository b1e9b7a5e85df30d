#pragma once

#include <Eigen/Dense>
#include <string>

#include "admix/genmodel.hpp"

namespace admix {

/// Coordinate map for the unconstrained vector. Layout, in order:
///   [beta' sticks: T-1 logit coords]
///   [theta rows, language-major: L blocks of T-1 simplex coords]
///   [phi blocks, component-major then environment: T*S blocks of K_s-1]
///   [log delta] [log gamma]            (each present only when free)
/// so D = (T-1) + L(T-1) + sum_s T(K_s-1) + (#free hyperparameters).
struct ParamLayout {
  ModelDims dims;
  Hyperparams hp;

  int beta_offset = 0;
  int theta_offset = 0;
  int phi_offset = 0;
  int delta_index = -1;  // -1 when fixed
  int gamma_index = -1;
  int dim = 0;

  ParamLayout() = default;
  ParamLayout(const ModelDims& dims, const Hyperparams& hp);

  int theta_block(int l) const { return theta_offset + l * (dims.T - 1); }
  int phi_block(int t, int s) const {
    return phi_offset + t * phi_per_component_free_ +
           (dims.env_offsets[s] - s);  // prefix of (K-1) sizes
  }
  int phi_block_size(int s) const { return dims.env_sizes[s] - 1; }

  /// JSON manifest describing every block (for the `layout` CLI).
  std::string manifest_json() const;

 private:
  int phi_per_component_free_ = 0;
};

// interval (0,1) via logit; simplex via the stick-breaking bijection with
// Stan-style centering offsets (all-zeros maps to the uniform simplex);
// positives via log.

/// Maps params into R^D. Entries are clamped into [eps, 1-eps] first; throws
/// DomainError if a simplex block is degenerate even after clamping.
Eigen::VectorXd to_unconstrained(const ModelParams& params,
                                 const ParamLayout& layout);

/// Inverse of to_unconstrained; also returns the total log|det J| of the
/// map from u to the constrained free coordinates.
struct ConstrainResult {
  ModelParams params;
  double log_det_jacobian = 0.0;
};

ConstrainResult to_constrained(const Eigen::VectorXd& u, const ParamLayout& layout);

/// In-place variant reusing storage (hot path).
double constrain_into(const Eigen::VectorXd& u, const ParamLayout& layout,
                      ModelParams& params);

/// Chain rule: given d(objective)/d(constrained params) for an objective that
/// already includes log|det J|(u), returns d(objective)/du. The Jacobian
/// log-determinant derivative is folded in here; grad.d_beta is routed
/// through the stick-breaking chain and combined with grad.d_beta_raw.
Eigen::VectorXd constrain_grad(const Eigen::VectorXd& u, const ParamLayout& layout,
                               const ModelParams& params, const LogJointGrad& grad);

// exposed for tests: one simplex block
void simplex_constrain(const double* u, int K, double* x, double& log_det);
void simplex_unconstrain(const double* x, int K, double* u);

}  // namespace admix
