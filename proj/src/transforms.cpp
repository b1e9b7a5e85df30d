#include "admix/transforms.hpp"

#include <cmath>

#include "admix/errors.hpp"
#include "json.hpp"

namespace admix {

namespace {

constexpr double kUnitEps = 1e-15;  // keeps logit/sigmoid away from 0 and 1

double sigmoid(double x) {
  double v = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return std::min(std::max(v, kUnitEps), 1.0 - kUnitEps);
}

double logit(double p) {
  p = std::min(std::max(p, kUnitEps), 1.0 - kUnitEps);
  return std::log(p) - std::log1p(-p);
}

}  // namespace

ParamLayout::ParamLayout(const ModelDims& d, const Hyperparams& h)
    : dims(d), hp(h) {
  const int T = dims.T;
  phi_per_component_free_ = dims.phi_per_component - dims.S();
  beta_offset = 0;
  theta_offset = T - 1;
  phi_offset = theta_offset + dims.L * (T - 1);
  int cursor = phi_offset + T * phi_per_component_free_;
  if (hp.delta_free()) delta_index = cursor++;
  if (hp.gamma_free()) gamma_index = cursor++;
  dim = cursor;
}

void simplex_constrain(const double* u, int K, double* x, double& log_det) {
  double stick = 1.0;
  for (int k = 0; k + 1 < K; ++k) {
    double z = sigmoid(u[k] - std::log(static_cast<double>(K - 1 - k)));
    x[k] = z * stick;
    log_det += std::log(z) + std::log1p(-z) + std::log(stick);
    stick *= (1.0 - z);
  }
  x[K - 1] = stick;
}

void simplex_unconstrain(const double* x, int K, double* u) {
  // multiplicative stick update mirrors the forward pass, so u-space round
  // trips stay exact near corners
  double stick = 1.0;
  for (int k = 0; k + 1 < K; ++k) {
    if (!(stick > 0.0))
      throw DomainError("simplex_unconstrain: exhausted stick (boundary value)");
    double z = x[k] / stick;
    u[k] = logit(z) + std::log(static_cast<double>(K - 1 - k));
    stick *= (1.0 - std::min(z, 1.0));
  }
}

namespace {

/// backward through one simplex block, fusing the block's log-det term.
/// gx = d(objective)/dx; writes d(objective)/du into gu.
void simplex_constrain_grad(const double* u, int K, const double* gx, double* gu) {
  // recompute forward caches
  std::vector<double> z(K - 1), stick(K);
  stick[0] = 1.0;
  for (int k = 0; k + 1 < K; ++k) {
    z[k] = sigmoid(u[k] - std::log(static_cast<double>(K - 1 - k)));
    stick[k + 1] = stick[k] * (1.0 - z[k]);
  }
  double gs = gx[K - 1];  // x_{K-1} = stick_{K-1}
  for (int k = K - 2; k >= 0; --k) {
    double gz = (gx[k] - gs) * stick[k] + 1.0 / z[k] - 1.0 / (1.0 - z[k]);
    double gstick = gx[k] * z[k] + gs * (1.0 - z[k]) + 1.0 / stick[k];
    gu[k] = gz * z[k] * (1.0 - z[k]);
    gs = gstick;
  }
}

}  // namespace

Eigen::VectorXd to_unconstrained(const ModelParams& params, const ParamLayout& layout) {
  const ModelDims& dims = layout.dims;
  const int T = dims.T;
  Eigen::VectorXd u(layout.dim);

  for (int t = 0; t + 1 < T; ++t) u[layout.beta_offset + t] = logit(params.beta_raw[t]);

  std::vector<double> row(T);
  for (int l = 0; l < dims.L; ++l) {
    for (int t = 0; t < T; ++t) row[t] = params.theta(l, t);
    if (T > 1) simplex_unconstrain(row.data(), T, u.data() + layout.theta_block(l));
  }
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      int K = dims.env_sizes[s];
      if (K > 1)
        simplex_unconstrain(params.phi.data() + dims.phi_index(t, s), K,
                            u.data() + layout.phi_block(t, s));
    }
  if (layout.delta_index >= 0) {
    if (!(params.delta > 0.0)) throw DomainError("delta must be > 0");
    u[layout.delta_index] = std::log(params.delta);
  }
  if (layout.gamma_index >= 0) {
    if (!(params.gamma > 0.0)) throw DomainError("gamma must be > 0");
    u[layout.gamma_index] = std::log(params.gamma);
  }
  return u;
}

double constrain_into(const Eigen::VectorXd& u, const ParamLayout& layout,
                      ModelParams& params) {
  const ModelDims& dims = layout.dims;
  const int T = dims.T;
  if (u.size() != layout.dim)
    throw DimensionMismatch("unconstrained vector has dimension " +
                            std::to_string(u.size()) + ", layout needs " +
                            std::to_string(layout.dim));
  double log_det = 0.0;

  for (int t = 0; t + 1 < T; ++t) {
    double b = sigmoid(u[layout.beta_offset + t]);
    params.beta_raw[t] = b;
    log_det += std::log(b) + std::log1p(-b);
  }
  params.beta = stick_breaking(params.beta_raw);

  std::vector<double> row(T);
  for (int l = 0; l < dims.L; ++l) {
    if (T > 1) {
      simplex_constrain(u.data() + layout.theta_block(l), T, row.data(), log_det);
      for (int t = 0; t < T; ++t) params.theta(l, t) = row[t];
    } else {
      params.theta(l, 0) = 1.0;
    }
  }
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      int K = dims.env_sizes[s];
      if (K > 1)
        simplex_constrain(u.data() + layout.phi_block(t, s), K,
                          params.phi.data() + dims.phi_index(t, s), log_det);
      else
        params.phi[dims.phi_index(t, s)] = 1.0;
    }
  if (layout.delta_index >= 0) {
    params.delta = std::exp(u[layout.delta_index]);
    log_det += u[layout.delta_index];
  } else {
    params.delta = *layout.hp.fixed_delta;
  }
  if (layout.gamma_index >= 0) {
    params.gamma = std::exp(u[layout.gamma_index]);
    log_det += u[layout.gamma_index];
  } else {
    params.gamma = *layout.hp.fixed_gamma;
  }
  return log_det;
}

ConstrainResult to_constrained(const Eigen::VectorXd& u, const ParamLayout& layout) {
  ConstrainResult result;
  result.params = ModelParams::zeros(layout.dims);
  result.log_det_jacobian = constrain_into(u, layout, result.params);
  return result;
}

Eigen::VectorXd constrain_grad(const Eigen::VectorXd& u, const ParamLayout& layout,
                               const ModelParams& params, const LogJointGrad& grad) {
  const ModelDims& dims = layout.dims;
  const int T = dims.T;
  Eigen::VectorXd gu = Eigen::VectorXd::Zero(layout.dim);

  // beta' coords: stick chain + direct Beta prior term + logit jacobian term
  if (T > 1) {
    Eigen::VectorXd d_raw =
        stick_breaking_backward(params.beta_raw, params.beta, grad.d_beta) +
        grad.d_beta_raw;
    for (int t = 0; t + 1 < T; ++t) {
      double b = params.beta_raw[t];
      gu[layout.beta_offset + t] = d_raw[t] * b * (1.0 - b) + (1.0 - 2.0 * b);
    }
  }

  std::vector<double> gx(std::max(T, 2));
  for (int l = 0; l < dims.L && T > 1; ++l) {
    for (int t = 0; t < T; ++t) gx[t] = grad.d_theta(l, t);
    simplex_constrain_grad(u.data() + layout.theta_block(l), T, gx.data(),
                           gu.data() + layout.theta_block(l));
  }
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      int K = dims.env_sizes[s];
      if (K > 1)
        simplex_constrain_grad(u.data() + layout.phi_block(t, s), K,
                               grad.d_phi.data() + dims.phi_index(t, s),
                               gu.data() + layout.phi_block(t, s));
    }
  if (layout.delta_index >= 0)
    gu[layout.delta_index] = grad.d_delta * params.delta + 1.0;
  if (layout.gamma_index >= 0)
    gu[layout.gamma_index] = grad.d_gamma * params.gamma + 1.0;
  return gu;
}

std::string ParamLayout::manifest_json() const {
  nlohmann::json blocks = nlohmann::json::array();
  const int T = dims.T;
  blocks.push_back({{"name", "beta_raw"},
                    {"transform", "logit"},
                    {"offset", beta_offset},
                    {"size", T - 1}});
  for (int l = 0; l < dims.L; ++l)
    blocks.push_back({{"name", "theta[" + std::to_string(l) + "]"},
                      {"transform", "stick_breaking_simplex"},
                      {"offset", theta_block(l)},
                      {"size", T - 1}});
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < dims.S(); ++s)
      blocks.push_back(
          {{"name", "phi[" + std::to_string(t) + "][" + std::to_string(s) + "]"},
           {"transform", "stick_breaking_simplex"},
           {"offset", phi_block(t, s)},
           {"size", phi_block_size(s)}});
  if (delta_index >= 0)
    blocks.push_back({{"name", "delta"},
                      {"transform", "log"},
                      {"offset", delta_index},
                      {"size", 1}});
  if (gamma_index >= 0)
    blocks.push_back({{"name", "gamma"},
                      {"transform", "log"},
                      {"offset", gamma_index},
                      {"size", 1}});
  nlohmann::json j{{"dimension", dim},
                   {"T", T},
                   {"L", dims.L},
                   {"S", dims.S()},
                   {"blocks", blocks}};
  return j.dump(2);
}

}  // namespace admix
