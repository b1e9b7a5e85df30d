#include "admix/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "admix/errors.hpp"

namespace admix {

namespace {

inline double clamp_prob(double x) { return x < kSimplexEps ? kSimplexEps : x; }

}  // namespace

bool ComponentPermutation::valid() const {
  std::vector<bool> seen(sigma.size(), false);
  for (int s : sigma) {
    if (s < 0 || s >= static_cast<int>(sigma.size()) || seen[s]) return false;
    seen[s] = true;
  }
  return true;
}

Eigen::MatrixXd kl_cost_matrix(const ModelParams& ref, const ModelParams& other,
                               const ModelDims& dims) {
  const int T = dims.T;
  if (ref.theta.rows() != other.theta.rows() || ref.theta.cols() != T ||
      other.theta.cols() != T || ref.phi.size() != other.phi.size())
    throw DimensionMismatch("kl_cost_matrix: runs have different shapes");

  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(T, T);
  const int L = static_cast<int>(ref.theta.rows());
  for (int a = 0; a < T; ++a)
    for (int b = 0; b < T; ++b) {
      double c = 0.0;
      for (int l = 0; l < L; ++l) {
        double p = clamp_prob(ref.theta(l, a));
        double q = clamp_prob(other.theta(l, b));
        c += p * (std::log(p) - std::log(q));
      }
      for (int s = 0; s < dims.S(); ++s) {
        int offa = dims.phi_index(a, s), offb = dims.phi_index(b, s);
        for (int o = 0; o < dims.env_sizes[s]; ++o) {
          double p = clamp_prob(ref.phi[offa + o]);
          double q = clamp_prob(other.phi[offb + o]);
          c += p * (std::log(p) - std::log(q));
        }
      }
      cost(a, b) = c;
    }
  return cost;
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  // potentials formulation; rows/columns 1-based internally
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionMismatch("hungarian: matrix not square");
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      double delta = INF;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

std::vector<ComponentPermutation> align(const std::vector<FitResult>& runs,
                                        const ModelDims& dims) {
  if (runs.size() < 2) throw DimensionMismatch("align needs at least 2 runs");
  std::vector<ComponentPermutation> perms(runs.size());
  const int T = dims.T;
  perms[0].sigma.resize(T);
  for (int t = 0; t < T; ++t) perms[0].sigma[t] = t;
  for (size_t r = 1; r < runs.size(); ++r) {
    Eigen::MatrixXd cost =
        kl_cost_matrix(runs[0].map_point, runs[r].map_point, dims);
    perms[r].sigma = hungarian(cost);
  }
  return perms;
}

ConsensusEstimate merge(const std::vector<FitResult>& runs,
                        const std::vector<ComponentPermutation>& permutations,
                        const std::vector<double>& language_weights,
                        const ModelDims& dims) {
  const int T = dims.T;
  const int L = dims.L;
  ConsensusEstimate est;
  est.dims = dims;
  est.theta_map = Eigen::MatrixXd::Zero(L, T);
  est.phi_map = Eigen::VectorXd::Zero(dims.phi_size());

  for (size_t r = 0; r < runs.size(); ++r) {
    const ModelParams& p = runs[r].map_point;
    const auto& sig = permutations[r].sigma;
    for (int a = 0; a < T; ++a) {
      int b = sig[a];
      est.theta_map.col(a) += p.theta.col(b);
      for (int s = 0; s < dims.S(); ++s)
        est.phi_map.segment(dims.phi_index(a, s), dims.env_sizes[s]) +=
            p.phi.segment(dims.phi_index(b, s), dims.env_sizes[s]);
    }
  }
  est.theta_map /= static_cast<double>(runs.size());
  est.phi_map /= static_cast<double>(runs.size());

  // renormalize rows to kill averaging drift
  for (int l = 0; l < L; ++l) est.theta_map.row(l) /= est.theta_map.row(l).sum();
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      auto block = est.phi_map.segment(dims.phi_index(t, s), dims.env_sizes[s]);
      block /= block.sum();
    }

  est.usage = Eigen::VectorXd::Zero(T);
  for (int l = 0; l < L; ++l)
    est.usage += language_weights[l] * est.theta_map.row(l).transpose();
  return est;
}

std::vector<double> language_token_shares(const Corpus& corpus) {
  auto counts = corpus.language_counts();
  std::vector<double> shares(counts.size(), 0.0);
  double n = std::max(1, corpus.size());
  for (size_t l = 0; l < counts.size(); ++l) shares[l] = counts[l] / n;
  return shares;
}

}  // namespace admix
