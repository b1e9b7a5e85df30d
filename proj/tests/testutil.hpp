#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "admix/corpus.hpp"
#include "admix/genmodel.hpp"
#include "admix/rng.hpp"

namespace testutil {

/// central finite differences, h per coordinate
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int d = 0; d < x.size(); ++d) {
    double orig = x[d];
    xp[d] = orig + h;
    double fp = f(xp);
    xp[d] = orig - h;
    double fm = f(xp);
    xp[d] = orig;
    g[d] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// gradient-check relative error: |a-b| / max(1, |a|, |b|)
inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (int d = 0; d < a.size(); ++d) worst = std::max(worst, rel_err(a[d], b[d]));
  return worst;
}

/// exhaustive minimum-cost assignment; independent oracle for hungarian()
inline std::pair<std::vector<int>, double> brute_force_assignment(
    const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_cost};
}

/// tiny corpus builder: rows of (language, etymon, sound, reflex)
inline admix::Corpus make_corpus(
    const std::vector<std::array<std::string, 4>>& rows) {
  std::string tsv = "language\tetymon\tsound\treflex\n";
  for (const auto& r : rows)
    tsv += r[0] + "\t" + r[1] + "\t" + r[2] + "\t" + r[3] + "\n";
  return admix::parse_dataset_text(tsv);
}

/// random interior model parameters for a given shape
inline admix::ModelParams random_params(const admix::ModelDims& dims,
                                        admix::Rng& rng, double conc = 2.0) {
  admix::ModelParams p = admix::ModelParams::zeros(dims);
  for (int t = 0; t + 1 < dims.T; ++t)
    p.beta_raw[t] = 0.05 + 0.9 * rng.uniform();
  p.beta = admix::stick_breaking(p.beta_raw);
  std::vector<double> row(std::max(dims.T, 2));
  for (int l = 0; l < dims.L; ++l) {
    rng.dirichlet_symmetric(conc, dims.T, {row.data(), (size_t)dims.T});
    for (int t = 0; t < dims.T; ++t) p.theta(l, t) = row[t];
  }
  for (int t = 0; t < dims.T; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      int k = dims.env_sizes[s];
      std::vector<double> block(k);
      rng.dirichlet_symmetric(conc, k, block);
      for (int o = 0; o < k; ++o) p.phi[dims.phi_index(t, s) + o] = block[o];
    }
  p.delta = 0.3 + 2.0 * rng.uniform();
  p.gamma = 0.3 + 2.0 * rng.uniform();
  return p;
}

/// chi-square critical value via the Wilson-Hilferty approximation
inline double chi2_critical(double df, double z) {
  double a = 2.0 / (9.0 * df);
  double c = 1.0 - a + z * std::sqrt(a);
  return df * c * c * c;
}

}  // namespace testutil
