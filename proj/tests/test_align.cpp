#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "admix/align.hpp"
#include "admix/errors.hpp"
#include "admix/rng.hpp"
#include "testutil.hpp"

using namespace admix;

namespace {

FitResult fake_run(const ModelDims& dims, Rng& rng, double conc = 0.4) {
  FitResult r;
  r.map_point = testutil::random_params(dims, rng, conc);
  return r;
}

FitResult permuted_copy(const FitResult& src, const ModelDims& dims,
                        const std::vector<int>& where) {
  // component a of src lands at index where[a]
  FitResult out = src;
  for (int a = 0; a < dims.T; ++a) {
    out.map_point.theta.col(where[a]) = src.map_point.theta.col(a);
    for (int s = 0; s < dims.S(); ++s)
      for (int o = 0; o < dims.env_sizes[s]; ++o)
        out.map_point.phi[dims.phi_index(where[a], s) + o] =
            src.map_point.phi[dims.phi_index(a, s) + o];
  }
  return out;
}

}  // namespace

TEST_CASE("hungarian agrees with brute force on random matrices") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 2 + static_cast<int>(rng.raw() % 5);  // up to 6
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = rng.normal();
    auto assign = hungarian(cost);
    auto [best, best_cost] = testutil::brute_force_assignment(cost);
    double got = 0.0;
    std::vector<bool> seen(n, false);
    for (int i = 0; i < n; ++i) {
      got += cost(i, assign[i]);
      REQUIRE(!seen[assign[i]]);
      seen[assign[i]] = true;
    }
    CHECK(got == doctest::Approx(best_cost).epsilon(1e-12));
  }
}

TEST_CASE("identical runs cost zero on the diagonal; optimum is identity") {
  ModelDims dims(4, 5, {2, 3, 2});
  Rng rng(17);
  FitResult a = fake_run(dims, rng);
  Eigen::MatrixXd cost = kl_cost_matrix(a.map_point, a.map_point, dims);
  for (int t = 0; t < 4; ++t) CHECK(cost(t, t) == doctest::Approx(0.0));
  auto assign = hungarian(cost);
  for (int t = 0; t < 4; ++t) CHECK(assign[t] == t);
}

TEST_CASE("swapped components are recovered with zero cost") {
  ModelDims dims(3, 4, {2, 2});
  Rng rng(19);
  FitResult a = fake_run(dims, rng);
  FitResult b = permuted_copy(a, dims, {1, 0, 2});
  Eigen::MatrixXd cost = kl_cost_matrix(a.map_point, b.map_point, dims);
  auto assign = hungarian(cost);
  CHECK(assign == std::vector<int>{1, 0, 2});
  double total = 0.0;
  for (int t = 0; t < 3; ++t) total += cost(t, assign[t]);
  CHECK(std::abs(total) < 1e-9);
}

TEST_CASE("assigned cost never exceeds the identity assignment") {
  Rng rng(23);
  ModelDims dims(5, 6, {3, 2});
  for (int rep = 0; rep < 50; ++rep) {
    FitResult a = fake_run(dims, rng);
    FitResult b = fake_run(dims, rng);
    Eigen::MatrixXd cost = kl_cost_matrix(a.map_point, b.map_point, dims);
    auto assign = hungarian(cost);
    double got = 0.0, identity = 0.0;
    for (int t = 0; t < 5; ++t) {
      got += cost(t, assign[t]);
      identity += cost(t, t);
    }
    CHECK(got <= identity + 1e-12);
  }
}

TEST_CASE("cost entries respect the cross-entropy lower bound") {
  // C(a,b) = -H(ref_a) + cross-entropy >= -H(ref_a) since q <= 1
  Rng rng(29);
  ModelDims dims(3, 4, {2, 3});
  FitResult a = fake_run(dims, rng);
  FitResult b = fake_run(dims, rng);
  Eigen::MatrixXd cost = kl_cost_matrix(a.map_point, b.map_point, dims);
  for (int t = 0; t < 3; ++t) {
    double neg_entropy = 0.0;
    for (int l = 0; l < 4; ++l) {
      double p = a.map_point.theta(l, t);
      neg_entropy += p * std::log(std::max(p, 1e-12));
    }
    for (int s = 0; s < dims.S(); ++s)
      for (int o = 0; o < dims.env_sizes[s]; ++o) {
        double p = a.map_point.phi[dims.phi_index(t, s) + o];
        neg_entropy += p * std::log(std::max(p, 1e-12));
      }
    for (int u = 0; u < 3; ++u) CHECK(cost(t, u) >= neg_entropy - 1e-9);
  }
}

TEST_CASE("kl_cost_matrix rejects mismatched shapes") {
  Rng rng(5);
  ModelDims dims(3, 4, {2, 2});
  ModelDims other(3, 5, {2, 2});
  FitResult a = fake_run(dims, rng);
  FitResult b = fake_run(other, rng);
  CHECK_THROWS_AS(kl_cost_matrix(a.map_point, b.map_point, dims),
                  DimensionMismatch);
}

TEST_CASE("align recovers synthetic permutations of a reference run") {
  ModelDims dims(6, 8, {3, 2, 4});
  Rng rng(41);
  FitResult ref = fake_run(dims, rng);
  std::vector<int> where(6);
  std::iota(where.begin(), where.end(), 0);

  std::mt19937 shuffler(99);
  std::vector<FitResult> runs{ref};
  std::vector<std::vector<int>> applied;
  for (int r = 0; r < 3; ++r) {
    std::shuffle(where.begin(), where.end(), shuffler);
    applied.push_back(where);
    runs.push_back(permuted_copy(ref, dims, where));
  }
  auto perms = align(runs, dims);
  REQUIRE(perms.size() == 4);
  for (int t = 0; t < 6; ++t) CHECK(perms[0].sigma[t] == t);
  for (int r = 1; r < 4; ++r) {
    REQUIRE(perms[r].valid());
    // reference component a lives at applied[r-1][a] in run r
    for (int a = 0; a < 6; ++a) CHECK(perms[r].sigma[a] == applied[r - 1][a]);
  }
}

TEST_CASE("two identical runs align as identity") {
  ModelDims dims(4, 3, {2, 2});
  Rng rng(53);
  FitResult a = fake_run(dims, rng);
  auto perms = align({a, a}, dims);
  for (int t = 0; t < 4; ++t) {
    CHECK(perms[0].sigma[t] == t);
    CHECK(perms[1].sigma[t] == t);
  }
}

TEST_CASE("alignment returns a full bijection with near-empty components") {
  ModelDims dims(4, 3, {2});
  Rng rng(61);
  FitResult a = fake_run(dims, rng);
  FitResult b = fake_run(dims, rng);
  // starve component 3 in both runs
  for (int l = 0; l < 3; ++l) {
    a.map_point.theta(l, 3) = 1e-4;
    b.map_point.theta(l, 3) = 1e-4;
    a.map_point.theta.row(l) /= a.map_point.theta.row(l).sum();
    b.map_point.theta.row(l) /= b.map_point.theta.row(l).sum();
  }
  auto perms = align({a, b}, dims);
  CHECK(perms[1].valid());
}

TEST_CASE("merging identical runs reproduces the run") {
  ModelDims dims(3, 4, {2, 3});
  Rng rng(67);
  FitResult a = fake_run(dims, rng);
  auto perms = align({a, a}, dims);
  std::vector<double> w(4, 0.25);
  auto est = merge({a, a}, perms, w, dims);
  CHECK((est.theta_map - a.map_point.theta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((est.phi_map - a.map_point.phi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("aligned one-hot rows average to the shared row") {
  ModelDims dims(2, 1, {2});
  FitResult a, b;
  a.map_point = ModelParams::zeros(dims);
  b.map_point = ModelParams::zeros(dims);
  a.map_point.theta << 1.0, 0.0;
  b.map_point.theta << 0.0, 1.0;  // same component, swapped labels
  a.map_point.phi << 0.9, 0.1, 0.1, 0.9;
  b.map_point.phi << 0.1, 0.9, 0.9, 0.1;
  a.map_point.beta_raw = Eigen::VectorXd::Constant(1, 0.5);
  b.map_point.beta_raw = a.map_point.beta_raw;
  a.map_point.beta = stick_breaking(a.map_point.beta_raw);
  b.map_point.beta = a.map_point.beta;

  auto perms = align({a, b}, dims);
  CHECK(perms[1].sigma == std::vector<int>{1, 0});
  auto est = merge({a, b}, perms, {1.0}, dims);
  CHECK(est.theta_map(0, 0) == doctest::Approx(1.0));
  CHECK(est.theta_map(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("consensus rows are simplices and run order does not matter") {
  ModelDims dims(4, 5, {2, 3});
  Rng rng(71);
  std::vector<FitResult> runs;
  for (int r = 0; r < 4; ++r) runs.push_back(fake_run(dims, rng));
  std::vector<double> w{0.3, 0.2, 0.2, 0.2, 0.1};

  auto perms = align(runs, dims);
  auto est = merge(runs, perms, w, dims);
  for (int l = 0; l < 5; ++l)
    CHECK(std::abs(est.theta_map.row(l).sum() - 1.0) < 1e-10);
  for (int t = 0; t < 4; ++t)
    for (int s = 0; s < dims.S(); ++s) {
      double sum = est.phi_map.segment(dims.phi_index(t, s), dims.env_sizes[s]).sum();
      CHECK(std::abs(sum - 1.0) < 1e-10);
    }
  CHECK(std::abs(est.usage.sum() - 1.0) < 1e-10);

  // permute the non-reference runs; consensus must not change
  std::vector<FitResult> shuffled{runs[0], runs[3], runs[1], runs[2]};
  auto perms2 = align(shuffled, dims);
  auto est2 = merge(shuffled, perms2, w, dims);
  CHECK((est.theta_map - est2.theta_map).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((est.phi_map - est2.phi_map).cwiseAbs().maxCoeff() < 1e-12);
}
