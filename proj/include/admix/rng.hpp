#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace admix {

/// splitmix64 mixer; used to derive independent substream seeds from one
/// 64-bit master seed (seed splitting is documented in the run manifest).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream));
}

/// mt19937_64 with hand-rolled distributions. std:: distributions are not
/// reproducible across standard libraries; these are, given the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// uniform in (0,1); never returns 0 or 1
  double uniform() {
    double u = (gen_() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Box-Muller
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double exponential() { return -std::log(uniform()); }

  /// Beta(1, b) via inverse CDF: F(x) = 1 - (1-x)^b
  double beta_one(double b) {
    return -std::expm1(std::log1p(-uniform()) / b);
  }

  /// Gamma(shape, rate=1), Marsaglia-Tsang; shape < 1 uses the boost trick.
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// log of a Gamma(shape, 1) draw; stays finite for very small shapes where
  /// the draw itself underflows (e.g. shape = 1e-4).
  double log_gamma_sample(double shape) {
    if (shape >= 0.1) return std::log(gamma(shape));
    double u = uniform();
    return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
  }

  /// symmetric Dirichlet(alpha) over k categories; log-space normalization so
  /// sparse draws (alpha << 1) keep a nonzero max coordinate.
  void dirichlet_symmetric(double alpha, int k, std::span<double> out) {
    if (alpha >= 0.1) {
      double sum = 0.0;
      for (int i = 0; i < k; ++i) {
        out[i] = gamma(alpha);
        sum += out[i];
      }
      for (int i = 0; i < k; ++i) out[i] /= sum;
      return;
    }
    std::vector<double> lg(k);
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      lg[i] = log_gamma_sample(alpha);
      mx = std::max(mx, lg[i]);
    }
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      out[i] = std::exp(lg[i] - mx);
      sum += out[i];
    }
    for (int i = 0; i < k; ++i) out[i] /= sum;
  }

  /// Dirichlet with an arbitrary concentration vector.
  void dirichlet(std::span<const double> conc, std::span<double> out) {
    double mn = conc[0];
    for (double c : conc) mn = std::min(mn, c);
    if (mn >= 0.1) {
      double sum = 0.0;
      for (size_t i = 0; i < conc.size(); ++i) {
        out[i] = gamma(conc[i]);
        sum += out[i];
      }
      for (size_t i = 0; i < conc.size(); ++i) out[i] /= sum;
      return;
    }
    std::vector<double> lg(conc.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < conc.size(); ++i) {
      lg[i] = log_gamma_sample(conc[i]);
      mx = std::max(mx, lg[i]);
    }
    double sum = 0.0;
    for (size_t i = 0; i < conc.size(); ++i) {
      out[i] = std::exp(lg[i] - mx);
      sum += out[i];
    }
    for (size_t i = 0; i < conc.size(); ++i) out[i] /= sum;
  }

  /// index draw from an unnormalized nonnegative weight vector
  int categorical(std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace admix
