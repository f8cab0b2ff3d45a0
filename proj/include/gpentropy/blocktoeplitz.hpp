#pragma once

// Finite block-Toeplitz covariances and the exact entropy of n consecutive
// m-vectors of a stationary Gaussian process.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "gpentropy/error.hpp"
#include "gpentropy/gaussian.hpp"
#include "gpentropy/matfun.hpp"
#include "gpentropy/process.hpp"

namespace gpentropy {

/// Default cap on n*m for dense assembly.
inline constexpr std::uint64_t kDefaultMaxDim = 16384;

/// Covariance of (X_1, ..., X_n): block (i, j) is K(i - j).
struct BlockToeplitzMatrix {
  std::int64_t n = 0;
  Eigen::Index m = 0;
  SymmetricRealMatrix dense;
};

/// Throws SizeLimit when n*m exceeds `max_dim`, InvalidSpec when n < 1.
inline void check_block_count(std::int64_t n, Eigen::Index m, std::uint64_t max_dim) {
  if (n < 1) throw InvalidSpec(fmt::format("block count n must be >= 1, got {}", n));
  const auto un = static_cast<std::uint64_t>(n);
  const auto um = static_cast<std::uint64_t>(m);
  if (un > max_dim / um) {
    // n*m may overflow; report the saturated product
    const std::uint64_t requested =
        un > UINT64_MAX / um ? UINT64_MAX : un * um;
    throw SizeLimit(requested, max_dim,
                    fmt::format("n*m = {}*{} exceeds the dense size cap {}", n, m, max_dim));
  }
}

inline BlockToeplitzMatrix assemble(const ProcessSpec& spec, std::int64_t n,
                                    std::uint64_t max_dim = kDefaultMaxDim) {
  const Eigen::Index m = spec.m();
  check_block_count(n, m, max_dim);
  const std::vector<MatrixXd> lags = autocovariance_sequence(spec, n);
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * m;
  MatrixXd dense(dim, dim);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j <= i; ++j) {
      const MatrixXd& block = lags[static_cast<std::size_t>(i - j)];
      dense.block(i * m, j * m, m, m) = block;
      if (i != j) dense.block(j * m, i * m, m, m) = block.transpose();
    }
  }
  // Diagonal blocks K(0) are symmetric; the constructor removes rounding
  // asymmetry inside them.
  return {n, m, SymmetricRealMatrix(std::move(dense))};
}

/// Entropy of n consecutive blocks, normalized per block (nats).
struct FiniteEntropy {
  std::int64_t n = 0;
  Eigen::Index m = 0;
  double logdet = 0.0;
  double shannon_per_block = 0.0;
  std::map<double, double> renyi_per_block;

  /// logdet / (2n), the covariance-dependent part shared by all orders.
  double log_term() const { return logdet / (2.0 * static_cast<double>(n)); }
};

/// Builds the entropy values from a log-determinant. Alphas equal to 1 map to
/// the Shannon value.
inline FiniteEntropy finite_entropy_from_logdet(std::int64_t n, Eigen::Index m, double logdet,
                                                std::span<const double> alphas) {
  for (double alpha : alphas) check_alpha(alpha);
  FiniteEntropy out;
  out.n = n;
  out.m = m;
  out.logdet = logdet;
  const double md = static_cast<double>(m);
  out.shannon_per_block = shannon_constant(md) + out.log_term();
  for (double alpha : alphas) {
    out.renyi_per_block[alpha] =
        alpha == 1.0 ? out.shannon_per_block : renyi_constant(md, alpha) + out.log_term();
  }
  return out;
}

inline FiniteEntropy finite_entropy(const ProcessSpec& spec, std::int64_t n,
                                    std::span<const double> alphas = {},
                                    std::uint64_t max_dim = kDefaultMaxDim) {
  for (double alpha : alphas) check_alpha(alpha);
  BlockToeplitzMatrix k = assemble(spec, n, max_dim);
  return finite_entropy_from_logdet(n, spec.m(), logdet_spd(std::move(k.dense)), alphas);
}

struct QuadraticFormCheck {
  double estimate = 0.0;        ///< Monte Carlo mean of x^T B x
  double exact = 0.0;           ///< Tr(B K_n)
  double standard_error = 0.0;  ///< sample sd / sqrt(samples)
  std::int64_t samples = 0;

  /// Accepted band: 5 standard errors.
  double tolerance() const { return 5.0 * standard_error; }
  bool passed() const { return std::abs(estimate - exact) <= tolerance(); }
};

/// Monte Carlo check of E[x^T B x] = Tr(B K) for x ~ N(0, K_n), drawing
/// x = L z with L the Cholesky factor of K_n.
inline QuadraticFormCheck quadratic_form_expectation_check(const ProcessSpec& spec,
                                                           std::int64_t n,
                                                           const SymmetricRealMatrix& b,
                                                           std::int64_t samples,
                                                           std::uint64_t seed) {
  const BlockToeplitzMatrix k = assemble(spec, n);
  if (b.dim() != k.dense.dim()) {
    throw InvalidSpec(fmt::format("B is {}x{} but K_n is {}x{}", b.dim(), b.dim(),
                                  k.dense.dim(), k.dense.dim()));
  }
  if (samples < 2) throw InvalidSpec("quadratic form check needs at least 2 samples");
  const MatrixXd factor = cholesky_lower(k.dense);

  QuadraticFormCheck out;
  out.exact = b.matrix().cwiseProduct(k.dense.matrix()).sum();
  out.samples = samples;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  VectorXd z(k.dense.dim());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const VectorXd x = factor.triangularView<Eigen::Lower>() * z;
    const double q = x.dot(b.matrix() * x);
    const double delta = q - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (q - mean);
  }
  out.estimate = mean;
  const double variance = m2 / static_cast<double>(samples - 1);
  out.standard_error = std::sqrt(variance / static_cast<double>(samples));
  return out;
}

}  // namespace gpentropy
