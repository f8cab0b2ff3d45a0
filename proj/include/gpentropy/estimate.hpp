#pragma once

// From data to a process model: sample autocovariances, lag-windowed
// estimated specs, and sampling paths from a known model.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "gpentropy/blocktoeplitz.hpp"
#include "gpentropy/error.hpp"
#include "gpentropy/matfun.hpp"
#include "gpentropy/process.hpp"

namespace gpentropy {

/// N x m samples, one row per time step.
class TimeSeries {
 public:
  explicit TimeSeries(MatrixXd samples, std::string source = {})
      : samples_(std::move(samples)), source_(std::move(source)) {
    if (samples_.rows() < 2) {
      throw InvalidSpec(fmt::format("time series needs at least 2 samples, got {}",
                                    samples_.rows()));
    }
    if (samples_.cols() < 1) throw InvalidSpec("time series needs at least one column");
    if (!samples_.allFinite()) throw InvalidSpec("time series contains non-finite values");
  }

  Eigen::Index m() const noexcept { return samples_.cols(); }
  std::int64_t length() const noexcept { return samples_.rows(); }
  const MatrixXd& samples() const noexcept { return samples_; }
  const std::string& source() const noexcept { return source_; }

  MatrixXd centered() const { return samples_.rowwise() - samples_.colwise().mean(); }

 private:
  MatrixXd samples_;
  std::string source_;
};

struct LagWindow {
  WindowKind kind = WindowKind::bartlett;
  std::int64_t max_lag = 1;

  double weight(std::int64_t j) const {
    if (kind == WindowKind::truncation) return 1.0;
    const std::int64_t a = j < 0 ? -j : j;
    return 1.0 - static_cast<double>(a) / static_cast<double>(max_lag + 1);
  }
};

/// Bartlett window with L = floor(sqrt(N)).
inline LagWindow default_window(std::int64_t length) {
  return {WindowKind::bartlett,
          std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(length)))))};
}

namespace detail {

/// (1/N) sum_t x_{t+j} x_t^T over centered rows, j >= 0.
inline MatrixXd lagged_product(const MatrixXd& centered, std::int64_t j) {
  const Eigen::Index n = centered.rows();
  const Eigen::Index span = n - static_cast<Eigen::Index>(j);
  return centered.bottomRows(span).transpose() * centered.topRows(span) / static_cast<double>(n);
}

}  // namespace detail

/// Biased, mean-centered estimate of K(j) = Cov(X_{t+j}, X_t).
inline MatrixXd sample_autocovariance(const TimeSeries& ts, std::int64_t j) {
  const std::int64_t a = j < 0 ? -j : j;
  if (a >= ts.length()) {
    throw LagOutOfRange(fmt::format("lag {} out of range for a series of length {}", j,
                                    ts.length()));
  }
  MatrixXd block = detail::lagged_product(ts.centered(), a);
  if (j < 0) return block.transpose();
  return block;
}

/// Lag table {w(j) K_hat(j) : 0 <= j <= L}.
inline ProcessSpec estimated_spec(const TimeSeries& ts, const LagWindow& window) {
  if (window.max_lag < 1 || window.max_lag >= ts.length()) {
    throw LagOutOfRange(fmt::format("max lag {} must satisfy 1 <= L < N = {}", window.max_lag,
                                    ts.length()));
  }
  const MatrixXd centered = ts.centered();
  std::vector<MatrixXd> lags;
  lags.reserve(static_cast<std::size_t>(window.max_lag + 1));
  for (std::int64_t j = 0; j <= window.max_lag; ++j) {
    lags.push_back(window.weight(j) * detail::lagged_product(centered, j));
  }
  // K_hat(0) is symmetric up to rounding of the product.
  lags.front() = SymmetricRealMatrix(lags.front()).matrix();
  return ProcessSpec::estimated(std::move(lags), window.kind, ts.length());
}

enum class SimulationMethod {
  automatic,  ///< recursive for white/vma/var1, exact otherwise
  exact,      ///< Cholesky factor of the full N*m covariance
  recursive,
};

namespace detail {

/// Symmetric square root of a PSD matrix; tolerates singular sigma.
inline MatrixXd psd_sqrt(const MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(SymmetricRealMatrix(sigma).matrix());
  const VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

inline MatrixXd standard_normals(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd z(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) z(r, c) = normal(rng);
  }
  return z;
}

}  // namespace detail

/// Draws a path of length N. Deterministic for a fixed seed and method.
inline TimeSeries simulate(const ProcessSpec& spec, std::int64_t length, std::uint64_t seed,
                           SimulationMethod method = SimulationMethod::automatic,
                           std::uint64_t max_dim = kDefaultMaxDim) {
  if (length < 2) throw InvalidSpec(fmt::format("simulation length must be >= 2, got {}", length));
  const Eigen::Index m = spec.m();
  const bool recursive_ok = spec.kind() == ProcessKind::white || spec.kind() == ProcessKind::vma ||
                            spec.kind() == ProcessKind::var1;
  if (method == SimulationMethod::automatic) {
    method = recursive_ok ? SimulationMethod::recursive : SimulationMethod::exact;
  }
  if (method == SimulationMethod::recursive && !recursive_ok) {
    throw InvalidSpec(fmt::format("recursive simulation is unavailable for {} processes",
                                  to_string(spec.kind())));
  }

  std::mt19937_64 rng(seed);
  const std::string source = fmt::format("simulate({}, N={}, seed={})", to_string(spec.kind()), length, seed);
  const auto n = static_cast<Eigen::Index>(length);

  if (method == SimulationMethod::exact) {
    const BlockToeplitzMatrix k = assemble(spec, length, max_dim);
    const MatrixXd factor = cholesky_lower(k.dense);
    const VectorXd z = detail::standard_normals(k.dense.dim(), 1, rng);
    const VectorXd x = factor.triangularView<Eigen::Lower>() * z;
    // x stacks X_1, ..., X_N, each of length m
    MatrixXd samples(n, m);
    for (Eigen::Index t = 0; t < n; ++t) samples.row(t) = x.segment(t * m, m).transpose();
    return TimeSeries(std::move(samples), source);
  }

  MatrixXd samples(n, m);
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, WhiteNoise>) {
          const MatrixXd root = detail::psd_sqrt(model.sigma);
          samples = detail::standard_normals(n, m, rng) * root.transpose();
        } else if constexpr (std::is_same_v<T, MovingAverage>) {
          const auto q = static_cast<Eigen::Index>(model.coeffs.size());
          const MatrixXd root = detail::psd_sqrt(model.sigma);
          // rows 0..q-1 are the pre-sample innovations e_{-q}..e_{-1}
          const MatrixXd shocks = detail::standard_normals(n + q, m, rng) * root.transpose();
          for (Eigen::Index t = 0; t < n; ++t) {
            VectorXd x = shocks.row(t + q).transpose();
            for (Eigen::Index k = 1; k <= q; ++k) {
              x += model.coeffs[static_cast<std::size_t>(k - 1)] * shocks.row(t + q - k).transpose();
            }
            samples.row(t) = x.transpose();
          }
        } else if constexpr (std::is_same_v<T, VectorAR1>) {
          const MatrixXd root = detail::psd_sqrt(model.sigma);
          const MatrixXd start = detail::psd_sqrt(model.k0);
          const MatrixXd z = detail::standard_normals(n, m, rng);
          VectorXd x = start * z.row(0).transpose();
          samples.row(0) = x.transpose();
          for (Eigen::Index t = 1; t < n; ++t) {
            x = model.a * x + root * z.row(t).transpose();
            samples.row(t) = x.transpose();
          }
        }
      },
      spec.model());
  return TimeSeries(std::move(samples), source);
}

}  // namespace gpentropy
