#pragma once

// Stationary vector Gaussian process models, described by their matrix
// autocovariance K(j) = Cov(X_{t+j}, X_t), and the matrix spectral density
// K(theta) = sum_j K(j) e^{-i j theta}.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "gpentropy/error.hpp"
#include "gpentropy/matfun.hpp"

namespace gpentropy {

enum class ProcessKind { white, vma, var1, explicit_table, estimated };

inline const char* to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::white: return "white";
    case ProcessKind::vma: return "vma";
    case ProcessKind::var1: return "var1";
    case ProcessKind::explicit_table: return "explicit";
    case ProcessKind::estimated: return "estimated";
  }
  return "unknown";
}

enum class WindowKind { bartlett, truncation };

inline const char* to_string(WindowKind kind) {
  return kind == WindowKind::bartlett ? "bartlett" : "truncation";
}

struct WhiteNoise {
  MatrixXd sigma;
};

/// x_t = e_t + B_1 e_{t-1} + ... + B_q e_{t-q},  e_t ~ N(0, sigma).
struct MovingAverage {
  std::vector<MatrixXd> coeffs;  ///< B_1..B_q
  MatrixXd sigma;
};

/// x_t = A x_{t-1} + e_t,  e_t ~ N(0, sigma). `k0` is the stationary
/// covariance, solved once at construction.
struct VectorAR1 {
  MatrixXd a;
  MatrixXd sigma;
  MatrixXd k0;
};

/// Finite-support autocovariance, stored for lags 0..L.
struct LagTable {
  std::vector<MatrixXd> lags;
};

struct EstimatedTable {
  std::vector<MatrixXd> lags;
  WindowKind window = WindowKind::bartlett;
  std::int64_t sample_count = 0;
};

using ProcessModel = std::variant<WhiteNoise, MovingAverage, VectorAR1, LagTable, EstimatedTable>;

namespace detail {

inline void check_block(const char* what, const MatrixXd& block, Eigen::Index m) {
  if (block.rows() != m || block.cols() != m) {
    throw InvalidSpec(fmt::format("{} must be {}x{}, got {}x{}", what, m, m, block.rows(),
                                  block.cols()));
  }
  if (!block.allFinite()) throw InvalidSpec(fmt::format("{} has non-finite entries", what));
}

/// Symmetric positive semidefinite within rounding. Singular matrices pass;
/// their processes fail later with SingularDensity / NotPositiveDefinite.
inline void check_covariance(const char* what, const MatrixXd& block, Eigen::Index m) {
  check_block(what, block, m);
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  const double asym = (block - block.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InvalidSpec(fmt::format("{} is not symmetric (max asymmetry {:.3e})", what, asym));
  }
  const EigenSpectrum spectrum = eigenvalues(SymmetricRealMatrix(block));
  if (spectrum.min() < -1e-12 * std::max(1.0, spectrum.max())) {
    throw InvalidSpec(fmt::format("{} is not positive semidefinite (min eigenvalue {:.6e})",
                                  what, spectrum.min()));
  }
}

inline double spectral_radius(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw InvalidSpec("eigensolver failed on A");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// X = A X A^T + sigma by Smith's doubling iteration:
/// X_{k+1} = X_k + A_k X_k A_k^T, A_{k+1} = A_k^2.
inline MatrixXd lyapunov_solve(const MatrixXd& a, const MatrixXd& sigma, int max_iterations = 100) {
  if (a.rows() != a.cols() || sigma.rows() != a.rows() || sigma.cols() != a.cols()) {
    throw InvalidSpec("lyapunov_solve: A and sigma must be square and of equal size");
  }
  const double sigma_norm = sigma.norm();
  MatrixXd x = sigma;
  MatrixXd power = a;
  for (int it = 0; it < max_iterations; ++it) {
    x += power * x * power.transpose();
    power = power * power;
    if (!x.allFinite()) break;
    if (power.norm() <= 1e-17) break;
    const double residual = (x - a * x * a.transpose() - sigma).norm();
    if (residual <= 1e-13 * std::max(sigma_norm, std::numeric_limits<double>::min())) break;
  }
  x = 0.5 * (x + x.transpose()).eval();
  const double residual = (x - a * x * a.transpose() - sigma).norm();
  if (!x.allFinite() || residual > 1e-10 * sigma_norm) {
    throw NoConvergence(fmt::format(
        "Lyapunov iteration failed: residual {:.3e} vs {:.3e}", residual, 1e-10 * sigma_norm));
  }
  return x;
}

/// A validated stationary process model. Instances are immutable.
class ProcessSpec {
 public:
  static ProcessSpec white(MatrixXd sigma) {
    const Eigen::Index m = sigma.rows();
    detail::check_covariance("sigma", sigma, m);
    return ProcessSpec(m, WhiteNoise{std::move(sigma)});
  }

  static ProcessSpec vma(std::vector<MatrixXd> coeffs, MatrixXd sigma) {
    const Eigen::Index m = sigma.rows();
    detail::check_covariance("sigma", sigma, m);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      detail::check_block(fmt::format("coefficient B_{}", k + 1).c_str(), coeffs[k], m);
    }
    return ProcessSpec(m, MovingAverage{std::move(coeffs), std::move(sigma)});
  }

  static ProcessSpec var1(MatrixXd a, MatrixXd sigma) {
    const Eigen::Index m = sigma.rows();
    detail::check_covariance("sigma", sigma, m);
    detail::check_block("A", a, m);
    const double radius = detail::spectral_radius(a);
    if (radius >= 1.0 - 1e-8) {
      throw InvalidSpec(fmt::format("VAR(1) spectral radius {:.12f} is not < 1", radius));
    }
    MatrixXd k0 = lyapunov_solve(a, sigma);
    return ProcessSpec(m, VectorAR1{std::move(a), std::move(sigma), std::move(k0)});
  }

  /// Lags K(0)..K(L); negative lags follow from K(-j) = K(j)^T.
  static ProcessSpec explicit_lags(std::vector<MatrixXd> lags) {
    check_lag_table(lags);
    const Eigen::Index m = lags.front().rows();
    return ProcessSpec(m, LagTable{std::move(lags)});
  }

  static ProcessSpec estimated(std::vector<MatrixXd> lags, WindowKind window,
                               std::int64_t sample_count) {
    check_lag_table(lags);
    const Eigen::Index m = lags.front().rows();
    return ProcessSpec(m, EstimatedTable{std::move(lags), window, sample_count});
  }

  /// Scalar AR(1): x_t = phi x_{t-1} + e_t, Var e_t = sigma2.
  static ProcessSpec ar1(double phi, double sigma2) {
    return var1(MatrixXd::Constant(1, 1, phi), MatrixXd::Constant(1, 1, sigma2));
  }

  /// Scalar MA(1): x_t = e_t + b e_{t-1}, Var e_t = sigma2.
  static ProcessSpec ma1(double b, double sigma2) {
    return vma({MatrixXd::Constant(1, 1, b)}, MatrixXd::Constant(1, 1, sigma2));
  }

  Eigen::Index m() const noexcept { return m_; }
  const ProcessModel& model() const noexcept { return model_; }

  ProcessKind kind() const noexcept {
    return static_cast<ProcessKind>(model_.index());
  }

  /// Largest lag with a (possibly) nonzero block; nullopt for infinite support.
  std::optional<std::int64_t> max_lag() const {
    return std::visit(
        [](const auto& model) -> std::optional<std::int64_t> {
          using T = std::decay_t<decltype(model)>;
          if constexpr (std::is_same_v<T, WhiteNoise>) return 0;
          else if constexpr (std::is_same_v<T, MovingAverage>) return static_cast<std::int64_t>(model.coeffs.size());
          else if constexpr (std::is_same_v<T, VectorAR1>) return std::nullopt;
          else return static_cast<std::int64_t>(model.lags.size()) - 1;
        },
        model_);
  }

 private:
  ProcessSpec(Eigen::Index m, ProcessModel model) : m_(m), model_(std::move(model)) {
    if (m_ < 1) throw InvalidSpec("block dimension m must be positive");
  }

  static void check_lag_table(const std::vector<MatrixXd>& lags) {
    if (lags.empty()) throw InvalidSpec("lag table must contain K(0)");
    const Eigen::Index m = lags.front().rows();
    if (m < 1) throw InvalidSpec("block dimension m must be positive");
    detail::check_covariance("K(0)", lags.front(), m);
    for (std::size_t j = 1; j < lags.size(); ++j) {
      detail::check_block(fmt::format("K({})", j).c_str(), lags[j], m);
    }
  }

  Eigen::Index m_;
  ProcessModel model_;
};

/// K(0), K(1), ..., K(count-1).
inline std::vector<MatrixXd> autocovariance_sequence(const ProcessSpec& spec, std::int64_t count) {
  const Eigen::Index m = spec.m();
  std::vector<MatrixXd> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        for (std::int64_t j = 0; j < count; ++j) {
          if constexpr (std::is_same_v<T, WhiteNoise>) {
            out.push_back(j == 0 ? model.sigma : MatrixXd::Zero(m, m));
          } else if constexpr (std::is_same_v<T, MovingAverage>) {
            // K(j) = sum_k B_{k+j} sigma B_k^T, B_0 = I
            const auto q = static_cast<std::int64_t>(model.coeffs.size());
            MatrixXd block = MatrixXd::Zero(m, m);
            auto coeff = [&](std::int64_t k) -> MatrixXd {
              return k == 0 ? MatrixXd::Identity(m, m) : model.coeffs[static_cast<std::size_t>(k - 1)];
            };
            for (std::int64_t k = 0; k + j <= q; ++k) {
              block += coeff(k + j) * model.sigma * coeff(k).transpose();
            }
            out.push_back(std::move(block));
          } else if constexpr (std::is_same_v<T, VectorAR1>) {
            // K(j) = A^j K(0)
            out.push_back(j == 0 ? model.k0 : MatrixXd(model.a * out.back()));
          } else {
            out.push_back(j < static_cast<std::int64_t>(model.lags.size())
                              ? model.lags[static_cast<std::size_t>(j)]
                              : MatrixXd::Zero(m, m));
          }
        }
      },
      spec.model());
  return out;
}

/// K(j) for any integer j.
inline MatrixXd autocovariance(const ProcessSpec& spec, std::int64_t j) {
  const std::int64_t lag = j < 0 ? -j : j;
  MatrixXd block = std::move(autocovariance_sequence(spec, lag + 1).back());
  if (j < 0) return block.transpose();
  return block;
}

enum class DensityProvenance { closed_form, fourier_truncation };

/// theta -> K(theta), an m x m Hermitian matrix for valid models.
class SpectralDensity {
 public:
  using Evaluator = std::function<MatrixXcd(double)>;

  SpectralDensity(Eigen::Index m, DensityProvenance provenance, std::int64_t truncation_lag,
                  Evaluator evaluator)
      : m_(m), provenance_(provenance), truncation_lag_(truncation_lag),
        evaluator_(std::move(evaluator)) {}

  Eigen::Index m() const noexcept { return m_; }
  DensityProvenance provenance() const noexcept { return provenance_; }
  /// Fourier truncation lag, or -1 for closed forms.
  std::int64_t truncation_lag() const noexcept { return truncation_lag_; }

  /// Raw evaluation, before Hermitian projection.
  MatrixXcd operator()(double theta) const { return evaluator_(theta); }

  HermitianMatrix hermitian(double theta) const { return HermitianMatrix::from(evaluator_(theta)); }

 private:
  Eigen::Index m_;
  DensityProvenance provenance_;
  std::int64_t truncation_lag_;
  Evaluator evaluator_;
};

/// Truncated Fourier sum sum_{|j| <= L} K(j) e^{-i j theta} over the given
/// lags K(0..L).
inline SpectralDensity fourier_density(std::vector<MatrixXd> lags) {
  const Eigen::Index m = lags.front().rows();
  const auto max_lag = static_cast<std::int64_t>(lags.size()) - 1;
  return SpectralDensity(
      m, DensityProvenance::fourier_truncation, max_lag,
      [lags = std::move(lags)](double theta) {
        MatrixXcd out = lags.front().cast<std::complex<double>>();
        for (std::size_t j = 1; j < lags.size(); ++j) {
          const double angle = static_cast<double>(j) * theta;
          const std::complex<double> phase(std::cos(angle), -std::sin(angle));
          // K(j) e^{-ij theta} + K(j)^T e^{ij theta}
          out += phase * lags[j].cast<std::complex<double>>() +
                 std::conj(phase) * lags[j].transpose().cast<std::complex<double>>();
        }
        return out;
      });
}

inline SpectralDensity spectral_density(const ProcessSpec& spec) {
  const Eigen::Index m = spec.m();
  return std::visit(
      [m](const auto& model) -> SpectralDensity {
        using T = std::decay_t<decltype(model)>;
        using Complex = std::complex<double>;
        if constexpr (std::is_same_v<T, WhiteNoise>) {
          MatrixXcd sigma = model.sigma.template cast<Complex>();
          return SpectralDensity(m, DensityProvenance::closed_form, -1,
                                 [sigma](double) { return sigma; });
        } else if constexpr (std::is_same_v<T, MovingAverage>) {
          // B(theta) sigma B(theta)^*, B(theta) = sum_k B_k e^{-ik theta}
          return SpectralDensity(
              m, DensityProvenance::closed_form, -1, [model, m](double theta) {
                MatrixXcd b = MatrixXcd::Identity(m, m);
                for (std::size_t k = 0; k < model.coeffs.size(); ++k) {
                  const double angle = static_cast<double>(k + 1) * theta;
                  b += Complex(std::cos(angle), -std::sin(angle)) *
                       model.coeffs[k].template cast<Complex>();
                }
                return MatrixXcd(b * model.sigma.template cast<Complex>() * b.adjoint());
              });
        } else if constexpr (std::is_same_v<T, VectorAR1>) {
          // (I - A e^{-i theta})^{-1} sigma (I - A e^{-i theta})^{-*}
          return SpectralDensity(
              m, DensityProvenance::closed_form, -1, [model, m](double theta) {
                const Complex phase(std::cos(theta), -std::sin(theta));
                const MatrixXcd transfer =
                    MatrixXcd::Identity(m, m) - phase * model.a.template cast<Complex>();
                const MatrixXcd inv = transfer.partialPivLu().inverse();
                return MatrixXcd(inv * model.sigma.template cast<Complex>() * inv.adjoint());
              });
        } else {
          return fourier_density(model.lags);
        }
      },
      spec.model());
}

}  // namespace gpentropy
