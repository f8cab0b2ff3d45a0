#pragma once

// Symmetric / Hermitian matrix functions: log-determinant through a
// triangular factor, Tr f(M) through a Hermitian eigensolver, and
// positive-definiteness checks.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "gpentropy/error.hpp"
#include "gpentropy/summation.hpp"

namespace gpentropy {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Absolute tolerance on |M - M^*| entries accepted as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

/// Default PSD floor, relative to the largest eigenvalue.
inline constexpr double kDefaultFloor = 1e-10;

/// Real symmetric matrix. Construction symmetrizes, so (i,j) and (j,i) are
/// bitwise equal afterwards.
class SymmetricRealMatrix {
 public:
  SymmetricRealMatrix() = default;

  explicit SymmetricRealMatrix(MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
      throw std::invalid_argument(fmt::format(
          "symmetric matrix must be square, got {}x{}", entries_.rows(),
          entries_.cols()));
    }
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      for (Eigen::Index i = j + 1; i < entries_.rows(); ++i) {
        const double avg = 0.5 * (entries_(i, j) + entries_(j, i));
        entries_(i, j) = avg;
        entries_(j, i) = avg;
      }
    }
  }

  static SymmetricRealMatrix identity(Eigen::Index dim) {
    return SymmetricRealMatrix(MatrixXd::Identity(dim, dim));
  }

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const MatrixXd& matrix() const noexcept { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// Hands over the storage; the object is left empty.
  MatrixXd release() && { return std::move(entries_); }

 private:
  MatrixXd entries_;
};

/// Complex Hermitian matrix. `from` rejects inputs whose Hermitian residual
/// exceeds the tolerance and stores the Hermitian part.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  static HermitianMatrix from(const MatrixXcd& entries,
                              double tolerance = kHermitianTolerance) {
    if (entries.rows() != entries.cols()) {
      throw std::invalid_argument(fmt::format(
          "Hermitian matrix must be square, got {}x{}", entries.rows(),
          entries.cols()));
    }
    const double residual = hermitian_residual(entries);
    if (!(residual <= tolerance)) {
      throw std::invalid_argument(fmt::format(
          "matrix is not Hermitian: max |M - M^*| = {:.3e} > {:.1e}", residual,
          tolerance));
    }
    HermitianMatrix out;
    out.entries_ = 0.5 * (entries + entries.adjoint());
    return out;
  }

  static HermitianMatrix from(const SymmetricRealMatrix& real) {
    HermitianMatrix out;
    out.entries_ = real.matrix().cast<std::complex<double>>();
    return out;
  }

  /// Largest entrywise |M(i,j) - conj(M(j,i))|.
  static double hermitian_residual(const MatrixXcd& entries) {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const MatrixXcd& matrix() const noexcept { return entries_; }

 private:
  MatrixXcd entries_;
};

/// Eigenvalues in ascending order.
struct EigenSpectrum {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  double min() const { return values.front(); }
  double max() const { return values.back(); }
};

inline EigenSpectrum eigenvalues(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("Hermitian eigensolver did not converge");
  }
  const VectorXd& ev = solver.eigenvalues();
  return {std::vector<double>(ev.data(), ev.data() + ev.size())};
}

inline EigenSpectrum eigenvalues(const SymmetricRealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("symmetric eigensolver did not converge");
  }
  const VectorXd& ev = solver.eigenvalues();
  return {std::vector<double>(ev.data(), ev.data() + ev.size())};
}

/// Interval on which a spectral function is defined.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;

  bool contains(double x) const {
    if (std::isnan(x)) return false;
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    return x <= hi;
  }
};

/// A scalar function applied to a matrix through its eigenvalues.
struct SpectralFunction {
  std::string name;
  std::function<double(double)> fn;
  Interval domain;

  double operator()(double x) const { return fn(x); }
};

inline SpectralFunction spectral_log() {
  return {"log", [](double x) { return std::log(x); }, Interval{0.0, Interval{}.hi, true}};
}

inline SpectralFunction spectral_identity() {
  return {"identity", [](double x) { return x; }, Interval{}};
}

inline SpectralFunction spectral_square() {
  return {"square", [](double x) { return x * x; }, Interval{}};
}

/// Sum of f over a spectrum, throwing DomainError on the first eigenvalue
/// outside f's domain.
inline double trace_f(const EigenSpectrum& spectrum, const SpectralFunction& f) {
  std::vector<double> terms;
  terms.reserve(spectrum.dim());
  for (double lambda : spectrum.values) {
    if (!f.domain.contains(lambda)) {
      throw DomainError(lambda, fmt::format("eigenvalue {:.6e} outside the domain of {}",
                                            lambda, f.name));
    }
    terms.push_back(f(lambda));
  }
  return pairwise_sum(terms);
}

/// Tr f(M) = sum_i f(lambda_i(M)).
inline double trace_f_hermitian(const HermitianMatrix& m, const SpectralFunction& f) {
  return trace_f(eigenvalues(m), f);
}

inline double trace_f_hermitian(const SymmetricRealMatrix& m, const SpectralFunction& f) {
  return trace_f(eigenvalues(m), f);
}

namespace detail {

inline void check_spectrum_floor(const EigenSpectrum& spectrum, double floor) {
  const double top = spectrum.max();
  const double threshold = floor * std::max(top, 0.0);
  const double bottom = spectrum.min();
  // A zero eigenvalue is singular even when the floor is zero.
  if (!(bottom > 0.0) || bottom < threshold) {
    throw BelowFloor(bottom, threshold,
                     fmt::format("min eigenvalue {:.6e} below floor {:.3e} (relative "
                                 "{:.1e} of max eigenvalue {:.6e})",
                                 bottom, threshold, floor, top));
  }
}

}  // namespace detail

/// Returns the spectrum if the smallest eigenvalue is strictly positive and at
/// least `floor` times the largest; otherwise throws BelowFloor.
inline EigenSpectrum assert_psd(const HermitianMatrix& m, double floor = kDefaultFloor) {
  EigenSpectrum spectrum = eigenvalues(m);
  detail::check_spectrum_floor(spectrum, floor);
  return spectrum;
}

inline EigenSpectrum assert_psd(const SymmetricRealMatrix& m, double floor = kDefaultFloor) {
  EigenSpectrum spectrum = eigenvalues(m);
  detail::check_spectrum_floor(spectrum, floor);
  return spectrum;
}

namespace detail {

/// Overwrites `a` with its lower Cholesky factor.
inline void cholesky_in_place(MatrixXd& a) {
  const Eigen::Index dim = a.rows();
  const Eigen::Index failed = Eigen::internal::llt_inplace<double, Eigen::Lower>::blocked(a);
  if (failed >= 0) {
    throw NotPositiveDefinite(
        failed, fmt::format("non-positive pivot at index {} of {}x{} factorization", failed,
                            dim, dim));
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!std::isfinite(a(i, i))) {
      throw NotPositiveDefinite(
          i, fmt::format("non-finite pivot at index {} of {}x{} factorization", i, dim, dim));
    }
  }
  a.triangularView<Eigen::StrictlyUpper>().setZero();
}

inline double logdet_from_factor(const MatrixXd& factor) {
  std::vector<double> terms(static_cast<std::size_t>(factor.rows()));
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    terms[static_cast<std::size_t>(i)] = std::log(factor(i, i));
  }
  return 2.0 * pairwise_sum(terms);
}

}  // namespace detail

/// Lower Cholesky factor L with L L^T = M. Throws NotPositiveDefinite with
/// the index of the first non-positive (or non-finite) pivot.
inline MatrixXd cholesky_lower(const SymmetricRealMatrix& m) {
  MatrixXd factor = m.matrix();
  detail::cholesky_in_place(factor);
  return factor;
}

/// Factors in the matrix's own storage.
inline MatrixXd cholesky_lower(SymmetricRealMatrix&& m) {
  MatrixXd factor = std::move(m).release();
  detail::cholesky_in_place(factor);
  return factor;
}

/// log det M = 2 sum_i log L_ii from the Cholesky factor.
inline double logdet_spd(const SymmetricRealMatrix& m) {
  return detail::logdet_from_factor(cholesky_lower(m));
}

inline double logdet_spd(SymmetricRealMatrix&& m) {
  return detail::logdet_from_factor(cholesky_lower(std::move(m)));
}

struct GaussianIntegral {
  double estimate = 0.0;
  double exact = 0.0;          ///< sqrt((2 pi)^d / det A)
  double tolerance = 0.0;      ///< relative tolerance of the estimator
  std::uint64_t grid_points = 0;

  double relative_error() const { return std::abs(estimate / exact - 1.0); }
  bool within_tolerance() const { return relative_error() <= tolerance; }
};

/// Tensor-grid trapezoid estimate of the integral of exp(-x^T A x / 2) over
/// R^d, d <= 4.
///
/// The box half-width on axis i is 9 marginal standard deviations
/// sqrt((A^-1)_ii), and the uniform step h satisfies
/// (2 pi / h)^2 / lambda_max(A) >= 90, which bounds every aliasing term of
/// the lattice sum by exp(-45). The reported tolerance covers truncation,
/// aliasing and accumulated rounding.
inline GaussianIntegral gaussian_integral_check(const SymmetricRealMatrix& a,
                                                std::uint64_t max_points = 50'000'000) {
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  const Eigen::Index d = a.dim();
  if (d < 1 || d > 4) {
    throw SizeLimit(static_cast<std::uint64_t>(d), 4,
                    fmt::format("Gaussian integral check supports dim 1..4, got {}", d));
  }
  const MatrixXd factor = cholesky_lower(a);
  const double logdet = logdet_spd(a);

  const EigenSpectrum spectrum = eigenvalues(a);
  const MatrixXd cov = factor.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(d, d));
  const MatrixXd inverse = cov.transpose() * cov;

  const double h = kTwoPi / std::sqrt(90.0 * spectrum.max());
  std::vector<Eigen::Index> half_counts(static_cast<std::size_t>(d));
  std::uint64_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double width = 9.0 * std::sqrt(inverse(i, i));
    const auto half = static_cast<Eigen::Index>(std::ceil(width / h));
    half_counts[static_cast<std::size_t>(i)] = half;
    total *= static_cast<std::uint64_t>(2 * half + 1);
    if (total > max_points) {
      throw SizeLimit(total, max_points, "Gaussian integral grid too large");
    }
  }

  // Odometer over the grid; the innermost axis is summed into a row total.
  std::vector<Eigen::Index> index(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) index[static_cast<std::size_t>(i)] = -half_counts[static_cast<std::size_t>(i)];
  std::vector<double> rows;
  VectorXd x(d);
  const auto inner = static_cast<std::size_t>(d - 1);
  while (true) {
    double row = 0.0;
    for (Eigen::Index k = -half_counts[inner]; k <= half_counts[inner]; ++k) {
      index[inner] = k;
      for (Eigen::Index i = 0; i < d; ++i) x(i) = h * static_cast<double>(index[static_cast<std::size_t>(i)]);
      row += std::exp(-0.5 * x.dot(a.matrix() * x));
    }
    rows.push_back(row);
    // advance outer axes
    std::size_t axis = inner;
    bool done = true;
    while (axis-- > 0) {
      if (index[axis] < half_counts[axis]) {
        ++index[axis];
        done = false;
        break;
      }
      index[axis] = -half_counts[axis];
    }
    if (done) break;
  }

  GaussianIntegral out;
  out.estimate = pairwise_sum(rows) * std::pow(h, static_cast<double>(d));
  out.exact = std::exp(0.5 * (static_cast<double>(d) * std::log(kTwoPi) - logdet));
  out.tolerance = 1e-9;
  out.grid_points = total;
  return out;
}

}  // namespace gpentropy
