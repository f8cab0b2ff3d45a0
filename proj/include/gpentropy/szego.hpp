#pragma once

// Asymptotic entropy rates from the matrix spectral density, and numerical
// checks of the block Szego limit
//
//   lim (1/n) Tr f(K_n) = (1/2 pi) int_{-pi}^{pi} Tr f(K(theta)) dtheta.
//
// Integrals over the period use the uniform grid theta_k = -pi + 2 pi k / Q,
// on which the trapezoid and midpoint rules coincide.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gpentropy/blocktoeplitz.hpp"
#include "gpentropy/error.hpp"
#include "gpentropy/gaussian.hpp"
#include "gpentropy/matfun.hpp"
#include "gpentropy/process.hpp"
#include "gpentropy/summation.hpp"

namespace gpentropy {

inline constexpr std::int64_t kDefaultGridSize = 1024;
inline constexpr std::int64_t kMaxGridSize = std::int64_t{1} << 16;
inline constexpr double kGridChangeTolerance = 1e-10;

inline double grid_angle(std::int64_t k, std::int64_t q) {
  return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
}

struct DensityDiagnostics {
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double hermiticity_residual = 0.0;
  bool converged = true;
};

struct SpectralIntegral {
  double value = 0.0;  ///< (1/4 pi) int Tr log K(theta) dtheta
  std::int64_t grid_size = 0;
  DensityDiagnostics diagnostics;
};

namespace detail {

inline void check_grid_size(std::int64_t q) {
  if (q < 16) throw InvalidSpec(fmt::format("grid size must be >= 16, got {}", q));
}

/// Hermitian projection of K(theta), tolerating rounding relative to the
/// entry magnitude.
inline HermitianMatrix density_at(const SpectralDensity& density, double theta,
                                  DensityDiagnostics& diag) {
  const MatrixXcd raw = density(theta);
  if (!raw.allFinite()) {
    throw SingularDensity(theta, std::numeric_limits<double>::quiet_NaN(),
                          fmt::format("spectral density is not finite at theta = {:.17g}", theta));
  }
  const double residual = HermitianMatrix::hermitian_residual(raw);
  diag.hermiticity_residual = std::max(diag.hermiticity_residual, residual);
  const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  try {
    return HermitianMatrix::from(raw, kHermitianTolerance * scale);
  } catch (const std::invalid_argument& e) {
    throw DomainError(residual, fmt::format("spectral density at theta = {:.17g}: {}", theta,
                                            e.what()));
  }
}

struct GridPoint {
  double theta = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double trace_log = 0.0;  // NaN when the spectrum is not positive
};

inline GridPoint grid_point(const SpectralDensity& density, double theta,
                            DensityDiagnostics& diag) {
  const EigenSpectrum spectrum = eigenvalues(density_at(density, theta, diag));
  diag.min_eigenvalue = std::min(diag.min_eigenvalue, spectrum.min());
  GridPoint p{theta, spectrum.min(), spectrum.max(), std::numeric_limits<double>::quiet_NaN()};
  if (spectrum.min() > 0.0) p.trace_log = trace_f(spectrum, spectral_log());
  return p;
}

/// The floor is relative to the largest eigenvalue seen anywhere on the grid.
/// Points are scanned in grid order so the reported theta is the first offender.
inline void check_floor(const std::vector<GridPoint>& points, double floor) {
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.max_eigenvalue);
  const double threshold = floor * scale;
  for (const auto& p : points) {
    if (!(p.min_eigenvalue > 0.0) || p.min_eigenvalue < threshold) {
      throw SingularDensity(
          p.theta, p.min_eigenvalue,
          fmt::format("spectral density is singular at theta = {:.17g}: min eigenvalue {:.6e} "
                      "below floor {:.3e}",
                      p.theta, p.min_eigenvalue, threshold));
    }
  }
}

}  // namespace detail

/// (1/4 pi) int Tr log K(theta) dtheta, doubling the grid from `grid_size`
/// until successive values differ by less than 1e-10 or the grid reaches 2^16.
inline SpectralIntegral spectral_integral(const SpectralDensity& density,
                                          std::int64_t grid_size = kDefaultGridSize,
                                          double floor = kDefaultFloor) {
  detail::check_grid_size(grid_size);
  SpectralIntegral out;
  std::int64_t q = grid_size;
  std::vector<detail::GridPoint> points(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k) {
    points[static_cast<std::size_t>(k)] =
        detail::grid_point(density, grid_angle(k, q), out.diagnostics);
  }
  detail::check_floor(points, floor);
  auto integral = [](const std::vector<detail::GridPoint>& pts) {
    std::vector<double> t(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) t[i] = pts[i].trace_log;
    return pairwise_sum(t) / (2.0 * static_cast<double>(t.size()));
  };
  double value = integral(points);

  bool converged = false;
  while (q < kMaxGridSize) {
    // The doubled grid contains the current one at even indices.
    std::vector<detail::GridPoint> refined(static_cast<std::size_t>(2 * q));
    for (std::int64_t k = 0; k < q; ++k) {
      refined[static_cast<std::size_t>(2 * k)] = points[static_cast<std::size_t>(k)];
      refined[static_cast<std::size_t>(2 * k + 1)] =
          detail::grid_point(density, grid_angle(2 * k + 1, 2 * q), out.diagnostics);
    }
    q *= 2;
    points = std::move(refined);
    detail::check_floor(points, floor);
    const double next = integral(points);
    const double change = std::abs(next - value);
    value = next;
    if (change < kGridChangeTolerance) {
      converged = true;
      break;
    }
  }
  out.value = value;
  out.grid_size = q;
  out.diagnostics.converged = converged;
  return out;
}

/// (1/2 pi) int Tr f(K(theta)) dtheta on a fixed grid of `grid_size` points.
inline double szego_functional(const SpectralDensity& density, const SpectralFunction& f,
                               std::int64_t grid_size = kDefaultGridSize) {
  detail::check_grid_size(grid_size);
  DensityDiagnostics diag;
  std::vector<double> terms(static_cast<std::size_t>(grid_size));
  for (std::int64_t k = 0; k < grid_size; ++k) {
    terms[static_cast<std::size_t>(k)] =
        trace_f_hermitian(detail::density_at(density, grid_angle(k, grid_size), diag), f);
  }
  return pairwise_sum(terms) / static_cast<double>(grid_size);
}

struct RateMethod {
  enum class Kind { quadrature, finite_n };
  Kind kind = Kind::quadrature;
  std::int64_t n = 0;  ///< block count for finite_n

  std::string label() const {
    return kind == Kind::quadrature ? std::string("quadrature") : fmt::format("finite_n({})", n);
  }
};

struct EntropyReport {
  Eigen::Index m = 0;
  double shannon_rate = 0.0;              ///< nats per block
  std::map<double, double> renyi_rates;   ///< alpha -> nats per block
  double spectral_integral = 0.0;
  RateMethod method;
  std::int64_t grid_size = 0;
  DensityDiagnostics diagnostics;
};

/// Shannon and Renyi entropy rates per m-vector:
///   H = (m/2) log 2 pi e + I,  H_a = (m/2) log(2 pi a^{1/(a-1)}) + I,
/// with I = (1/4 pi) int Tr log K(theta) dtheta.
inline EntropyReport entropy_rate_from_density(const SpectralDensity& density,
                                               std::span<const double> alphas,
                                               std::int64_t grid_size = kDefaultGridSize,
                                               double floor = kDefaultFloor) {
  for (double alpha : alphas) check_alpha(alpha);
  const SpectralIntegral integral = spectral_integral(density, grid_size, floor);
  EntropyReport out;
  out.m = density.m();
  const double md = static_cast<double>(out.m);
  out.spectral_integral = integral.value;
  out.shannon_rate = shannon_constant(md) + integral.value;
  for (double alpha : alphas) {
    out.renyi_rates[alpha] =
        alpha == 1.0 ? out.shannon_rate : renyi_constant(md, alpha) + integral.value;
  }
  out.grid_size = integral.grid_size;
  out.diagnostics = integral.diagnostics;
  return out;
}

inline EntropyReport entropy_rate(const ProcessSpec& spec, std::span<const double> alphas = {},
                                  std::int64_t grid_size = kDefaultGridSize,
                                  double floor = kDefaultFloor) {
  return entropy_rate_from_density(spectral_density(spec), alphas, grid_size, floor);
}

struct ConvergenceRow {
  std::int64_t n = 0;
  double finite_rate = 0.0;  ///< (1/n) Tr f(K_n)
  double limit_rate = 0.0;   ///< (1/2 pi) int Tr f(K(theta)) dtheta
  double gap = 0.0;          ///< finite_rate - limit_rate
};

struct ConvergenceTable {
  std::string descriptor;
  std::string function;
  std::int64_t grid_size = 0;
  std::vector<ConvergenceRow> rows;
};

inline std::string describe(const ProcessSpec& spec) {
  const auto lag = spec.max_lag();
  return fmt::format("{}(m={}{})", to_string(spec.kind()), spec.m(),
                     lag ? fmt::format(", max_lag={}", *lag) : std::string());
}

/// Pairs (1/n) Tr f(K_n), from a dense eigendecomposition, with the Szego
/// limit for every n in `n_list`.
inline ConvergenceTable convergence_study(const ProcessSpec& spec, const SpectralFunction& f,
                                          std::span<const std::int64_t> n_list,
                                          std::int64_t grid_size = kDefaultGridSize,
                                          std::uint64_t max_dim = kDefaultMaxDim) {
  for (std::int64_t n : n_list) check_block_count(n, spec.m(), max_dim);
  ConvergenceTable table;
  table.descriptor = describe(spec);
  table.function = f.name;
  table.grid_size = grid_size;
  const double limit = szego_functional(spectral_density(spec), f, grid_size);
  for (std::int64_t n : n_list) {
    const BlockToeplitzMatrix k = assemble(spec, n, max_dim);
    ConvergenceRow row;
    row.n = n;
    row.finite_rate = trace_f_hermitian(k.dense, f) / static_cast<double>(n);
    row.limit_rate = limit;
    row.gap = row.finite_rate - row.limit_rate;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace gpentropy
