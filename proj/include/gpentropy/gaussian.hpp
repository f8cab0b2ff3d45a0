#pragma once

// Closed-form constants of Gaussian differential entropy, in nats.
//
//   Shannon, per m-vector:  (m/2) log(2 pi e)
//   Renyi order a:          (m/2) log(2 pi a^{1/(a-1)})
//
// Both are added to (1/2n) log det K_n (finite n) or to the spectral integral
// (the limit) to obtain an entropy per block.

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gpentropy/error.hpp"

namespace gpentropy {

/// Throws BadAlpha unless alpha is finite and positive.
inline void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw BadAlpha(alpha, fmt::format("Renyi order must be finite and > 0, got {}", alpha));
  }
}

inline double shannon_constant(double m) {
  return 0.5 * m * (std::log(2.0 * std::numbers::pi) + 1.0);
}

/// log(a^{1/(a-1)}) = log(a)/(a-1), continuous at a = 1 where it equals 1.
inline double renyi_log_factor(double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return 1.0;
  return std::log1p(alpha - 1.0) / (alpha - 1.0);
}

/// alpha == 1 gives the Shannon constant.
inline double renyi_constant(double m, double alpha) {
  if (alpha == 1.0) return shannon_constant(m);
  return 0.5 * m * (std::log(2.0 * std::numbers::pi) + renyi_log_factor(alpha));
}

/// H_alpha - H = (m/2) (log a^{1/(a-1)} - 1), independent of the covariance.
inline double renyi_shannon_offset(double m, double alpha) {
  return 0.5 * m * (renyi_log_factor(alpha) - 1.0);
}

}  // namespace gpentropy
