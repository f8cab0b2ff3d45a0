#pragma once

// Reference processes with closed-form entropy rates.

#include <cmath>
#include <string>
#include <vector>

#include "gpentropy/process.hpp"

namespace gpentropy::fixtures {

inline ProcessSpec white(Eigen::Index m, double variance = 1.0) {
  return ProcessSpec::white(variance * MatrixXd::Identity(m, m));
}

/// VAR(1) with A = [[0.5, 0.1], [0, 0.3]], sigma = I. Its innovation
/// covariance is I, so the log-spectral integral is 0.
inline ProcessSpec var1_2x2() {
  MatrixXd a(2, 2);
  a << 0.5, 0.1, 0.0, 0.3;
  return ProcessSpec::var1(a, MatrixXd::Identity(2, 2));
}

struct NamedSpec {
  std::string name;
  ProcessSpec spec;
  double spectral_integral;  ///< exact (1/4 pi) int Tr log K(theta)
};

/// Each fixture has an innovation covariance of known log-determinant, so its
/// log-spectral integral is known exactly (half that log-determinant).
inline std::vector<NamedSpec> all() {
  MatrixXd diag13 = MatrixXd::Zero(2, 2);
  diag13(0, 0) = 1.0;
  diag13(1, 1) = 3.0;
  return {
      {"white_m1", white(1), 0.0},
      {"white_m3", white(3), 0.0},
      {"white_diag13", ProcessSpec::white(diag13), 0.5 * std::log(3.0)},
      {"ar1_0.3", ProcessSpec::ar1(0.3, 1.0), 0.0},
      {"ar1_0.6", ProcessSpec::ar1(0.6, 1.0), 0.0},
      {"ar1_0.9", ProcessSpec::ar1(0.9, 1.0), 0.0},
      {"ar1_0.5_s2", ProcessSpec::ar1(0.5, 2.0), 0.5 * std::log(2.0)},
      {"ma1_0.5", ProcessSpec::ma1(0.5, 1.0), 0.0},
      {"var1_2x2", var1_2x2(), 0.0},
  };
}

}  // namespace gpentropy::fixtures
