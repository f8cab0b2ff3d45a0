#pragma once

// Seeded verification suites for the two Gaussian identities the entropy
// formulas rest on:
//   E[x^T B x] = Tr(B K)                       for x ~ N(0, K)
//   int exp(-x^T A x / 2) dx = sqrt((2 pi)^d / det A)

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <fmt/format.h>

#include "gpentropy/blocktoeplitz.hpp"
#include "gpentropy/fixtures.hpp"
#include "gpentropy/matfun.hpp"

namespace gpentropy {

/// Q diag(lambda) Q^T with Q Haar-ish orthogonal and lambda uniform on
/// [lo, hi].
inline SymmetricRealMatrix random_spd(Eigen::Index dim, std::mt19937_64& rng, double lo = 0.5,
                                      double hi = 4.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(lo, hi);
  MatrixXd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = normal(rng);
  }
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
  VectorXd lambda(dim);
  for (Eigen::Index i = 0; i < dim; ++i) lambda(i) = uniform(rng);
  return SymmetricRealMatrix(q * lambda.asDiagonal() * q.transpose());
}

/// Symmetric matrix with standard normal entries on and above the diagonal.
inline SymmetricRealMatrix random_symmetric(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd b(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      b(i, j) = normal(rng);
      b(j, i) = b(i, j);
    }
  }
  return SymmetricRealMatrix(std::move(b));
}

struct SelfCheckCase {
  std::string suite;
  int index = 0;
  std::string description;
  bool passed = false;
  double value = 0.0;      ///< estimate
  double reference = 0.0;  ///< exact
  double tolerance = 0.0;  ///< absolute band on |value - reference|
  std::string error;       ///< set when the case threw
};

struct SelfCheckReport {
  std::uint64_t seed = 0;
  std::vector<SelfCheckCase> cases;

  bool passed() const {
    for (const auto& c : cases) {
      if (!c.passed) return false;
    }
    return true;
  }
};

struct SelfCheckOptions {
  std::uint64_t seed = 20240601;
  double floor = kDefaultFloor;
  int gaussian_cases = 5;
  int quadratic_cases = 20;
  std::int64_t samples = 200'000;
};

inline SelfCheckReport run_selfcheck(const SelfCheckOptions& options = {}) {
  SelfCheckReport report;
  report.seed = options.seed;
  std::mt19937_64 rng(options.seed);

  for (int i = 0; i < options.gaussian_cases; ++i) {
    SelfCheckCase c;
    c.suite = "gaussian_integral";
    c.index = i;
    const Eigen::Index dim = 1 + i % 3;
    const SymmetricRealMatrix a = random_spd(dim, rng);
    c.description = fmt::format("random SPD A, dim {}", dim);
    try {
      assert_psd(a, options.floor);
      const GaussianIntegral g = gaussian_integral_check(a);
      c.value = g.estimate;
      c.reference = g.exact;
      c.tolerance = g.tolerance * g.exact;
      c.passed = g.within_tolerance();
    } catch (const Error& e) {
      c.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
    }
    report.cases.push_back(std::move(c));
  }

  const std::vector<fixtures::NamedSpec> specs = [] {
    std::vector<fixtures::NamedSpec> out;
    for (auto& f : fixtures::all()) {
      if (f.name == "white_m1" || f.name == "ar1_0.6" || f.name == "ma1_0.5" ||
          f.name == "var1_2x2" || f.name == "white_diag13") {
        out.push_back(std::move(f));
      }
    }
    return out;
  }();
  for (int i = 0; i < options.quadratic_cases; ++i) {
    SelfCheckCase c;
    c.suite = "quadratic_form";
    c.index = i;
    const auto& fixture = specs[static_cast<std::size_t>(i) % specs.size()];
    const std::int64_t n = 1 + (i / static_cast<int>(specs.size())) % 4;
    const SymmetricRealMatrix b = random_symmetric(n * fixture.spec.m(), rng);
    const std::uint64_t case_seed = rng();
    c.description = fmt::format("{}, n = {}, random symmetric B", fixture.name, n);
    try {
      assert_psd(assemble(fixture.spec, n).dense, options.floor);
      const QuadraticFormCheck q =
          quadratic_form_expectation_check(fixture.spec, n, b, options.samples, case_seed);
      c.value = q.estimate;
      c.reference = q.exact;
      c.tolerance = q.tolerance();
      c.passed = q.passed();
    } catch (const Error& e) {
      c.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
    }
    report.cases.push_back(std::move(c));
  }
  return report;
}

}  // namespace gpentropy
