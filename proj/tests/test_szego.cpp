#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "gpentropy/fixtures.hpp"
#include "gpentropy/szego.hpp"

using namespace gpentropy;

namespace {

const double kLog2PiE = std::log(2.0 * std::numbers::pi * std::numbers::e);

/// Scalar Kolmogorov / Renyi formulas with S(lambda) = sigma2 / |1 - phi e^{-i lambda}|^2
/// evaluated on the grid of size q, without going through matrices.
double scalar_log_integral(double phi, double sigma2, std::int64_t q) {
  double acc = 0.0;
  for (std::int64_t k = 0; k < q; ++k) {
    const double lambda = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
    acc += std::log(sigma2 / std::norm(1.0 - phi * std::polar(1.0, -lambda)));
  }
  return acc / (2.0 * static_cast<double>(q));
}

}  // namespace

TEST(SpectralIntegral, WhiteIdentityIsZero) {
  for (Eigen::Index m : {1, 2, 4}) {
    const SpectralIntegral i = spectral_integral(spectral_density(fixtures::white(m)));
    EXPECT_EQ(i.value, 0.0);
    EXPECT_TRUE(i.diagnostics.converged);
  }
}

TEST(SpectralIntegral, ScalarWhiteVariance) {
  const SpectralIntegral i = spectral_integral(spectral_density(fixtures::white(1, 4.0)));
  EXPECT_NEAR(i.value, 0.5 * std::log(4.0), 1e-15);
}

TEST(SpectralIntegral, Ar1IsHalfLogInnovationVariance) {
  for (double phi : {-0.8, 0.3, 0.6, 0.9}) {
    for (double sigma2 : {0.5, 1.0, 3.0}) {
      const SpectralIntegral i =
          spectral_integral(spectral_density(ProcessSpec::ar1(phi, sigma2)), 4096);
      EXPECT_NEAR(i.value, 0.5 * std::log(sigma2), 1e-10) << phi << " " << sigma2;
    }
  }
}

TEST(SpectralIntegral, DoublingStopsAtTolerance) {
  const SpectralIntegral i = spectral_integral(spectral_density(ProcessSpec::ar1(0.9, 1.0)), 16);
  EXPECT_GT(i.grid_size, 16);
  EXPECT_TRUE(i.diagnostics.converged);
  EXPECT_NEAR(i.value, 0.0, 1e-10);
}

TEST(SpectralIntegral, RejectsSmallGrid) {
  EXPECT_THROW(spectral_integral(spectral_density(fixtures::white(1)), 8), InvalidSpec);
}

TEST(SpectralIntegral, SingularDensityCarriesTheta) {
  try {
    spectral_integral(spectral_density(ProcessSpec::white(MatrixXd::Zero(2, 2))));
    FAIL() << "expected SingularDensity";
  } catch (const SingularDensity& e) {
    EXPECT_EQ(e.theta(), -std::numbers::pi);
    EXPECT_EQ(e.kind(), ErrorKind::singular_density);
  }
  // MA(1) with b = 1 vanishes at theta = pi (grid point k = 0)
  EXPECT_THROW(spectral_integral(spectral_density(ProcessSpec::ma1(1.0, 1.0))), SingularDensity);
  // rank-deficient sigma: one direction has zero variance
  MatrixXd sigma = MatrixXd::Zero(2, 2);
  sigma(0, 0) = 1.0;
  EXPECT_THROW(entropy_rate(ProcessSpec::white(sigma)), SingularDensity);
}

TEST(EntropyRate, ScalarWhiteClosedForms) {
  const std::array<double, 1> alphas = {2.0};
  const EntropyReport r = entropy_rate(fixtures::white(1), alphas);
  EXPECT_NEAR(r.shannon_rate, 1.4189385332046727, 1e-12);
  EXPECT_NEAR(r.renyi_rates.at(2.0), 1.2655121234846454, 1e-12);

  const double sigma2 = 2.5;
  const EntropyReport s = entropy_rate(fixtures::white(1, sigma2), alphas);
  EXPECT_NEAR(s.shannon_rate, 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * sigma2),
              1e-12);
}

TEST(EntropyRate, Ar1MatchesInnovationVariance) {
  const EntropyReport r = entropy_rate(ProcessSpec::ar1(0.9, 1.0));
  EXPECT_NEAR(r.shannon_rate, 0.5 * kLog2PiE, 1e-9);
  EXPECT_EQ(r.method.label(), "quadrature");
}

TEST(EntropyRate, Var1MultivariateKolmogorovIdentity) {
  const EntropyReport r = entropy_rate(fixtures::var1_2x2());
  EXPECT_NEAR(r.shannon_rate, kLog2PiE, 1e-8);
  EXPECT_NEAR(r.spectral_integral, 0.0, 1e-8);
  EXPECT_LE(r.diagnostics.hermiticity_residual, 1e-12);
  EXPECT_GT(r.diagnostics.min_eigenvalue, 0.0);
}

TEST(EntropyRate, ReportDefinitionHoldsExactly) {
  const std::array<double, 3> alphas = {0.5, 2.0, 5.0};
  const EntropyReport r = entropy_rate(fixtures::var1_2x2(), alphas);
  EXPECT_EQ(r.shannon_rate, shannon_constant(2.0) + r.spectral_integral);
  for (double alpha : alphas) {
    EXPECT_EQ(r.renyi_rates.at(alpha), renyi_constant(2.0, alpha) + r.spectral_integral);
  }
}

TEST(EntropyRate, BadAlpha) {
  const std::array<double, 1> alphas = {-0.5};
  EXPECT_THROW(entropy_rate(fixtures::white(1), alphas), BadAlpha);
}

TEST(SzegoFunctional, IdentityGivesTrace) {
  MatrixXd sigma = MatrixXd::Zero(2, 2);
  sigma(0, 0) = 1.0;
  sigma(1, 1) = 3.0;
  EXPECT_NEAR(szego_functional(spectral_density(ProcessSpec::white(sigma)), spectral_identity()),
              4.0, 1e-14);
}

TEST(SzegoFunctional, ParsevalOnMa1) {
  // (1/2 pi) int K(theta)^2 = sum_j K(j)^2 = 1.25^2 + 2 * 0.5^2
  EXPECT_NEAR(szego_functional(spectral_density(ProcessSpec::ma1(0.5, 1.0)), spectral_square()),
              2.0625, 1e-12);
}

TEST(SzegoFunctional, LogIsTwiceSpectralIntegral) {
  for (const auto& f : fixtures::all()) {
    const SpectralDensity d = spectral_density(f.spec);
    const SpectralIntegral i = spectral_integral(d, 1024);
    EXPECT_NEAR(szego_functional(d, spectral_log(), i.grid_size), 2.0 * i.value, 1e-12) << f.name;
  }
}

TEST(ConvergenceStudy, WhiteGapsVanish) {
  MatrixXd sigma = MatrixXd::Zero(2, 2);
  sigma(0, 0) = 1.0;
  sigma(1, 1) = 3.0;
  const std::array<std::int64_t, 3> ns = {1, 5, 32};
  for (const auto& f : {spectral_log(), spectral_square(), spectral_identity()}) {
    const ConvergenceTable t = convergence_study(ProcessSpec::white(sigma), f, ns);
    for (const auto& row : t.rows) {
      EXPECT_NEAR(row.gap, 0.0, 1e-12) << f.name << " n " << row.n;
      EXPECT_EQ(row.gap, row.finite_rate - row.limit_rate);
    }
  }
}

TEST(ConvergenceStudy, Ar1GapShrinks) {
  const std::array<std::int64_t, 4> ns = {16, 64, 256, 1024};
  const ConvergenceTable t = convergence_study(ProcessSpec::ar1(0.5, 1.0), spectral_log(), ns);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_LT(std::abs(t.rows.back().gap), std::abs(t.rows.front().gap));
  EXPECT_LT(std::abs(t.rows.back().gap), 5e-3);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LT(std::abs(t.rows[i].gap), std::abs(t.rows[i - 1].gap));
  }
  // log det K_n = log K(0) for AR(1) with unit innovations
  EXPECT_NEAR(t.rows.front().finite_rate, std::log(1.0 / 0.75) / 16.0, 1e-12);
}

TEST(ConvergenceStudy, Var1GapAtFiveTwelve) {
  const std::array<std::int64_t, 1> ns = {512};
  const ConvergenceTable t = convergence_study(fixtures::var1_2x2(), spectral_log(), ns);
  EXPECT_LT(std::abs(t.rows.front().gap), 1e-2);
}

TEST(ConvergenceStudy, SizeLimitBeforeWork) {
  const std::array<std::int64_t, 2> ns = {4, 20000};
  EXPECT_THROW(convergence_study(fixtures::white(1), spectral_log(), ns), SizeLimit);
}

// Properties.

TEST(SzegoProperty, QuadratureSelfConsistency) {
  for (const auto& f : fixtures::all()) {
    const SpectralDensity d = spectral_density(f.spec);
    for (std::int64_t q : {256, 512, 1024}) {
      const double a = szego_functional(d, spectral_log(), q);
      const double b = szego_functional(d, spectral_log(), 2 * q);
      EXPECT_LT(std::abs(a - b) / 2.0, 1e-9) << f.name << " Q " << q;
    }
  }
}

TEST(SzegoProperty, RateMatchesClosedFormForEveryFixture) {
  for (const auto& f : fixtures::all()) {
    const EntropyReport r = entropy_rate(f.spec);
    EXPECT_NEAR(r.spectral_integral, f.spectral_integral, 1e-9) << f.name;
  }
}

TEST(SzegoProperty, AlphaNearOneIsContinuous) {
  for (const auto& f : fixtures::all()) {
    const std::array<double, 2> alphas = {1.0 - 1e-4, 1.0 + 1e-4};
    const EntropyReport r = entropy_rate(f.spec, alphas);
    const double m = static_cast<double>(f.spec.m());
    for (double alpha : alphas) {
      EXPECT_LE(std::abs(r.renyi_rates.at(alpha) - r.shannon_rate), m * 1e-4) << f.name;
    }
  }
}

TEST(SzegoProperty, ScalarReductionMatchesKolmogorovFormula) {
  const std::array<double, 2> alphas = {0.5, 3.0};
  for (double phi : {0.3, 0.6, 0.9}) {
    for (double sigma2 : {1.0, 2.0}) {
      const EntropyReport r = entropy_rate(ProcessSpec::ar1(phi, sigma2), alphas);
      const double integral = scalar_log_integral(phi, sigma2, r.grid_size);
      EXPECT_NEAR(r.shannon_rate, 0.5 * kLog2PiE + integral, 1e-12);
      for (double alpha : alphas) {
        const double constant =
            0.5 * std::log(2.0 * std::numbers::pi * std::pow(alpha, 1.0 / (alpha - 1.0)));
        EXPECT_NEAR(r.renyi_rates.at(alpha), constant + integral, 1e-12);
      }
    }
  }
}

TEST(SzegoProperty, WhiteScalingLaw) {
  MatrixXd sigma(2, 2);
  sigma << 2.0, 0.4, 0.4, 1.0;
  const double base = entropy_rate(ProcessSpec::white(sigma)).shannon_rate;
  for (double c : {0.1, 3.0, 50.0}) {
    const double scaled = entropy_rate(ProcessSpec::white(c * sigma)).shannon_rate;
    EXPECT_NEAR(scaled - base, std::log(c), 1e-12) << c;
  }
}

TEST(SzegoProperty, RateConsistencyWithFiniteN) {
  // |H_finite(n) - H| shrinks like C/n; gate at n = 2048
  for (const auto& f : fixtures::all()) {
    const double limit = entropy_rate(f.spec).shannon_rate;
    const double at_256 = finite_entropy(f.spec, 256).shannon_per_block - limit;
    const double at_2048 = finite_entropy(f.spec, 2048).shannon_per_block - limit;
    EXPECT_LT(std::abs(at_2048), 5e-3) << f.name;
    EXPECT_LE(std::abs(at_2048), std::abs(at_256) + 1e-12) << f.name;
  }
}
