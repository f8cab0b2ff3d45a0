// Entropy rate of a bivariate VAR(1): the asymptotic value next to the exact
// finite-n entropies that approach it.

#include <array>
#include <iostream>

#include <fmt/format.h>

#include "gpentropy/gpentropy.hpp"

int main() {
  using namespace gpentropy;
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.1, 0.0, 0.3;
  const ProcessSpec spec = ProcessSpec::var1(a, Eigen::MatrixXd::Identity(2, 2));

  const std::array<double, 2> alphas = {0.5, 2.0};
  const EntropyReport rate = entropy_rate(spec, alphas);
  fmt::print("limit     shannon {:.12f}  renyi(2) {:.12f}\n", rate.shannon_rate,
             rate.renyi_rates.at(2.0));
  for (std::int64_t n : {4, 16, 64, 256, 1024}) {
    const FiniteEntropy h = finite_entropy(spec, n, alphas);
    fmt::print("n = {:5d}  shannon {:.12f}  gap {:+.3e}\n", n, h.shannon_per_block,
               h.shannon_per_block - rate.shannon_rate);
  }
  return 0;
}
