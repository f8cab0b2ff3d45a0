#pragma once

#include <cstddef>
#include <span>

namespace gpentropy {

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is independent of how the terms were produced.
inline double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t kLeaf = 16;
  if (terms.size() <= kLeaf) {
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace gpentropy
