#pragma once

// Reference evaluation of a single signature coefficient straight from the
// iterated-integral definition. Shares no code with the Chen-product route in
// signature.hpp and exists to check it.

#include <cstddef>
#include <vector>

#include "sigbandit/error.hpp"
#include "sigbandit/path.hpp"
#include "sigbandit/signature.hpp"

namespace sigbandit {

// Left-point Riemann-Stieltjes nested sums over a grid where every segment is
// split into `refinement` equal pieces. The inner integral is accumulated first
// and integrated against the next letter's increments. Error is O(1/refinement).
inline double oracle_coefficient(const DiscretePath& augmented, const Word& word,
                                 std::size_t refinement) {
  if (refinement < 1) throw Error(ErrorCode::BadConfig, "refinement must be >= 1");
  for (std::size_t letter : word) {
    if (letter >= augmented.channels()) throw Error(ErrorCode::BadChannel, "letter out of range");
  }
  const std::size_t k = word.size();
  // partial[j] = running value of the iterated integral of word[0..j)
  std::vector<double> partial(k + 1, 0.0);
  partial[0] = 1.0;
  const double r = static_cast<double>(refinement);
  for (std::size_t i = 0; i + 1 < augmented.size(); ++i) {
    for (std::size_t s = 0; s < refinement; ++s) {
      const double lo = static_cast<double>(s) / r;
      const double hi = static_cast<double>(s + 1) / r;
      for (std::size_t j = k; j >= 1; --j) {
        const std::size_t c = word[j - 1];
        const double a = augmented.value(i, c);
        const double b = augmented.value(i + 1, c);
        const double dx = (a + hi * (b - a)) - (a + lo * (b - a));
        partial[j] += partial[j - 1] * dx;
      }
    }
  }
  return partial[k];
}

// On a piecewise-linear path the left-point sum for a length-k word is a
// polynomial of degree k-1 in h = 1/refinement. Richardson extrapolation over
// refinements r, 2r, ..., 2^(k-1) r therefore removes the discretization
// error entirely, leaving only rounding.
inline double oracle_coefficient_extrapolated(const DiscretePath& augmented, const Word& word,
                                              std::size_t refinement) {
  const std::size_t levels = word.size() < 1 ? 1 : word.size();
  std::vector<double> table(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    table[i] = oracle_coefficient(augmented, word, refinement << i);
  }
  for (std::size_t j = 1; j < levels; ++j) {
    const double factor = static_cast<double>(1u << j);
    for (std::size_t i = levels - 1; i >= j; --i) {
      table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
    }
  }
  return table[levels - 1];
}

}  // namespace sigbandit
