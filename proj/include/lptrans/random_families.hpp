#pragma once

// Seeded test-family generators shared by the CLI and the test suites.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "lptrans/haar.hpp"
#include "lptrans/lpfunc.hpp"

namespace lpt::random {

/// `terms` distinct Haar indices of level < max_level + 1 (constant included)
/// with standard normal real coefficients.
inline HaarExpansion haar_expansion(std::mt19937_64& rng, std::size_t terms, int max_level) {
  auto pool = haar_indices(max_level + 1);
  require(terms <= pool.size(), "more terms requested than indices available");
  std::shuffle(pool.begin(), pool.end(), rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  HaarExpansion e;
  for (std::size_t i = 0; i < terms; ++i) e[pool[i]] = normal(rng);
  return e;
}

inline std::vector<HaarExpansion> haar_batch(std::uint64_t seed, std::size_t count, std::size_t terms,
                                             int max_level) {
  std::mt19937_64 rng(seed);
  std::vector<HaarExpansion> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(haar_expansion(rng, terms, max_level));
  return out;
}

/// Step function on [0,1) with `pieces` intervals at uniform random
/// breakpoints and standard normal values (never all zero).
inline PiecewiseFn step_function(std::mt19937_64& rng, std::size_t pieces) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> cuts{0.0, 1.0};
  while (cuts.size() < pieces + 1) {
    const double c = unif(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end() && c > 0.0) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double v = normal(rng);
    if (v == 0.0) v = 1.0;
    out.push_back({Box(Point{cuts[i]}, Point{cuts[i + 1]}), v});
  }
  return PiecewiseFn::trusted(1, std::move(out));
}

inline std::vector<PiecewiseFn> step_functions(std::uint64_t seed, std::size_t count, std::size_t pieces) {
  std::mt19937_64 rng(seed);
  std::vector<PiecewiseFn> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(step_function(rng, pieces));
  return out;
}

}  // namespace lpt::random
