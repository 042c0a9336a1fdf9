#pragma once

#include <cmath>

#include "dyadic/bmo.hpp"
#include "dyadic/lattice.hpp"
#include "dyadic/rng.hpp"

namespace dyadic::testing {

inline GridFunction random_function(const GridSpec& spec, std::uint64_t seed, double amp = 1.0) {
  Rng rng(seed);
  GridFunction f(spec, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-amp, amp);
  return f;
}

inline CoefSequence random_sequence(const GridSpec& spec, std::uint64_t seed,
                                    std::size_t support) {
  Rng rng(seed);
  const auto rects = enumerate_cancellative_rectangles(spec);
  CoefSequence seq(spec);
  const std::size_t want = std::min(support, rects.size());
  std::vector<std::size_t> chosen;
  while (chosen.size() < want) {
    const std::size_t pick = rng.below(rects.size());
    bool dup = false;
    for (std::size_t c : chosen) dup = dup || c == pick;
    if (!dup) chosen.push_back(pick);
  }
  for (std::size_t pick : chosen) seq.set(rects[pick], rng.uniform(-1.0, 1.0));
  return seq;
}

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace dyadic::testing
