#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "strhc/polytope.hpp"

namespace strhc::rng {

using Stream = std::mt19937_64;

// Draws in [0, 1) with an explicit formula so traces replay identically
// everywhere, independent of library distribution internals.
inline double uniform_unit(Stream& s) {
  return static_cast<double>(s() >> 11) * (1.0 / 9007199254740992.0);
}

inline double uniform_in(Stream& s, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(s);
}

inline std::uint64_t uniform_index(Stream& s, std::uint64_t count) {
  if (count == 0) throw std::invalid_argument("uniform_index: empty range");
  return s() % count;
}

// Degenerate coordinates consume no randomness, so configurations that pin a
// coordinate to a point replay in lockstep with ones that do not use it.
inline Eigen::VectorXd sample_box(Stream& s, const geom::Box& box) {
  Eigen::VectorXd z(box.lower.size());
  for (int j = 0; j < z.size(); ++j) {
    if (box.lower(j) == box.upper(j))
      z(j) = box.lower(j);
    else
      z(j) = uniform_in(s, box.lower(j), box.upper(j));
  }
  return z;
}

inline Eigen::VectorXd sample_polytope(Stream& s, const geom::Polytope& p,
                                       const geom::Box& bbox, int max_tries = 10000) {
  for (int t = 0; t < max_tries; ++t) {
    Eigen::VectorXd z = sample_box(s, bbox);
    if (geom::contains(p, z)) return z;
  }
  throw std::runtime_error("sample_polytope: rejection sampling failed");
}

}  // namespace strhc::rng
