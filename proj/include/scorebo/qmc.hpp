#pragma once

#include <cstdint>
#include <random>

#include <boost/random/sobol.hpp>

#include "scorebo/types.hpp"

namespace scorebo {

/// `n` Sobol points in (0,1)^dim with a seeded random digital shift (one XOR
/// mask per coordinate), one point per row.
inline MatrixXd sobol_points(Eigen::Index n, Eigen::Index dim, std::uint64_t seed) {
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> mask(dim);
  for (auto& m : mask) m = rng();
  MatrixXd out(n, dim);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dim; ++d) {
      const std::uint64_t v = (engine() ^ mask[d]) >> 11;
      out(i, d) = (double(v) + 0.5) * kScale;
    }
  return out;
}

}  // namespace scorebo
