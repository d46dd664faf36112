#pragma once

#include <cstdint>
#include <vector>

#include "bsel/types.hpp"

namespace bsel {

struct SyntheticTruth {
  Vector beta_star;   // length p+1 including intercept at index 0
  Vector y_star;      // noiseless linear predictor
  double sigma_star = 0.0;
  Vector pi_star;     // binary case only
  std::vector<int> active;  // indices with nonzero beta_star (incl. intercept)
  double snr = 0.0;
};

// Correlated-normal design, Cor(x_j, x_j') = 0.75^|j-j'| before a random
// column permutation; intercept prepended; beta0* = -1 and five nonzero
// signals (+1,+1,+1,-1,-1) on the first five permuted columns.
std::pair<Dataset, SyntheticTruth> generate_synthetic(int n, int p, double snr,
                                                      ResponseKind kind,
                                                      std::uint64_t seed);

}  // namespace bsel
