#pragma once

#include <vector>

#include "bsel/evaluate.hpp"
#include "bsel/types.hpp"

namespace bsel {

/// Inclusion proportions over an acceptable family: entry (j, l) is the
/// share of members containing both j and l; the diagonal is the marginal
/// inclusion importance. Exact integer counts kept alongside the floats so
/// keystone detection never hinges on rounding.
struct ImportanceMatrix {
  Matrix vi;                            // p x p, values in [0, 1]
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
  int family_size = 0;

  void validate() const;
};

ImportanceMatrix vi_matrix(const std::vector<Subset>& members, int p);
ImportanceMatrix vi_matrix(const AcceptableFamily& family, const SubsetLosses& losses,
                           int p);

// Covariates included in every member (exact count equality, tolerance 1e-12
// on the float view).
std::vector<int> keystones(const ImportanceMatrix& im);

struct RedundantPair {
  int j = 0, l = 0;
  double vi_j = 0.0, vi_l = 0.0, vi_jl = 0.0;
};

// Pairs that are individually common (VI >= hi) yet rarely co-included
// (VI(j,l) <= lo), sorted by co-inclusion ascending.
std::vector<RedundantPair> redundancy_pairs(const ImportanceMatrix& im, double hi = 0.3,
                                            double lo = 0.1);

}  // namespace bsel
