#pragma once

#include <vector>

#include "bsel/action.hpp"
#include "bsel/types.hpp"

namespace bsel {

/// Per-size collections of low-criterion subsets. Subsets are expressed in
/// the column space of the searched matrix; screen_map translates those
/// indices back to the original covariate space.
struct CandidateFamily {
  struct Entry {
    Subset subset;     // screened index space
    double criterion;  // weighted RSS, or exact cross-entropy after recompute
  };
  std::vector<Entry> entries;  // grouped by size ascending, sorted within size
  std::vector<int> screen_map;
  int m_k = 0;

  // Subset with indices mapped through screen_map.
  Subset original_subset(std::size_t i) const;
  std::vector<const Entry*> of_size(int k) const;
};

// Top indices of the full-subset action by |coefficient| until s_max is
// reached; forced indices and the intercept (when present) always retained;
// ties broken by lower index.
std::vector<int> screen(const LinearAction& full_action, int s_max,
                        const std::vector<int>& forced, int intercept_index);

// Exact branch-and-bound: for each size k, the m_k subsets with the smallest
// weighted RSS of pseudo_y on the active columns. Bounds come from the RSS of
// the smallest superset already solved; pruning never discards a subset that
// belongs in an incumbent list. Forced indices appear in every emitted subset.
CandidateFamily bba_search(const Matrix& X, const Vector& pseudo_y, const Vector& weights,
                           int m_k, const std::vector<int>& forced = {});

// Brute force over all nonempty subsets (p <= 16); identical output contract.
CandidateFamily exhaustive_search(const Matrix& X, const Vector& pseudo_y,
                                  const Vector& weights, int m_k,
                                  const std::vector<int>& forced = {});

// Classification path: logistic pseudo-data drives the RSS search, then each
// emitted subset's criterion is recomputed as the exact cross-entropy.
CandidateFamily candidate_family_classification(const Matrix& X,
                                                const PointPredictions& hhat,
                                                const WeightSpec& w, int m_k,
                                                const std::vector<int>& forced = {});

}  // namespace bsel
