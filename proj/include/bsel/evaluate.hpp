#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsel/search.hpp"
#include "bsel/types.hpp"

namespace bsel {

struct FoldSpec {
  int K = 0;
  std::vector<int> assignment;  // fold label in [0, K) per observation
  std::uint64_t seed = 0;

  std::vector<int> validation_rows(int k) const;
  std::vector<int> training_rows(int k) const;
};

// Random balanced partition; fold sizes differ by at most one.
FoldSpec make_folds(int n, int K, std::uint64_t seed);

// Likelihood used for the importance weights (and fold-level predictive
// draws). Ingested draws must declare one of these.
enum class LikelihoodKind { gaussian, bernoulli_logit };

struct SirResult {
  std::vector<int> indices;  // S_tilde draw indices, without replacement
  double ess = 0.0;          // effective sample size of the weights
  bool low_ess = false;      // ess < 10
};

// Importance weights proportional to exp(-log-likelihood of the held-out
// fold), stabilized by the max; resampling without replacement.
SirResult sir_resample(const PosteriorDraws& draws, const Dataset& data,
                       const FoldSpec& folds, int fold_k, int S_tilde,
                       std::uint64_t seed, LikelihoodKind lik);

struct SubsetLosses {
  LossKind loss_kind = LossKind::squared_error;
  int S_tilde = 0;
  bool has_empirical = true;

  struct Row {
    Subset subset;
    double empirical = 0.0;
    Vector predictive;  // length S_tilde, paired across subsets by position
    std::vector<double> fold_empirical;
    bool evaluable = true;
  };
  std::vector<Row> rows;
  std::vector<double> fold_ess;
  std::vector<std::string> notes;  // dropped subsets, low-ESS warnings
};

struct EvalConfig {
  LossKind loss = LossKind::squared_error;
  FunctionalSpec h;
  WeightSpec w;
  LikelihoodKind likelihood = LikelihoodKind::gaussian;
  int S_tilde = 0;  // 0 means floor(S/2)
  std::uint64_t seed = 0;
};

// Appendix-style out-of-sample evaluation: per fold, SIR-resampled draws
// define training-posterior predictive samples; training-row point
// predictions drive the per-fold actions; empirical and per-draw predictive
// losses are averaged over folds. Subsets are in original covariate space.
SubsetLosses out_of_sample_losses(const Dataset& data, const PosteriorDraws& draws,
                                  const FoldSpec& folds, const CandidateFamily& family,
                                  const EvalConfig& cfg);

// Argmin of the empirical loss; ties broken by smaller size, then lexicographic.
int best_subset_row(const SubsetLosses& losses);

// Percent increase in predictive loss of row vs ref_row, pairwise on shared
// draws; near-zero reference draws are excluded (count in *n_excluded).
Vector d_tilde_draws(const SubsetLosses& losses, int ref_row, int row,
                     int* n_excluded = nullptr);

struct AcceptableFamily {
  double eta = 0.0, epsilon = 0.10;
  int reference_row = -1;  // S_min, or the full subset for the new-x variant
  std::vector<int> member_rows;
  std::vector<double> prob;  // P(D_tilde < eta) per losses row (NaN if not evaluable)
  int s_min_row = -1;
  int s_small_row = -1;
};

// Member iff the empirical proportion of paired draws with D_tilde below eta
// is at least epsilon. Draws where the row does not exceed the reference
// (within 1e-12) always satisfy the event, so the reference is always a member.
AcceptableFamily acceptable_family(const SubsetLosses& losses, double eta, double epsilon);

// New-covariate variant: predictive losses at Xtilde != X with no folds, the
// full subset as reference, and no empirical losses.
SubsetLosses newx_predictive_losses(const Matrix& Xtilde, const PredictiveDraws& pred,
                                    const PointPredictions& point, const CandidateFamily& family,
                                    LossKind loss, const FunctionalSpec& h, const WeightSpec& w);
AcceptableFamily acceptable_family_newx(const SubsetLosses& losses, double eta,
                                        double epsilon);

}  // namespace bsel
