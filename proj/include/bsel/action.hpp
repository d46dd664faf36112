#pragma once

#include <utility>
#include <vector>

#include "bsel/types.hpp"

namespace bsel {

// Probability clipping bound for logits and IRLS weights.
inline constexpr double kProbClip = 1e-6;
// Relative rank tolerance for the pivoted orthogonal factorization.
inline constexpr double kRankTol = 1e-10;

struct LinearAction {
  Subset subset;
  Vector coefficients;  // aligned with subset.indices, zeros implied elsewhere
  LossKind loss_kind = LossKind::squared_error;
  double in_sample_criterion = 0.0;
  bool converged = true;

  // Dense coefficient vector over all p covariates.
  Vector dense(int p) const;
  // Fitted values Xtilde_S * coefficients.
  Vector predict(const Matrix& Xtilde) const;
};

struct ActionDraws {
  Matrix coef;  // S x |subset|
  Subset subset;
  std::vector<int> failed_draws;  // excluded from all summaries

  Eigen::Index S() const { return coef.rows(); }
};

struct LogisticPseudoData {
  Vector zhat;  // logit(clipped hhat)
  Vector what;  // omega * hhat * (1 - hhat), clipped
  double clip = kProbClip;
};

// Weighted least squares fit of yhat on the active columns; minimum-norm
// solution via pivoted complete orthogonal factorization when the weighted
// Gram matrix is numerically singular.
LinearAction optimal_linear_action(const Matrix& Xtilde, const PointPredictions& yhat,
                                   const WeightSpec& w, const Subset& s);

LogisticPseudoData logistic_pseudo_data(const PointPredictions& hhat, const Vector& omega);

// Minimizes the weighted cross-entropy of the fitted probabilities hhat over
// coefficients supported on s, by IRLS with ridge jitter 1e-8. The reported
// in_sample_criterion is the exact cross-entropy objective.
LinearAction optimal_logistic_action(const Matrix& Xtilde, const PointPredictions& hhat,
                                     const WeightSpec& w, const Subset& s);

// Per-draw optimizers against sampled future responses; squared error is one
// WLS solve per draw, cross-entropy a per-draw IRLS on binary h(ytilde) with
// ridge jitter 1e-6.
ActionDraws predictive_action_draws(const Matrix& Xtilde, const PredictiveDraws& pred,
                                    const WeightSpec& w, const Subset& s, LossKind loss,
                                    const FunctionalSpec& h);

// Equal-tailed empirical quantile intervals at the given level, one pair per
// covariate in [0, p); coefficients outside the subset are exactly [0, 0].
// Convention: with m successful rows and q = (1-level)/2, the bounds are the
// max(1, floor(q*m))-th and (m+1-max(1, floor(q*m)))-th order statistics.
std::vector<std::pair<double, double>> interval_estimate(const ActionDraws& draws,
                                                         double level, int p);

// Exact weighted cross-entropy objective of coefficients delta on subset s.
double cross_entropy_objective(const Matrix& Xtilde, const Vector& hhat,
                               const Vector& omega, const Subset& s,
                               const Vector& delta);

// Internal building block, exposed for the evaluation module: minimum-norm
// WLS of targets on the active columns.
Vector wls_solve(const Matrix& Xtilde, const Vector& targets, const Vector& omega,
                 const Subset& s);

// IRLS core working from an explicit target vector in [0,1].
LinearAction irls_fit(const Matrix& Xtilde, const Vector& targets, const Vector& omega,
                      const Subset& s, double ridge_jitter);

}  // namespace bsel
