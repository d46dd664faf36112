#pragma once

#include <cstdint>
#include <string>

#include "bsel/types.hpp"

namespace bsel {

/// Configuration for the built-in conjugate normal-inverse-gamma backend:
/// y | beta, sigma2 ~ N(X beta, sigma2 I), beta_j | sigma2 ~ N(0, sigma2 v_j)
/// with v_j = g for penalized columns and 1e6 * g for the intercept,
/// sigma2 ~ InvGamma(a0, b0).
struct ModelConfig {
  double prior_scale = 1.0;  // g, on standardized covariates
  double ig_shape = 0.01;    // a0
  double ig_rate = 0.01;     // b0
  bool intercept_unpenalized = true;
  // Center/scale continuous covariates to sd 0.5 and center the response
  // inside the fit; inverted on all outputs. Requires an intercept column
  // (skipped otherwise).
  bool standardize = true;

  void validate() const;
};

struct FittedModel {
  // Posterior in the (possibly standardized) working space.
  Vector mean_w;   // posterior mean of beta
  Matrix chol_q;   // lower Cholesky factor of Q = Xw'Xw + Vinv
  double a_n = 0.0, b_n = 0.0;

  // Back-transform metadata.
  bool standardized = false;
  Vector col_center, col_scale;  // working x_j = (x_j - center_j) / scale_j
  double y_center = 0.0;
  int intercept_col = -1;

  Eigen::Index p() const { return mean_w.size(); }
  Vector to_original(const Vector& beta_w) const;
  Vector posterior_mean() const { return to_original(mean_w); }
};

FittedModel fit_conjugate_gaussian(const Dataset& data, const ModelConfig& cfg);

PosteriorDraws sample_posterior(const FittedModel& model, int S, std::uint64_t seed);

// Gaussian likelihood draws: ytilde[s,i] = x_i' beta^s + sigma^s * eps.
PredictiveDraws sample_predictive(const PosteriorDraws& draws, const Matrix& Xtilde,
                                  std::uint64_t seed);

// Bernoulli-logit likelihood draws: ytilde[s,i] ~ Bernoulli(logistic(x_i' beta^s)).
PredictiveDraws sample_predictive_bernoulli(const PosteriorDraws& draws,
                                            const Matrix& Xtilde, std::uint64_t seed);

// External draw matrices (delimited text with header, or the binary format).
// sigma_path may be empty for likelihoods without an error scale.
PosteriorDraws ingest_posterior(const std::string& beta_path,
                                const std::string& sigma_path);
PredictiveDraws ingest_predictive(const std::string& ytilde_path);

PointPredictions point_predictions(const PredictiveDraws& pred, const FunctionalSpec& h);

}  // namespace bsel
