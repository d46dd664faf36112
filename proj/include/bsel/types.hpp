#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ResponseKind { continuous, binary };
enum class LossKind { squared_error, cross_entropy };

/// Observed design matrix and response. Column 0 may be an all-ones intercept.
struct Dataset {
  Matrix X;
  Vector y;
  std::vector<std::string> column_names;
  ResponseKind response_kind = ResponseKind::continuous;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  // Index of an all-ones column, or -1.
  int intercept_column() const;
  void validate() const;
};

/// Ordered set of active covariate indices; forced members must survive
/// any refinement of the subset.
struct Subset {
  std::vector<int> indices;  // strictly increasing
  std::vector<int> forced;   // subsequence of indices

  Subset() = default;
  explicit Subset(std::vector<int> idx, std::vector<int> f = {});
  static Subset full(int p);

  int size() const { return static_cast<int>(indices.size()); }
  bool contains(int j) const {
    return std::binary_search(indices.begin(), indices.end(), j);
  }
  bool operator==(const Subset& o) const { return indices == o.indices; }
  std::string label() const;  // e.g. "{0,3,7}"
};

// Lexicographic order on index sequences, used for all tie-breaking.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b);

struct FunctionalSpec {
  enum class Kind { identity, threshold };
  Kind kind = Kind::identity;
  double tau = 0.0;

  double apply(double ytil) const {
    return kind == Kind::identity ? ytil : (ytil >= tau ? 1.0 : 0.0);
  }
};

struct PointPredictions {
  enum class Kind { continuous, probability };
  Vector yhat;
  Kind kind = Kind::continuous;
};

/// Evaluation weights omega(x_i) > 0 over the target design points.
struct WeightSpec {
  enum class Kind { uniform, gaussian_kernel, explicit_values };
  Kind kind = Kind::uniform;
  Vector center;       // gaussian_kernel
  double range = 1.0;  // gaussian_kernel
  Vector values;       // explicit_values

  // Length-n weight vector for the given design points.
  Vector realize(const Matrix& Xtilde) const;
};

/// Posterior coefficient and error-scale draws; the sole interface between
/// a Bayesian model and the decision engine.
struct PosteriorDraws {
  Matrix beta;   // S x p
  Vector sigma;  // length S, or empty for likelihoods without a scale
  std::uint64_t seed = 0;

  Eigen::Index S() const { return beta.rows(); }
  void validate() const;
};

struct PredictiveDraws {
  Matrix ytilde;  // S x n_tilde
  std::string covariates_ref;

  Eigen::Index S() const { return ytilde.rows(); }
  Eigen::Index n_tilde() const { return ytilde.cols(); }
  void validate() const;
};

}  // namespace bsel
