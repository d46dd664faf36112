#include "bsel/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bsel {

int Dataset::intercept_column() const {
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if ((X.col(j).array() == 1.0).all()) return static_cast<int>(j);
  return -1;
}

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("Dataset: n >= 1 and p >= 1 required");
  if (y.size() != X.rows())
    throw std::invalid_argument("Dataset: response length != row count");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("Dataset: non-finite entries");
  if (response_kind == ResponseKind::binary) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y(i) != 0.0 && y(i) != 1.0)
        throw std::invalid_argument("Dataset: binary response must be in {0,1}");
  }
}

Subset::Subset(std::vector<int> idx, std::vector<int> f)
    : indices(std::move(idx)), forced(std::move(f)) {
  for (std::size_t i = 1; i < indices.size(); ++i)
    if (indices[i] <= indices[i - 1])
      throw std::invalid_argument("Subset: indices must be strictly increasing");
  for (int j : forced)
    if (!contains(j)) throw std::invalid_argument("Subset: forced index not in subset");
}

Subset Subset::full(int p) {
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  return Subset(std::move(idx));
}

std::string Subset::label() const {
  std::ostringstream s;
  s << '{';
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) s << ',';
    s << indices[i];
  }
  s << '}';
  return s.str();
}

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Vector WeightSpec::realize(const Matrix& Xtilde) const {
  const Eigen::Index n = Xtilde.rows();
  Vector w(n);
  switch (kind) {
    case Kind::uniform:
      w.setConstant(n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
      break;
    case Kind::gaussian_kernel: {
      if (center.size() != Xtilde.cols())
        throw std::invalid_argument("WeightSpec: kernel center length != p");
      if (!(range > 0.0)) throw std::invalid_argument("WeightSpec: range must be > 0");
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = (Xtilde.row(i).transpose() - center).squaredNorm();
        w(i) = std::exp(-d2 / range);
      }
      break;
    }
    case Kind::explicit_values:
      if (values.size() != n)
        throw std::invalid_argument("WeightSpec: explicit weight length != n");
      w = values;
      break;
  }
  if (n > 0 && !((w.array() > 0.0).all() && w.allFinite()))
    throw std::invalid_argument("WeightSpec: realized weights must be positive and finite");
  return w;
}

void PosteriorDraws::validate() const {
  if (S() < 2) throw std::invalid_argument("PosteriorDraws: S >= 2 required");
  if (!beta.allFinite()) throw std::invalid_argument("PosteriorDraws: non-finite beta");
  if (sigma.size() > 0) {
    if (sigma.size() != S())
      throw std::invalid_argument("PosteriorDraws: sigma length != S");
    if (!((sigma.array() > 0.0).all() && sigma.allFinite()))
      throw std::invalid_argument("PosteriorDraws: sigma entries must be positive");
  }
}

void PredictiveDraws::validate() const {
  if (!ytilde.allFinite())
    throw std::invalid_argument("PredictiveDraws: non-finite entries");
}

}  // namespace bsel
