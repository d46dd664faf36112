#include "bsel/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bsel/rng.hpp"

namespace bsel {

std::pair<Dataset, SyntheticTruth> generate_synthetic(int n, int p, double snr,
                                                      ResponseKind kind,
                                                      std::uint64_t seed) {
  if (n < 10 || p < 6) throw std::invalid_argument("generate_synthetic: n >= 10, p >= 6");
  if (!(snr > 0.0)) throw std::invalid_argument("generate_synthetic: SNR > 0 required");

  Rng rng(seed);
  constexpr double rho = 0.75;
  const double mix = std::sqrt(1.0 - rho * rho);

  // AR(1)-correlated standard normals: Cor(x_j, x_j') = rho^|j - j'|
  Matrix z(n, p);
  for (int i = 0; i < n; ++i) {
    z(i, 0) = rng.normal();
    for (int j = 1; j < p; ++j) z(i, j) = rho * z(i, j - 1) + mix * rng.normal();
  }

  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = p - 1; i > 0; --i)
    std::swap(perm[i], perm[static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)))]);

  Dataset data;
  data.X.resize(n, p + 1);
  data.X.col(0).setOnes();
  for (int j = 0; j < p; ++j) data.X.col(j + 1) = z.col(perm[j]);
  data.column_names.push_back("intercept");
  for (int j = 1; j <= p; ++j) data.column_names.push_back("x" + std::to_string(j));
  data.response_kind = kind;

  SyntheticTruth truth;
  truth.snr = snr;
  truth.beta_star = Vector::Zero(p + 1);
  truth.beta_star(0) = -1.0;
  const double signs[5] = {1.0, 1.0, 1.0, -1.0, -1.0};
  for (int j = 0; j < 5; ++j) truth.beta_star(j + 1) = signs[j];
  for (int j = 0; j <= p; ++j)
    if (truth.beta_star(j) != 0.0) truth.active.push_back(j);

  truth.y_star = data.X * truth.beta_star;
  const double mean = truth.y_star.mean();
  const double sd = std::sqrt((truth.y_star.array() - mean).square().sum() /
                              static_cast<double>(n - 1));
  truth.sigma_star = sd / std::sqrt(snr);

  data.y.resize(n);
  if (kind == ResponseKind::continuous) {
    for (int i = 0; i < n; ++i) data.y(i) = truth.y_star(i) + truth.sigma_star * rng.normal();
  } else {
    truth.pi_star.resize(n);
    for (int i = 0; i < n; ++i) {
      truth.pi_star(i) = 1.0 / (1.0 + std::exp(-truth.y_star(i)));
      data.y(i) = rng.uniform() < truth.pi_star(i) ? 1.0 : 0.0;
    }
  }
  return {std::move(data), std::move(truth)};
}

}  // namespace bsel
