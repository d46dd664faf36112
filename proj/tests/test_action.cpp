#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bsel/action.hpp"
#include "bsel/rng.hpp"

using namespace bsel;

namespace {

Matrix random_matrix(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, p);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) x(i, j) = rng.normal();
  }
  return x;
}

Vector random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

PointPredictions continuous(const Vector& v) {
  return {v, PointPredictions::Kind::continuous};
}

}  // namespace

TEST_CASE("optimal linear action solves the weighted normal equations") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 12 + static_cast<int>(seed % 17);
    const int p = 3 + static_cast<int>(seed % 4);
    const Matrix x = random_matrix(n, p, seed);
    const Vector yhat = random_vector(n, seed + 1000);
    Rng rng(seed + 2000);
    WeightSpec w;
    w.kind = WeightSpec::Kind::explicit_values;
    w.values.resize(n);
    for (int i = 0; i < n; ++i) w.values(i) = 0.1 + rng.uniform();

    std::vector<int> idx;
    for (int j = 0; j < p; ++j)
      if (j == 0 || rng.uniform() < 0.7) idx.push_back(j);
    const Subset s(idx);

    const LinearAction act = optimal_linear_action(x, continuous(yhat), w, s);

    Matrix xs(n, s.size());
    for (int j = 0; j < s.size(); ++j) xs.col(j) = x.col(s.indices[j]);
    const Matrix g = xs.transpose() * w.values.asDiagonal() * xs;
    const Vector rhs = xs.transpose() * (w.values.array() * yhat.array()).matrix();
    const Vector oracle = g.ldlt().solve(rhs);
    CHECK((act.coefficients - oracle).norm() / std::max(1.0, oracle.norm()) < 1e-9);

    // the criterion is the attained weighted SSE
    const Vector fit = xs * act.coefficients;
    double sse = 0;
    for (int i = 0; i < n; ++i) sse += w.values(i) * std::pow(yhat(i) - fit(i), 2);
    CHECK(act.in_sample_criterion == doctest::Approx(sse).epsilon(1e-10));
  }
}

TEST_CASE("rank-deficient designs take the minimum-norm coefficients") {
  Matrix x = random_matrix(20, 3, 5);
  x.conservativeResize(Eigen::NoChange, 4);
  x.col(3) = x.col(1);  // exact duplicate
  const Vector yhat = random_vector(20, 6);
  WeightSpec w;
  const Subset s({0, 1, 2, 3});
  const LinearAction act = optimal_linear_action(x, continuous(yhat), w, s);
  CHECK(act.coefficients.allFinite());
  // duplicated columns share the weight equally in the min-norm solution
  CHECK(act.coefficients(1) == doctest::Approx(act.coefficients(3)).epsilon(1e-8));
}

TEST_CASE("weight rescaling leaves the action unchanged") {
  const Matrix x = random_matrix(25, 4, 9);
  const Vector yhat = random_vector(25, 10);
  WeightSpec w1, w2;
  w1.kind = w2.kind = WeightSpec::Kind::explicit_values;
  w1.values = random_vector(25, 11).array().abs() + 0.1;
  w2.values = 7.5 * w1.values;
  const Subset s({0, 2, 3});
  const Vector a = optimal_linear_action(x, continuous(yhat), w1, s).coefficients;
  const Vector b = optimal_linear_action(x, continuous(yhat), w2, s).coefficients;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("the action is linear in the targets") {
  const Matrix x = random_matrix(18, 4, 13);
  const Vector y1 = random_vector(18, 14), y2 = random_vector(18, 15);
  WeightSpec w;
  const Subset s({0, 1, 3});
  const Vector a1 = optimal_linear_action(x, continuous(y1), w, s).coefficients;
  const Vector a2 = optimal_linear_action(x, continuous(y2), w, s).coefficients;
  const Vector a12 =
      optimal_linear_action(x, continuous(2.0 * y1 - 0.5 * y2), w, s).coefficients;
  CHECK((a12 - (2.0 * a1 - 0.5 * a2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("logistic pseudo-data formulas") {
  Vector h(3);
  h << 0.5, 0.9, 1.0;  // the last entry must be clipped
  Vector omega = Vector::Ones(3);
  const PointPredictions hp{h, PointPredictions::Kind::probability};
  const LogisticPseudoData pd = logistic_pseudo_data(hp, omega);
  CHECK(pd.zhat(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pd.zhat(1) == doctest::Approx(std::log(0.9 / 0.1)).epsilon(1e-12));
  CHECK(pd.what(1) == doctest::Approx(0.9 * 0.1).epsilon(1e-12));
  const double hc = 1.0 - 1e-6;
  CHECK(pd.zhat(2) == doctest::Approx(std::log(hc / (1 - hc))).epsilon(1e-12));
  CHECK(std::isfinite(pd.what(2)));
}

TEST_CASE("irls matches an independent gradient-descent optimizer") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 40;
    const Matrix x = random_matrix(n, 3, 500 + seed);
    Rng rng(600 + seed);
    Vector h(n);
    for (int i = 0; i < n; ++i)
      h(i) = 1.0 / (1.0 + std::exp(-(0.3 * x(i, 1) - 0.5 * x(i, 2) + 0.2 * rng.normal())));
    WeightSpec w;
    const Subset s({0, 1, 2});
    const PointPredictions hp{h, PointPredictions::Kind::probability};
    const LinearAction act = optimal_logistic_action(x, hp, w, s);
    CHECK(act.converged);

    // plain gradient descent with backtracking on the same objective
    const Vector omega = w.realize(x);
    Vector delta = Vector::Zero(3);
    double obj = cross_entropy_objective(x, h, omega, s, delta);
    for (int it = 0; it < 20000; ++it) {
      Vector eta = x * delta;
      Vector grad = Vector::Zero(3);
      for (int i = 0; i < n; ++i) {
        const double pi = 1.0 / (1.0 + std::exp(-eta(i)));
        grad += omega(i) * (pi - h(i)) * x.row(i).transpose();
      }
      double step = 1.0;
      for (int half = 0; half < 60; ++half) {
        const Vector cand = delta - step * grad;
        const double cobj = cross_entropy_objective(x, h, omega, s, cand);
        if (cobj < obj) {
          delta = cand;
          obj = cobj;
          break;
        }
        step *= 0.5;
      }
      if (grad.norm() < 1e-10) break;
    }
    CHECK(act.in_sample_criterion <= obj + 1e-6);
    CHECK(std::abs(act.in_sample_criterion - obj) < 1e-6);
  }
}

TEST_CASE("degenerate hhat = 0.5 gives the zero action") {
  const Matrix x = random_matrix(20, 3, 77);
  const Vector h = Vector::Constant(20, 0.5);
  WeightSpec w;
  const PointPredictions hp{h, PointPredictions::Kind::probability};
  const LinearAction act = optimal_logistic_action(x, hp, w, Subset({0, 1, 2}));
  CHECK(act.coefficients.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("predictive action draws and interval estimates") {
  const int n = 30, S = 200;
  const Matrix x = random_matrix(n, 3, 21);
  PredictiveDraws pred;
  pred.ytilde.resize(S, n);
  Rng rng(22);
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < n; ++i) pred.ytilde(s, i) = x(i, 1) + 0.3 * rng.normal();
  WeightSpec w;
  const Subset sub({0, 1});
  const ActionDraws draws =
      predictive_action_draws(x, pred, w, sub, LossKind::squared_error, FunctionalSpec{});
  CHECK(draws.failed_draws.empty());
  CHECK(draws.coef.rows() == S);

  // per-draw solutions equal the per-draw WLS oracle
  const Vector omega = w.realize(x);
  for (int s : {0, 57, 199}) {
    const Vector target = pred.ytilde.row(s).transpose();
    const Vector oracle = wls_solve(x, target, omega, sub);
    CHECK((draws.coef.row(s).transpose() - oracle).cwiseAbs().maxCoeff() < 1e-9);
  }

  const auto iv = interval_estimate(draws, 0.9, 3);
  REQUIRE(iv.size() == 3);
  CHECK(iv[2] == std::pair<double, double>{0.0, 0.0});  // excluded coordinate
  // order-statistic convention: k = floor(0.05 * 200) = 10
  std::vector<double> col(S);
  for (int s = 0; s < S; ++s) col[s] = draws.coef(s, 1);
  std::sort(col.begin(), col.end());
  CHECK(iv[1].first == doctest::Approx(col[9]));
  CHECK(iv[1].second == doctest::Approx(col[190]));
  CHECK(iv[1].first < 1.0);
  CHECK(iv[1].second > 1.0);  // the truth is covered here by construction
}

TEST_CASE("interval conventions: constant draws and the 1000-draw convention") {
  ActionDraws d;
  d.subset = Subset({0});
  d.coef.resize(1000, 1);
  Rng rng(5);
  for (int s = 0; s < 1000; ++s) d.coef(s, 0) = rng.normal();
  const auto iv = interval_estimate(d, 0.9, 1);
  std::vector<double> v(d.coef.col(0).data(), d.coef.col(0).data() + 1000);
  std::sort(v.begin(), v.end());
  CHECK(iv[0].first == doctest::Approx(v[49]));   // 50th order statistic
  CHECK(iv[0].second == doctest::Approx(v[950])); // 951st order statistic

  d.coef.setConstant(3.25);
  const auto cv = interval_estimate(d, 0.9, 1);
  CHECK(cv[0] == std::pair<double, double>{3.25, 3.25});

  ActionDraws tiny;
  tiny.subset = Subset({0});
  tiny.coef.resize(9, 1);
  CHECK_THROWS(interval_estimate(tiny, 0.9, 1));
}

TEST_CASE("input validation") {
  const Matrix x = random_matrix(10, 3, 1);
  WeightSpec w;
  CHECK_THROWS(optimal_linear_action(x, continuous(random_vector(10, 2)), w, Subset(std::vector<int>{})));
  Vector bad = random_vector(10, 3);
  bad(4) = std::nan("");
  CHECK_THROWS(optimal_linear_action(x, continuous(bad), w, Subset({0})));
  CHECK_THROWS(optimal_linear_action(x, continuous(random_vector(10, 2)), w, Subset({5})));
  // probability predictions are rejected by the squared-error action
  PointPredictions hp{Vector::Constant(10, 0.5), PointPredictions::Kind::probability};
  CHECK_THROWS(optimal_linear_action(x, hp, w, Subset({0})));
  CHECK_THROWS(optimal_logistic_action(x, continuous(random_vector(10, 2)), w, Subset({0})));
}
