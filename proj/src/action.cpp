#include "bsel/action.hpp"

#include <algorithm>
#include <cmath>

#include "bsel/kernels.hpp"

namespace bsel {

namespace {

Matrix active_columns(const Matrix& Xtilde, const Subset& s) {
  Matrix xs(Xtilde.rows(), s.size());
  for (int j = 0; j < s.size(); ++j) {
    if (s.indices[j] < 0 || s.indices[j] >= Xtilde.cols())
      throw std::invalid_argument("subset index out of range");
    xs.col(j) = Xtilde.col(s.indices[j]);
  }
  return xs;
}

double clip_prob(double p) { return std::clamp(p, kProbClip, 1.0 - kProbClip); }

}  // namespace

Vector LinearAction::dense(int p) const {
  Vector b = Vector::Zero(p);
  for (int j = 0; j < subset.size(); ++j) b(subset.indices[j]) = coefficients(j);
  return b;
}

Vector LinearAction::predict(const Matrix& Xtilde) const {
  Vector out = Vector::Zero(Xtilde.rows());
  for (int j = 0; j < subset.size(); ++j)
    out += coefficients(j) * Xtilde.col(subset.indices[j]);
  return out;
}

Vector wls_solve(const Matrix& Xtilde, const Vector& targets, const Vector& omega,
                 const Subset& s) {
  if (s.size() == 0) throw std::invalid_argument("wls_solve: empty subset");
  if (!targets.allFinite()) throw std::invalid_argument("wls_solve: non-finite targets");
  const Vector sw = omega.array().sqrt();
  Matrix a = active_columns(Xtilde, s);
  a.array().colwise() *= sw.array();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTol);
  cod.compute(a);
  return cod.solve((targets.array() * sw.array()).matrix());
}

LinearAction optimal_linear_action(const Matrix& Xtilde, const PointPredictions& yhat,
                                   const WeightSpec& w, const Subset& s) {
  if (yhat.kind != PointPredictions::Kind::continuous)
    throw std::invalid_argument("optimal_linear_action: continuous predictions required");
  const Vector omega = w.realize(Xtilde);
  LinearAction act;
  act.subset = s;
  act.loss_kind = LossKind::squared_error;
  act.coefficients = wls_solve(Xtilde, yhat.yhat, omega, s);
  const Vector fitted = act.predict(Xtilde);
  act.in_sample_criterion = kernels::active_ops().weighted_sse(
      yhat.yhat.data(), fitted.data(), omega.data(), yhat.yhat.size());
  return act;
}

LogisticPseudoData logistic_pseudo_data(const PointPredictions& hhat, const Vector& omega) {
  if (hhat.kind != PointPredictions::Kind::probability)
    throw std::invalid_argument("logistic_pseudo_data: probability predictions required");
  const Eigen::Index n = hhat.yhat.size();
  LogisticPseudoData out;
  out.zhat.resize(n);
  out.what.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = clip_prob(hhat.yhat(i));
    out.zhat(i) = std::log(h / (1.0 - h));
    out.what(i) = omega(i) * h * (1.0 - h);
  }
  return out;
}

double cross_entropy_objective(const Matrix& Xtilde, const Vector& hhat,
                               const Vector& omega, const Subset& s,
                               const Vector& delta) {
  Vector eta = Vector::Zero(Xtilde.rows());
  for (int j = 0; j < s.size(); ++j) eta += delta(j) * Xtilde.col(s.indices[j]);
  Vector pi = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
  return kernels::weighted_cross_entropy(hhat.data(), pi.data(), omega.data(),
                                         hhat.size(), kProbClip);
}

LinearAction irls_fit(const Matrix& Xtilde, const Vector& targets, const Vector& omega,
                      const Subset& s, double ridge_jitter) {
  if (s.size() == 0) throw std::invalid_argument("irls_fit: empty subset");
  const Eigen::Index n = Xtilde.rows();
  const int k = s.size();
  const Matrix xs = active_columns(Xtilde, s);

  LinearAction act;
  act.subset = s;
  act.loss_kind = LossKind::cross_entropy;
  Vector delta = Vector::Zero(k);
  double obj = cross_entropy_objective(Xtilde, targets, omega, s, delta);

  constexpr int kMaxIter = 100;
  constexpr double kRelTol = 1e-10;
  bool converged = false;
  Vector eta(n), pi(n), wts(n), z(n);
  for (int it = 0; it < kMaxIter; ++it) {
    eta = xs * delta;
    for (Eigen::Index i = 0; i < n; ++i) {
      pi(i) = clip_prob(1.0 / (1.0 + std::exp(-eta(i))));
      const double v = pi(i) * (1.0 - pi(i));
      wts(i) = omega(i) * v;
      z(i) = eta(i) + (targets(i) - pi(i)) / v;
    }
    Matrix g = xs.transpose() * wts.asDiagonal() * xs;
    g.diagonal().array() += ridge_jitter;
    Vector rhs = xs.transpose() * (wts.array() * z.array()).matrix();
    Vector proposal = g.ldlt().solve(rhs);

    // backtrack toward the current iterate if the exact objective worsens
    double step = 1.0;
    Vector cand;
    double cand_obj = obj;
    for (int half = 0; half < 30; ++half) {
      cand = delta + step * (proposal - delta);
      cand_obj = cross_entropy_objective(Xtilde, targets, omega, s, cand);
      if (cand_obj <= obj || !std::isfinite(obj)) break;
      step *= 0.5;
    }
    if (!std::isfinite(cand_obj) || cand_obj > obj) {
      converged = true;  // no descent direction left
      break;
    }
    const double rel = std::abs(obj - cand_obj) / std::max(1.0, std::abs(obj));
    delta = cand;
    obj = cand_obj;
    if (rel < kRelTol) {
      converged = true;
      break;
    }
  }
  act.coefficients = delta;
  act.in_sample_criterion = obj;
  act.converged = converged;
  return act;
}

LinearAction optimal_logistic_action(const Matrix& Xtilde, const PointPredictions& hhat,
                                     const WeightSpec& w, const Subset& s) {
  if (hhat.kind != PointPredictions::Kind::probability)
    throw std::invalid_argument("optimal_logistic_action: probability predictions required");
  const Vector omega = w.realize(Xtilde);
  return irls_fit(Xtilde, hhat.yhat, omega, s, 1e-8);
}

ActionDraws predictive_action_draws(const Matrix& Xtilde, const PredictiveDraws& pred,
                                    const WeightSpec& w, const Subset& s, LossKind loss,
                                    const FunctionalSpec& h) {
  if (s.size() == 0) throw std::invalid_argument("predictive_action_draws: empty subset");
  const Vector omega = w.realize(Xtilde);
  const Eigen::Index S = pred.S();
  ActionDraws out;
  out.subset = s;
  out.coef.resize(S, s.size());

  if (loss == LossKind::squared_error) {
    const Vector sw = omega.array().sqrt();
    Matrix a = active_columns(Xtilde, s);
    a.array().colwise() *= sw.array();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(kRankTol);
    cod.compute(a);
    Matrix rhs = pred.ytilde.transpose();  // nt x S
    rhs.array().colwise() *= sw.array();
    out.coef = cod.solve(rhs).transpose();
    for (Eigen::Index sdx = 0; sdx < S; ++sdx)
      if (!out.coef.row(sdx).allFinite()) {
        out.coef.row(sdx).setZero();
        out.failed_draws.push_back(static_cast<int>(sdx));
      }
  } else {
    Vector targets(pred.n_tilde());
    for (Eigen::Index sdx = 0; sdx < S; ++sdx) {
      for (Eigen::Index i = 0; i < pred.n_tilde(); ++i)
        targets(i) = h.apply(pred.ytilde(sdx, i));
      LinearAction fit = irls_fit(Xtilde, targets, omega, s, 1e-6);
      if (fit.coefficients.allFinite()) {
        out.coef.row(sdx) = fit.coefficients.transpose();
      } else {
        out.coef.row(sdx).setZero();
        out.failed_draws.push_back(static_cast<int>(sdx));
      }
    }
  }
  return out;
}

std::vector<std::pair<double, double>> interval_estimate(const ActionDraws& draws,
                                                         double level, int p) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("interval_estimate: level in (0,1) required");
  std::vector<char> failed(draws.S(), 0);
  for (int f : draws.failed_draws) failed[f] = 1;
  const Eigen::Index m =
      draws.S() - static_cast<Eigen::Index>(draws.failed_draws.size());
  if (m < 10) throw std::invalid_argument("interval_estimate: need >= 10 successful draws");

  std::vector<std::pair<double, double>> out(p, {0.0, 0.0});
  const double q = (1.0 - level) / 2.0;
  // nudge before flooring so that e.g. (1 - 0.9) / 2 * 200 lands on 10 exactly
  const Eigen::Index k = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(q * static_cast<double>(m) + 1e-9)));
  std::vector<double> vals;
  vals.reserve(m);
  for (int j = 0; j < draws.subset.size(); ++j) {
    vals.clear();
    for (Eigen::Index sdx = 0; sdx < draws.S(); ++sdx)
      if (!failed[sdx]) vals.push_back(draws.coef(sdx, j));
    std::sort(vals.begin(), vals.end());
    out[draws.subset.indices[j]] = {vals[k - 1], vals[m - k]};
  }
  return out;
}

}  // namespace bsel
