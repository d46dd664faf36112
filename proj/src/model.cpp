#include "bsel/model.hpp"

#include <cmath>

#include "bsel/io.hpp"
#include "bsel/kernels.hpp"
#include "bsel/rng.hpp"

namespace bsel {

void ModelConfig::validate() const {
  if (!(prior_scale > 0.0)) throw std::invalid_argument("ModelConfig: g must be > 0");
  if (!(ig_shape > 0.0)) throw std::invalid_argument("ModelConfig: a0 must be > 0");
  if (!(ig_rate > 0.0)) throw std::invalid_argument("ModelConfig: b0 must be > 0");
}

Vector FittedModel::to_original(const Vector& beta_w) const {
  if (!standardized) return beta_w;
  Vector b(beta_w.size());
  for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = beta_w(j) / col_scale(j);
  if (intercept_col >= 0) {
    double adj = y_center;
    for (Eigen::Index j = 0; j < b.size(); ++j)
      if (j != intercept_col) adj -= b(j) * col_center(j);
    b(intercept_col) = beta_w(intercept_col) + adj;
  }
  return b;
}

FittedModel fit_conjugate_gaussian(const Dataset& data, const ModelConfig& cfg) {
  data.validate();
  cfg.validate();
  if (data.response_kind != ResponseKind::continuous)
    throw std::invalid_argument("fit_conjugate_gaussian: continuous response required");
  const Eigen::Index n = data.n(), p = data.p();
  for (Eigen::Index j = 0; j < p; ++j)
    if ((data.X.col(j).array() == 0.0).all())
      throw std::invalid_argument("fit_conjugate_gaussian: all-zero column " +
                                  std::to_string(j));

  FittedModel m;
  m.intercept_col = data.intercept_column();
  m.col_center = Vector::Zero(p);
  m.col_scale = Vector::Ones(p);
  m.standardized = cfg.standardize && m.intercept_col >= 0 && n >= 2;

  Matrix Xw = data.X;
  Vector yw = data.y;
  if (m.standardized) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j == m.intercept_col) continue;
      const double mean = Xw.col(j).mean();
      const double sd =
          std::sqrt((Xw.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
      if (sd <= 1e-12) continue;  // constant column, leave as is
      m.col_center(j) = mean;
      m.col_scale(j) = 2.0 * sd;  // scaled to sd 0.5
      Xw.col(j) = (Xw.col(j).array() - mean) / m.col_scale(j);
    }
    m.y_center = yw.mean();
    yw.array() -= m.y_center;
  }

  Vector vinv(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double v = (cfg.intercept_unpenalized && j == m.intercept_col)
                         ? 1e6 * cfg.prior_scale
                         : cfg.prior_scale;
    vinv(j) = 1.0 / v;
  }

  Matrix q = Xw.transpose() * Xw;
  q.diagonal() += vinv;

  Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();
  if (!(emin > 0.0) || emax / emin > 1e12)
    throw std::runtime_error("fit_conjugate_gaussian: singular model (condition number > 1e12)");

  Eigen::LLT<Matrix> llt(q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fit_conjugate_gaussian: Cholesky factorization failed");
  m.chol_q = llt.matrixL();
  const Vector xty = Xw.transpose() * yw;
  m.mean_w = llt.solve(xty);
  m.a_n = cfg.ig_shape + 0.5 * static_cast<double>(n);
  m.b_n = cfg.ig_rate + 0.5 * (yw.squaredNorm() - m.mean_w.dot(xty));
  if (m.b_n <= 0.0) m.b_n = cfg.ig_rate;  // exact interpolation corner
  return m;
}

PosteriorDraws sample_posterior(const FittedModel& model, int S, std::uint64_t seed) {
  if (S < 2) throw std::invalid_argument("sample_posterior: S >= 2 required");
  const Eigen::Index p = model.p();
  PosteriorDraws out;
  out.beta.resize(S, p);
  out.sigma.resize(S);
  out.seed = seed;
  Rng rng(seed);
  Vector z(p);
  const auto lt = model.chol_q.transpose().triangularView<Eigen::Upper>();
  for (int s = 0; s < S; ++s) {
    const double sigma2 = model.b_n / rng.gamma(model.a_n);
    const double sigma = std::sqrt(sigma2);
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    Vector u = lt.solve(z);  // cov(u) = Q^{-1}
    out.beta.row(s) = model.to_original(model.mean_w + sigma * u).transpose();
    out.sigma(s) = sigma;
  }
  out.validate();
  return out;
}

PredictiveDraws sample_predictive(const PosteriorDraws& draws, const Matrix& Xtilde,
                                  std::uint64_t seed) {
  if (Xtilde.cols() != draws.beta.cols())
    throw std::invalid_argument("sample_predictive: column count mismatch");
  if (draws.sigma.size() != draws.S())
    throw std::invalid_argument("sample_predictive: sigma draws required");
  const Eigen::Index S = draws.S(), nt = Xtilde.rows();
  PredictiveDraws out;
  out.ytilde = draws.beta * Xtilde.transpose();  // S x nt
  Rng rng(seed);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index i = 0; i < nt; ++i)
      out.ytilde(s, i) += draws.sigma(s) * rng.normal();
  out.validate();
  return out;
}

PredictiveDraws sample_predictive_bernoulli(const PosteriorDraws& draws,
                                            const Matrix& Xtilde, std::uint64_t seed) {
  if (Xtilde.cols() != draws.beta.cols())
    throw std::invalid_argument("sample_predictive: column count mismatch");
  const Eigen::Index S = draws.S(), nt = Xtilde.rows();
  PredictiveDraws out;
  Matrix eta = draws.beta * Xtilde.transpose();
  out.ytilde.resize(S, nt);
  Rng rng(seed);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double pi = 1.0 / (1.0 + std::exp(-eta(s, i)));
      out.ytilde(s, i) = rng.uniform() < pi ? 1.0 : 0.0;
    }
  return out;
}

PosteriorDraws ingest_posterior(const std::string& beta_path,
                                const std::string& sigma_path) {
  PosteriorDraws out;
  out.beta = io::read_matrix(beta_path).values;
  if (!sigma_path.empty()) {
    Matrix s = io::read_matrix(sigma_path).values;
    if (s.cols() != 1)
      throw std::runtime_error("ingest_posterior: sigma file must have one column");
    if (s.rows() != out.beta.rows())
      throw std::runtime_error("ingest_posterior: sigma row count != beta row count");
    out.sigma = s.col(0);
  }
  out.validate();
  return out;
}

PredictiveDraws ingest_predictive(const std::string& ytilde_path) {
  PredictiveDraws out;
  out.ytilde = io::read_matrix(ytilde_path).values;
  out.validate();
  return out;
}

PointPredictions point_predictions(const PredictiveDraws& pred, const FunctionalSpec& h) {
  const Eigen::Index S = pred.S(), nt = pred.n_tilde();
  PointPredictions out;
  out.yhat.resize(nt);
  const auto& ops = kernels::active_ops();
  if (h.kind == FunctionalSpec::Kind::identity) {
    // Identity applied to {0,1} draws yields a probability.
    const bool binary_draws =
        (pred.ytilde.array() == 0.0 || pred.ytilde.array() == 1.0).all();
    out.kind = binary_draws ? PointPredictions::Kind::probability
                            : PointPredictions::Kind::continuous;
    for (Eigen::Index i = 0; i < nt; ++i)
      out.yhat(i) = ops.sum(pred.ytilde.col(i).data(), S) / static_cast<double>(S);
  } else {
    out.kind = PointPredictions::Kind::probability;
    for (Eigen::Index i = 0; i < nt; ++i)
      out.yhat(i) = static_cast<double>(ops.count_ge(pred.ytilde.col(i).data(), S, h.tau)) /
                    static_cast<double>(S);
  }
  return out;
}

}  // namespace bsel
