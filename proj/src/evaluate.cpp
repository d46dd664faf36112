#include "bsel/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bsel/action.hpp"
#include "bsel/io.hpp"
#include "bsel/kernels.hpp"
#include "bsel/rng.hpp"

namespace bsel {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kDenomTol = 1e-12;

double clip_prob(double p) { return std::clamp(p, kProbClip, 1.0 - kProbClip); }

double ce_term(double t, double pi) {
  const double p = clip_prob(pi);
  return -(t * std::log(p) + (1.0 - t) * std::log1p(-p));
}

// Fenwick tree over nonnegative weights for O(log n) weighted sampling
// without replacement.
class WeightTree {
 public:
  explicit WeightTree(const std::vector<double>& w)
      : n_(w.size()), tree_(w.size() + 1, 0.0), leaf_(w) {
    for (std::size_t i = 0; i < n_; ++i) add(i, w[i]);
  }

  double total() const { return prefix(n_); }

  std::size_t sample_and_remove(double u /* in [0, total) */) {
    std::size_t idx = 0;
    std::size_t bit = 1;
    while (bit << 1 <= n_) bit <<= 1;
    double rem = u;
    for (; bit; bit >>= 1) {
      const std::size_t next = idx + bit;
      if (next <= n_ && tree_[next] < rem) {
        rem -= tree_[next];
        idx = next;
      }
    }
    // idx is the count of leaves strictly before the selected one
    add(idx, -leaf_[idx]);
    leaf_[idx] = 0.0;
    return idx;
  }

 private:
  void add(std::size_t i, double delta) {
    for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += delta;
  }
  double prefix(std::size_t count) const {
    double s = 0.0;
    for (std::size_t j = count; j > 0; j -= j & (~j + 1)) s += tree_[j];
    return s;
  }

  std::size_t n_;
  std::vector<double> tree_;
  std::vector<double> leaf_;
};

std::uint64_t fold_seed(std::uint64_t base, int k, std::uint64_t salt) {
  std::uint64_t x = base ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1)) ^ salt;
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

struct RankedMember {
  int row;
  int size;
  double tiebreak;
  const std::vector<int>* indices;
};

AcceptableFamily build_family(const SubsetLosses& losses, double eta, double epsilon,
                              int reference, bool empirical_tiebreak) {
  if (!(eta >= 0.0)) throw std::invalid_argument("acceptable_family: eta >= 0 required");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("acceptable_family: epsilon in [0,1] required");
  AcceptableFamily fam;
  fam.eta = eta;
  fam.epsilon = epsilon;
  fam.reference_row = reference;
  fam.prob.assign(losses.rows.size(), std::numeric_limits<double>::quiet_NaN());

  for (int r = 0; r < static_cast<int>(losses.rows.size()); ++r) {
    if (!losses.rows[r].evaluable) continue;
    int excluded = 0;
    const Vector d = d_tilde_draws(losses, reference, r, &excluded);
    const Eigen::Index m = d.size();
    if (m == 0) continue;
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      // not exceeding the reference (within tolerance) always satisfies
      if (d(i) < eta || d(i) <= kTieTol) ++hits;
    fam.prob[r] = static_cast<double>(hits) / static_cast<double>(m);
    if (fam.prob[r] >= epsilon) fam.member_rows.push_back(r);
  }

  std::vector<RankedMember> ranked;
  for (int r : fam.member_rows) {
    const auto& row = losses.rows[r];
    const double tb = empirical_tiebreak ? row.empirical
                                         : row.predictive.mean();
    ranked.push_back({r, row.subset.size(), tb, &row.subset.indices});
  }
  auto better = [](const RankedMember& a, const RankedMember& b) {
    if (a.size != b.size) return a.size < b.size;
    if (a.tiebreak != b.tiebreak) return a.tiebreak < b.tiebreak;
    return lex_less(*a.indices, *b.indices);
  };
  if (!ranked.empty())
    fam.s_small_row = std::min_element(ranked.begin(), ranked.end(), better)->row;
  return fam;
}

}  // namespace

std::vector<int> FoldSpec::validation_rows(int k) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i)
    if (assignment[i] == k) out.push_back(i);
  return out;
}

std::vector<int> FoldSpec::training_rows(int k) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i)
    if (assignment[i] != k) out.push_back(i);
  return out;
}

FoldSpec make_folds(int n, int K, std::uint64_t seed) {
  if (K < 2 || K > n) throw std::invalid_argument("make_folds: 2 <= K <= n required");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  FoldSpec f;
  f.K = K;
  f.seed = seed;
  f.assignment.resize(n);
  for (int i = 0; i < n; ++i) f.assignment[perm[i]] = i % K;
  return f;
}

SirResult sir_resample(const PosteriorDraws& draws, const Dataset& data,
                       const FoldSpec& folds, int fold_k, int S_tilde,
                       std::uint64_t seed, LikelihoodKind lik) {
  const Eigen::Index S = draws.S();
  if (S_tilde < 1 || S_tilde > S)
    throw std::invalid_argument("sir_resample: 1 <= S_tilde <= S required");
  if (lik == LikelihoodKind::gaussian && draws.sigma.size() == 0)
    throw std::invalid_argument("sir_resample: gaussian likelihood requires sigma draws");
  const auto valid = folds.validation_rows(fold_k);

  // log w_k^s = - held-out-fold log-likelihood, up to a constant
  std::vector<double> logw(S, 0.0);
  for (int i : valid) {
    const Vector eta = draws.beta * data.X.row(i).transpose();
    for (Eigen::Index s = 0; s < S; ++s) {
      double ll;
      if (lik == LikelihoodKind::gaussian) {
        const double sig = draws.sigma(s);
        const double r = data.y(i) - eta(s);
        ll = -0.5 * std::log(2.0 * M_PI * sig * sig) - r * r / (2.0 * sig * sig);
      } else {
        // y log(pi) + (1-y) log(1-pi), stable in eta
        const double e = eta(s);
        ll = data.y(i) * e - (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e)));
      }
      logw[s] -= ll;
    }
  }
  const double mx = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(S);
  double sw = 0.0, sw2 = 0.0;
  for (Eigen::Index s = 0; s < S; ++s) {
    w[s] = std::exp(logw[s] - mx);
    sw += w[s];
    sw2 += w[s] * w[s];
  }

  SirResult out;
  out.ess = sw * sw / sw2;
  out.low_ess = out.ess < 10.0;

  WeightTree tree(w);
  Rng rng(seed);
  out.indices.reserve(S_tilde);
  for (int t = 0; t < S_tilde; ++t) {
    const double total = tree.total();
    out.indices.push_back(static_cast<int>(tree.sample_and_remove(rng.uniform() * total)));
  }
  return out;
}

SubsetLosses out_of_sample_losses(const Dataset& data, const PosteriorDraws& draws,
                                  const FoldSpec& folds, const CandidateFamily& family,
                                  const EvalConfig& cfg) {
  if (family.entries.empty())
    throw std::invalid_argument("out_of_sample_losses: empty candidate family");
  data.validate();
  const Eigen::Index n = data.n();
  const Eigen::Index S = draws.S();
  const int S_tilde = cfg.S_tilde > 0 ? cfg.S_tilde : static_cast<int>(S / 2);
  const int K = folds.K;

  SubsetLosses out;
  out.loss_kind = cfg.loss;
  out.S_tilde = S_tilde;

  // smallest training-set size across folds
  int min_train = static_cast<int>(n);
  for (int k = 0; k < K; ++k)
    min_train = std::min<int>(min_train, static_cast<int>(folds.training_rows(k).size()));

  for (std::size_t i = 0; i < family.entries.size(); ++i) {
    SubsetLosses::Row row;
    row.subset = family.original_subset(i);
    row.predictive = Vector::Zero(S_tilde);
    row.fold_empirical.assign(K, 0.0);
    if (row.subset.size() > min_train) {
      row.evaluable = false;
      out.notes.push_back("subset " + row.subset.label() +
                          " unevaluable: larger than smallest training fold");
    }
    out.rows.push_back(std::move(row));
  }

  const Vector omega_full = cfg.w.realize(data.X);

  for (int k = 0; k < K; ++k) {
    const SirResult sir = sir_resample(draws, data, folds, k, S_tilde,
                                       fold_seed(cfg.seed, k, 0x51e), cfg.likelihood);
    out.fold_ess.push_back(sir.ess);
    if (sir.low_ess)
      out.notes.push_back("fold " + std::to_string(k) + ": low SIR effective sample size " +
                          io::fmt(sir.ess));

    // training-posterior predictive draws at every observation
    Matrix beta_rs(S_tilde, draws.beta.cols());
    for (int t = 0; t < S_tilde; ++t) beta_rs.row(t) = draws.beta.row(sir.indices[t]);
    Matrix yt = beta_rs * data.X.transpose();  // S_tilde x n
    Rng noise(fold_seed(cfg.seed, k, 0xa11ce));
    if (cfg.likelihood == LikelihoodKind::gaussian) {
      for (int t = 0; t < S_tilde; ++t) {
        const double sig = draws.sigma(sir.indices[t]);
        for (Eigen::Index i = 0; i < n; ++i) yt(t, i) += sig * noise.normal();
      }
    } else {
      for (int t = 0; t < S_tilde; ++t)
        for (Eigen::Index i = 0; i < n; ++i) {
          const double pi = 1.0 / (1.0 + std::exp(-yt(t, i)));
          yt(t, i) = noise.uniform() < pi ? 1.0 : 0.0;
        }
    }
    if (cfg.loss == LossKind::cross_entropy)
      for (int t = 0; t < S_tilde; ++t)
        for (Eigen::Index i = 0; i < n; ++i) yt(t, i) = cfg.h.apply(yt(t, i));

    const auto train = folds.training_rows(k);
    const auto valid = folds.validation_rows(k);
    const int nt = static_cast<int>(train.size());
    const int nv = static_cast<int>(valid.size());

    Matrix xtrain(nt, data.p());
    Vector omega_train(nt), target_train(nt);
    for (int r = 0; r < nt; ++r) {
      xtrain.row(r) = data.X.row(train[r]);
      omega_train(r) = omega_full(train[r]);
      target_train(r) = yt.col(train[r]).mean();
    }

    for (auto& row : out.rows) {
      if (!row.evaluable) continue;
      Vector coef;
      if (cfg.loss == LossKind::squared_error) {
        coef = wls_solve(xtrain, target_train, omega_train, row.subset);
      } else {
        coef = irls_fit(xtrain, target_train, omega_train, row.subset, 1e-8).coefficients;
      }
      double emp = 0.0;
      for (int v = 0; v < nv; ++v) {
        const int i = valid[v];
        double mu = 0.0;
        for (int j = 0; j < row.subset.size(); ++j)
          mu += coef(j) * data.X(i, row.subset.indices[j]);
        if (cfg.loss == LossKind::squared_error) {
          const double r = data.y(i) - mu;
          emp += r * r;
          row.predictive += ((yt.col(i).array() - mu).square() / nv).matrix();
        } else {
          const double pi = 1.0 / (1.0 + std::exp(-mu));
          emp += ce_term(cfg.h.apply(data.y(i)), pi);
          const double lp = -std::log(clip_prob(pi));
          const double lq = -std::log1p(-clip_prob(pi));
          row.predictive += ((yt.col(i).array() * lp + (1.0 - yt.col(i).array()) * lq) / nv)
                                .matrix();
        }
      }
      row.fold_empirical[k] = emp / nv;
      row.empirical += emp / nv / K;
    }
  }
  for (auto& row : out.rows) row.predictive /= static_cast<double>(K);
  return out;
}

int best_subset_row(const SubsetLosses& losses) {
  if (!losses.has_empirical)
    throw std::runtime_error("best_subset_row: empirical losses unavailable");
  int best = -1;
  for (int r = 0; r < static_cast<int>(losses.rows.size()); ++r) {
    if (!losses.rows[r].evaluable) continue;
    if (best < 0) {
      best = r;
      continue;
    }
    const auto& a = losses.rows[r];
    const auto& b = losses.rows[best];
    if (a.empirical != b.empirical ? a.empirical < b.empirical
        : a.subset.size() != b.subset.size()
            ? a.subset.size() < b.subset.size()
            : lex_less(a.subset.indices, b.subset.indices))
      best = r;
  }
  if (best < 0) throw std::runtime_error("best_subset_row: no evaluable subsets");
  return best;
}

Vector d_tilde_draws(const SubsetLosses& losses, int ref_row, int row, int* n_excluded) {
  const Vector& ref = losses.rows.at(ref_row).predictive;
  const Vector& cur = losses.rows.at(row).predictive;
  if (ref.size() != cur.size())
    throw std::invalid_argument("d_tilde_draws: draw count mismatch");
  std::vector<double> vals;
  vals.reserve(ref.size());
  int excluded = 0;
  for (Eigen::Index i = 0; i < ref.size(); ++i) {
    if (std::abs(ref(i)) <= kDenomTol) {
      ++excluded;
      continue;
    }
    vals.push_back(100.0 * (cur(i) - ref(i)) / ref(i));
  }
  if (n_excluded) *n_excluded = excluded;
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

AcceptableFamily acceptable_family(const SubsetLosses& losses, double eta, double epsilon) {
  const int smin = best_subset_row(losses);
  AcceptableFamily fam = build_family(losses, eta, epsilon, smin, /*empirical=*/true);
  fam.s_min_row = smin;
  return fam;
}

SubsetLosses newx_predictive_losses(const Matrix& Xtilde, const PredictiveDraws& pred,
                                    const PointPredictions& point,
                                    const CandidateFamily& family, LossKind loss,
                                    const FunctionalSpec& h, const WeightSpec& w) {
  const Eigen::Index nt = Xtilde.rows();
  const Eigen::Index S = pred.S();
  if (pred.n_tilde() != nt)
    throw std::invalid_argument("newx_predictive_losses: draw/design size mismatch");

  SubsetLosses out;
  out.loss_kind = loss;
  out.S_tilde = static_cast<int>(S);
  out.has_empirical = false;

  std::vector<Subset> subsets;
  for (std::size_t i = 0; i < family.entries.size(); ++i)
    subsets.push_back(family.original_subset(i));
  subsets.push_back(Subset::full(static_cast<int>(Xtilde.cols())));  // reference

  Matrix ht = pred.ytilde;
  if (loss == LossKind::cross_entropy)
    for (Eigen::Index s = 0; s < S; ++s)
      for (Eigen::Index i = 0; i < nt; ++i) ht(s, i) = h.apply(ht(s, i));

  for (const auto& s : subsets) {
    SubsetLosses::Row row;
    row.subset = s;
    row.empirical = std::numeric_limits<double>::quiet_NaN();
    row.predictive = Vector::Zero(S);
    Vector coef;
    if (loss == LossKind::squared_error) {
      coef = optimal_linear_action(Xtilde, point, w, s).coefficients;
    } else {
      coef = optimal_logistic_action(Xtilde, point, w, s).coefficients;
    }
    for (Eigen::Index i = 0; i < nt; ++i) {
      double mu = 0.0;
      for (int j = 0; j < s.size(); ++j) mu += coef(j) * Xtilde(i, s.indices[j]);
      if (loss == LossKind::squared_error) {
        row.predictive += ((ht.col(i).array() - mu).square() / nt).matrix();
      } else {
        const double pi = clip_prob(1.0 / (1.0 + std::exp(-mu)));
        const double lp = -std::log(pi), lq = -std::log1p(-pi);
        row.predictive +=
            ((ht.col(i).array() * lp + (1.0 - ht.col(i).array()) * lq) / nt).matrix();
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

AcceptableFamily acceptable_family_newx(const SubsetLosses& losses, double eta,
                                        double epsilon) {
  if (losses.has_empirical)
    throw std::invalid_argument("acceptable_family_newx: expects fold-free losses");
  const int reference = static_cast<int>(losses.rows.size()) - 1;
  return build_family(losses, eta, epsilon, reference, /*empirical=*/false);
}

}  // namespace bsel
