#include "bsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bsel/kernels.hpp"

namespace bsel {

namespace {

constexpr double kTieTol = 1e-12;

struct ScoredSubset {
  double rss;
  std::vector<int> indices;  // sorted

  bool better_than(const ScoredSubset& o) const {
    if (rss != o.rss) return rss < o.rss;
    return lex_less(indices, o.indices);
  }
};

// Bounded per-size incumbent list, kept sorted best-first.
class IncumbentList {
 public:
  explicit IncumbentList(int cap) : cap_(cap) {}

  // Admission threshold for pruning: a branch whose RSS lower bound exceeds
  // this cannot contribute.
  double threshold() const {
    if (static_cast<int>(items_.size()) < cap_)
      return std::numeric_limits<double>::infinity();
    return items_.back().rss + kTieTol;
  }

  void offer(ScoredSubset cand) {
    auto pos = std::upper_bound(items_.begin(), items_.end(), cand,
                                [](const ScoredSubset& a, const ScoredSubset& b) {
                                  return a.better_than(b);
                                });
    items_.insert(pos, std::move(cand));
    if (static_cast<int>(items_.size()) > cap_) items_.pop_back();
  }

  const std::vector<ScoredSubset>& items() const { return items_; }

 private:
  int cap_;
  std::vector<ScoredSubset> items_;
};

// Incremental Cholesky of the weighted Gram matrix restricted to the current
// path, skipping numerically dependent columns so RSS evaluation matches the
// minimum-norm convention.
class PathState {
 public:
  PathState(const Matrix& gram, const Vector& xty, double yty)
      : gram_(gram), xty_(xty), rss_(yty), p_(static_cast<int>(gram.rows())) {
    chol_.resize(p_ * p_, 0.0);
    t_.resize(p_, 0.0);
    cols_.reserve(p_);
    rss_stack_.reserve(p_ + 1);
    rss_stack_.push_back(rss_);
  }

  double rss() const { return std::max(rss_, 0.0); }

  void push(int j) {
    const int k = static_cast<int>(cols_.size());
    double* row = &chol_[static_cast<std::size_t>(k) * p_];
    double tj = xty_(j);
    double d = gram_(j, j);
    for (int r = 0; r < k; ++r) {
      if (dep_[r]) {
        row[r] = 0.0;
        continue;
      }
      double v = gram_(cols_[r], j);
      const double* rrow = &chol_[static_cast<std::size_t>(r) * p_];
      for (int q = 0; q < r; ++q) v -= rrow[q] * row[q];
      row[r] = v / chol_[static_cast<std::size_t>(r) * p_ + r];
      d -= row[r] * row[r];
      tj -= row[r] * t_[r];
    }
    const double tol = kRankTol * std::max(gram_(j, j), 1.0);
    if (d <= tol) {
      dep_.push_back(true);
      row[k] = 1.0;  // placeholder pivot, never used
      t_[k] = 0.0;
    } else {
      dep_.push_back(false);
      row[k] = std::sqrt(d);
      t_[k] = tj / row[k];
      rss_ -= t_[k] * t_[k];
    }
    cols_.push_back(j);
    rss_stack_.push_back(rss_);
  }

  void pop() {
    cols_.pop_back();
    dep_.pop_back();
    rss_stack_.pop_back();
    rss_ = rss_stack_.back();
  }

  int depth() const { return static_cast<int>(cols_.size()); }
  const std::vector<int>& cols() const { return cols_; }

 private:
  const Matrix& gram_;
  const Vector& xty_;
  double rss_;
  int p_;
  std::vector<double> chol_;  // row-major lower triangle, row per path column
  std::vector<double> t_;
  std::vector<int> cols_;
  std::vector<bool> dep_;
  std::vector<double> rss_stack_;
};

struct Searcher {
  const Matrix& gram;
  const Vector& xty;
  std::vector<IncumbentList> lists;  // index = subset size
  std::vector<int> forced;
  int min_emit_size;

  void offer(const PathState& st) {
    const int k = st.depth();
    if (k < min_emit_size || k == 0) return;
    ScoredSubset cand{st.rss(), st.cols()};
    std::sort(cand.indices.begin(), cand.indices.end());
    lists[k].offer(std::move(cand));
  }

  // Worst admission threshold over sizes [lo, hi].
  double needed(int lo, int hi) const {
    double w = -std::numeric_limits<double>::infinity();
    for (int k = std::max(lo, min_emit_size); k <= hi; ++k)
      w = std::max(w, lists[k].threshold());
    return w;
  }

  void dfs(PathState& st, const std::vector<int>& remaining) {
    offer(st);
    const int nr = static_cast<int>(remaining.size());
    if (nr == 0) return;

    // Suffix bounds: RSS(path + remaining[i..]) for each i, via one reversed
    // extension pass. RSS is monotone under supersets, so this bounds every
    // subset in child i's branch.
    std::vector<double> bound(nr);
    for (int i = nr - 1; i >= 0; --i) {
      st.push(remaining[i]);
      bound[i] = st.rss();
    }
    for (int i = 0; i < nr; ++i) st.pop();

    const int base = st.depth();
    std::vector<int> child_remaining;
    for (int i = 0; i < nr; ++i) {
      const int reach = nr - i;  // sizes base+1 .. base+reach
      if (bound[i] > needed(base + 1, base + reach)) continue;
      child_remaining.assign(remaining.begin() + i + 1, remaining.end());
      st.push(remaining[i]);
      dfs(st, child_remaining);
      st.pop();
    }
  }
};

CandidateFamily finalize(const std::vector<IncumbentList>& lists, int m_k, int p) {
  CandidateFamily fam;
  fam.m_k = m_k;
  fam.screen_map.resize(p);
  std::iota(fam.screen_map.begin(), fam.screen_map.end(), 0);
  for (const auto& list : lists)
    for (const auto& item : list.items())
      fam.entries.push_back({Subset(item.indices), item.rss});
  return fam;
}

void check_search_inputs(const Matrix& X, const Vector& pseudo_y, const Vector& weights,
                         int m_k, const std::vector<int>& forced) {
  if (m_k < 1) throw std::invalid_argument("search: m_k >= 1 required");
  if (pseudo_y.size() != X.rows() || weights.size() != X.rows())
    throw std::invalid_argument("search: dimension mismatch");
  if (!pseudo_y.allFinite()) throw std::invalid_argument("search: non-finite pseudo-data");
  if (!((weights.array() > 0.0).all() && weights.allFinite()))
    throw std::invalid_argument("search: weights must be positive");
  for (int j : forced)
    if (j < 0 || j >= X.cols()) throw std::invalid_argument("search: forced index out of range");
}

}  // namespace

Subset CandidateFamily::original_subset(std::size_t i) const {
  const Subset& s = entries.at(i).subset;
  std::vector<int> idx(s.indices.size()), fc(s.forced.size());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = screen_map.at(s.indices[j]);
  for (std::size_t j = 0; j < fc.size(); ++j) fc[j] = screen_map.at(s.forced[j]);
  std::sort(idx.begin(), idx.end());
  std::sort(fc.begin(), fc.end());
  return Subset(std::move(idx), std::move(fc));
}

std::vector<const CandidateFamily::Entry*> CandidateFamily::of_size(int k) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries)
    if (e.subset.size() == k) out.push_back(&e);
  return out;
}

std::vector<int> screen(const LinearAction& full_action, int s_max,
                        const std::vector<int>& forced, int intercept_index) {
  const int p = full_action.subset.size();
  if (s_max < static_cast<int>(forced.size()))
    throw std::invalid_argument("screen: s_max < forced count");
  std::vector<int> keep = forced;
  if (intercept_index >= 0 &&
      std::find(keep.begin(), keep.end(), intercept_index) == keep.end())
    keep.push_back(intercept_index);

  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(full_action.coefficients(a));
    const double mb = std::abs(full_action.coefficients(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  const int cap = std::max<int>(s_max, static_cast<int>(keep.size()));
  for (int pos : order) {
    if (static_cast<int>(keep.size()) >= cap) break;
    const int j = full_action.subset.indices[pos];
    if (std::find(keep.begin(), keep.end(), j) == keep.end()) keep.push_back(j);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

CandidateFamily bba_search(const Matrix& X, const Vector& pseudo_y, const Vector& weights,
                           int m_k, const std::vector<int>& forced) {
  check_search_inputs(X, pseudo_y, weights, m_k, forced);
  const int p = static_cast<int>(X.cols());

  const Matrix xw = weights.asDiagonal() * X;
  const Matrix gram = X.transpose() * xw;
  const Vector xty = xw.transpose() * pseudo_y;
  const double yty = kernels::active_ops().weighted_sse(
      pseudo_y.data(), Vector::Zero(pseudo_y.size()).eval().data(), weights.data(),
      pseudo_y.size());

  std::vector<int> free_idx;
  for (int j = 0; j < p; ++j)
    if (std::find(forced.begin(), forced.end(), j) == forced.end()) free_idx.push_back(j);
  // strong marginal contributors first: tightens bounds early
  std::stable_sort(free_idx.begin(), free_idx.end(), [&](int a, int b) {
    const double ga = gram(a, a) > 0 ? xty(a) * xty(a) / gram(a, a) : 0.0;
    const double gb = gram(b, b) > 0 ? xty(b) * xty(b) / gram(b, b) : 0.0;
    if (ga != gb) return ga > gb;
    return a < b;
  });

  Searcher sr{gram, xty, {}, forced, std::max<int>(1, static_cast<int>(forced.size()))};
  sr.lists.assign(p + 1, IncumbentList(m_k));
  PathState st(gram, xty, yty);
  for (int j : forced) st.push(j);
  sr.dfs(st, free_idx);

  CandidateFamily fam = finalize(sr.lists, m_k, p);
  for (auto& e : fam.entries) {
    std::vector<int> fc = forced;
    std::sort(fc.begin(), fc.end());
    e.subset.forced = fc;
  }
  return fam;
}

CandidateFamily exhaustive_search(const Matrix& X, const Vector& pseudo_y,
                                  const Vector& weights, int m_k,
                                  const std::vector<int>& forced) {
  check_search_inputs(X, pseudo_y, weights, m_k, forced);
  const int p = static_cast<int>(X.cols());
  if (p > 16) throw std::invalid_argument("exhaustive_search: p <= 16 required");

  unsigned forced_mask = 0;
  for (int j : forced) forced_mask |= 1u << j;

  std::vector<IncumbentList> lists(p + 1, IncumbentList(m_k));
  const auto& ops = kernels::active_ops();
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    if ((mask & forced_mask) != forced_mask) continue;
    std::vector<int> idx;
    for (int j = 0; j < p; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    Subset s(idx);
    const Vector coef = wls_solve(X, pseudo_y, weights, s);
    Vector fitted = Vector::Zero(X.rows());
    for (int j = 0; j < s.size(); ++j) fitted += coef(j) * X.col(s.indices[j]);
    const double rss =
        ops.weighted_sse(pseudo_y.data(), fitted.data(), weights.data(), pseudo_y.size());
    lists[s.size()].offer({rss, idx});
  }
  CandidateFamily fam = finalize(lists, m_k, p);
  for (auto& e : fam.entries) {
    std::vector<int> fc = forced;
    std::sort(fc.begin(), fc.end());
    e.subset.forced = fc;
  }
  return fam;
}

CandidateFamily candidate_family_classification(const Matrix& X,
                                                const PointPredictions& hhat,
                                                const WeightSpec& w, int m_k,
                                                const std::vector<int>& forced) {
  const Vector omega = w.realize(X);
  const LogisticPseudoData pd = logistic_pseudo_data(hhat, omega);
  CandidateFamily fam = bba_search(X, pd.zhat, pd.what, m_k, forced);
  // m_k capping happens on the WLS surrogate above; the attached criterion is
  // the exact cross-entropy, so within-size order can differ from the
  // surrogate order and is re-sorted here.
  for (auto& e : fam.entries) {
    const LinearAction fit = optimal_logistic_action(X, hhat, w, e.subset);
    e.criterion = fit.in_sample_criterion;
  }
  std::stable_sort(fam.entries.begin(), fam.entries.end(),
                   [](const CandidateFamily::Entry& a, const CandidateFamily::Entry& b) {
                     if (a.subset.size() != b.subset.size())
                       return a.subset.size() < b.subset.size();
                     if (a.criterion != b.criterion) return a.criterion < b.criterion;
                     return lex_less(a.subset.indices, b.subset.indices);
                   });
  return fam;
}

}  // namespace bsel
