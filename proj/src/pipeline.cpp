#include "bsel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bsel/io.hpp"

namespace bsel {

namespace {

using ordered_json = nlohmann::ordered_json;

double clip_prob(double p) { return std::clamp(p, kProbClip, 1.0 - kProbClip); }

[[noreturn]] void stage_error(const std::string& stage, const std::string& what) {
  throw std::runtime_error("[" + stage + "] " + what);
}

Vector column_sds(const Matrix& X) {
  Vector sd(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double m = X.col(j).mean();
    sd(j) = std::sqrt((X.col(j).array() - m).square().sum() /
                      std::max<double>(1.0, static_cast<double>(X.rows() - 1)));
  }
  return sd;
}

// Full-subset action on sd-scaled columns; only the coefficient magnitudes
// matter, for the screening order.
LinearAction screening_action(const Matrix& X, const PointPredictions& point,
                              const WeightSpec& w, int intercept) {
  Matrix xs = X;
  const Vector sd = column_sds(X);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (j != intercept && sd(j) > 0) xs.col(j) /= sd(j);
  const Vector omega = w.realize(X);
  const Subset full = Subset::full(static_cast<int>(X.cols()));
  LinearAction act;
  act.subset = full;
  if (point.kind == PointPredictions::Kind::probability) {
    const LogisticPseudoData pd = logistic_pseudo_data(point, omega);
    act.coefficients = wls_solve(xs, pd.zhat, pd.what, full);
  } else {
    act.coefficients = wls_solve(xs, point.yhat, omega, full);
  }
  return act;
}

Subset map_forced(const std::vector<int>& forced, const std::vector<int>& screened) {
  // translate original indices into screened positions
  std::vector<int> out;
  for (int f : forced) {
    const auto it = std::find(screened.begin(), screened.end(), f);
    if (it == screened.end())
      stage_error("search", "forced index " + std::to_string(f) + " not in screened set");
    out.push_back(static_cast<int>(it - screened.begin()));
  }
  std::sort(out.begin(), out.end());
  return Subset(out);
}

IntervalSummary interval_summary(const Dataset& data, const PredictiveDraws& pred,
                                 const PointPredictions& point, const WeightSpec& w,
                                 const Subset& s, LossKind loss, const FunctionalSpec& h,
                                 double level) {
  IntervalSummary out;
  out.subset = s;
  LinearAction act = loss == LossKind::squared_error
                         ? optimal_linear_action(data.X, point, w, s)
                         : optimal_logistic_action(data.X, point, w, s);
  out.point = act.dense(static_cast<int>(data.p()));
  ActionDraws draws = predictive_action_draws(data.X, pred, w, s, loss, h);
  out.intervals = interval_estimate(draws, level, static_cast<int>(data.p()));
  out.failed_draws = static_cast<int>(draws.failed_draws.size());
  return out;
}

double quantile_interp(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void confusion(const Subset& sel, const std::vector<int>& active, int p, double* tpr,
               double* tnr) {
  int tp = 0, tn = 0;
  std::vector<char> act(p, 0);
  for (int a : active) act[a] = 1;
  for (int j = 0; j < p; ++j) {
    const bool in = sel.contains(j);
    if (act[j] && in) ++tp;
    if (!act[j] && !in) ++tn;
  }
  const int na = static_cast<int>(active.size());
  *tpr = na ? static_cast<double>(tp) / na : 1.0;
  *tnr = (p - na) ? static_cast<double>(tn) / (p - na) : 1.0;
}

std::string subset_tsv(const Subset& s) {
  std::string out;
  for (std::size_t i = 0; i < s.indices.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.indices[i]);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (synthetic) {
    if (n < 10 || p < 6) stage_error("config", "synthetic runs need n >= 10, p >= 6");
    if (!(snr > 0)) stage_error("config", "snr must be positive");
  } else if (data_path.empty()) {
    stage_error("config", "either synthetic=true or a data path is required");
  }
  if (backend == Backend::ingested && beta_path.empty())
    stage_error("config", "ingested backend needs a beta draw matrix");
  if (backend == Backend::conjugate && S < 2) stage_error("config", "S >= 2 required");
  if (s_max < 1) stage_error("config", "s_max >= 1 required");
  if (m_k < 1) stage_error("config", "m_k >= 1 required");
  if (K < 2) stage_error("config", "K >= 2 required");
  if (!(eta >= 0)) stage_error("config", "eta >= 0 required");
  if (!(epsilon >= 0 && epsilon <= 1)) stage_error("config", "epsilon in [0,1] required");
  if (!(interval_level > 0 && interval_level < 1))
    stage_error("config", "interval_level in (0,1) required");
  model.validate();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) stage_error("config", "cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    stage_error("config", std::string("parse failure: ") + e.what());
  }

  RunConfig cfg;
  if (j.contains("data")) {
    const auto& d = j["data"];
    cfg.synthetic = d.value("synthetic", false);
    cfg.data_path = d.value("path", "");
    cfg.response_column = d.value("response", "y");
    cfg.n = d.value("n", 0);
    cfg.p = d.value("p", 0);
    cfg.snr = d.value("snr", 1.0);
    const std::string kind = d.value("kind", "continuous");
    if (kind != "continuous" && kind != "binary")
      stage_error("config", "data.kind must be continuous or binary");
    cfg.response_kind = kind == "binary" ? ResponseKind::binary : ResponseKind::continuous;
  }
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    const std::string type = b.value("type", "conjugate");
    if (type == "conjugate") cfg.backend = RunConfig::Backend::conjugate;
    else if (type == "ingested") cfg.backend = RunConfig::Backend::ingested;
    else stage_error("config", "backend.type must be conjugate or ingested");
    cfg.model.prior_scale = b.value("prior_scale", cfg.model.prior_scale);
    cfg.model.ig_shape = b.value("ig_shape", cfg.model.ig_shape);
    cfg.model.ig_rate = b.value("ig_rate", cfg.model.ig_rate);
    cfg.beta_path = b.value("beta", "");
    cfg.sigma_path = b.value("sigma", "");
    cfg.S = b.value("S", cfg.S);
    const std::string lik = b.value("likelihood", "gaussian");
    if (lik == "gaussian") cfg.likelihood = LikelihoodKind::gaussian;
    else if (lik == "bernoulli_logit") cfg.likelihood = LikelihoodKind::bernoulli_logit;
    else stage_error("config", "backend.likelihood must be gaussian or bernoulli_logit");
  }
  if (j.contains("functional")) {
    const auto& f = j["functional"];
    const std::string kind = f.value("kind", "identity");
    if (kind == "identity") cfg.h.kind = FunctionalSpec::Kind::identity;
    else if (kind == "threshold") cfg.h.kind = FunctionalSpec::Kind::threshold;
    else stage_error("config", "functional.kind must be identity or threshold");
    cfg.h.tau = f.value("tau", 0.0);
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    const std::string kind = w.value("kind", "uniform");
    if (kind == "uniform") {
      cfg.w.kind = WeightSpec::Kind::uniform;
    } else if (kind == "gaussian_kernel") {
      cfg.w.kind = WeightSpec::Kind::gaussian_kernel;
      const auto c = w.value("center", std::vector<double>{});
      cfg.w.center = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
      cfg.w.range = w.value("range", 1.0);
    } else if (kind == "explicit") {
      cfg.w.kind = WeightSpec::Kind::explicit_values;
      const auto v = w.value("values", std::vector<double>{});
      cfg.w.values = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else {
      stage_error("config", "weights.kind must be uniform, gaussian_kernel or explicit");
    }
  }
  if (j.contains("search")) {
    const auto& s = j["search"];
    cfg.s_max = s.value("s_max", cfg.s_max);
    cfg.m_k = s.value("m_k", cfg.m_k);
    cfg.forced = s.value("forced", std::vector<int>{});
  }
  if (j.contains("evaluate")) {
    const auto& e = j["evaluate"];
    cfg.K = e.value("K", cfg.K);
    cfg.eta = e.value("eta", cfg.eta);
    cfg.epsilon = e.value("epsilon", cfg.epsilon);
    cfg.S_tilde = e.value("S_tilde", cfg.S_tilde);
  }
  if (j.contains("report")) {
    const auto& r = j["report"];
    cfg.interval_level = r.value("interval_level", cfg.interval_level);
    cfg.redundancy_hi = r.value("redundancy_hi", cfg.redundancy_hi);
    cfg.redundancy_lo = r.value("redundancy_lo", cfg.redundancy_lo);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out_dir = j.value("out_dir", "");
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("BSEL_OUT");
    cfg.out_dir = env && *env ? env : ".";
  }
  cfg.validate();
  return cfg;
}

RunReport run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  RunReport rep;
  rep.config = cfg;

  // --- data ---
  if (cfg.synthetic) {
    auto [d, t] = generate_synthetic(cfg.n, cfg.p, cfg.snr, cfg.response_kind, cfg.seed);
    rep.data = std::move(d);
    rep.truth = std::move(t);
    rep.has_truth = true;
    rep.seeds.emplace_back("data", cfg.seed);
  } else {
    try {
      rep.data = io::read_dataset(cfg.data_path, cfg.response_column, cfg.response_kind);
    } catch (const std::exception& e) {
      stage_error("data", e.what());
    }
  }
  const Dataset& data = rep.data;
  rep.column_names = data.column_names;
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());

  // --- fit / ingest ---
  PosteriorDraws draws;
  LikelihoodKind likelihood = cfg.likelihood;
  if (cfg.backend == RunConfig::Backend::conjugate) {
    if (data.response_kind != ResponseKind::continuous)
      stage_error("fit", "the conjugate backend needs a continuous response; "
                         "ingest draws for binary data");
    FittedModel model;
    try {
      model = fit_conjugate_gaussian(data, cfg.model);
    } catch (const std::exception& e) {
      stage_error("fit", e.what());
    }
    draws = sample_posterior(model, cfg.S, cfg.seed + 1);
    likelihood = LikelihoodKind::gaussian;
    rep.seeds.emplace_back("posterior", cfg.seed + 1);
  } else {
    try {
      draws = ingest_posterior(cfg.beta_path, cfg.sigma_path);
    } catch (const std::exception& e) {
      stage_error("ingest", e.what());
    }
    if (draws.beta.cols() != p)
      stage_error("ingest", "draw matrix has " + std::to_string(draws.beta.cols()) +
                                " columns, data has " + std::to_string(p));
  }

  // --- point predictions ---
  PredictiveDraws pred = likelihood == LikelihoodKind::gaussian
                             ? sample_predictive(draws, data.X, cfg.seed + 2)
                             : sample_predictive_bernoulli(draws, data.X, cfg.seed + 2);
  rep.seeds.emplace_back("predictive", cfg.seed + 2);
  const PointPredictions point = point_predictions(pred, cfg.h);
  rep.loss = point.kind == PointPredictions::Kind::probability ? LossKind::cross_entropy
                                                               : LossKind::squared_error;

  // --- screen ---
  const int intercept = data.intercept_column();
  LinearAction screen_act = screening_action(data.X, point, cfg.w, intercept);
  rep.screened = screen(screen_act, cfg.s_max, cfg.forced, intercept);
  Matrix xs(n, rep.screened.size());
  for (std::size_t j = 0; j < rep.screened.size(); ++j)
    xs.col(static_cast<Eigen::Index>(j)) = data.X.col(rep.screened[j]);

  // --- search ---
  const Subset forced_s = map_forced(cfg.forced, rep.screened);
  CandidateFamily family;
  try {
    if (rep.loss == LossKind::squared_error) {
      const Vector omega = cfg.w.realize(data.X);
      family = bba_search(xs, point.yhat, omega, cfg.m_k, forced_s.indices);
    } else {
      family = candidate_family_classification(xs, point, cfg.w, cfg.m_k, forced_s.indices);
    }
  } catch (const std::exception& e) {
    stage_error("search", e.what());
  }
  family.screen_map = rep.screened;

  // --- evaluate ---
  EvalConfig ecfg;
  ecfg.loss = rep.loss;
  ecfg.h = cfg.h;
  ecfg.w = cfg.w;
  ecfg.likelihood = likelihood;
  ecfg.S_tilde = cfg.S_tilde;
  ecfg.seed = cfg.seed + 3;
  rep.seeds.emplace_back("evaluate", cfg.seed + 3);
  FoldSpec folds = make_folds(n, cfg.K, cfg.seed + 3);
  try {
    rep.losses = out_of_sample_losses(data, draws, folds, family, ecfg);
    rep.family = acceptable_family(rep.losses, cfg.eta, cfg.epsilon);
  } catch (const std::exception& e) {
    stage_error("evaluate", e.what());
  }
  rep.fold_ess = rep.losses.fold_ess;
  rep.notes = rep.losses.notes;
  rep.s_min_index = rep.family.s_min_row;
  rep.s_small_index = rep.family.s_small_row;

  // --- subset table with in-sample actions ---
  std::vector<char> member(rep.losses.rows.size(), 0);
  for (int r : rep.family.member_rows) member[r] = 1;
  for (std::size_t r = 0; r < rep.losses.rows.size(); ++r) {
    const auto& row = rep.losses.rows[r];
    SubsetSummary s;
    s.subset = row.subset;
    s.criterion = family.entries[r].criterion;
    s.empirical = row.empirical;
    s.prob = rep.family.prob[r];
    s.member = member[r] != 0;
    s.evaluable = row.evaluable;
    s.coef = rep.loss == LossKind::squared_error
                 ? optimal_linear_action(data.X, point, cfg.w, row.subset).coefficients
                 : optimal_logistic_action(data.X, point, cfg.w, row.subset).coefficients;
    rep.table.push_back(std::move(s));
  }

  // --- importance ---
  try {
    rep.vi = vi_matrix(rep.family, rep.losses, p);
    rep.keystone_indices = keystones(rep.vi);
    rep.redundant = redundancy_pairs(rep.vi, cfg.redundancy_hi, cfg.redundancy_lo);
  } catch (const std::exception& e) {
    stage_error("importance", e.what());
  }

  // --- interval estimates for the key subsets ---
  try {
    rep.s_min = interval_summary(data, pred, point, cfg.w,
                                 rep.losses.rows[rep.s_min_index].subset, rep.loss, cfg.h,
                                 cfg.interval_level);
    rep.s_small = interval_summary(data, pred, point, cfg.w,
                                   rep.losses.rows[rep.s_small_index].subset, rep.loss,
                                   cfg.h, cfg.interval_level);
    rep.full = interval_summary(data, pred, point, cfg.w, Subset::full(p), rep.loss, cfg.h,
                                cfg.interval_level);
  } catch (const std::exception& e) {
    stage_error("intervals", e.what());
  }

  // --- classical baseline ---
  if (data.response_kind == ResponseKind::continuous) {
    try {
      rep.baseline = classical_subset_baseline(data, cfg.s_max);
      rep.has_baseline = true;
    } catch (const std::exception& e) {
      stage_error("baseline", e.what());
    }
  }
  return rep;
}

Subset classical_subset_baseline(const Dataset& data, int s_max) {
  if (data.response_kind != ResponseKind::continuous)
    throw std::invalid_argument("classical_subset_baseline: continuous response required");
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  WeightSpec w;  // uniform
  PointPredictions obs{data.y, PointPredictions::Kind::continuous};

  std::vector<int> cols(p);
  if (p > s_max) {
    LinearAction act = screening_action(data.X, obs, w, data.intercept_column());
    cols = screen(act, s_max, {}, data.intercept_column());
  } else {
    std::iota(cols.begin(), cols.end(), 0);
  }
  Matrix xs(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    xs.col(static_cast<Eigen::Index>(j)) = data.X.col(cols[j]);

  const Vector omega = w.realize(xs);  // 1/n each, so criterion = RSS / n
  CandidateFamily fam = bba_search(xs, data.y, omega, 1);

  double best_aic = 0.0;
  int best = -1;
  for (std::size_t i = 0; i < fam.entries.size(); ++i) {
    const int k = fam.entries[i].subset.size();
    const double mse = std::max(fam.entries[i].criterion, 1e-300);
    const double aic = n * std::log(mse) + 2.0 * (k + 1);
    if (best < 0 || aic < best_aic) {  // sizes ascend, so ties keep the smaller k
      best_aic = aic;
      best = static_cast<int>(i);
    }
  }
  fam.screen_map = cols;
  return fam.original_subset(static_cast<std::size_t>(best));
}

MetricsTable metrics(const RunReport& report, const SyntheticTruth& truth) {
  const Dataset& data = report.data;
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  if (truth.beta_star.size() != p)
    throw std::invalid_argument("metrics: truth/report dimension mismatch");
  MetricsTable m;

  auto rmse_of = [&](const Subset& s, const Vector& coef) {
    Vector eta = Vector::Zero(n);
    for (int j = 0; j < s.size(); ++j) eta += coef(j) * data.X.col(s.indices[j]);
    return std::sqrt((eta - truth.y_star).squaredNorm() / n);
  };

  std::vector<double> member_rmse;
  for (const auto& row : report.table)
    if (row.member) member_rmse.push_back(rmse_of(row.subset, row.coef));
  if (member_rmse.empty()) throw std::invalid_argument("metrics: empty acceptable family");
  const double qs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) m.rmse_q[i] = quantile_interp(member_rmse, qs[i]);

  const Subset& smin = report.table[report.s_min_index].subset;
  const Subset& ssmall = report.table[report.s_small_index].subset;
  confusion(smin, truth.active, p, &m.tpr_smin, &m.tnr_smin);
  confusion(ssmall, truth.active, p, &m.tpr_ssmall, &m.tnr_ssmall);
  if (report.has_baseline) {
    m.has_baseline = true;
    confusion(report.baseline, truth.active, p, &m.tpr_baseline, &m.tnr_baseline);
    WeightSpec w;
    PointPredictions obs{data.y, PointPredictions::Kind::continuous};
    const Vector bc = wls_solve(data.X, data.y, w.realize(data.X), report.baseline);
    m.rmse_baseline = rmse_of(report.baseline, bc);
  }
  m.rmse_ssmall = rmse_of(ssmall, report.table[report.s_small_index].coef);

  auto interval_stats = [&](const IntervalSummary& s, double* width, double* cover) {
    double wsum = 0.0;
    int covered = 0;
    for (int j = 0; j < p; ++j) {
      const auto [lo, hi] = s.intervals[j];
      wsum += hi - lo;
      if (truth.beta_star(j) >= lo && truth.beta_star(j) <= hi) ++covered;
    }
    *width = wsum / p;
    *cover = static_cast<double>(covered) / p;
  };
  interval_stats(report.s_small, &m.width_ssmall, &m.coverage_ssmall);
  interval_stats(report.full, &m.width_full, &m.coverage_full);

  if (truth.pi_star.size() == n) {
    m.has_ce = true;
    auto ce_of = [&](const IntervalSummary& s) {
      const Vector eta = data.X * s.point;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const double pi = clip_prob(1.0 / (1.0 + std::exp(-eta(i))));
        total += -(truth.pi_star(i) * std::log(pi) +
                   (1.0 - truth.pi_star(i)) * std::log1p(-pi));
      }
      return total / n;
    };
    m.ce_ssmall = ce_of(report.s_small);
    m.ce_full = ce_of(report.full);
  }
  return m;
}

void write_report(const RunReport& rep) {
  const std::string dir = rep.config.out_dir;
  const RunConfig& cfg = rep.config;

  ordered_json j;
  j["config"] = {
      {"synthetic", cfg.synthetic},
      {"data_path", cfg.data_path},
      {"n", static_cast<int>(rep.data.n())},
      {"p", static_cast<int>(rep.data.p())},
      {"snr", cfg.snr},
      {"response_kind", rep.data.response_kind == ResponseKind::binary ? "binary" : "continuous"},
      {"backend", cfg.backend == RunConfig::Backend::conjugate ? "conjugate" : "ingested"},
      {"S", cfg.S},
      {"functional", cfg.h.kind == FunctionalSpec::Kind::identity ? "identity" : "threshold"},
      {"tau", cfg.h.tau},
      {"loss", rep.loss == LossKind::squared_error ? "squared_error" : "cross_entropy"},
      {"s_max", cfg.s_max},
      {"m_k", cfg.m_k},
      {"forced", cfg.forced},
      {"K", cfg.K},
      {"eta", cfg.eta},
      {"epsilon", cfg.epsilon},
      {"S_tilde", rep.losses.S_tilde},
      {"interval_level", cfg.interval_level},
      {"seed", cfg.seed},
  };
  ordered_json seeds = ordered_json::object();
  for (const auto& [name, value] : rep.seeds) seeds[name] = value;
  j["seeds"] = seeds;
  j["screened"] = rep.screened;

  ordered_json table = ordered_json::array();
  for (const auto& row : rep.table) {
    ordered_json r;
    r["subset"] = row.subset.indices;
    r["size"] = row.subset.size();
    r["criterion"] = row.criterion;
    r["empirical_loss"] = row.evaluable ? ordered_json(row.empirical) : ordered_json();
    r["prob_within_eta"] = row.evaluable ? ordered_json(row.prob) : ordered_json();
    r["member"] = row.member;
    table.push_back(std::move(r));
  }
  j["subsets"] = table;
  j["family_size"] = static_cast<int>(rep.family.member_rows.size());
  j["s_min"] = rep.table[rep.s_min_index].subset.indices;
  j["s_small"] = rep.table[rep.s_small_index].subset.indices;
  if (rep.has_baseline) j["baseline"] = rep.baseline.indices;
  j["keystones"] = rep.keystone_indices;
  ordered_json red = ordered_json::array();
  for (const auto& pr : rep.redundant)
    red.push_back({{"j", pr.j}, {"l", pr.l}, {"vi_j", pr.vi_j}, {"vi_l", pr.vi_l},
                   {"vi_jl", pr.vi_jl}});
  j["redundant_pairs"] = red;
  j["fold_ess"] = rep.fold_ess;
  j["notes"] = rep.notes;

  auto interval_block = [&](const IntervalSummary& s) {
    ordered_json b;
    b["subset"] = s.subset.indices;
    std::vector<double> pt(s.point.data(), s.point.data() + s.point.size());
    b["point"] = pt;
    ordered_json lo = ordered_json::array(), hi = ordered_json::array();
    for (const auto& [a, c] : s.intervals) {
      lo.push_back(a);
      hi.push_back(c);
    }
    b["lower"] = lo;
    b["upper"] = hi;
    b["failed_draws"] = s.failed_draws;
    return b;
  };
  j["intervals"] = {{"s_min", interval_block(rep.s_min)},
                    {"s_small", interval_block(rep.s_small)},
                    {"full", interval_block(rep.full)}};

  if (rep.has_truth) {
    const MetricsTable m = metrics(rep, rep.truth);
    ordered_json mj;
    mj["rmse_quantiles"] = {m.rmse_q[0], m.rmse_q[1], m.rmse_q[2], m.rmse_q[3], m.rmse_q[4]};
    mj["tpr_s_min"] = m.tpr_smin;
    mj["tnr_s_min"] = m.tnr_smin;
    mj["tpr_s_small"] = m.tpr_ssmall;
    mj["tnr_s_small"] = m.tnr_ssmall;
    if (m.has_baseline) {
      mj["tpr_baseline"] = m.tpr_baseline;
      mj["tnr_baseline"] = m.tnr_baseline;
      mj["rmse_baseline"] = m.rmse_baseline;
    }
    mj["rmse_s_small"] = m.rmse_ssmall;
    mj["width_s_small"] = m.width_ssmall;
    mj["coverage_s_small"] = m.coverage_ssmall;
    mj["width_full"] = m.width_full;
    mj["coverage_full"] = m.coverage_full;
    if (m.has_ce) {
      mj["ce_s_small"] = m.ce_ssmall;
      mj["ce_full"] = m.ce_full;
    }
    j["metrics"] = mj;
  }
  io::write_text_atomic(dir + "/report.json", j.dump(2) + "\n");

  // family table
  {
    std::ostringstream out;
    out << "size\tsubset\tcriterion\tempirical_loss\tprob_within_eta\tmember\n";
    for (const auto& row : rep.table) {
      out << row.subset.size() << '\t' << subset_tsv(row.subset) << '\t'
          << io::fmt(row.criterion) << '\t'
          << (row.evaluable ? io::fmt(row.empirical) : "NA") << '\t'
          << (row.evaluable ? io::fmt(row.prob) : "NA") << '\t' << (row.member ? 1 : 0)
          << '\n';
    }
    io::write_text_atomic(dir + "/family.tsv", out.str());
  }

  // importance matrix with labeled rows/columns
  {
    std::ostringstream out;
    out << "covariate";
    for (const auto& name : rep.column_names) out << '\t' << name;
    out << '\n';
    for (Eigen::Index r = 0; r < rep.vi.vi.rows(); ++r) {
      out << rep.column_names[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < rep.vi.vi.cols(); ++c) out << '\t' << io::fmt(rep.vi.vi(r, c));
      out << '\n';
    }
    io::write_text_atomic(dir + "/vi.tsv", out.str());
  }

  // interval table for the key subsets
  {
    std::ostringstream out;
    out << "subset\tcovariate\tpoint\tlower\tupper\n";
    auto dump = [&](const char* tag, const IntervalSummary& s) {
      for (int jx = 0; jx < static_cast<int>(rep.column_names.size()); ++jx)
        out << tag << '\t' << rep.column_names[static_cast<std::size_t>(jx)] << '\t'
            << io::fmt(s.point(jx)) << '\t' << io::fmt(s.intervals[jx].first) << '\t'
            << io::fmt(s.intervals[jx].second) << '\n';
    };
    dump("s_min", rep.s_min);
    dump("s_small", rep.s_small);
    dump("full", rep.full);
    io::write_text_atomic(dir + "/intervals.tsv", out.str());
  }
}

}  // namespace bsel
