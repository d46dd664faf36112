#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsel/action.hpp"
#include "bsel/evaluate.hpp"
#include "bsel/importance.hpp"
#include "bsel/model.hpp"
#include "bsel/search.hpp"
#include "bsel/synthetic.hpp"
#include "bsel/types.hpp"

namespace bsel {

struct RunConfig {
  // data source: a delimited/binary file or the built-in synthetic generator
  bool synthetic = false;
  std::string data_path;
  std::string response_column = "y";
  ResponseKind response_kind = ResponseKind::continuous;
  int n = 0, p = 0;
  double snr = 1.0;

  enum class Backend { conjugate, ingested };
  Backend backend = Backend::conjugate;
  ModelConfig model;
  std::string beta_path, sigma_path;  // ingested backend
  LikelihoodKind likelihood = LikelihoodKind::gaussian;
  int S = 1000;

  FunctionalSpec h;
  WeightSpec w;

  int s_max = 35;
  int m_k = 15;
  std::vector<int> forced;

  int K = 10;
  double eta = 0.0;
  double epsilon = 0.10;
  int S_tilde = 0;  // 0 means floor(S/2)

  double interval_level = 0.9;
  double redundancy_hi = 0.3, redundancy_lo = 0.1;

  std::uint64_t seed = 1;  // master; stage seeds derived and logged
  std::string out_dir;

  void validate() const;
};

// Reads a JSON config file; missing keys keep the defaults above. The output
// directory falls back to $BSEL_OUT, then ".".
RunConfig load_config(const std::string& path);

struct SubsetSummary {
  Subset subset;
  Vector coef;              // in-sample action, aligned with subset.indices
  double criterion = 0.0;   // in-sample search criterion
  double empirical = 0.0;   // out-of-sample empirical loss
  double prob = 0.0;        // P(D_tilde < eta)
  bool member = false;
  bool evaluable = true;
};

struct IntervalSummary {
  Subset subset;
  Vector point;  // in-sample action coefficients, dense over p
  std::vector<std::pair<double, double>> intervals;
  int failed_draws = 0;
};

struct RunReport {
  RunConfig config;
  LossKind loss = LossKind::squared_error;
  std::vector<std::string> column_names;
  std::vector<int> screened;  // original indices surviving the screen

  std::vector<SubsetSummary> table;
  int s_min_index = -1, s_small_index = -1;  // rows of `table`
  std::vector<double> fold_ess;
  std::vector<std::string> notes;

  ImportanceMatrix vi;
  std::vector<int> keystone_indices;
  std::vector<RedundantPair> redundant;

  IntervalSummary s_min, s_small, full;
  Subset baseline;  // classical AIC subset (continuous response only)
  bool has_baseline = false;

  SubsetLosses losses;        // raw per-draw losses, for downstream metrics
  AcceptableFamily family;
  Dataset data;
  SyntheticTruth truth;
  bool has_truth = false;

  std::vector<std::pair<std::string, std::uint64_t>> seeds;
};

RunReport run_pipeline(const RunConfig& cfg);

// Serializes report.json plus flat TSV tables (family, vi, intervals) into
// cfg.out_dir; all writes are atomic.
void write_report(const RunReport& report);

// Best-subset search on the raw data with the final size chosen by
// AIC = n log(RSS/n) + 2(k+1); ties go to the smaller size.
Subset classical_subset_baseline(const Dataset& data, int s_max);

struct MetricsTable {
  double rmse_q[5] = {0, 0, 0, 0, 0};  // q in {0, .25, .5, .75, 1} over members
  double tpr_smin = 0, tnr_smin = 0;
  double tpr_ssmall = 0, tnr_ssmall = 0;
  double tpr_baseline = 0, tnr_baseline = 0;
  bool has_baseline = false;
  double width_ssmall = 0, coverage_ssmall = 0;
  double width_full = 0, coverage_full = 0;
  double rmse_ssmall = 0, rmse_baseline = 0;
  double ce_ssmall = 0, ce_full = 0;  // binary truth only
  bool has_ce = false;
};

MetricsTable metrics(const RunReport& report, const SyntheticTruth& truth);

}  // namespace bsel
