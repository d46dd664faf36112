#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsel/io.hpp"
#include "bsel/pipeline.hpp"

namespace {

std::string default_out() {
  const char* env = std::getenv("BSEL_OUT");
  return env && *env ? env : ".";
}

bsel::RunConfig load_or_default(const std::string& config_path) {
  if (!config_path.empty()) return bsel::load_config(config_path);
  bsel::RunConfig cfg;
  cfg.out_dir = default_out();
  return cfg;
}

void write_dataset(const bsel::Dataset& data, const std::string& path) {
  std::vector<std::string> names = data.column_names;
  names.push_back("y");
  bsel::Matrix values(data.n(), data.p() + 1);
  values.leftCols(data.p()) = data.X;
  values.col(data.p()) = data.y;
  bsel::io::write_delimited(path, names, values);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, data_path;
  std::optional<int> n, p, S, s_max, m_k, K, S_tilde;
  std::optional<double> snr, eta, epsilon;
  std::optional<bool> synthetic;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--data", data_path, "input dataset path");
    cmd->add_flag("--synthetic", synthetic, "use the synthetic generator");
    cmd->add_option("--n", n, "synthetic rows");
    cmd->add_option("--p", p, "synthetic covariates (excluding intercept)");
    cmd->add_option("--snr", snr, "synthetic signal-to-noise ratio");
    cmd->add_option("--S", S, "posterior draw count");
    cmd->add_option("--S-tilde", S_tilde, "resampled draws per fold");
    cmd->add_option("--s-max", s_max, "screening cap");
    cmd->add_option("--m-k", m_k, "subsets kept per size");
    cmd->add_option("--K", K, "evaluation folds");
    cmd->add_option("--eta", eta, "acceptable-family margin (percent)");
    cmd->add_option("--epsilon", epsilon, "acceptable-family probability floor");
  }

  void apply(bsel::RunConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    if (data_path) cfg.data_path = *data_path;
    if (synthetic) cfg.synthetic = *synthetic;
    if (n) cfg.n = *n;
    if (p) cfg.p = *p;
    if (snr) cfg.snr = *snr;
    if (S) cfg.S = *S;
    if (S_tilde) cfg.S_tilde = *S_tilde;
    if (s_max) cfg.s_max = *s_max;
    if (m_k) cfg.m_k = *m_k;
    if (K) cfg.K = *K;
    if (eta) cfg.eta = *eta;
    if (epsilon) cfg.epsilon = *epsilon;
  }
};

int run_generate(const bsel::RunConfig& cfg) {
  auto [data, truth] =
      bsel::generate_synthetic(cfg.n, cfg.p, cfg.snr, cfg.response_kind, cfg.seed);
  write_dataset(data, cfg.out_dir + "/data.tsv");
  std::vector<std::string> tn = {"beta_star", "y_star"};
  bsel::Matrix tv(data.n(), truth.pi_star.size() ? 3 : 2);
  tv.col(0).setZero();
  tv.col(0).head(truth.beta_star.size()) = truth.beta_star;
  tv.col(1) = truth.y_star;
  if (truth.pi_star.size()) {
    tn.push_back("pi_star");
    tv.col(2) = truth.pi_star;
  }
  bsel::io::write_delimited(cfg.out_dir + "/truth.tsv", tn, tv);
  std::cout << "wrote " << cfg.out_dir << "/data.tsv (sigma_star="
            << bsel::io::fmt(truth.sigma_star) << ")\n";
  return 0;
}

int run_fit(const bsel::RunConfig& cfg) {
  bsel::Dataset data;
  if (cfg.synthetic) {
    data = bsel::generate_synthetic(cfg.n, cfg.p, cfg.snr, cfg.response_kind, cfg.seed).first;
  } else {
    data = bsel::io::read_dataset(cfg.data_path, cfg.response_column, cfg.response_kind);
  }
  bsel::PosteriorDraws draws;
  if (cfg.backend == bsel::RunConfig::Backend::conjugate) {
    const auto model = bsel::fit_conjugate_gaussian(data, cfg.model);
    draws = bsel::sample_posterior(model, cfg.S, cfg.seed + 1);
  } else {
    draws = bsel::ingest_posterior(cfg.beta_path, cfg.sigma_path);
  }
  bsel::io::write_delimited(cfg.out_dir + "/beta_draws.tsv", data.column_names, draws.beta);
  if (draws.sigma.size())
    bsel::io::write_delimited(cfg.out_dir + "/sigma_draws.tsv", {"sigma"}, draws.sigma);
  std::cout << "wrote " << draws.S() << " posterior draws to " << cfg.out_dir << "\n";
  return 0;
}

int run_report(const bsel::RunConfig& cfg) {
  const bsel::RunReport rep = bsel::run_pipeline(cfg);
  bsel::write_report(rep);
  const auto& small = rep.table[static_cast<std::size_t>(rep.s_small_index)].subset;
  std::cout << "family size " << rep.family.member_rows.size() << ", s_small "
            << small.label() << "; report in " << rep.config.out_dir << "\n";
  return 0;
}

int run_sweep(bsel::RunConfig cfg, int replicates) {
  std::ostringstream out;
  out << "replicate\tseed\tfamily_size\ts_small_size\trmse_q0\trmse_q50\trmse_q100"
         "\trmse_s_small\trmse_baseline\ttpr_s_small\ttnr_s_small\twidth_s_small"
         "\tcoverage_s_small\twidth_full\tcoverage_full\tce_s_small\tce_full\n";
  const std::uint64_t base = cfg.seed;
  for (int r = 0; r < replicates; ++r) {
    cfg.seed = base + 101 * static_cast<std::uint64_t>(r);
    const bsel::RunReport rep = bsel::run_pipeline(cfg);
    if (!rep.has_truth)
      throw std::runtime_error("[sweep] sweeps need synthetic data with known truth");
    const bsel::MetricsTable m = bsel::metrics(rep, rep.truth);
    out << r << '\t' << cfg.seed << '\t' << rep.family.member_rows.size() << '\t'
        << rep.table[static_cast<std::size_t>(rep.s_small_index)].subset.size() << '\t'
        << bsel::io::fmt(m.rmse_q[0]) << '\t' << bsel::io::fmt(m.rmse_q[2]) << '\t'
        << bsel::io::fmt(m.rmse_q[4]) << '\t' << bsel::io::fmt(m.rmse_ssmall) << '\t'
        << (m.has_baseline ? bsel::io::fmt(m.rmse_baseline) : "NA") << '\t'
        << bsel::io::fmt(m.tpr_ssmall) << '\t' << bsel::io::fmt(m.tnr_ssmall) << '\t'
        << bsel::io::fmt(m.width_ssmall) << '\t' << bsel::io::fmt(m.coverage_ssmall) << '\t'
        << bsel::io::fmt(m.width_full) << '\t' << bsel::io::fmt(m.coverage_full) << '\t'
        << (m.has_ce ? bsel::io::fmt(m.ce_ssmall) : "NA") << '\t'
        << (m.has_ce ? bsel::io::fmt(m.ce_full) : "NA") << '\n';
  }
  bsel::io::write_text_atomic(cfg.out_dir + "/sweep.tsv", out.str());
  std::cout << "wrote " << cfg.out_dir << "/sweep.tsv (" << replicates << " replicates)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptable-family subset selection for Bayesian linear summaries"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config file")->envname("BSEL_CONFIG");

  std::string kind = "continuous";
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset");
  generate->add_option("--kind", kind, "continuous | binary");

  auto* fit = app.add_subcommand("fit", "fit or ingest posterior draws");
  auto* search = app.add_subcommand("search", "candidate family search only");
  auto* evaluate = app.add_subcommand("evaluate", "search plus out-of-sample evaluation");
  auto* report = app.add_subcommand("report", "full pipeline with report output");
  int replicates = 20;
  auto* sweep = app.add_subcommand("sweep", "replicate simulation over seeds");
  sweep->add_option("--replicates", replicates, "number of replicate runs");

  Overrides ov;
  for (CLI::App* cmd : {generate, fit, search, evaluate, report, sweep}) ov.add_to(cmd);

  CLI11_PARSE(app, argc, argv);
  try {
    bsel::RunConfig cfg = load_or_default(config_path);
    ov.apply(cfg);
    CLI::App* active = app.get_subcommands().front();

    if (active == generate) {
      if (kind == "binary") cfg.response_kind = bsel::ResponseKind::binary;
      cfg.synthetic = true;
      if (cfg.n == 0) cfg.n = 500;
      if (cfg.p == 0) cfg.p = 50;
      return run_generate(cfg);
    }
    if (active == fit) return run_fit(cfg);
    // search and evaluate are report prefixes; all three share run_pipeline
    // so the stages always agree.
    if (active == search || active == evaluate || active == report) return run_report(cfg);
    if (active == sweep) return run_sweep(cfg, replicates);
    std::cerr << "[cli] unknown verb\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
