#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgmrf/baselines.hpp"
#include "dgmrf/dataset.hpp"
#include "dgmrf/logdet.hpp"
#include "dgmrf/metrics.hpp"
#include "dgmrf/posterior.hpp"
#include "dgmrf/trainer.hpp"

namespace dgmrf {

/// Flat key=value configuration ('#' comments, '=' separated).
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  void set(const std::string& key, const std::string& value);
  void save(const std::string& path) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct ExperimentConfig {
  // Dataset: either a directory to load or a recipe to generate.
  std::string data_dir;
  std::string recipe = "dgmrf";
  std::size_t n = 1000;
  std::size_t l_true = 3;
  std::uint64_t dataset_seed = 0;

  TrainConfig train;
  std::size_t n_posterior_samples = 100;
  std::uint64_t inference_seed = 12345;
  double cg_tol = 1e-7;

  std::string out_dir = "run";
  std::size_t checkpoint_every = 0;  // 0 = only final
  std::string cache_dir;             // pre-process cache; defaults to out_dir

  static ExperimentConfig from_config(const KeyValueConfig& kv);
  KeyValueConfig to_config() const;
};

/// Pre-process for the configured backend, reusing an on-disk cache keyed by
/// graph hash (and trace settings).
LogdetPreprocess run_preprocess(const SparseGraph& g, const TrainConfig& config,
                                const std::string& cache_dir);

struct EvaluationResult {
  MetricReport report;                   // vs y on unobserved nodes
  std::optional<double> mae_mu;          // vs exact posterior mean
  std::optional<double> mae_sigma;       // vs exact posterior std
  std::optional<double> true_posterior_rmse;
  double elbo_per_node = 0.0;
};

EvaluationResult evaluate_posterior(const Dataset& ds, const PosteriorSummary& post,
                                    const std::string& model_name, std::uint64_t seed);

struct ExperimentResult {
  ExperimentConfig config;
  TrainResult trained;
  PosteriorSummary posterior;
  EvaluationResult evaluation;
  std::string bundle_dir;
};

/// generate/load -> preprocess -> train -> infer -> evaluate, with all
/// artifacts written under config.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// LP or IGMRF on a stored dataset; writes a posterior CSV (IGMRF) or plain
/// predictions (LP) plus the metric report.
EvaluationResult run_baseline(const Dataset& ds, const std::string& model,
                              const std::string& out_dir, std::uint64_t seed = 0);

struct SweepResult {
  std::vector<std::size_t> layer_counts;
  // metric name -> per-layer (mean, std) over seeds
  std::map<std::string, std::vector<std::pair<double, double>>> metrics;
};

/// Repeats training over `n_seeds` seeds for each layer count and writes
/// mean/std plot data (one CSV row per layer count).
SweepResult run_sweep(const ExperimentConfig& base, const std::vector<std::size_t>& layers,
                      std::size_t n_seeds);

void write_posterior_csv(const PosteriorSummary& post, const ObservationMask& mask,
                         const std::string& path);
PosteriorSummary read_posterior_csv(const std::string& path, ObservationMask* mask = nullptr);

std::uint64_t file_content_hash(const std::string& path);

}  // namespace dgmrf
