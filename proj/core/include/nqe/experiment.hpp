#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nqe/data.hpp"
#include "nqe/feature_map.hpp"
#include "nqe/pqc.hpp"
#include "nqe/training.hpp"

namespace nqe {

// Where the experiment's samples come from.
struct DatasetSpec {
  enum class Source { synthetic, idx, csv, json };
  Source source = Source::synthetic;

  // synthetic
  std::size_t n_per_class = 250;
  double separation = 4.0;
  // idx
  std::filesystem::path idx_images;
  std::filesystem::path idx_labels;
  std::pair<int, int> digits{0, 1};
  std::size_t count = 500;
  // csv / json
  std::filesystem::path path;

  double train_fraction = 0.8;
};

// One JSON document drives a whole experiment; individual flags override
// single keys. Every derived output embeds the master seed and the digest of
// this configuration.
struct ExperimentConfig {
  std::uint64_t seed = 4;
  std::filesystem::path output_dir = "out";
  EstimatorConfig estimator;
  FeatureMapConfig feature_map;
  // Bottleneck network: the single hidden pair learns the separating
  // direction from every training pair at once, which converges far faster
  // at the 15-iteration budget than wide hidden layers.
  std::vector<int> embedder_layers{5, 2, 5};
  DatasetSpec dataset;

  int nqe_iterations = 15;
  int nqe_batch_pairs = 10;
  double nqe_learning_rate = 0.05;
  OptimizerKind nqe_optimizer = OptimizerKind::adam;
  AdamConfig nqe_adam;
  bool nqe_sampled_gradients = false;

  int pqc_iterations = 150;
  int pqc_batch_size = 10;
  double pqc_learning_rate = 0.2;

  int eval_pairs = 20;

  void validate() const;
};

ExperimentConfig default_config();
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> estimator;  // "exact" | "sampled"
  std::optional<std::uint64_t> shots;
};

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides);

// SHA-256 of the canonical JSON rendering of the configuration; stamped into
// every output file.
std::string config_digest(const ExperimentConfig& cfg);

// SHA-256 of a file's bytes, hex-encoded.
std::string file_sha256(const std::filesystem::path& path);

struct StageRecord {
  std::string name;
  std::vector<std::filesystem::path> outputs;  // relative to output_dir
};

// --- pipeline stages ---------------------------------------------------------
// Each stage writes its outputs under cfg.output_dir and returns the files it
// produced (paths relative to the output directory).

// dataset.json + dataset_train.json + dataset_test.json
StageRecord run_prepare_data(const ExperimentConfig& cfg);

// nqe_params.json, nqe_loss.csv, checkpoints/checkpoint_<k>.json
StageRecord run_train_nqe(const ExperimentConfig& cfg,
                          const std::filesystem::path& train_dataset);

// trace_distance.csv over all checkpoints, train and test splits
StageRecord run_eval_separability(const ExperimentConfig& cfg,
                                  const std::filesystem::path& checkpoints_dir,
                                  const std::filesystem::path& train_dataset,
                                  const std::filesystem::path& test_dataset);

// pqc_theta_<mode>.json + pqc_loss_<mode>.csv; mode is "nqe" (params file
// required) or "zz" (raw feature-map baseline).
StageRecord run_train_pqc(const ExperimentConfig& cfg, const std::string& mode,
                          const std::filesystem::path& nqe_params,
                          const std::filesystem::path& train_dataset);

// predictions_<mode>.csv + summary_<mode>.json
StageRecord run_classify(const ExperimentConfig& cfg, const std::string& mode,
                         const std::filesystem::path& theta_path,
                         const std::filesystem::path& nqe_params,
                         const std::filesystem::path& dataset_path);

// prepare -> NQE -> separability -> PQC (both modes) -> classify (both
// modes) -> manifest.json. Returns every stage record, manifest included.
std::vector<StageRecord> run_reproduce(const ExperimentConfig& cfg);

// Writes manifest.json: config snapshot, tool version, timestamps, and the
// SHA-256 digest of every stage output. The manifest is metadata; all data
// outputs are byte-stable for a fixed seed, while the manifest carries wall
// times.
std::filesystem::path write_manifest(const ExperimentConfig& cfg,
                                     const std::vector<StageRecord>& stages);

// Recomputes the digests listed in a manifest; throws if any file differs.
void verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace nqe
