// Experiment runner: prepares data, trains the embedding through the probe
// estimator, evaluates separability, trains the downstream classifier, and
// reproduces the whole pipeline from one seeded configuration.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nqe/errors.hpp"
#include "nqe/experiment.hpp"
#include "nqe/log.hpp"
#include "nqe/version.hpp"

namespace {

// Exit codes: 0 success, 1 internal error, 2 configuration error,
// 3 data error, 4 numeric failure.
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> estimator;
  std::optional<std::uint64_t> shots;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "Experiment configuration JSON (defaults apply when omitted)");
  cmd->add_option("--seed", args.seed, "Master seed override");
  cmd->add_option("--out", args.out_dir, "Output directory override");
  cmd->add_option("--estimator", args.estimator,
                  "Overlap estimator: exact or sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  cmd->add_option("--shots", args.shots, "Shot count for the sampled estimator");
}

nqe::ExperimentConfig resolve_config(const CommonArgs& args) {
  nqe::ExperimentConfig cfg = args.config_path.empty()
                                  ? nqe::default_config()
                                  : nqe::load_config(args.config_path);
  nqe::ConfigOverrides overrides;
  overrides.seed = args.seed;
  if (args.out_dir) overrides.output_dir = *args.out_dir;
  overrides.estimator = args.estimator;
  overrides.shots = args.shots;
  nqe::apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

std::string default_under_out(const nqe::ExperimentConfig& cfg,
                              const std::string& name) {
  return (cfg.output_dir / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DQC1-trained neural quantum embedding toolkit"};
  app.set_version_flag("--version", nqe::kToolVersion);
  app.require_subcommand(1);

  CommonArgs args;

  CLI::App* prepare = app.add_subcommand(
      "prepare-data", "Build the dataset (IDX, CSV, JSON or synthetic) and split it");
  add_common(prepare, args);

  CLI::App* train_nqe_cmd = app.add_subcommand(
      "train-nqe", "Train the embedding network against the probe estimator");
  add_common(train_nqe_cmd, args);
  std::string nqe_dataset;
  train_nqe_cmd->add_option("--dataset", nqe_dataset,
                            "Training dataset JSON (default: <out>/dataset_train.json)");

  CLI::App* eval_cmd = app.add_subcommand(
      "eval-separability", "Trace-distance statistics across training checkpoints");
  add_common(eval_cmd, args);
  std::string checkpoints_dir, eval_train, eval_test;
  eval_cmd->add_option("--checkpoints", checkpoints_dir,
                       "Checkpoint directory (default: <out>/checkpoints)");
  eval_cmd->add_option("--train", eval_train,
                       "Train split JSON (default: <out>/dataset_train.json)");
  eval_cmd->add_option("--test", eval_test,
                       "Test split JSON (default: <out>/dataset_test.json)");

  CLI::App* train_pqc_cmd =
      app.add_subcommand("train-pqc", "Train the downstream classifier circuit");
  add_common(train_pqc_cmd, args);
  std::string pqc_mode = "nqe", pqc_params, pqc_dataset;
  train_pqc_cmd
      ->add_option("--embedding", pqc_mode,
                   "Embedding mode: nqe (trained network) or zz (raw baseline)")
      ->check(CLI::IsMember({"nqe", "zz"}));
  train_pqc_cmd->add_option("--nqe-params", pqc_params,
                            "Embedding network JSON (default: <out>/nqe_params.json)");
  train_pqc_cmd->add_option("--dataset", pqc_dataset,
                            "Training dataset JSON (default: <out>/dataset_train.json)");

  CLI::App* classify_cmd =
      app.add_subcommand("classify", "Classify a dataset with trained parameters");
  add_common(classify_cmd, args);
  std::string cls_mode = "nqe", cls_theta, cls_params, cls_dataset;
  classify_cmd
      ->add_option("--embedding", cls_mode, "Embedding mode: nqe or zz")
      ->check(CLI::IsMember({"nqe", "zz"}));
  classify_cmd->add_option("--theta", cls_theta,
                           "Classifier angles JSON (default: <out>/pqc_theta_<mode>.json)");
  classify_cmd->add_option("--nqe-params", cls_params,
                           "Embedding network JSON (default: <out>/nqe_params.json)");
  classify_cmd->add_option("--dataset", cls_dataset,
                           "Dataset JSON (default: <out>/dataset.json)");

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "Run the full pipeline and write a digest manifest");
  add_common(reproduce, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const nqe::ExperimentConfig cfg = resolve_config(args);

    if (prepare->parsed()) {
      nqe::run_prepare_data(cfg);
    } else if (train_nqe_cmd->parsed()) {
      if (nqe_dataset.empty())
        nqe_dataset = default_under_out(cfg, "dataset_train.json");
      nqe::run_train_nqe(cfg, nqe_dataset);
    } else if (eval_cmd->parsed()) {
      if (checkpoints_dir.empty())
        checkpoints_dir = default_under_out(cfg, "checkpoints");
      if (eval_train.empty())
        eval_train = default_under_out(cfg, "dataset_train.json");
      if (eval_test.empty())
        eval_test = default_under_out(cfg, "dataset_test.json");
      nqe::run_eval_separability(cfg, checkpoints_dir, eval_train, eval_test);
    } else if (train_pqc_cmd->parsed()) {
      if (pqc_params.empty())
        pqc_params = default_under_out(cfg, "nqe_params.json");
      if (pqc_dataset.empty())
        pqc_dataset = default_under_out(cfg, "dataset_train.json");
      nqe::run_train_pqc(cfg, pqc_mode, pqc_params, pqc_dataset);
    } else if (classify_cmd->parsed()) {
      if (cls_theta.empty())
        cls_theta = default_under_out(cfg, "pqc_theta_" + cls_mode + ".json");
      if (cls_params.empty())
        cls_params = default_under_out(cfg, "nqe_params.json");
      if (cls_dataset.empty())
        cls_dataset = default_under_out(cfg, "dataset.json");
      nqe::run_classify(cfg, cls_mode, cls_theta, cls_params, cls_dataset);
    } else if (reproduce->parsed()) {
      nqe::run_reproduce(cfg);
    }
    return 0;
  } catch (const nqe::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nqe::FormatError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const nqe::IoError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const nqe::DomainError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const nqe::ShapeError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const nqe::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
}
