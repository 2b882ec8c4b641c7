#include "nqe/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nqe/errors.hpp"
#include "nqe/log.hpp"
#include "nqe/metrics.hpp"
#include "nqe/version.hpp"

namespace nqe {

namespace fs = std::filesystem;
using nlohmann::json;

// --- configuration -----------------------------------------------------------

void ExperimentConfig::validate() const {
  feature_map.validate();
  if (embedder_layers.size() < 2)
    throw ConfigError("embedder.layer_sizes needs at least two entries");
  if (embedder_layers.back() != 2 * feature_map.n_qubits - 1)
    throw ConfigError("embedder output size must be 2*n_qubits-1 = " +
                      std::to_string(2 * feature_map.n_qubits - 1));
  if (nqe_iterations < 1 || nqe_batch_pairs < 1)
    throw ConfigError("nqe.iterations and nqe.batch_pairs must be >= 1");
  if (pqc_iterations < 1 || pqc_batch_size < 1)
    throw ConfigError("pqc.iterations and pqc.batch_size must be >= 1");
  if (eval_pairs < 1) throw ConfigError("eval_pairs must be >= 1");
  if (!(dataset.train_fraction >= 0.0 && dataset.train_fraction <= 1.0))
    throw ConfigError("dataset.train_fraction must be in [0, 1]");
  if (estimator.mode == EstimatorMode::sampled && estimator.shots < 1)
    throw ConfigError("estimator.shots must be >= 1 in sampled mode");
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

namespace {

const char* source_name(DatasetSpec::Source s) {
  switch (s) {
    case DatasetSpec::Source::synthetic: return "synthetic";
    case DatasetSpec::Source::idx: return "idx";
    case DatasetSpec::Source::csv: return "csv";
    case DatasetSpec::Source::json: return "json";
  }
  return "synthetic";
}

DatasetSpec::Source source_from_name(const std::string& s) {
  if (s == "synthetic") return DatasetSpec::Source::synthetic;
  if (s == "idx") return DatasetSpec::Source::idx;
  if (s == "csv") return DatasetSpec::Source::csv;
  if (s == "json") return DatasetSpec::Source::json;
  throw ConfigError("dataset.source must be synthetic|idx|csv|json, got '" + s +
                    "'");
}

json estimator_to_json(const EstimatorConfig& e) {
  return json{{"mode", e.mode == EstimatorMode::exact ? "exact" : "sampled"},
              {"shots", e.shots}};
}

EstimatorConfig estimator_from_json(const json& j, EstimatorConfig base) {
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "exact")
      base.mode = EstimatorMode::exact;
    else if (mode == "sampled")
      base.mode = EstimatorMode::sampled;
    else
      throw ConfigError("estimator.mode must be exact|sampled, got '" + mode + "'");
  }
  if (j.contains("shots")) base.shots = j["shots"].get<std::uint64_t>();
  return base;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  j["estimator"] = estimator_to_json(cfg.estimator);
  j["feature_map"] = {{"n_qubits", cfg.feature_map.n_qubits},
                      {"layers", cfg.feature_map.layers}};
  j["embedder"] = {{"layer_sizes", cfg.embedder_layers}};
  j["dataset"] = {
      {"source", source_name(cfg.dataset.source)},
      {"synthetic",
       {{"n_per_class", cfg.dataset.n_per_class},
        {"separation", cfg.dataset.separation}}},
      {"idx",
       {{"images", cfg.dataset.idx_images.string()},
        {"labels", cfg.dataset.idx_labels.string()},
        {"digits", {cfg.dataset.digits.first, cfg.dataset.digits.second}},
        {"count", cfg.dataset.count}}},
      {"path", cfg.dataset.path.string()},
      {"train_fraction", cfg.dataset.train_fraction}};
  j["nqe"] = {{"iterations", cfg.nqe_iterations},
              {"batch_pairs", cfg.nqe_batch_pairs},
              {"learning_rate", cfg.nqe_learning_rate},
              {"optimizer",
               {{"type", cfg.nqe_optimizer == OptimizerKind::adam ? "adam" : "sgd"},
                {"beta1", cfg.nqe_adam.beta1},
                {"beta2", cfg.nqe_adam.beta2},
                {"epsilon", cfg.nqe_adam.epsilon}}},
              {"sampled_gradients", cfg.nqe_sampled_gradients}};
  j["pqc"] = {{"iterations", cfg.pqc_iterations},
              {"batch_size", cfg.pqc_batch_size},
              {"learning_rate", cfg.pqc_learning_rate}};
  j["eval_pairs"] = cfg.eval_pairs;
  return j.dump(2);
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": invalid JSON: " + e.what());
  }

  ExperimentConfig cfg = default_config();
  try {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != 1)
      throw ConfigError("config: unsupported schema_version");
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir"))
      cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("estimator"))
      cfg.estimator = estimator_from_json(j["estimator"], cfg.estimator);
    if (j.contains("feature_map")) {
      const json& fm = j["feature_map"];
      if (fm.contains("n_qubits"))
        cfg.feature_map.n_qubits = fm["n_qubits"].get<int>();
      if (fm.contains("layers")) cfg.feature_map.layers = fm["layers"].get<int>();
    }
    if (j.contains("embedder") && j["embedder"].contains("layer_sizes"))
      cfg.embedder_layers =
          j["embedder"]["layer_sizes"].get<std::vector<int>>();
    if (j.contains("dataset")) {
      const json& d = j["dataset"];
      if (d.contains("source"))
        cfg.dataset.source = source_from_name(d["source"].get<std::string>());
      if (d.contains("synthetic")) {
        const json& s = d["synthetic"];
        if (s.contains("n_per_class"))
          cfg.dataset.n_per_class = s["n_per_class"].get<std::size_t>();
        if (s.contains("separation"))
          cfg.dataset.separation = s["separation"].get<double>();
      }
      if (d.contains("idx")) {
        const json& i = d["idx"];
        if (i.contains("images"))
          cfg.dataset.idx_images = i["images"].get<std::string>();
        if (i.contains("labels"))
          cfg.dataset.idx_labels = i["labels"].get<std::string>();
        if (i.contains("digits")) {
          const auto digits = i["digits"].get<std::vector<int>>();
          if (digits.size() != 2)
            throw ConfigError("dataset.idx.digits must hold exactly 2 digits");
          cfg.dataset.digits = {digits[0], digits[1]};
        }
        if (i.contains("count")) cfg.dataset.count = i["count"].get<std::size_t>();
      }
      if (d.contains("path")) cfg.dataset.path = d["path"].get<std::string>();
      if (d.contains("train_fraction"))
        cfg.dataset.train_fraction = d["train_fraction"].get<double>();
    }
    if (j.contains("nqe")) {
      const json& n = j["nqe"];
      if (n.contains("iterations")) cfg.nqe_iterations = n["iterations"].get<int>();
      if (n.contains("batch_pairs"))
        cfg.nqe_batch_pairs = n["batch_pairs"].get<int>();
      if (n.contains("learning_rate"))
        cfg.nqe_learning_rate = n["learning_rate"].get<double>();
      if (n.contains("optimizer")) {
        const json& o = n["optimizer"];
        if (o.contains("type")) {
          const std::string type = o["type"].get<std::string>();
          if (type == "adam")
            cfg.nqe_optimizer = OptimizerKind::adam;
          else if (type == "sgd")
            cfg.nqe_optimizer = OptimizerKind::sgd;
          else
            throw ConfigError("nqe.optimizer.type must be adam|sgd");
        }
        if (o.contains("beta1")) cfg.nqe_adam.beta1 = o["beta1"].get<double>();
        if (o.contains("beta2")) cfg.nqe_adam.beta2 = o["beta2"].get<double>();
        if (o.contains("epsilon"))
          cfg.nqe_adam.epsilon = o["epsilon"].get<double>();
      }
      if (n.contains("sampled_gradients"))
        cfg.nqe_sampled_gradients = n["sampled_gradients"].get<bool>();
    }
    if (j.contains("pqc")) {
      const json& p = j["pqc"];
      if (p.contains("iterations")) cfg.pqc_iterations = p["iterations"].get<int>();
      if (p.contains("batch_size")) cfg.pqc_batch_size = p["batch_size"].get<int>();
      if (p.contains("learning_rate"))
        cfg.pqc_learning_rate = p["learning_rate"].get<double>();
    }
    if (j.contains("eval_pairs")) cfg.eval_pairs = j["eval_pairs"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": bad value: " + e.what());
  }
  cfg.validate();
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides) {
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
  if (overrides.estimator) {
    if (*overrides.estimator == "exact")
      cfg.estimator.mode = EstimatorMode::exact;
    else if (*overrides.estimator == "sampled")
      cfg.estimator.mode = EstimatorMode::sampled;
    else
      throw ConfigError("--estimator must be exact or sampled");
  }
  if (overrides.shots) cfg.estimator.shots = *overrides.shots;
}

// --- digests -------------------------------------------------------------------

namespace {

std::string sha256_hex(const unsigned char* data, std::size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (EVP_Digest(data, len, digest, &digest_len, EVP_sha256(), nullptr) != 1)
    throw NumericError("sha256: digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string stamp_comment(const ExperimentConfig& cfg) {
  return "seed=" + std::to_string(cfg.seed) +
         " config=sha256:" + config_digest(cfg);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

json parse_json_file(const fs::path& path, const char* what) {
  std::ifstream f(path);
  if (!f) throw IoError(std::string(what) + ": cannot open: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": invalid JSON in " + path.string() +
                      ": " + e.what());
  }
  return j;
}

std::string iso8601_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

std::string config_digest(const ExperimentConfig& cfg) {
  // The digest identifies the experiment's parameters; where the outputs
  // land is not part of the experiment, so reruns into different directories
  // stay byte-identical.
  json j = json::parse(config_to_json(cfg));
  j.erase("output_dir");
  const std::string text = j.dump(2);
  return sha256_hex(reinterpret_cast<const unsigned char*>(text.data()),
                    text.size());
}

std::string file_sha256(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return sha256_hex(reinterpret_cast<const unsigned char*>(bytes.data()),
                    bytes.size());
}

// --- stages --------------------------------------------------------------------

namespace {

Dataset materialize_dataset(const ExperimentConfig& cfg) {
  const DatasetSpec& spec = cfg.dataset;
  switch (spec.source) {
    case DatasetSpec::Source::synthetic:
      return synthetic_dataset(spec.n_per_class, spec.separation,
                               derive_seed(cfg.seed, "data/synthetic"));
    case DatasetSpec::Source::idx: {
      if (spec.idx_images.empty() || !fs::exists(spec.idx_images))
        throw IoError("dataset.idx.images: file not found: '" +
                      spec.idx_images.string() + "'");
      if (spec.idx_labels.empty() || !fs::exists(spec.idx_labels))
        throw IoError("dataset.idx.labels: file not found: '" +
                      spec.idx_labels.string() + "'");
      const std::vector<RawImage> all = parse_idx(spec.idx_images, spec.idx_labels);
      const std::vector<RawImage> subset = select_binary_subset(
          all, spec.digits, spec.count, derive_seed(cfg.seed, "data/select"));
      PcaModel pca = fit_pca(subset, 5);
      fit_feature_scale(pca, subset);
      Provenance prov;
      prov.source = "idx:" + spec.idx_images.string();
      prov.seed = cfg.seed;
      prov.description = "digits " + std::to_string(spec.digits.first) + "/" +
                         std::to_string(spec.digits.second) + ", " +
                         std::to_string(subset.size()) +
                         " images, PCA to 5 standardized radians";
      return build_dataset(subset, pca, std::move(prov));
    }
    case DatasetSpec::Source::csv: {
      if (spec.path.empty() || !fs::exists(spec.path))
        throw IoError("dataset.path: file not found: '" + spec.path.string() +
                      "'");
      return import_csv(spec.path);
    }
    case DatasetSpec::Source::json: {
      if (spec.path.empty() || !fs::exists(spec.path))
        throw IoError("dataset.path: file not found: '" + spec.path.string() +
                      "'");
      return load_dataset(spec.path);
    }
  }
  throw ConfigError("unreachable dataset source");
}

MlpParams load_params_checked(const fs::path& path) {
  const json j = parse_json_file(path, "embedder params");
  return params_from_json(j.dump());
}

PqcParams load_theta(const fs::path& path) {
  const json j = parse_json_file(path, "classifier params");
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw FormatError("classifier params: unsupported schema_version");
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (theta.size() != 4)
      throw FormatError("classifier params: theta must have 4 entries");
    PqcParams p;
    std::copy(theta.begin(), theta.end(), p.theta.begin());
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("classifier params: bad schema: ") + e.what());
  }
}

NqeTrainConfig nqe_config_of(const ExperimentConfig& cfg) {
  NqeTrainConfig t;
  t.iterations = cfg.nqe_iterations;
  t.batch_pairs = cfg.nqe_batch_pairs;
  t.learning_rate = cfg.nqe_learning_rate;
  t.optimizer = cfg.nqe_optimizer;
  t.adam = cfg.nqe_adam;
  t.estimator = cfg.estimator;
  t.sampled_gradients = cfg.nqe_sampled_gradients;
  t.seed = derive_seed(cfg.seed, "nqe");
  return t;
}

void check_mode(const std::string& mode) {
  if (mode != "nqe" && mode != "zz")
    throw ConfigError("embedding mode must be nqe or zz, got '" + mode + "'");
}

}  // namespace

StageRecord run_prepare_data(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  log::info("prepare-data: source=" + std::string(source_name(cfg.dataset.source)));

  Dataset all = materialize_dataset(cfg);
  if (!all.has_both_labels())
    throw DomainError("prepare-data: dataset must contain both labels");
  all.provenance.seed = cfg.seed;
  // Every emitted file carries the master seed and the config digest.
  all.provenance.description +=
      " [config=sha256:" + config_digest(cfg) + "]";

  auto [train, test] =
      split(all, cfg.dataset.train_fraction, derive_seed(cfg.seed, "data/split"));

  save_dataset(all, cfg.output_dir / "dataset.json");
  save_dataset(train, cfg.output_dir / "dataset_train.json");
  save_dataset(test, cfg.output_dir / "dataset_test.json");
  return StageRecord{
      "prepare-data",
      {"dataset.json", "dataset_train.json", "dataset_test.json"}};
}

StageRecord run_train_nqe(const ExperimentConfig& cfg,
                          const fs::path& train_dataset) {
  cfg.validate();
  fs::create_directories(cfg.output_dir / "checkpoints");
  const Dataset train = load_dataset(train_dataset);
  log::info("train-nqe: " + std::to_string(train.samples.size()) + " samples");

  const MlpParams initial =
      init_params(cfg.embedder_layers, derive_seed(cfg.seed, "nqe/init"));
  const NqeTrainConfig train_cfg = nqe_config_of(cfg);
  const NqeTrainResult result =
      train_nqe(train, cfg.feature_map, train_cfg, initial);

  StageRecord record{"train-nqe", {}};

  const auto annotate = [&](const MlpParams& p) {
    json j = json::parse(params_to_json(p));
    j["seed"] = cfg.seed;
    j["config_digest"] = config_digest(cfg);
    return j.dump(2) + "\n";
  };

  write_text_file(cfg.output_dir / "nqe_params.json", annotate(result.params));
  record.outputs.emplace_back("nqe_params.json");

  std::ostringstream csv;
  write_trace_csv(csv, result.trace, train_cfg.batch_pairs, stamp_comment(cfg));
  write_text_file(cfg.output_dir / "nqe_loss.csv", csv.str());
  record.outputs.emplace_back("nqe_loss.csv");

  for (std::size_t k = 0; k < result.checkpoints.size(); ++k) {
    char name[48];
    std::snprintf(name, sizeof(name), "checkpoints/checkpoint_%03zu.json", k);
    write_text_file(cfg.output_dir / name, annotate(result.checkpoints[k]));
    record.outputs.emplace_back(name);
  }
  return record;
}

StageRecord run_eval_separability(const ExperimentConfig& cfg,
                                  const fs::path& checkpoints_dir,
                                  const fs::path& train_dataset,
                                  const fs::path& test_dataset) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);

  std::vector<MlpParams> checkpoints;
  for (std::size_t k = 0;; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "checkpoint_%03zu.json", k);
    const fs::path path = checkpoints_dir / name;
    if (!fs::exists(path)) break;
    checkpoints.push_back(load_params_checked(path));
  }
  if (checkpoints.empty())
    throw IoError("eval-separability: no checkpoints found under " +
                  checkpoints_dir.string());
  log::info("eval-separability: " + std::to_string(checkpoints.size()) +
            " checkpoints");

  std::ostringstream csv;
  csv << "# " << stamp_comment(cfg) << '\n';
  csv << "iteration,mean_trace_distance,std_trace_distance,split\n";
  char buf[160];
  for (const char* split_name : {"train", "test"}) {
    const Dataset data = load_dataset(
        std::string(split_name) == "train" ? train_dataset : test_dataset);
    const Dataset pairs =
        make_eval_pairs(data, cfg.eval_pairs,
                        derive_seed(cfg.seed, std::string("separability/") +
                                                  split_name));
    const auto stats =
        eval_trace_distance_over_training(checkpoints, pairs, cfg.feature_map);
    for (std::size_t k = 0; k < stats.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%s\n", k, stats[k].mean,
                    stats[k].stddev, split_name);
      csv << buf;
    }
  }
  write_text_file(cfg.output_dir / "trace_distance.csv", csv.str());
  return StageRecord{"eval-separability", {"trace_distance.csv"}};
}

StageRecord run_train_pqc(const ExperimentConfig& cfg, const std::string& mode,
                          const fs::path& nqe_params,
                          const fs::path& train_dataset) {
  cfg.validate();
  check_mode(mode);
  fs::create_directories(cfg.output_dir);
  const Dataset train = load_dataset(train_dataset);

  std::optional<MlpParams> params;
  if (mode == "nqe") params = load_params_checked(nqe_params);
  const EmbeddedDataset embedded =
      embed_dataset(params ? &*params : nullptr, train, cfg.feature_map);

  PqcTrainConfig train_cfg;
  train_cfg.iterations = cfg.pqc_iterations;
  train_cfg.batch_size = cfg.pqc_batch_size;
  train_cfg.learning_rate = cfg.pqc_learning_rate;
  train_cfg.estimator = cfg.estimator;
  train_cfg.seed = derive_seed(cfg.seed, "pqc/" + mode);
  log::info("train-pqc: mode=" + mode + ", " +
            std::to_string(embedded.size()) + " samples");

  const PqcTrainResult result = train_pqc(embedded, train_cfg);

  json theta_json;
  theta_json["schema_version"] = 1;
  theta_json["theta"] = result.params.theta;
  theta_json["embedding_mode"] = mode;
  theta_json["seed"] = cfg.seed;
  theta_json["config_digest"] = config_digest(cfg);
  write_text_file(cfg.output_dir / ("pqc_theta_" + mode + ".json"),
                  theta_json.dump(2) + "\n");

  std::ostringstream csv;
  csv << "# " << stamp_comment(cfg) << '\n';
  csv << "iteration,loss,embedding_mode\n";
  char buf[96];
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%s\n", i + 1,
                  result.loss_trace[i], mode.c_str());
    csv << buf;
  }
  write_text_file(cfg.output_dir / ("pqc_loss_" + mode + ".csv"), csv.str());

  return StageRecord{"train-pqc-" + mode,
                     {"pqc_theta_" + mode + ".json", "pqc_loss_" + mode + ".csv"}};
}

StageRecord run_classify(const ExperimentConfig& cfg, const std::string& mode,
                         const fs::path& theta_path, const fs::path& nqe_params,
                         const fs::path& dataset_path) {
  cfg.validate();
  check_mode(mode);
  fs::create_directories(cfg.output_dir);

  const PqcParams theta = load_theta(theta_path);
  const Dataset data = load_dataset(dataset_path);
  std::optional<MlpParams> params;
  if (mode == "nqe") params = load_params_checked(nqe_params);
  const EmbeddedDataset embedded =
      embed_dataset(params ? &*params : nullptr, data, cfg.feature_map);
  if (embedded.empty()) throw DomainError("classify: empty dataset");

  std::ostringstream csv;
  csv << "# " << stamp_comment(cfg) << '\n';
  csv << "index,f,predicted_label,true_label\n";
  char buf[96];
  std::size_t correct = 0;
  long tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    ClassifierOutput out;
    if (cfg.estimator.mode == EstimatorMode::sampled) {
      const std::uint64_t f_seed =
          derive_seed(derive_seed(cfg.seed, "classify/" + mode), i);
      out = classify_sampled(theta, embedded[i].state, cfg.estimator.shots,
                             f_seed);
    } else {
      out = classify(theta, embedded[i].state);
    }
    const int truth = embedded[i].label;
    if (out.predicted_label == truth) ++correct;
    if (truth == 1)
      (out.predicted_label == 1 ? tp : fn) += 1;
    else
      (out.predicted_label == -1 ? tn : fp) += 1;
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%d,%d\n", i, out.f,
                  out.predicted_label, truth);
    csv << buf;
  }
  write_text_file(cfg.output_dir / ("predictions_" + mode + ".csv"), csv.str());

  json summary;
  summary["schema_version"] = 1;
  summary["embedding_mode"] = mode;
  summary["seed"] = cfg.seed;
  summary["config_digest"] = config_digest(cfg);
  summary["total"] = embedded.size();
  summary["correct"] = correct;
  summary["accuracy"] =
      static_cast<double>(correct) / static_cast<double>(embedded.size());
  summary["confusion"] = {{"true_plus_pred_plus", tp},
                          {"true_plus_pred_minus", fn},
                          {"true_minus_pred_minus", tn},
                          {"true_minus_pred_plus", fp}};
  write_text_file(cfg.output_dir / ("summary_" + mode + ".json"),
                  summary.dump(2) + "\n");

  return StageRecord{"classify-" + mode,
                     {"predictions_" + mode + ".csv", "summary_" + mode + ".json"}};
}

std::vector<StageRecord> run_reproduce(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<StageRecord> stages;
  stages.push_back(run_prepare_data(cfg));

  const fs::path train = cfg.output_dir / "dataset_train.json";
  const fs::path test = cfg.output_dir / "dataset_test.json";
  const fs::path full = cfg.output_dir / "dataset.json";
  const fs::path params = cfg.output_dir / "nqe_params.json";

  stages.push_back(run_train_nqe(cfg, train));
  stages.push_back(run_eval_separability(cfg, cfg.output_dir / "checkpoints",
                                         train, test));
  stages.push_back(run_train_pqc(cfg, "nqe", params, train));
  stages.push_back(run_train_pqc(cfg, "zz", {}, train));
  stages.push_back(run_classify(cfg, "nqe",
                                cfg.output_dir / "pqc_theta_nqe.json", params,
                                full));
  stages.push_back(run_classify(cfg, "zz", cfg.output_dir / "pqc_theta_zz.json",
                                {}, full));

  const fs::path manifest = write_manifest(cfg, stages);
  stages.push_back(StageRecord{"manifest", {manifest.filename()}});
  return stages;
}

std::filesystem::path write_manifest(const ExperimentConfig& cfg,
                                     const std::vector<StageRecord>& stages) {
  json j;
  j["schema_version"] = 1;
  j["tool_version"] = kToolVersion;
  j["seed"] = cfg.seed;
  j["config_digest"] = config_digest(cfg);
  j["config"] = json::parse(config_to_json(cfg));
  j["created_utc"] = iso8601_now();
  json stage_list = json::array();
  for (const StageRecord& stage : stages) {
    json outputs = json::array();
    for (const fs::path& rel : stage.outputs) {
      const fs::path full = cfg.output_dir / rel;
      outputs.push_back({{"path", rel.generic_string()},
                         {"sha256", file_sha256(full)},
                         {"bytes", fs::file_size(full)}});
    }
    stage_list.push_back({{"name", stage.name}, {"outputs", outputs}});
  }
  j["stages"] = stage_list;

  const fs::path path = cfg.output_dir / "manifest.json";
  write_text_file(path, j.dump(2) + "\n");
  return path;
}

void verify_manifest(const std::filesystem::path& manifest_path) {
  const json j = parse_json_file(manifest_path, "manifest");
  const fs::path base = manifest_path.parent_path();
  try {
    for (const auto& stage : j.at("stages")) {
      for (const auto& output : stage.at("outputs")) {
        const fs::path rel = output.at("path").get<std::string>();
        const std::string expected = output.at("sha256").get<std::string>();
        const std::string actual = file_sha256(base / rel);
        if (expected != actual)
          throw DomainError("manifest digest mismatch for " + rel.string());
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: bad schema: ") + e.what());
  }
}

}  // namespace nqe
