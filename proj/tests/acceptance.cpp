// Acceptance suite for the full protocol: handwritten-digit embedding trained
// through the one-clean-qubit probe estimator, separability diagnostics, and
// the downstream two-layer classifier. Each criterion prints one PASS/FAIL
// line; the process exit code is the number of failed criteria.
//
// The digit images come from the procedural generator in tests/support (28x28
// rings and strokes with randomized geometry and noise, packed as IDX). Set
// NQE_DQC1_MNIST_DIR to a directory holding original
// train-images-idx3-ubyte(.gz) / train-labels-idx1-ubyte(.gz) files to run
// the same criteria against real scans instead.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nqe/dqc1.hpp"
#include "nqe/errors.hpp"
#include "nqe/experiment.hpp"
#include "nqe/metrics.hpp"
#include "nqe/pqc.hpp"
#include "nqe/training.hpp"
#include "support/digit_images.hpp"
#include "support/oracles.hpp"

using namespace nqe;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool ok,
            const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof(buf), format, ap);
  va_end(ap);
  return buf;
}

// Minimal reader for the toolkit's own CSV outputs: '#' comments, one header
// row, comma-separated cells.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("acceptance: cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream f(path);
  nlohmann::json j;
  f >> j;
  return j;
}

struct DigitFiles {
  fs::path images;
  fs::path labels;
  std::string origin;
};

DigitFiles locate_digit_files(const fs::path& scratch) {
  if (const char* env = std::getenv("NQE_DQC1_MNIST_DIR")) {
    const fs::path dir(env);
    for (const char* img : {"train-images-idx3-ubyte", "train-images-idx3-ubyte.gz"})
      for (const char* lbl : {"train-labels-idx1-ubyte", "train-labels-idx1-ubyte.gz"})
        if (fs::exists(dir / img) && fs::exists(dir / lbl))
          return {dir / img, dir / lbl, "external digit scans"};
    std::fprintf(stderr,
                 "NQE_DQC1_MNIST_DIR is set but the IDX files were not found; "
                 "falling back to generated digits\n");
  }
  const auto images = nqe::test::generate_digit_images(700, 0xD16175);
  const DigitFiles files{scratch / "digits-images.idx.gz",
                         scratch / "digits-labels.idx.gz", "generated digits"};
  nqe::test::write_idx_files(images, files.images, files.labels, /*gzip=*/true);
  return files;
}

ExperimentConfig digit_config(const fs::path& out, const DigitFiles& files) {
  ExperimentConfig cfg = default_config();
  cfg.output_dir = out;
  cfg.dataset.source = DatasetSpec::Source::idx;
  cfg.dataset.idx_images = files.images;
  cfg.dataset.idx_labels = files.labels;
  cfg.dataset.count = 500;
  return cfg;
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "nqe_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  const DigitFiles digit_files = locate_digit_files(scratch);
  const fs::path out = scratch / "out";
  const ExperimentConfig cfg = digit_config(out, digit_files);
  std::printf("dataset: %s\n", digit_files.origin.c_str());

  const auto pipeline_t0 = std::chrono::steady_clock::now();
  run_prepare_data(cfg);

  // --- criterion 1: embedding-loss convergence -----------------------------
  const auto nqe_t0 = std::chrono::steady_clock::now();
  run_train_nqe(cfg, out / "dataset_train.json");
  const double nqe_seconds = seconds_since(nqe_t0);
  {
    const auto rows = read_csv(out / "nqe_loss.csv");
    const double first = std::stod(rows.front()[1]);
    const double last = std::stod(rows.back()[1]);
    const bool ok = rows.size() == static_cast<std::size_t>(cfg.nqe_iterations) &&
                    last < 0.05 && last < 0.1 * first && nqe_seconds < 60.0;
    report(1, "embedding loss converges",
           ok,
           fmt("loss/pair %.4g -> %.4g, ratio %.3g, %.1f s", first, last,
               last / first, nqe_seconds));
  }

  // --- criterion 2: trace-distance growth ----------------------------------
  run_eval_separability(cfg, out / "checkpoints", out / "dataset_train.json",
                        out / "dataset_test.json");
  {
    std::map<std::string, std::pair<double, double>> first_last;
    for (const auto& row : read_csv(out / "trace_distance.csv")) {
      const std::string& split = row[3];
      const int iteration = std::stoi(row[0]);
      const double mean = std::stod(row[1]);
      if (iteration == 0) first_last[split].first = mean;
      if (iteration == cfg.nqe_iterations) first_last[split].second = mean;
    }
    bool ok = first_last.size() == 2;
    std::string detail;
    for (const auto& [split, pair] : first_last) {
      ok = ok && pair.second >= 0.85 && pair.second > pair.first;
      detail += fmt("%s %.3f -> %.3f  ", split.c_str(), pair.first, pair.second);
    }
    report(2, "trace distance grows to >= 0.85 on both splits", ok, detail);
  }

  // --- criterion 3: classification gap on all 500 images -------------------
  run_train_pqc(cfg, "nqe", out / "nqe_params.json", out / "dataset_train.json");
  run_train_pqc(cfg, "zz", {}, out / "dataset_train.json");
  run_classify(cfg, "nqe", out / "pqc_theta_nqe.json", out / "nqe_params.json",
               out / "dataset.json");
  run_classify(cfg, "zz", out / "pqc_theta_zz.json", {}, out / "dataset.json");
  const double pipeline_seconds = seconds_since(pipeline_t0);
  {
    const double acc_nqe =
        read_json(out / "summary_nqe.json").at("accuracy").get<double>();
    const double acc_zz =
        read_json(out / "summary_zz.json").at("accuracy").get<double>();
    const bool ok = acc_nqe >= 0.95 && acc_zz <= 0.80 &&
                    (acc_nqe - acc_zz) >= 0.15 && pipeline_seconds < 300.0;
    report(3, "trained embedding beats the raw baseline on 500 images", ok,
           fmt("accuracy %.3f vs %.3f, gap %.3f, pipeline %.1f s", acc_nqe,
               acc_zz, acc_nqe - acc_zz, pipeline_seconds));
  }

  // Shared artifacts for the remaining criteria.
  const Dataset train_data = load_dataset(out / "dataset_train.json");
  const Dataset full_data = load_dataset(out / "dataset.json");
  const MlpParams trained = load_params(out / "nqe_params.json");
  const EmbeddedDataset train_nqe_states =
      embed_dataset(&trained, train_data, cfg.feature_map);
  const EmbeddedDataset train_zz_states =
      embed_dataset(nullptr, train_data, cfg.feature_map);
  const EmbeddedDataset full_nqe_states =
      embed_dataset(&trained, full_data, cfg.feature_map);
  const EmbeddedDataset full_zz_states =
      embed_dataset(nullptr, full_data, cfg.feature_map);

  // --- criterion 4: classifier-loss ordering over a 5-seed sweep -----------
  {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      PqcTrainConfig sweep;
      sweep.iterations = cfg.pqc_iterations;
      sweep.batch_size = cfg.pqc_batch_size;
      sweep.learning_rate = cfg.pqc_learning_rate;
      sweep.seed = seed;
      const PqcParams theta_nqe = train_pqc(train_nqe_states, sweep).params;
      const PqcParams theta_zz = train_pqc(train_zz_states, sweep).params;
      const double loss_nqe = pqc_loss(theta_nqe, train_nqe_states);
      const double loss_zz = pqc_loss(theta_zz, train_zz_states);
      ok = ok && loss_nqe < 0.1 && loss_zz > loss_nqe;
      detail += fmt("s%llu %.3f/%.3f ", static_cast<unsigned long long>(seed),
                    loss_nqe, loss_zz);
    }
    report(4, "classifier loss ordering holds at every seed", ok, detail);
  }

  // --- criterion 5: probe estimator correctness ----------------------------
  {
    Rng rng(0xABCD);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const FeatureAngles a(nqe::test::random_angles(5, rng));
      const FeatureAngles b(nqe::test::random_angles(5, rng));
      const double probe = dqc1_exact(cfg.feature_map, a, b).expectation_z;
      const double direct =
          hs_inner_exact(build_feature_map(cfg.feature_map, a),
                         build_feature_map(cfg.feature_map, b))
              .real();
      worst = std::max(worst, std::abs(probe - direct));
    }

    const ShotPlan plan = plan_shots(0.1, 0.05);
    int violations = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
      const FeatureAngles a(nqe::test::random_angles(5, rng));
      const FeatureAngles b(nqe::test::random_angles(5, rng));
      const double exact = dqc1_exact(cfg.feature_map, a, b).expectation_z;
      const double sampled =
          dqc1_sampled(cfg.feature_map, a, b, plan.shots,
                       derive_seed(0xFEED, static_cast<std::uint64_t>(t)))
              .expectation_z;
      if (std::abs(sampled - exact) > plan.epsilon) ++violations;
    }
    const double rate = static_cast<double>(violations) / trials;
    const bool ok = worst < 1e-10 && rate <= 0.05 + 0.03;
    report(5, "probe estimator exact and within the shot-budget guarantee", ok,
           fmt("max |probe - trace| %.2e, violation rate %.3f with %llu shots",
               worst, rate, static_cast<unsigned long long>(plan.shots)));
  }

  // --- criterion 6: gradient oracles ----------------------------------------
  {
    Rng rng(0x60D5);

    // Backpropagation against central finite differences (relative).
    double worst_mlp = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      MlpParams p = init_params({4, 6, 5}, 500 + trial);
      for (auto& layer : p.biases)
        for (double& bval : layer) bval = rng.uniform(-0.3, 0.3);
      std::vector<double> x(4), upstream(5);
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      for (double& v : upstream) v = rng.uniform(-1.0, 1.0);
      const EmbedderGradient g = backward(p, x, upstream);
      const double h = 1e-5;
      const auto probe_loss = [&](const MlpParams& q) {
        const FeatureAngles o = forward(q, x);
        double acc = 0.0;
        for (std::size_t i = 0; i < upstream.size(); ++i)
          acc += upstream[i] * o.values[i];
        return acc;
      };
      for (std::size_t l = 0; l < p.weights.size(); ++l)
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
          MlpParams q = p;
          q.weights[l][i] += h;
          const double up = probe_loss(q);
          q.weights[l][i] = p.weights[l][i] - h;
          const double down = probe_loss(q);
          const double fd = (up - down) / (2.0 * h);
          worst_mlp = std::max(worst_mlp, std::abs(g.weights[l][i] - fd) /
                                              std::max(std::abs(fd), 1e-3));
        }
    }

    // End-to-end loss gradient through angles and network (relative).
    double worst_e2e = 0.0;
    {
      const MlpParams p = init_params({5, 4, 5}, 321);
      PairBatch batch;
      batch.pairs.push_back({train_data.samples[0].features,
                             train_data.samples[1].features,
                             train_data.samples[0].label,
                             train_data.samples[1].label});
      batch.pairs.push_back({train_data.samples[2].features,
                             train_data.samples[3].features,
                             train_data.samples[2].label,
                             train_data.samples[3].label});
      NqeTrainConfig tcfg;
      tcfg.seed = 0;
      EmbedderGradient grad = EmbedderGradient::zeros_like(p);
      for (const TrainingPair& pair : batch.pairs) {
        const FeatureAngles phi1 = forward(p, pair.x_i);
        const FeatureAngles phi2 = forward(p, pair.x_j);
        const AngleGradientPair g =
            loss_grad_wrt_angles(cfg.feature_map, phi1, phi2, pair.y_i, pair.y_j);
        grad.accumulate(backward(p, pair.x_i, g.d_phi1));
        grad.accumulate(backward(p, pair.x_j, g.d_phi2));
      }
      const double h = 1e-5;
      for (std::size_t l = 0; l < p.weights.size(); ++l)
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
          MlpParams q = p;
          q.weights[l][i] += h;
          const double up = batch_loss(q, batch, cfg.feature_map, tcfg);
          q.weights[l][i] = p.weights[l][i] - h;
          const double down = batch_loss(q, batch, cfg.feature_map, tcfg);
          const double fd = (up - down) / (2.0 * h);
          worst_e2e = std::max(worst_e2e, std::abs(grad.weights[l][i] - fd) /
                                              std::max(std::abs(fd), 1e-3));
        }
    }

    // Parameter-shift rule against finite differences (absolute).
    double worst_shift = 0.0;
    {
      EmbeddedDataset batch(train_nqe_states.begin(),
                            train_nqe_states.begin() + 6);
      PqcParams p;
      for (double& t : p.theta) t = rng.uniform(-3.0, 3.0);
      const std::array<double, 4> g = parameter_shift_grad(p, batch);
      const double h = 1e-6;
      for (std::size_t k = 0; k < 4; ++k) {
        PqcParams q = p;
        q.theta[k] = p.theta[k] + h;
        const double up = pqc_loss(q, batch);
        q.theta[k] = p.theta[k] - h;
        const double down = pqc_loss(q, batch);
        worst_shift =
            std::max(worst_shift, std::abs(g[k] - (up - down) / (2.0 * h)));
      }
    }

    const bool ok = worst_mlp < 1e-5 && worst_e2e < 1e-4 && worst_shift < 1e-8;
    report(6, "all three gradient routes match finite differences", ok,
           fmt("backprop %.2e (rel), end-to-end %.2e (rel), shift %.2e (abs)",
               worst_mlp, worst_e2e, worst_shift));
  }

  // --- criterion 7: theory invariants ---------------------------------------
  {
    Rng rng(0x7E07);
    bool frobenius_ok = true;
    for (int t = 0; t < 30; ++t) {
      const FeatureAngles a(nqe::test::random_angles(5, rng));
      const FeatureAngles b(nqe::test::random_angles(5, rng));
      const ComplexMatrix v1 = build_feature_map(cfg.feature_map, a);
      const ComplexMatrix v2 = build_feature_map(cfg.feature_map, b);
      const double lhs = std::pow(frobenius_norm(sub(v1, v2)), 2);
      const double rhs = 16.0 - 16.0 * hs_inner_exact(v1, v2).real();
      frobenius_ok = frobenius_ok && std::abs(lhs - rhs) < 1e-9;
    }

    bool contract_ok = true;
    for (int t = 0; t < 10; ++t) {
      const DensityMatrix rho_a = nqe::test::random_density(3, rng);
      const DensityMatrix rho_b = nqe::test::random_density(3, rng);
      const double before = trace_distance(rho_a, rho_b);
      for (double lambda : {0.2, 0.7}) {
        const double after = trace_distance(apply_depolarizing({lambda}, rho_a),
                                            apply_depolarizing({lambda}, rho_b));
        contract_ok = contract_ok && after <= before + 1e-10;
        if (before > 1e-6) contract_ok = contract_ok && after < before;
      }
    }

    const PqcParams theta_nqe =
        [&] {
          PqcParams p;
          const auto j = read_json(out / "pqc_theta_nqe.json");
          const auto t = j.at("theta").get<std::vector<double>>();
          std::copy(t.begin(), t.end(), p.theta.begin());
          return p;
        }();
    const PqcParams theta_zz =
        [&] {
          PqcParams p;
          const auto j = read_json(out / "pqc_theta_zz.json");
          const auto t = j.at("theta").get<std::vector<double>>();
          std::copy(t.begin(), t.end(), p.theta.begin());
          return p;
        }();

    const double loss_nqe = pqc_loss(theta_nqe, full_nqe_states);
    const double bound_nqe =
        risk_lower_bound(build_ensembles(&trained, full_data, cfg.feature_map));
    const double loss_zz = pqc_loss(theta_zz, full_zz_states);
    const double bound_zz =
        risk_lower_bound(build_ensembles(nullptr, full_data, cfg.feature_map));
    const bool bound_ok = loss_nqe >= bound_nqe - 1e-9 && loss_zz >= bound_zz - 1e-9;

    const bool ok = frobenius_ok && contract_ok && bound_ok;
    report(7, "norm identity, contractivity and the risk bound hold", ok,
           fmt("loss/bound: trained %.4f/%.4f, raw %.4f/%.4f", loss_nqe,
               bound_nqe, loss_zz, bound_zz));
  }

  // --- criterion 8: byte-identical reproduction ----------------------------
  {
    ExperimentConfig repro = default_config();
    repro.dataset.n_per_class = 60;
    repro.nqe_iterations = 6;
    repro.pqc_iterations = 10;
    repro.eval_pairs = 10;
    repro.seed = 424242;

    const fs::path dir_a = scratch / "repro_a";
    const fs::path dir_b = scratch / "repro_b";
    repro.output_dir = dir_a;
    run_reproduce(repro);
    repro.output_dir = dir_b;
    run_reproduce(repro);

    bool ok = true;
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().filename() == "manifest.json") continue;  // wall times
      const fs::path rel = fs::relative(entry.path(), dir_a);
      ok = ok && fs::exists(dir_b / rel) &&
           file_sha256(dir_a / rel) == file_sha256(dir_b / rel);
      ++compared;
    }
    ok = ok && compared > 10;
    report(8, "rerun with the same seed is byte-identical", ok,
           fmt("%zu files compared", compared));
  }

  std::printf("%d of 8 criteria passed\n", 8 - g_failures);
  return g_failures;
}
