#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nqe {

// One 28x28 grayscale image with its digit label, as stored in the IDX
// container format.
struct RawImage {
  static constexpr int kSide = 28;
  static constexpr int kPixels = kSide * kSide;

  std::array<std::uint8_t, kPixels> pixels{};
  std::uint8_t label = 0;
};

// Fitted PCA projection: features = feature_scale * (basis (pixels/255 - mean)).
// Basis rows are orthonormal; feature_scale is the documented per-dimension
// standardization factor (1 radian per standard deviation) that lands raw
// projections inside [-pi, pi] for almost all training images.
struct PcaModel {
  std::vector<std::vector<double>> basis;  // k x kPixels
  std::vector<double> mean;                // kPixels
  std::vector<double> feature_scale;       // k

  std::size_t components() const { return basis.size(); }
};

struct Sample {
  std::vector<double> features;
  int label = 0;  // -1 or +1
};

struct Provenance {
  std::string source;
  std::uint64_t seed = 0;
  std::string description;
};

// Labeled feature vectors plus the preprocessing that produced them.
// Labels are +/-1; for digit data, digit 0 maps to -1 and digit 1 to +1.
struct Dataset {
  std::vector<Sample> samples;
  std::string split_tag = "all";  // all | train | test
  std::optional<PcaModel> pca;
  Provenance provenance;

  bool has_both_labels() const;
  std::size_t count_label(int label) const;
};

// --- IDX ingestion ----------------------------------------------------------

// Parses a pair of IDX files (raw or gzip-compressed, detected by content):
// big-endian magic 0x00000803 for images, 0x00000801 for labels, matching
// counts, 28x28 pixels. Throws FormatError with the failing byte offset.
std::vector<RawImage> parse_idx(const std::filesystem::path& image_path,
                                const std::filesystem::path& label_path);

// Same parser over in-memory buffers (exercised directly by tests).
std::vector<RawImage> parse_idx_buffers(const std::vector<std::uint8_t>& image_bytes,
                                        const std::vector<std::uint8_t>& label_bytes);

// Balanced-as-possible random selection of `count` images showing the two
// requested digits; class counts differ by at most one (any odd remainder
// goes to the first digit). Deterministic per seed.
std::vector<RawImage> select_binary_subset(const std::vector<RawImage>& images,
                                           std::pair<int, int> digits,
                                           std::size_t count, std::uint64_t seed);

// --- PCA ---------------------------------------------------------------------

// Top-k principal components of the mean-centered images (pixels scaled to
// [0,1]). Implemented by orthogonal (subspace) iteration on the covariance
// matrix, an equivalent reduced formulation of the covariance eigenproblem
// that only touches the k leading eigenpairs. Deterministic start and sign
// convention: the largest-magnitude component of each basis row is positive.
// feature_scale is initialized to all-ones; see fit_feature_scale.
PcaModel fit_pca(const std::vector<RawImage>& images, std::size_t k = 5);

// Sets feature_scale so each projected dimension has unit sample standard
// deviation over `images`, i.e. features are standardized then interpreted
// as radians.
void fit_feature_scale(PcaModel& model, const std::vector<RawImage>& images);

std::vector<double> project(const PcaModel& model, const RawImage& image);

// --- dataset assembly --------------------------------------------------------

Dataset build_dataset(const std::vector<RawImage>& images, const PcaModel& model,
                      Provenance provenance);

// Disjoint, label-stratified split; deterministic per seed.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed);

// Lossless JSON persistence (schema_version 1, full double precision).
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// Two unit-variance Gaussian blobs in 5-D whose means are `separation`
// apart along the first axis. Deterministic per seed.
Dataset synthetic_dataset(std::size_t n_per_class, double separation,
                          std::uint64_t seed);

// Plain-text import: one sample per line, "f1,f2,f3,f4,f5,label" with
// label -1 or +1. Lines starting with '#' are skipped.
Dataset import_csv(const std::filesystem::path& path);

}  // namespace nqe
