#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nqe/feature_map.hpp"

namespace nqe {

// Fully-connected network mapping a feature vector to feature-map angles.
// weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l]); biases[l] has
// layer_sizes[l+1] entries. Hidden layers apply tanh; the output layer
// applies pi * tanh, squashing every angle into (-pi, pi) so the 2pi-periodic
// feature map never aliases.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  void validate() const;
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

// Partials of a scalar loss, shape-congruent with MlpParams.
struct EmbedderGradient {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static EmbedderGradient zeros_like(const MlpParams& params);
  void accumulate(const EmbedderGradient& other);
  double max_abs() const;
};

// Weight initialization bound: kInitWeightScale / sqrt(fan_in). The scale is
// deliberately small so the freshly initialized embedder maps every input to
// nearly the same state: training then only has to pull the classes apart,
// which a 15-iteration budget can do, instead of first having to re-tighten
// scattered clusters.
inline constexpr double kInitWeightScale = 0.15;

// Weights ~ uniform(-b, +b) with b = kInitWeightScale / sqrt(fan_in), biases
// zero. Deterministic per seed.
MlpParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed);

FeatureAngles forward(const MlpParams& params, std::span<const double> x);

// Exact chain-rule partials of the loss whose angle-gradient is `upstream`.
// When frozen_layers is given (one flag per weight layer), gradients of
// frozen layers are exactly zero; the backward pass still propagates
// through them.
EmbedderGradient backward(const MlpParams& params, std::span<const double> x,
                          std::span<const double> upstream,
                          const std::vector<bool>* frozen_layers = nullptr);

// Lossless JSON round-trip of the parameters (full double precision).
std::string params_to_json(const MlpParams& params);
MlpParams params_from_json(const std::string& text);
void save_params(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_params(const std::filesystem::path& path);

}  // namespace nqe
