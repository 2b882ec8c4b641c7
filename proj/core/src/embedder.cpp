#include "nqe/embedder.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "nqe/errors.hpp"
#include "nqe/rng.hpp"

namespace nqe {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_shapes(const std::vector<int>& layer_sizes,
                  const std::vector<std::vector<double>>& weights,
                  const std::vector<std::vector<double>>& biases) {
  if (layer_sizes.size() < 2)
    throw ShapeError("MlpParams: need at least input and output layers");
  for (int s : layer_sizes)
    if (s <= 0) throw ShapeError("MlpParams: non-positive layer size");
  const std::size_t n_layers = layer_sizes.size() - 1;
  if (weights.size() != n_layers || biases.size() != n_layers)
    throw ShapeError("MlpParams: layer count mismatch");
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(layer_sizes[l + 1]);
    if (weights[l].size() != in * out)
      throw ShapeError("MlpParams: weight shape mismatch in layer " +
                       std::to_string(l));
    if (biases[l].size() != out)
      throw ShapeError("MlpParams: bias shape mismatch in layer " +
                       std::to_string(l));
  }
}

}  // namespace

void MlpParams::validate() const { check_shapes(layer_sizes, weights, biases); }

EmbedderGradient EmbedderGradient::zeros_like(const MlpParams& params) {
  EmbedderGradient g;
  g.weights.reserve(params.weights.size());
  g.biases.reserve(params.biases.size());
  for (const auto& w : params.weights) g.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

void EmbedderGradient::accumulate(const EmbedderGradient& other) {
  if (weights.size() != other.weights.size())
    throw ShapeError("EmbedderGradient: layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].size() != other.weights[l].size() ||
        biases[l].size() != other.biases[l].size())
      throw ShapeError("EmbedderGradient: shape mismatch");
    for (std::size_t i = 0; i < weights[l].size(); ++i)
      weights[l][i] += other.weights[l][i];
    for (std::size_t i = 0; i < biases[l].size(); ++i)
      biases[l][i] += other.biases[l][i];
  }
}

double EmbedderGradient::max_abs() const {
  double worst = 0.0;
  for (const auto& w : weights)
    for (double v : w) worst = std::max(worst, std::abs(v));
  for (const auto& b : biases)
    for (double v : b) worst = std::max(worst, std::abs(v));
  return worst;
}

MlpParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  MlpParams params;
  params.layer_sizes = layer_sizes;
  if (layer_sizes.size() < 2)
    throw ShapeError("init_params: need at least input and output layers");
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(layer_sizes[l + 1]);
    if (layer_sizes[l] <= 0 || layer_sizes[l + 1] <= 0)
      throw ShapeError("init_params: non-positive layer size");
    const double bound = kInitWeightScale / std::sqrt(static_cast<double>(in));
    std::vector<double> w(in * out);
    for (double& v : w) v = rng.uniform(-bound, bound);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(out, 0.0);
  }
  return params;
}

namespace {

// Forward pass keeping post-activation values per layer; activations[0] = x.
std::vector<std::vector<double>> forward_cached(const MlpParams& params,
                                                std::span<const double> x) {
  params.validate();
  if (x.size() != static_cast<std::size_t>(params.input_size()))
    throw ShapeError("forward: input size " + std::to_string(x.size()) +
                     ", expected " + std::to_string(params.input_size()));
  std::vector<std::vector<double>> activations;
  activations.emplace_back(x.begin(), x.end());
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(params.layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(params.layer_sizes[l + 1]);
    const std::vector<double>& prev = activations.back();
    std::vector<double> next(out);
    for (std::size_t i = 0; i < out; ++i) {
      double z = params.biases[l][i];
      for (std::size_t j = 0; j < in; ++j)
        z += params.weights[l][i * in + j] * prev[j];
      next[i] = (l + 1 == n_layers) ? kPi * std::tanh(z) : std::tanh(z);
    }
    activations.push_back(std::move(next));
  }
  return activations;
}

}  // namespace

FeatureAngles forward(const MlpParams& params, std::span<const double> x) {
  auto activations = forward_cached(params, x);
  return FeatureAngles(std::move(activations.back()));
}

EmbedderGradient backward(const MlpParams& params, std::span<const double> x,
                          std::span<const double> upstream,
                          const std::vector<bool>* frozen_layers) {
  const auto activations = forward_cached(params, x);
  if (upstream.size() != static_cast<std::size_t>(params.output_size()))
    throw ShapeError("backward: upstream size mismatch");
  if (frozen_layers && frozen_layers->size() != params.weights.size())
    throw ShapeError("backward: frozen-layer mask size mismatch");

  EmbedderGradient grad = EmbedderGradient::zeros_like(params);
  const std::size_t n_layers = params.weights.size();

  // delta = dLoss/dz for the current layer's pre-activation z.
  std::vector<double> delta(upstream.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double a = activations.back()[i];          // a = pi * tanh(z)
    const double dadz = kPi - a * a / kPi;           // pi (1 - tanh^2)
    delta[i] = upstream[i] * dadz;
  }

  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = static_cast<std::size_t>(params.layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(params.layer_sizes[l + 1]);
    const std::vector<double>& a_prev = activations[l];

    const bool frozen = frozen_layers && (*frozen_layers)[l];
    if (!frozen) {
      for (std::size_t i = 0; i < out; ++i) {
        grad.biases[l][i] = delta[i];
        for (std::size_t j = 0; j < in; ++j)
          grad.weights[l][i * in + j] = delta[i] * a_prev[j];
      }
    }

    if (l == 0) break;
    // Propagate to the previous layer's pre-activation.
    std::vector<double> prev_delta(in, 0.0);
    for (std::size_t j = 0; j < in; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < out; ++i)
        acc += params.weights[l][i * in + j] * delta[i];
      const double a = activations[l][j];  // tanh activation of layer l
      prev_delta[j] = acc * (1.0 - a * a);
    }
    delta = std::move(prev_delta);
  }
  return grad;
}

std::string params_to_json(const MlpParams& params) {
  params.validate();
  nlohmann::json j;
  j["schema_version"] = 1;
  j["layer_sizes"] = params.layer_sizes;
  j["weights"] = params.weights;
  j["biases"] = params.biases;
  return j.dump(2);
}

MlpParams params_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("embedder params: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw FormatError("embedder params: unsupported schema_version");
    MlpParams params;
    params.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    params.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    params.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    params.validate();
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("embedder params: bad schema: ") + e.what());
  }
}

void save_params(const MlpParams& params, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << params_to_json(params) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

MlpParams load_params(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return params_from_json(text);
}

}  // namespace nqe
