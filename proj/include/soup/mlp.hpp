#pragma once

// Small fully-connected classifier trained with minibatch SGD and explicit
// backpropagation. Parameters are stored layer by layer as
//   W_l (out x in, row-major) followed by b_l (out).
// Hidden layers use the configured activation; the output layer is linear
// and feeds a softmax cross-entropy loss.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "soup/model_store.hpp"

namespace soup {

enum class Activation { Tanh, Relu };

struct MlpSpec {
  std::vector<std::size_t> widths{2, 32, 32, 8};  // input, hidden..., classes
  Activation activation = Activation::Tanh;

  std::size_t input_dim() const { return widths.front(); }
  std::size_t n_classes() const { return widths.back(); }
  std::size_t parameter_count() const;
  void validate() const;
};

json to_json(const MlpSpec& spec);
MlpSpec mlp_spec_from_json(const json& j);

// Dense row-major points with integer labels in [0, n_classes).
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> point(std::size_t i) const { return {x.data() + i * dim, dim}; }
  void append(const Dataset& other);
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;  // shuffling order
};

json to_json(const TrainConfig& c);

// Glorot-uniform weights, zero biases.
WeightVector init_weights(const MlpSpec& spec, std::mt19937_64& rng);

std::vector<double> to_double(const WeightVector& w);
WeightVector to_weights(std::span<const double> params);

// Logits for one point.
void forward_logits(const MlpSpec& spec, std::span<const double> params,
                    std::span<const double> input, std::vector<double>& logits);

std::vector<int> predict(const MlpSpec& spec, std::span<const double> params, const Dataset& data);

// correct[i] = (argmax logits == label); ties go to the lowest class index.
BitVector correctness(const MlpSpec& spec, const WeightVector& weights, const Dataset& data);

// Mean softmax cross-entropy over `batch` (indices into data). When `grad`
// is non-empty it receives the gradient of that mean (overwritten).
double loss_and_gradient(const MlpSpec& spec, std::span<const double> params,
                         const Dataset& data, std::span<const std::size_t> batch,
                         std::span<double> grad);

double mean_loss(const MlpSpec& spec, std::span<const double> params, const Dataset& data);

// Minibatch SGD from `init`. Throws DataError if the loss becomes non-finite.
WeightVector train_mlp(const MlpSpec& spec, const WeightVector& init, const Dataset& data,
                       const TrainConfig& config);

}  // namespace soup
