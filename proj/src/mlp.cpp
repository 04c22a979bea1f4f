#include "soup/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "soup/kernels.hpp"

namespace soup {

std::size_t MlpSpec::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l + 1] * widths[l] + widths[l + 1];
  return n;
}

void MlpSpec::validate() const {
  if (widths.size() < 2) throw DataError("MLP needs at least an input and an output layer");
  for (auto w : widths) {
    if (w == 0) throw DataError("MLP layer width must be positive");
  }
  if (n_classes() < 2) throw DataError("MLP needs at least 2 classes");
}

json to_json(const MlpSpec& spec) {
  return {{"widths", spec.widths}, {"activation", spec.activation == Activation::Tanh ? "tanh" : "relu"}};
}

MlpSpec mlp_spec_from_json(const json& j) {
  MlpSpec s;
  if (j.contains("widths")) s.widths = j.at("widths").get<std::vector<std::size_t>>();
  const std::string act = j.value("activation", "tanh");
  if (act == "tanh") {
    s.activation = Activation::Tanh;
  } else if (act == "relu") {
    s.activation = Activation::Relu;
  } else {
    throw DataError("unknown activation '" + act + "'");
  }
  s.validate();
  return s;
}

void Dataset::append(const Dataset& other) {
  if (dim == 0) dim = other.dim;
  if (other.size() > 0 && other.dim != dim) throw std::invalid_argument("dataset dimension mismatch");
  x.insert(x.end(), other.x.begin(), other.x.end());
  y.insert(y.end(), other.y.begin(), other.y.end());
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs}, {"batch_size", c.batch_size}, {"seed", c.seed}};
}

WeightVector init_weights(const MlpSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  std::vector<float> w;
  w.reserve(spec.parameter_count());
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    const std::size_t in = spec.widths[l];
    const std::size_t out = spec.widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t k = 0; k < in * out; ++k) w.push_back(static_cast<float>(u(rng)));
    w.insert(w.end(), out, 0.0f);
  }
  return WeightVector(std::move(w));
}

std::vector<double> to_double(const WeightVector& w) {
  return {w.values().begin(), w.values().end()};
}

WeightVector to_weights(std::span<const double> params) {
  std::vector<float> out(params.size());
  std::transform(params.begin(), params.end(), out.begin(), [](double v) { return static_cast<float>(v); });
  return WeightVector(std::move(out));
}

namespace {

double activate(Activation a, double z) { return a == Activation::Tanh ? std::tanh(z) : std::max(0.0, z); }

// Derivative expressed through the activation output h.
double activate_grad(Activation a, double h) { return a == Activation::Tanh ? 1.0 - h * h : (h > 0.0 ? 1.0 : 0.0); }

// Per-layer activations for one point; acts[0] is the input.
void forward_all(const MlpSpec& spec, std::span<const double> params, std::span<const double> input,
                 std::vector<std::vector<double>>& acts) {
  const std::size_t n_layers = spec.widths.size() - 1;
  acts.resize(n_layers + 1);
  acts[0].assign(input.begin(), input.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = spec.widths[l];
    const std::size_t out = spec.widths[l + 1];
    const double* w = params.data() + offset;
    const double* b = w + in * out;
    auto& next = acts[l + 1];
    next.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      const double z = kernels::dot({w + o * in, in}, acts[l]) + b[o];
      next[o] = (l + 1 == n_layers) ? z : activate(spec.activation, z);
    }
    offset += in * out + out;
  }
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void forward_logits(const MlpSpec& spec, std::span<const double> params, std::span<const double> input,
                    std::vector<double>& logits) {
  std::vector<std::vector<double>> acts;
  forward_all(spec, params, input, acts);
  logits = std::move(acts.back());
}

std::vector<int> predict(const MlpSpec& spec, std::span<const double> params, const Dataset& data) {
  std::vector<int> out(data.size());
  std::vector<std::vector<double>> acts;
  for (std::size_t i = 0; i < data.size(); ++i) {
    forward_all(spec, params, data.point(i), acts);
    out[i] = static_cast<int>(argmax(acts.back()));
  }
  return out;
}

BitVector correctness(const MlpSpec& spec, const WeightVector& weights, const Dataset& data) {
  if (weights.size() != spec.parameter_count()) throw std::invalid_argument("weights do not match MLP spec");
  const auto params = to_double(weights);
  const auto pred = predict(spec, params, data);
  BitVector bits(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) bits.set(i, pred[i] == data.y[i]);
  return bits;
}

double loss_and_gradient(const MlpSpec& spec, std::span<const double> params, const Dataset& data,
                         std::span<const std::size_t> batch, std::span<double> grad) {
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n_layers = spec.widths.size() - 1;

  std::vector<std::size_t> offsets(n_layers);
  for (std::size_t l = 0, off = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += spec.widths[l + 1] * spec.widths[l] + spec.widths[l + 1];
  }

  std::vector<std::vector<double>> acts;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double total = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());

  for (std::size_t idx : batch) {
    forward_all(spec, params, data.point(idx), acts);
    const auto& logits = acts.back();
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z - max_logit);
    const auto label = static_cast<std::size_t>(data.y[idx]);
    total += std::log(denom) - (logits[label] - max_logit);
    if (!want_grad) continue;

    // dL/dz for softmax cross-entropy: p - onehot
    delta.resize(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) {
      delta[c] = (std::exp(logits[c] - max_logit) / denom - (c == label ? 1.0 : 0.0)) * scale;
    }
    for (std::size_t l = n_layers; l-- > 0;) {
      const std::size_t in = spec.widths[l];
      const std::size_t out = spec.widths[l + 1];
      double* gw = grad.data() + offsets[l];
      double* gb = gw + in * out;
      const double* w = params.data() + offsets[l];
      for (std::size_t o = 0; o < out; ++o) {
        kernels::axpy(delta[o], acts[l], {gw + o * in, in});
        gb[o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) kernels::axpy(delta[o], {w + o * in, in}, prev_delta);
      for (std::size_t i = 0; i < in; ++i) prev_delta[i] *= activate_grad(spec.activation, acts[l][i]);
      delta.swap(prev_delta);
    }
  }
  return total * scale;
}

double mean_loss(const MlpSpec& spec, std::span<const double> params, const Dataset& data) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_gradient(spec, params, data, all, {});
}

WeightVector train_mlp(const MlpSpec& spec, const WeightVector& init, const Dataset& data, const TrainConfig& config) {
  spec.validate();
  if (init.size() != spec.parameter_count()) {
    throw std::invalid_argument("init length " + std::to_string(init.size()) + " does not match MLP spec (" +
                                std::to_string(spec.parameter_count()) + ")");
  }
  if (data.size() == 0 || config.batch_size == 0) throw std::invalid_argument("train_mlp: empty data or batch");

  auto params = to_double(init);
  std::vector<double> grad(params.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const double loss = loss_and_gradient(spec, params, data, std::span(order).subspan(start, len), grad);
      if (!std::isfinite(loss)) {
        throw DataError("training diverged (non-finite loss) at epoch " + std::to_string(epoch) +
                        " with config " + to_json(config).dump());
      }
      kernels::axpy(-config.learning_rate, grad, params);
    }
  }
  // float storage can overflow where double did not
  for (double p : params) {
    if (!std::isfinite(static_cast<float>(p))) {
      throw DataError("training diverged (non-finite weights) with config " + to_json(config).dump());
    }
  }
  return to_weights(params);
}

}  // namespace soup
