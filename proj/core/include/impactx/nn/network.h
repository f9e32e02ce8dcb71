/*
 * Copyright 2026 The impactx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IMPACTX_NN_NETWORK_H_
#define IMPACTX_NN_NETWORK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace impactx::nn {

// Activation tensor shape; dense outputs use (units, 1, 1).
struct TensorShape {
  std::size_t channels = 0;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t numel() const { return channels * height * width; }
  bool operator==(const TensorShape&) const = default;
};

enum class LayerKind { kConv3x3, kMaxPool2, kDense, kRelu, kLeakyRelu };

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t units = 0;  // conv filters or dense width
  float slope = 0.0f;     // leaky ReLU only

  static LayerSpec Conv3x3(std::size_t filters) { return {LayerKind::kConv3x3, filters, 0.0f}; }
  static LayerSpec MaxPool2() { return {LayerKind::kMaxPool2, 0, 0.0f}; }
  static LayerSpec Dense(std::size_t units) { return {LayerKind::kDense, units, 0.0f}; }
  static LayerSpec Relu() { return {LayerKind::kRelu, 0, 0.0f}; }
  static LayerSpec LeakyRelu(float slope) { return {LayerKind::kLeakyRelu, 0, slope}; }

  nlohmann::json ToJson() const;
  static LayerSpec FromJson(const nlohmann::json& j);
};

// Per-layer activations of one forward pass; values[0] is the input and
// values[i + 1] the output of layer i.
struct Activations {
  std::vector<std::vector<float>> values;
  std::span<const float> output() const { return values.back(); }
};

// A feed-forward stack with all parameters in one flat float vector, laid
// out in declaration order (per layer: weights, then biases). Convolutions
// are 3x3, stride 1, zero-padded to preserve spatial size. The forward and
// backward passes are const and safe to call concurrently.
class Network {
 public:
  Network() = default;
  Network(TensorShape input, std::vector<LayerSpec> layers);

  const TensorShape& input_shape() const { return input_; }
  const TensorShape& output_shape() const { return shapes_.back(); }
  std::size_t input_size() const { return input_.numel(); }
  std::size_t output_size() const { return shapes_.back().numel(); }
  std::size_t num_layers() const { return specs_.size(); }
  const LayerSpec& layer(std::size_t i) const { return specs_[i]; }
  // Offset and length of layer i's parameters inside params().
  std::size_t param_offset(std::size_t i) const { return offsets_[i]; }
  std::size_t param_count(std::size_t i) const { return counts_[i]; }
  // Output shape of layer i.
  const TensorShape& layer_output_shape(std::size_t i) const { return shapes_[i + 1]; }

  std::size_t num_params() const { return params_.size(); }
  std::span<float> params() { return params_; }
  std::span<const float> params() const { return params_; }
  std::string Digest() const;

  // He-uniform weights, zero biases.
  void Initialize(std::uint64_t seed);

  void Forward(std::span<const float> input, Activations& acts) const;
  std::vector<float> Predict(std::span<const float> input) const;

  // Accumulates (+=) parameter gradients into param_grad (size num_params())
  // and, when input_grad is non-empty, writes d(loss)/d(input) into it.
  void Backward(const Activations& acts, std::span<const float> grad_output,
                std::span<float> param_grad, std::span<float> input_grad) const;

  nlohmann::json Describe() const;
  // Rebuilds the architecture from Describe(); parameters are zero.
  static Network FromDescription(const nlohmann::json& description);

 private:
  TensorShape input_;
  std::vector<LayerSpec> specs_;
  std::vector<TensorShape> shapes_;  // shapes_[0] = input
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> counts_;
  std::vector<float> params_;
};

}  // namespace impactx::nn

#endif  // IMPACTX_NN_NETWORK_H_
