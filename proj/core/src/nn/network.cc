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

#include "impactx/nn/network.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "impactx/digest.h"
#include "impactx/errors.h"

namespace impactx::nn {
namespace {

const char* KindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv3x3: return "conv3x3";
    case LayerKind::kMaxPool2: return "maxpool2";
    case LayerKind::kDense: return "dense";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kLeakyRelu: return "leaky_relu";
  }
  return "?";
}

void ConvForward(const float* in, const TensorShape& is, const float* w,
                 const float* b, float* out, std::size_t filters) {
  const std::size_t H = is.height, W = is.width, HW = H * W;
  for (std::size_t oc = 0; oc < filters; ++oc) {
    float* dst_plane = out + oc * HW;
    std::fill(dst_plane, dst_plane + HW, b[oc]);
    for (std::size_t ic = 0; ic < is.channels; ++ic) {
      const float* src_plane = in + ic * HW;
      const float* k = w + (oc * is.channels + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? H - 1 : H;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const float wv = k[ky * 3 + kx];
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? W - 1 : W;
          for (std::size_t y = y0; y < y1; ++y) {
            float* dst = dst_plane + y * W;
            const float* src = src_plane + (y + dy) * W + dx;
            for (std::size_t x = x0; x < x1; ++x) dst[x] += wv * src[x];
          }
        }
      }
    }
  }
}

void ConvBackward(const float* in, const TensorShape& is, const float* w,
                  const float* g, std::size_t filters, float* gw, float* gb,
                  float* gin) {
  const std::size_t H = is.height, W = is.width, HW = H * W;
  for (std::size_t oc = 0; oc < filters; ++oc) {
    const float* g_plane = g + oc * HW;
    float bsum = 0.0f;
    for (std::size_t i = 0; i < HW; ++i) bsum += g_plane[i];
    gb[oc] += bsum;
    for (std::size_t ic = 0; ic < is.channels; ++ic) {
      const float* src_plane = in + ic * HW;
      const float* k = w + (oc * is.channels + ic) * 9;
      float* gk = gw + (oc * is.channels + ic) * 9;
      float* gin_plane = gin ? gin + ic * HW : nullptr;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const std::size_t y0 = dy < 0 ? 1 : 0;
        const std::size_t y1 = dy > 0 ? H - 1 : H;
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const std::size_t x0 = dx < 0 ? 1 : 0;
          const std::size_t x1 = dx > 0 ? W - 1 : W;
          const float wv = k[ky * 3 + kx];
          float acc = 0.0f;
          for (std::size_t y = y0; y < y1; ++y) {
            const float* gr = g_plane + y * W;
            const float* src = src_plane + (y + dy) * W + dx;
            for (std::size_t x = x0; x < x1; ++x) acc += gr[x] * src[x];
            if (gin_plane) {
              float* dst = gin_plane + (y + dy) * W + dx;
              for (std::size_t x = x0; x < x1; ++x) dst[x] += wv * gr[x];
            }
          }
          gk[ky * 3 + kx] += acc;
        }
      }
    }
  }
}

}  // namespace

nlohmann::json LayerSpec::ToJson() const {
  nlohmann::json j = {{"type", KindName(kind)}};
  if (kind == LayerKind::kConv3x3) j["filters"] = units;
  if (kind == LayerKind::kDense) j["units"] = units;
  if (kind == LayerKind::kLeakyRelu) j["slope"] = slope;
  return j;
}

LayerSpec LayerSpec::FromJson(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "conv3x3") return Conv3x3(j.at("filters").get<std::size_t>());
  if (type == "maxpool2") return MaxPool2();
  if (type == "dense") return Dense(j.at("units").get<std::size_t>());
  if (type == "relu") return Relu();
  if (type == "leaky_relu") return LeakyRelu(j.at("slope").get<float>());
  throw FormatError("unknown layer type " + type);
}

Network::Network(TensorShape input, std::vector<LayerSpec> layers)
    : input_(input), specs_(std::move(layers)) {
  if (input_.numel() == 0) throw ConsistencyError("network input shape is empty");
  shapes_.push_back(input_);
  std::size_t offset = 0;
  for (const LayerSpec& spec : specs_) {
    const TensorShape in = shapes_.back();
    TensorShape out = in;
    std::size_t count = 0;
    switch (spec.kind) {
      case LayerKind::kConv3x3:
        out.channels = spec.units;
        count = spec.units * in.channels * 9 + spec.units;
        break;
      case LayerKind::kMaxPool2:
        if (in.height < 2 || in.width < 2) {
          throw ConsistencyError("max-pool input smaller than 2x2");
        }
        out.height = in.height / 2;
        out.width = in.width / 2;
        break;
      case LayerKind::kDense:
        out = {spec.units, 1, 1};
        count = spec.units * in.numel() + spec.units;
        break;
      case LayerKind::kRelu:
      case LayerKind::kLeakyRelu:
        break;
    }
    if (out.numel() == 0) throw ConsistencyError("layer with empty output");
    shapes_.push_back(out);
    offsets_.push_back(offset);
    counts_.push_back(count);
    offset += count;
  }
  params_.assign(offset, 0.0f);
}

std::string Network::Digest() const { return FloatDigest(params_); }

void Network::Initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::fill(params_.begin(), params_.end(), 0.0f);
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& spec = specs_[i];
    std::size_t fan_in = 0, weights = 0;
    if (spec.kind == LayerKind::kConv3x3) {
      fan_in = shapes_[i].channels * 9;
      weights = spec.units * fan_in;
    } else if (spec.kind == LayerKind::kDense) {
      fan_in = shapes_[i].numel();
      weights = spec.units * fan_in;
    } else {
      continue;
    }
    const float limit = std::sqrt(6.0f / static_cast<float>(fan_in));
    std::uniform_real_distribution<float> dist(-limit, limit);
    float* w = params_.data() + offsets_[i];
    for (std::size_t j = 0; j < weights; ++j) w[j] = dist(rng);
  }
}

void Network::Forward(std::span<const float> input, Activations& acts) const {
  if (input.size() != input_.numel()) {
    throw InputError("network input has " + std::to_string(input.size()) +
                     " values, expected " + std::to_string(input_.numel()));
  }
  acts.values.resize(specs_.size() + 1);
  acts.values[0].assign(input.begin(), input.end());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& spec = specs_[i];
    const TensorShape& is = shapes_[i];
    const TensorShape& os = shapes_[i + 1];
    const std::vector<float>& in = acts.values[i];
    std::vector<float>& out = acts.values[i + 1];
    out.resize(os.numel());
    const float* p = params_.data() + offsets_[i];
    switch (spec.kind) {
      case LayerKind::kConv3x3:
        ConvForward(in.data(), is, p, p + spec.units * is.channels * 9, out.data(),
                    spec.units);
        break;
      case LayerKind::kMaxPool2: {
        for (std::size_t c = 0; c < os.channels; ++c) {
          const float* src = in.data() + c * is.height * is.width;
          for (std::size_t y = 0; y < os.height; ++y) {
            for (std::size_t x = 0; x < os.width; ++x) {
              const float* r0 = src + (2 * y) * is.width + 2 * x;
              const float* r1 = r0 + is.width;
              out[(c * os.height + y) * os.width + x] =
                  std::max(std::max(r0[0], r0[1]), std::max(r1[0], r1[1]));
            }
          }
        }
        break;
      }
      case LayerKind::kDense: {
        const std::size_t n_in = is.numel();
        const float* b = p + spec.units * n_in;
        for (std::size_t o = 0; o < spec.units; ++o) {
          const float* w = p + o * n_in;
          float acc = 0.0f;
          for (std::size_t j = 0; j < n_in; ++j) acc += w[j] * in[j];
          out[o] = acc + b[o];
        }
        break;
      }
      case LayerKind::kRelu:
        for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[j] > 0.0f ? in[j] : 0.0f;
        break;
      case LayerKind::kLeakyRelu:
        for (std::size_t j = 0; j < in.size(); ++j) {
          out[j] = in[j] > 0.0f ? in[j] : spec.slope * in[j];
        }
        break;
    }
  }
}

std::vector<float> Network::Predict(std::span<const float> input) const {
  Activations acts;
  Forward(input, acts);
  return std::move(acts.values.back());
}

void Network::Backward(const Activations& acts, std::span<const float> grad_output,
                       std::span<float> param_grad,
                       std::span<float> input_grad) const {
  if (grad_output.size() != output_size()) throw InputError("grad_output size mismatch");
  if (param_grad.size() != params_.size()) throw InputError("param_grad size mismatch");
  if (!input_grad.empty() && input_grad.size() != input_size()) {
    throw InputError("input_grad size mismatch");
  }
  std::vector<float> g(grad_output.begin(), grad_output.end());
  std::vector<float> g_in;
  for (std::size_t li = specs_.size(); li-- > 0;) {
    const LayerSpec& spec = specs_[li];
    const TensorShape& is = shapes_[li];
    const TensorShape& os = shapes_[li + 1];
    const std::vector<float>& in = acts.values[li];
    const bool need_input_grad = li > 0 || !input_grad.empty();
    g_in.assign(is.numel(), 0.0f);
    const float* p = params_.data() + offsets_[li];
    float* gp = param_grad.data() + offsets_[li];
    switch (spec.kind) {
      case LayerKind::kConv3x3: {
        const std::size_t nw = spec.units * is.channels * 9;
        ConvBackward(in.data(), is, p, g.data(), spec.units, gp, gp + nw,
                     need_input_grad ? g_in.data() : nullptr);
        break;
      }
      case LayerKind::kMaxPool2: {
        for (std::size_t c = 0; c < os.channels; ++c) {
          const float* src = in.data() + c * is.height * is.width;
          float* dst = g_in.data() + c * is.height * is.width;
          for (std::size_t y = 0; y < os.height; ++y) {
            for (std::size_t x = 0; x < os.width; ++x) {
              const std::size_t base = (2 * y) * is.width + 2 * x;
              const std::size_t cand[4] = {base, base + 1, base + is.width,
                                           base + is.width + 1};
              std::size_t best = cand[0];
              for (int t = 1; t < 4; ++t) {
                if (src[cand[t]] > src[best]) best = cand[t];
              }
              dst[best] += g[(c * os.height + y) * os.width + x];
            }
          }
        }
        break;
      }
      case LayerKind::kDense: {
        const std::size_t n_in = is.numel();
        float* gb = gp + spec.units * n_in;
        for (std::size_t o = 0; o < spec.units; ++o) {
          const float go = g[o];
          gb[o] += go;
          if (go == 0.0f) continue;
          float* gw = gp + o * n_in;
          const float* w = p + o * n_in;
          for (std::size_t j = 0; j < n_in; ++j) gw[j] += go * in[j];
          if (need_input_grad) {
            for (std::size_t j = 0; j < n_in; ++j) g_in[j] += go * w[j];
          }
        }
        break;
      }
      case LayerKind::kRelu:
        for (std::size_t j = 0; j < in.size(); ++j) g_in[j] = in[j] > 0.0f ? g[j] : 0.0f;
        break;
      case LayerKind::kLeakyRelu:
        for (std::size_t j = 0; j < in.size(); ++j) {
          g_in[j] = in[j] > 0.0f ? g[j] : spec.slope * g[j];
        }
        break;
    }
    g.swap(g_in);
  }
  if (!input_grad.empty()) std::copy(g.begin(), g.end(), input_grad.begin());
}

nlohmann::json Network::Describe() const {
  auto layers = nlohmann::json::array();
  for (const auto& spec : specs_) layers.push_back(spec.ToJson());
  return {{"input", {input_.channels, input_.height, input_.width}},
          {"layers", layers},
          {"num_params", params_.size()}};
}

Network Network::FromDescription(const nlohmann::json& description) {
  const auto& in = description.at("input");
  TensorShape shape{in.at(0).get<std::size_t>(), in.at(1).get<std::size_t>(),
                    in.at(2).get<std::size_t>()};
  std::vector<LayerSpec> layers;
  for (const auto& l : description.at("layers")) layers.push_back(LayerSpec::FromJson(l));
  return Network(shape, std::move(layers));
}

}  // namespace impactx::nn
