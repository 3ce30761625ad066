#pragma once

#include <string>
#include <vector>

#include "eaten/ops.hpp"
#include "eaten/tensor.hpp"

namespace eaten {

struct ParamEntry {
  std::string name;
  TensorPtr tensor;
  bool decay = false;  // weight-decay group membership
  bool bias = false;   // biases init to zero (forget gate handled separately)
};

using ParamRegistry = std::vector<ParamEntry>;

// Strided conv stack: each stage is conv (same padding) + channel bias + relu.
// The last stage's channel count is the attention feature width C.
struct BackboneStage {
  int out_channels = 8;
  int stride = 2;
};

struct BackboneConfig {
  std::vector<BackboneStage> stages;
  int kernel = 3;

  int total_stride() const {
    int s = 1;
    for (const auto& st : stages) s *= st.stride;
    return s;
  }

  int out_channels() const {
    return stages.empty() ? 0 : stages.back().out_channels;
  }

  void validate() const {
    if (stages.empty()) throw ConfigError("backbone: need at least one stage");
    if (kernel < 1) throw ConfigError("backbone: kernel must be >= 1");
    for (const auto& st : stages) {
      if (st.out_channels < 1 || st.stride < 1)
        throw ConfigError("backbone: stage channels and stride must be >= 1");
    }
  }
};

struct BackboneParams {
  std::vector<TensorPtr> kernels;  // [k, k, cin, cout] per stage
  std::vector<TensorPtr> biases;   // [cout] per stage

  static BackboneParams create(const BackboneConfig& cfg, int in_channels = 1) {
    cfg.validate();
    BackboneParams p;
    int cin = in_channels;
    for (const auto& st : cfg.stages) {
      p.kernels.push_back(make_tensor({cfg.kernel, cfg.kernel, cin, st.out_channels}));
      p.biases.push_back(make_tensor({st.out_channels}));
      cin = st.out_channels;
    }
    return p;
  }

  void register_into(ParamRegistry& reg, const std::string& prefix) const {
    for (size_t i = 0; i < kernels.size(); ++i) {
      const std::string s = prefix + ".s" + std::to_string(i);
      reg.push_back({s + ".kernel", kernels[i], /*decay=*/true, /*bias=*/false});
      reg.push_back({s + ".bias", biases[i], /*decay=*/true, /*bias=*/true});
    }
  }
};

// Image [h x w x 1] -> feature map F [H x W x C], H = h / total_stride.
inline TensorPtr extract_features(const TensorPtr& image, const BackboneConfig& cfg,
                                  const BackboneParams& params, Tape* tape) {
  if (image->rank() != 3) throw DimensionError("extract_features: image must be [h w c]");
  const int stride = cfg.total_stride();
  if (image->shape[0] % stride != 0 || image->shape[1] % stride != 0)
    throw ConfigError("extract_features: image " + shape_str(image->shape) +
                      " not divisible by total stride " + std::to_string(stride));
  TensorPtr x = image;
  for (size_t i = 0; i < cfg.stages.size(); ++i) {
    x = conv2d(x, params.kernels[i], cfg.stages[i].stride, tape);
    x = add_chanbias(x, params.biases[i], tape);
    x = relu_op(x, tape);
  }
  return x;
}

// F [H x W x C] -> F_hat [H*W x C]. Row-major HWC means the flat layouts
// coincide, so this is a pure reshape: row k is F[k / W, k % W, :].
inline TensorPtr flatten_features(const TensorPtr& f, Tape* tape) {
  if (f->rank() != 3) throw DimensionError("flatten_features: want [H W C]");
  return reshape(f, {f->shape[0] * f->shape[1], f->shape[2]}, tape);
}

}  // namespace eaten
