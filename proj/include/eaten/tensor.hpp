#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eaten/errors.hpp"
#include "eaten/rng.hpp"

namespace eaten {

inline size_t shape_numel(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DimensionError("tensor extents must be positive");
    n *= static_cast<size_t>(d);
  }
  return n;
}

inline std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Dense row-major tensor of doubles with an optional gradient buffer.
// Gradients accumulate (+=); the caller zeroes them between optimizer steps.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until backward touches this tensor
  std::string name;          // set for parameters; used in diagnostics

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(shape_numel(shape), 0.0) {}
  Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != shape_numel(shape))
      throw DimensionError("data length " + std::to_string(data.size()) +
                           " does not match shape " + shape_str(shape));
  }

  size_t numel() const { return data.size(); }
  int rank() const { return static_cast<int>(shape.size()); }

  double& at(int i, int j) { return data[static_cast<size_t>(i) * shape[1] + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * shape[1] + j]; }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }

  void zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  }
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(std::vector<int> shape) {
  return std::make_shared<Tensor>(std::move(shape));
}

inline TensorPtr make_tensor(std::vector<int> shape, std::vector<double> data) {
  return std::make_shared<Tensor>(std::move(shape), std::move(data));
}

inline TensorPtr make_scalar(double v) { return make_tensor({1}, {v}); }

inline TensorPtr uniform_tensor(std::vector<int> shape, double lo, double hi, Rng& rng) {
  auto t = make_tensor(std::move(shape));
  for (auto& v : t->data) v = rng.uniform(lo, hi);
  return t;
}

inline void check_finite(const Tensor& t, const char* op) {
  for (double v : t.data) {
    if (!std::isfinite(v))
      throw NumericError(std::string(op) + ": non-finite value in output" +
                         (t.name.empty() ? "" : " of " + t.name));
  }
}

// Records backward closures in forward order and replays them reversed.
// Forward order is a valid topological order, so no graph traversal is needed
// and the replay is the same every run.
class Tape {
 public:
  void record(std::function<void()> fn) { steps_.push_back(std::move(fn)); }

  // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be a scalar.
  void backward(const TensorPtr& loss) {
    if (loss->numel() != 1)
      throw DimensionError("backward: loss must be scalar, got " + shape_str(loss->shape));
    loss->ensure_grad();
    loss->grad[0] += 1.0;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  }

  void clear() { steps_.clear(); }
  size_t size() const { return steps_.size(); }

 private:
  std::vector<std::function<void()>> steps_;
};

}  // namespace eaten
