#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "eaten/tensor.hpp"

namespace eaten {

// Differentiable operations. Each op validates shapes, computes the forward
// value, and (when a tape is supplied) records a closure that accumulates
// gradients into its operands. Passing tape == nullptr gives a plain forward
// evaluation with no graph bookkeeping.

// ---------------------------------------------------------------------------
// matmul
// ---------------------------------------------------------------------------

inline TensorPtr matmul(const TensorPtr& a, const TensorPtr& b, Tape* tape) {
  if (a->rank() != 2 || b->rank() != 2)
    throw DimensionError("matmul: operands must be rank-2, got " + shape_str(a->shape) + " and " +
                         shape_str(b->shape));
  const int m = a->shape[0], k = a->shape[1], k2 = b->shape[0], n = b->shape[1];
  if (k != k2)
    throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a->shape) + " vs " +
                         shape_str(b->shape));
  auto out = make_tensor({m, n});
  const double* A = a->data.data();
  const double* B = b->data.data();
  double* C = out->data.data();
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* Bp = B + p * n;
      double* Ci = C + i * n;
      for (int j = 0; j < n; ++j) Ci[j] += aip * Bp[j];
    }
  }
  check_finite(*out, "matmul");
  if (tape) {
    tape->record([a, b, out, m, k, n] {
      if (out->grad.empty()) return;
      a->ensure_grad();
      b->ensure_grad();
      const double* G = out->grad.data();
      const double* A = a->data.data();
      const double* B = b->data.data();
      // dA += dC * B^T
      for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
          double s = 0.0;
          const double* Gi = G + i * n;
          const double* Bp = B + p * n;
          for (int j = 0; j < n; ++j) s += Gi[j] * Bp[j];
          a->grad[i * k + p] += s;
        }
      }
      // dB += A^T * dC
      for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
          const double aip = A[i * k + p];
          if (aip == 0.0) continue;
          const double* Gi = G + i * n;
          double* Bg = b->grad.data() + p * n;
          for (int j = 0; j < n; ++j) Bg[j] += aip * Gi[j];
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// conv2d: same-padding cross-correlation, HWC input, [kh kw cin cout] kernel
// ---------------------------------------------------------------------------

inline TensorPtr conv2d(const TensorPtr& input, const TensorPtr& kernel, int stride, Tape* tape) {
  if (input->rank() != 3 || kernel->rank() != 4)
    throw DimensionError("conv2d: expected input [h w c] and kernel [kh kw cin cout], got " +
                         shape_str(input->shape) + " and " + shape_str(kernel->shape));
  if (stride < 1) throw DimensionError("conv2d: stride must be >= 1");
  const int h = input->shape[0], w = input->shape[1], cin = input->shape[2];
  const int kh = kernel->shape[0], kw = kernel->shape[1];
  if (kernel->shape[2] != cin)
    throw DimensionError("conv2d: channel mismatch, input " + shape_str(input->shape) +
                         " vs kernel " + shape_str(kernel->shape));
  const int cout = kernel->shape[3];
  const int oh = (h + stride - 1) / stride;
  const int ow = (w + stride - 1) / stride;
  const int pad_h = std::max((oh - 1) * stride + kh - h, 0);
  const int pad_w = std::max((ow - 1) * stride + kw - w, 0);
  if (kh > h + pad_h || kw > w + pad_w)
    throw DimensionError("conv2d: kernel larger than padded input");
  const int top = pad_h / 2, left = pad_w / 2;

  auto out = make_tensor({oh, ow, cout});
  const double* in = input->data.data();
  const double* K = kernel->data.data();
  double* O = out->data.data();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      double* op = O + (static_cast<size_t>(oy) * ow + ox) * cout;
      for (int ky = 0; ky < kh; ++ky) {
        const int iy = oy * stride + ky - top;
        if (iy < 0 || iy >= h) continue;
        for (int kx = 0; kx < kw; ++kx) {
          const int ix = ox * stride + kx - left;
          if (ix < 0 || ix >= w) continue;
          const double* ip = in + (static_cast<size_t>(iy) * w + ix) * cin;
          const double* kp = K + (static_cast<size_t>(ky) * kw + kx) * cin * cout;
          for (int ic = 0; ic < cin; ++ic) {
            const double v = ip[ic];
            if (v == 0.0) continue;
            const double* kc = kp + static_cast<size_t>(ic) * cout;
            for (int oc = 0; oc < cout; ++oc) op[oc] += v * kc[oc];
          }
        }
      }
    }
  }
  check_finite(*out, "conv2d");
  if (tape) {
    tape->record([input, kernel, out, stride, h, w, cin, kh, kw, cout, oh, ow, top, left] {
      if (out->grad.empty()) return;
      input->ensure_grad();
      kernel->ensure_grad();
      const double* G = out->grad.data();
      const double* in = input->data.data();
      const double* K = kernel->data.data();
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          const double* gp = G + (static_cast<size_t>(oy) * ow + ox) * cout;
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = oy * stride + ky - top;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int ix = ox * stride + kx - left;
              if (ix < 0 || ix >= w) continue;
              const size_t ioff = (static_cast<size_t>(iy) * w + ix) * cin;
              const size_t koff = (static_cast<size_t>(ky) * kw + kx) * cin * cout;
              for (int ic = 0; ic < cin; ++ic) {
                const double* kc = K + koff + static_cast<size_t>(ic) * cout;
                double* kg = kernel->grad.data() + koff + static_cast<size_t>(ic) * cout;
                const double v = in[ioff + ic];
                double s = 0.0;
                for (int oc = 0; oc < cout; ++oc) {
                  s += gp[oc] * kc[oc];
                  kg[oc] += v * gp[oc];
                }
                input->grad[ioff + ic] += s;
              }
            }
          }
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// normalizations
// ---------------------------------------------------------------------------

// Softmax over the flattened entries; max-subtracted for stability.
inline TensorPtr softmax(const TensorPtr& x, Tape* tape) {
  const size_t n = x->numel();
  if (n == 0) throw DimensionError("softmax: empty input");
  auto out = make_tensor(x->shape);
  double mx = x->data[0];
  for (double v : x->data) mx = std::max(mx, v);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out->data[i] = std::exp(x->data[i] - mx);
    sum += out->data[i];
  }
  for (size_t i = 0; i < n; ++i) out->data[i] /= sum;
  check_finite(*out, "softmax");
  if (tape) {
    tape->record([x, out, n] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      double dot = 0.0;
      for (size_t i = 0; i < n; ++i) dot += out->grad[i] * out->data[i];
      for (size_t i = 0; i < n; ++i) x->grad[i] += out->data[i] * (out->grad[i] - dot);
    });
  }
  return out;
}

// Literal score normalization w_i = e_i / sum(e): no exponential, so the
// denominator can approach zero; guarded rather than patched.
inline TensorPtr ratio_norm(const TensorPtr& x, Tape* tape) {
  const size_t n = x->numel();
  if (n == 0) throw DimensionError("ratio_norm: empty input");
  double sum = 0.0;
  for (double v : x->data) sum += v;
  if (std::abs(sum) < 1e-8)
    throw NumericError("ratio_norm: |sum of scores| < 1e-8, normalization ill-defined");
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < n; ++i) out->data[i] = x->data[i] / sum;
  check_finite(*out, "ratio_norm");
  if (tape) {
    tape->record([x, out, n, sum] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      double dot = 0.0;
      for (size_t i = 0; i < n; ++i) dot += out->grad[i] * out->data[i];
      for (size_t i = 0; i < n; ++i) x->grad[i] += (out->grad[i] - dot) / sum;
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

namespace detail {
inline void require_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
  if (a->shape != b->shape)
    throw DimensionError(std::string(op) + ": shape mismatch, " + shape_str(a->shape) + " vs " +
                         shape_str(b->shape));
}
}  // namespace detail

inline TensorPtr add(const TensorPtr& a, const TensorPtr& b, Tape* tape) {
  detail::require_same_shape(a, b, "add");
  auto out = make_tensor(a->shape);
  for (size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] + b->data[i];
  check_finite(*out, "add");
  if (tape) {
    tape->record([a, b, out] {
      if (out->grad.empty()) return;
      a->ensure_grad();
      b->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i) {
        a->grad[i] += out->grad[i];
        b->grad[i] += out->grad[i];
      }
    });
  }
  return out;
}

inline TensorPtr mul(const TensorPtr& a, const TensorPtr& b, Tape* tape) {
  detail::require_same_shape(a, b, "mul");
  auto out = make_tensor(a->shape);
  for (size_t i = 0; i < out->numel(); ++i) out->data[i] = a->data[i] * b->data[i];
  check_finite(*out, "mul");
  if (tape) {
    tape->record([a, b, out] {
      if (out->grad.empty()) return;
      a->ensure_grad();
      b->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i) {
        a->grad[i] += out->grad[i] * b->data[i];
        b->grad[i] += out->grad[i] * a->data[i];
      }
    });
  }
  return out;
}

inline TensorPtr tanh_op(const TensorPtr& x, Tape* tape) {
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < out->numel(); ++i) out->data[i] = std::tanh(x->data[i]);
  check_finite(*out, "tanh");
  if (tape) {
    tape->record([x, out] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i)
        x->grad[i] += out->grad[i] * (1.0 - out->data[i] * out->data[i]);
    });
  }
  return out;
}

inline TensorPtr sigmoid_op(const TensorPtr& x, Tape* tape) {
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < out->numel(); ++i) out->data[i] = 1.0 / (1.0 + std::exp(-x->data[i]));
  check_finite(*out, "sigmoid");
  if (tape) {
    tape->record([x, out] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i)
        x->grad[i] += out->grad[i] * out->data[i] * (1.0 - out->data[i]);
    });
  }
  return out;
}

inline TensorPtr relu_op(const TensorPtr& x, Tape* tape) {
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < out->numel(); ++i) out->data[i] = std::max(0.0, x->data[i]);
  check_finite(*out, "relu");
  if (tape) {
    tape->record([x, out] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i)
        if (x->data[i] > 0.0) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

// Elementwise clamp; gradient passes only through the interior.
inline TensorPtr clip_op(const TensorPtr& x, double lo, double hi, Tape* tape) {
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < out->numel(); ++i) out->data[i] = std::clamp(x->data[i], lo, hi);
  check_finite(*out, "clip");
  if (tape) {
    tape->record([x, out, lo, hi] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i)
        if (x->data[i] > lo && x->data[i] < hi) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// structural ops
// ---------------------------------------------------------------------------

inline TensorPtr reshape(const TensorPtr& x, std::vector<int> new_shape, Tape* tape) {
  if (shape_numel(new_shape) != x->numel())
    throw DimensionError("reshape: cannot view " + shape_str(x->shape) + " as " +
                         shape_str(new_shape));
  auto out = make_tensor(std::move(new_shape), x->data);
  if (tape) {
    tape->record([x, out] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      for (size_t i = 0; i < out->numel(); ++i) x->grad[i] += out->grad[i];
    });
  }
  return out;
}

// Adds a [1 x c] row vector to every row of a [r x c] matrix.
inline TensorPtr add_rowvec(const TensorPtr& m, const TensorPtr& v, Tape* tape) {
  if (m->rank() != 2 || v->rank() != 2 || v->shape[0] != 1 || v->shape[1] != m->shape[1])
    throw DimensionError("add_rowvec: want [r x c] + [1 x c], got " + shape_str(m->shape) +
                         " and " + shape_str(v->shape));
  const int r = m->shape[0], c = m->shape[1];
  auto out = make_tensor(m->shape);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out->data[i * c + j] = m->data[i * c + j] + v->data[j];
  check_finite(*out, "add_rowvec");
  if (tape) {
    tape->record([m, v, out, r, c] {
      if (out->grad.empty()) return;
      m->ensure_grad();
      v->ensure_grad();
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
          m->grad[i * c + j] += out->grad[i * c + j];
          v->grad[j] += out->grad[i * c + j];
        }
    });
  }
  return out;
}

// Adds a per-channel bias [c] across a [h x w x c] map.
inline TensorPtr add_chanbias(const TensorPtr& x, const TensorPtr& b, Tape* tape) {
  if (x->rank() != 3 || b->rank() != 1 || b->shape[0] != x->shape[2])
    throw DimensionError("add_chanbias: want [h w c] + [c], got " + shape_str(x->shape) + " and " +
                         shape_str(b->shape));
  const int hw = x->shape[0] * x->shape[1], c = x->shape[2];
  auto out = make_tensor(x->shape);
  for (int i = 0; i < hw; ++i)
    for (int j = 0; j < c; ++j) out->data[i * c + j] = x->data[i * c + j] + b->data[j];
  check_finite(*out, "add_chanbias");
  if (tape) {
    tape->record([x, b, out, hw, c] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      b->ensure_grad();
      for (int i = 0; i < hw; ++i)
        for (int j = 0; j < c; ++j) {
          x->grad[i * c + j] += out->grad[i * c + j];
          b->grad[j] += out->grad[i * c + j];
        }
    });
  }
  return out;
}

// Row lookup into an embedding matrix: one-hot(index) * W without the zeros.
inline TensorPtr embed_row(const TensorPtr& w, int index, Tape* tape) {
  if (w->rank() != 2) throw DimensionError("embed_row: want rank-2 table");
  const int rows = w->shape[0], cols = w->shape[1];
  if (index < 0 || index >= rows)
    throw VocabError("embed_row: index " + std::to_string(index) + " out of range [0, " +
                     std::to_string(rows) + ")");
  auto out = make_tensor({1, cols});
  std::copy_n(w->data.begin() + static_cast<size_t>(index) * cols, cols, out->data.begin());
  check_finite(*out, "embed_row");
  if (tape) {
    tape->record([w, out, index, cols] {
      if (out->grad.empty()) return;
      w->ensure_grad();
      for (int j = 0; j < cols; ++j) w->grad[static_cast<size_t>(index) * cols + j] += out->grad[j];
    });
  }
  return out;
}

inline TensorPtr sum_all(const TensorPtr& x, Tape* tape) {
  double s = 0.0;
  for (double v : x->data) s += v;
  auto out = make_scalar(s);
  check_finite(*out, "sum_all");
  if (tape) {
    tape->record([x, out] {
      if (out->grad.empty()) return;
      x->ensure_grad();
      for (size_t i = 0; i < x->numel(); ++i) x->grad[i] += out->grad[0];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// finite differences
// ---------------------------------------------------------------------------

struct FdReport {
  std::vector<double> per_param;  // worst relative error per parameter tensor
  double worst = 0.0;
};

// Certifies analytic gradients of a scalar function against central
// differences. `f` must build (and return) the scalar on the given tape;
// it is called with nullptr for the perturbed evaluations. `f` has to be
// deterministic for the comparison to mean anything.
inline FdReport finite_diff_check(const std::function<TensorPtr(Tape*)>& f,
                                  const std::vector<TensorPtr>& params, double step) {
  if (step <= 0.0) throw NumericError("finite_diff_check: step must be positive");
  for (auto& p : params) p->zero_grad();
  Tape tape;
  auto loss = f(&tape);
  if (loss->numel() != 1)
    throw DimensionError("finite_diff_check: f must be scalar-valued");
  tape.backward(loss);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) {
    p->ensure_grad();
    analytic.push_back(p->grad);
  }

  FdReport report;
  report.per_param.assign(params.size(), 0.0);
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = *params[pi];
    for (size_t i = 0; i < p.numel(); ++i) {
      const double saved = p.data[i];
      p.data[i] = saved + step;
      const double fp = f(nullptr)->data[0];
      p.data[i] = saved - step;
      const double fm = f(nullptr)->data[0];
      p.data[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericError("finite_diff_check: non-finite evaluation while perturbing " +
                           (p.name.empty() ? ("param " + std::to_string(pi)) : p.name));
      const double numeric = (fp - fm) / (2.0 * step);
      const double a = analytic[pi][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      report.per_param[pi] = std::max(report.per_param[pi], rel);
    }
    report.worst = std::max(report.worst, report.per_param[pi]);
  }
  return report;
}

}  // namespace eaten
