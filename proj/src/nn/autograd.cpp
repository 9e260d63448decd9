// SPDX-License-Identifier: Apache-2.0
#include "splicedet/nn/autograd.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "splicedet/errors.hpp"

namespace splicedet::nn {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// C[m×n] += A[m×p] · B[p×n]
void mm_acc(double* c, const double* a, const double* b, std::size_t m,
            std::size_t p, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * p;
    for (std::size_t k = 0; k < p; ++k) {
      const double av = arow[k];
      const double* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C[m×n] += A[m×p] · B[n×p]ᵀ
void mm_nt_acc(double* c, const double* a, const double* b, std::size_t m,
               std::size_t p, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * p;
    double* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * p;
      double acc = 0.0;
      for (std::size_t k = 0; k < p; ++k) acc += arow[k] * brow[k];
      crow[j] += acc;
    }
  }
}

// C[m×n] += A[p×m]ᵀ · B[p×n]
void mm_tn_acc(double* c, const double* a, const double* b, std::size_t m,
               std::size_t p, std::size_t n) {
  for (std::size_t k = 0; k < p; ++k) {
    const double* arow = a + k * m;
    const double* brow = b + k * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void require_matrix(const Var& v, const char* op) {
  if (v->value.ndim() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected a matrix, got " +
                                v->value.shape_str());
  }
}

Var make_node(const char* op, Tensor value, std::vector<Var> parents,
              std::function<void(Node&)> backprop) {
  if (!value.all_finite()) {
    throw NumericError(std::string(op) + " produced non-finite values");
  }
  auto n = std::make_shared<Node>();
  n->grad = Tensor(value.shape());
  n->value = std::move(value);
  for (const auto& p : parents) n->needs_grad = n->needs_grad || p->needs_grad;
  n->parents = std::move(parents);
  if (n->needs_grad) n->backprop = std::move(backprop);
  return n;
}

}  // namespace

Var leaf(Tensor value, bool needs_grad) {
  auto n = std::make_shared<Node>();
  n->grad = Tensor(value.shape());
  n->value = std::move(value);
  n->needs_grad = needs_grad;
  return n;
}

Var parameter(Tensor value) { return leaf(std::move(value), true); }

Var matmul(const Var& a, const Var& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a->value.rows(), p = a->value.cols();
  const std::size_t n = b->value.cols();
  if (b->value.rows() != p) {
    throw std::invalid_argument("matmul: inner dimensions disagree: " +
                                a->value.shape_str() + " x " +
                                b->value.shape_str());
  }
  Tensor out({m, n});
  mm_acc(out.data(), a->value.data(), b->value.data(), m, p, n);
  return make_node("matmul", std::move(out), {a, b}, [m, p, n](Node& node) {
    const Var& pa = node.parents[0];
    const Var& pb = node.parents[1];
    if (pa->needs_grad) {
      mm_nt_acc(pa->grad.data(), node.grad.data(), pb->value.data(), m, n, p);
    }
    if (pb->needs_grad) {
      mm_tn_acc(pb->grad.data(), pa->value.data(), node.grad.data(), p, m, n);
    }
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const std::size_t m = a->value.rows(), p = a->value.cols();
  const std::size_t n = b->value.rows();
  if (b->value.cols() != p) {
    throw std::invalid_argument("matmul_nt: inner dimensions disagree: " +
                                a->value.shape_str() + " x " +
                                b->value.shape_str() + "^T");
  }
  Tensor out({m, n});
  mm_nt_acc(out.data(), a->value.data(), b->value.data(), m, p, n);
  return make_node("matmul_nt", std::move(out), {a, b}, [m, p, n](Node& node) {
    const Var& pa = node.parents[0];
    const Var& pb = node.parents[1];
    if (pa->needs_grad) {
      mm_acc(pa->grad.data(), node.grad.data(), pb->value.data(), m, n, p);
    }
    if (pb->needs_grad) {
      mm_tn_acc(pb->grad.data(), node.grad.data(), pa->value.data(), n, m, p);
    }
  });
}

Var add(const Var& a, const Var& b) {
  if (!a->value.same_shape(b->value)) {
    throw std::invalid_argument("add: shape mismatch: " +
                                a->value.shape_str() + " vs " +
                                b->value.shape_str());
  }
  Tensor out(a->value.shape());
  const std::size_t sz = out.size();
  for (std::size_t i = 0; i < sz; ++i) out[i] = a->value[i] + b->value[i];
  return make_node("add", std::move(out), {a, b}, [sz](Node& node) {
    for (int side = 0; side < 2; ++side) {
      const Var& p = node.parents[side];
      if (!p->needs_grad) continue;
      for (std::size_t i = 0; i < sz; ++i) p->grad[i] += node.grad[i];
    }
  });
}

Var add_row_vector(const Var& x, const Var& b) {
  require_matrix(x, "add_row_vector");
  if (b->value.ndim() != 1 || b->value.size() != x->value.cols()) {
    throw std::invalid_argument("add_row_vector: bias shape " +
                                b->value.shape_str() + " does not match " +
                                x->value.shape_str());
  }
  const std::size_t n = x->value.rows(), d = x->value.cols();
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] = x->value[i * d + j] + b->value[j];
    }
  }
  return make_node("add_row_vector", std::move(out), {x, b}, [n, d](Node& node) {
    const Var& px = node.parents[0];
    const Var& pb = node.parents[1];
    if (px->needs_grad) {
      for (std::size_t i = 0; i < n * d; ++i) px->grad[i] += node.grad[i];
    }
    if (pb->needs_grad) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) pb->grad[j] += node.grad[i * d + j];
      }
    }
  });
}

Var scale(const Var& x, double c) {
  Tensor out(x->value.shape());
  const std::size_t sz = out.size();
  for (std::size_t i = 0; i < sz; ++i) out[i] = c * x->value[i];
  return make_node("scale", std::move(out), {x}, [c, sz](Node& node) {
    const Var& p = node.parents[0];
    if (!p->needs_grad) return;
    for (std::size_t i = 0; i < sz; ++i) p->grad[i] += c * node.grad[i];
  });
}

Var concat_rows(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat_rows: empty input");
  const std::size_t cols = xs[0]->value.cols();
  std::size_t rows = 0;
  for (const auto& x : xs) {
    require_matrix(x, "concat_rows");
    if (x->value.cols() != cols) {
      throw std::invalid_argument("concat_rows: column counts disagree");
    }
    rows += x->value.rows();
  }
  Tensor out({rows, cols});
  std::size_t r0 = 0;
  for (const auto& x : xs) {
    const std::size_t r = x->value.rows();
    for (std::size_t i = 0; i < r * cols; ++i) {
      out[r0 * cols + i] = x->value[i];
    }
    r0 += r;
  }
  return make_node("concat_rows", std::move(out), xs, [cols](Node& node) {
    std::size_t r0 = 0;
    for (const auto& p : node.parents) {
      const std::size_t r = p->value.rows();
      if (p->needs_grad) {
        for (std::size_t i = 0; i < r * cols; ++i) {
          p->grad[i] += node.grad[r0 * cols + i];
        }
      }
      r0 += r;
    }
  });
}

Var slice_rows(const Var& x, std::size_t begin, std::size_t end) {
  require_matrix(x, "slice_rows");
  const std::size_t rows = x->value.rows(), cols = x->value.cols();
  if (begin > end || end > rows) {
    throw std::invalid_argument("slice_rows: invalid range");
  }
  Tensor out({end - begin, cols});
  for (std::size_t i = 0; i < (end - begin) * cols; ++i) {
    out[i] = x->value[begin * cols + i];
  }
  return make_node("slice_rows", std::move(out), {x},
                   [begin, end, cols](Node& node) {
                     const Var& p = node.parents[0];
                     if (!p->needs_grad) return;
                     for (std::size_t i = 0; i < (end - begin) * cols; ++i) {
                       p->grad[begin * cols + i] += node.grad[i];
                     }
                   });
}

Var concat_cols(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat_cols: empty input");
  const std::size_t rows = xs[0]->value.rows();
  std::size_t cols = 0;
  for (const auto& x : xs) {
    require_matrix(x, "concat_cols");
    if (x->value.rows() != rows) {
      throw std::invalid_argument("concat_cols: row counts disagree");
    }
    cols += x->value.cols();
  }
  Tensor out({rows, cols});
  std::size_t c0 = 0;
  for (const auto& x : xs) {
    const std::size_t c = x->value.cols();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        out[i * cols + c0 + j] = x->value[i * c + j];
      }
    }
    c0 += c;
  }
  return make_node("concat_cols", std::move(out), xs, [rows, cols](Node& node) {
    std::size_t c0 = 0;
    for (const auto& p : node.parents) {
      const std::size_t c = p->value.cols();
      if (p->needs_grad) {
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < c; ++j) {
            p->grad[i * c + j] += node.grad[i * cols + c0 + j];
          }
        }
      }
      c0 += c;
    }
  });
}

Var softmax(const Var& x, std::size_t axis) {
  const auto& shape = x->value.shape();
  if (axis >= shape.size()) {
    throw std::invalid_argument("softmax: axis out of range");
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t n = shape[axis];
  Tensor out(shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      double mx = x->value[base];
      for (std::size_t i = 1; i < n; ++i) {
        mx = std::max(mx, x->value[base + i * inner]);
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(x->value[base + i * inner] - mx);
        out[base + i * inner] = e;
        sum += e;
      }
      for (std::size_t i = 0; i < n; ++i) out[base + i * inner] /= sum;
    }
  }
  return make_node("softmax", std::move(out), {x},
                   [outer, n, inner](Node& node) {
                     const Var& p = node.parents[0];
                     if (!p->needs_grad) return;
                     for (std::size_t o = 0; o < outer; ++o) {
                       for (std::size_t in = 0; in < inner; ++in) {
                         const std::size_t base = o * n * inner + in;
                         double dot = 0.0;
                         for (std::size_t i = 0; i < n; ++i) {
                           const std::size_t idx = base + i * inner;
                           dot += node.grad[idx] * node.value[idx];
                         }
                         for (std::size_t i = 0; i < n; ++i) {
                           const std::size_t idx = base + i * inner;
                           p->grad[idx] +=
                               node.value[idx] * (node.grad[idx] - dot);
                         }
                       }
                     }
                   });
}

Var gelu(const Var& x) {
  Tensor out(x->value.shape());
  const std::size_t sz = out.size();
  for (std::size_t i = 0; i < sz; ++i) {
    const double v = x->value[i];
    out[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  return make_node("gelu", std::move(out), {x}, [sz](Node& node) {
    const Var& p = node.parents[0];
    if (!p->needs_grad) return;
    for (std::size_t i = 0; i < sz; ++i) {
      const double v = p->value[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
      p->grad[i] += node.grad[i] * (cdf + v * pdf);
    }
  });
}

Var logistic(const Var& x) {
  Tensor out(x->value.shape());
  const std::size_t sz = out.size();
  for (std::size_t i = 0; i < sz; ++i) {
    const double v = x->value[i];
    if (v >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      out[i] = e / (1.0 + e);
    }
  }
  return make_node("logistic", std::move(out), {x}, [sz](Node& node) {
    const Var& p = node.parents[0];
    if (!p->needs_grad) return;
    for (std::size_t i = 0; i < sz; ++i) {
      const double y = node.value[i];
      p->grad[i] += node.grad[i] * y * (1.0 - y);
    }
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  require_matrix(x, "layer_norm");
  const std::size_t n = x->value.rows(), d = x->value.cols();
  if (gamma->value.ndim() != 1 || gamma->value.size() != d ||
      beta->value.ndim() != 1 || beta->value.size() != d) {
    throw std::invalid_argument("layer_norm: gamma/beta must have length " +
                                std::to_string(d));
  }
  if (d < 1 || eps <= 0.0) {
    throw std::invalid_argument("layer_norm: requires d >= 1 and eps > 0");
  }
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x->value.data() + i * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] =
          gamma->value[j] * ((row[j] - mean) * inv) + beta->value[j];
    }
  }
  return make_node("layer_norm", std::move(out), {x, gamma, beta},
                   [n, d, eps](Node& node) {
    const Var& px = node.parents[0];
    const Var& pg = node.parents[1];
    const Var& pb = node.parents[2];
    const double dd = static_cast<double>(d);
    std::vector<double> xhat(d), dxhat(d);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = px->value.data() + i * d;
      const double* dy = node.grad.data() + i * d;
      double mean = 0.0;
      for (std::size_t j = 0; j < d; ++j) mean += row[j];
      mean /= dd;
      double var = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double c = row[j] - mean;
        var += c * c;
      }
      var /= dd;
      const double inv = 1.0 / std::sqrt(var + eps);
      for (std::size_t j = 0; j < d; ++j) xhat[j] = (row[j] - mean) * inv;
      if (pg->needs_grad) {
        for (std::size_t j = 0; j < d; ++j) pg->grad[j] += dy[j] * xhat[j];
      }
      if (pb->needs_grad) {
        for (std::size_t j = 0; j < d; ++j) pb->grad[j] += dy[j];
      }
      if (!px->needs_grad) continue;
      for (std::size_t j = 0; j < d; ++j) dxhat[j] = dy[j] * pg->value[j];
      double dvar = 0.0, dxhat_sum = 0.0, centered_sum = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        dvar += dxhat[j] * (row[j] - mean);
        dxhat_sum += dxhat[j];
        centered_sum += row[j] - mean;
      }
      dvar *= -0.5 * inv * inv * inv;
      const double dmean =
          -inv * dxhat_sum + dvar * (-2.0 / dd) * centered_sum;
      for (std::size_t j = 0; j < d; ++j) {
        px->grad[i * d + j] += dxhat[j] * inv +
                               dvar * 2.0 * (row[j] - mean) / dd + dmean / dd;
      }
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  return add_row_vector(matmul_nt(x, w), b);
}

Var mlp_forward(const Var& x, const Var& w1, const Var& b1, const Var& w2,
                const Var& b2) {
  return linear(gelu(linear(x, w1, b1)), w2, b2);
}

Var smoothed_l1(const Var& a, const Var& b) {
  if (!a->value.same_shape(b->value)) {
    throw std::invalid_argument("smoothed_l1: shape mismatch: " +
                                a->value.shape_str() + " vs " +
                                b->value.shape_str());
  }
  const std::size_t sz = a->value.size();
  if (sz == 0) throw std::invalid_argument("smoothed_l1: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    const double d = a->value[i] - b->value[i];
    const double ad = std::abs(d);
    total += ad < 1.0 ? 0.5 * d * d : ad - 0.5;
  }
  Tensor out = Tensor::scalar(total / static_cast<double>(sz));
  return make_node("smoothed_l1", std::move(out), {a, b}, [sz](Node& node) {
    const Var& pa = node.parents[0];
    const Var& pb = node.parents[1];
    const double upstream = node.grad[0] / static_cast<double>(sz);
    for (std::size_t i = 0; i < sz; ++i) {
      const double d = pa->value[i] - pb->value[i];
      const double g =
          std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
      if (pa->needs_grad) pa->grad[i] += upstream * g;
      if (pb->needs_grad) pb->grad[i] -= upstream * g;
    }
  });
}

void AttentionConfig::validate() const {
  if (model_dim == 0 || heads == 0 || seq_len == 0) {
    throw UsageError("attention config: dimensions must be positive");
  }
  if (model_dim % heads != 0) {
    throw UsageError("attention config: heads must divide model_dim");
  }
  if (proj_dim < 1 || proj_dim > seq_len) {
    throw UsageError("attention config: proj_dim must be in [1, seq_len]");
  }
}

Var linformer_attention(const Var& x, const AttentionWeights& w,
                        const AttentionConfig& cfg) {
  cfg.validate();
  require_matrix(x, "linformer_attention");
  if (x->value.rows() != cfg.seq_len || x->value.cols() != cfg.model_dim) {
    throw std::invalid_argument(
        "linformer_attention: input shape " + x->value.shape_str() +
        " does not match config (seq_len " + std::to_string(cfg.seq_len) +
        ", model_dim " + std::to_string(cfg.model_dim) + ")");
  }
  if (w.wq.size() != cfg.heads || w.wk.size() != cfg.heads ||
      w.wv.size() != cfg.heads) {
    throw std::invalid_argument(
        "linformer_attention: per-head projection count mismatch");
  }
  const double inv_sqrt_dh =
      1.0 / std::sqrt(static_cast<double>(cfg.head_dim()));
  std::vector<Var> head_outs;
  head_outs.reserve(cfg.heads);
  for (std::size_t h = 0; h < cfg.heads; ++h) {
    Var q = matmul_nt(x, w.wq[h]);                 // [n × dh]
    Var k = matmul_nt(x, w.wk[h]);                 // [n × dh]
    Var v = matmul_nt(x, w.wv[h]);                 // [n × dh]
    Var ek = matmul(w.e, k);                       // [k × dh]
    Var fv = matmul(w.f, v);                       // [k × dh]
    Var attn = softmax(scale(matmul_nt(q, ek), inv_sqrt_dh), 1);
    head_outs.push_back(matmul(attn, fv));         // [n × dh]
  }
  return matmul_nt(concat_cols(head_outs), w.wo);
}

void backward(const Var& loss) {
  if (!loss) throw std::logic_error("backward: no forward graph recorded");
  if (loss->value.size() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar");
  }
  if (!loss->needs_grad) return;

  // Post-order over parent edges; reversed it yields every consumer before
  // the node it feeds, so grads are complete when a node's backprop runs.
  struct Frame {
    Node* node;
    std::size_t next;
  };
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<Frame> stack;
  stack.push_back({loss.get(), 0});
  visited.insert(loss.get());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.node->parents.size()) {
      Node* p = f.node->parents[f.next++].get();
      if (p->needs_grad && visited.insert(p).second) {
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  loss->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop) (*it)->backprop(**it);
  }
}

void zero_grad(const std::vector<Var>& params) {
  for (const auto& p : params) p->grad.zero();
}

}  // namespace splicedet::nn
