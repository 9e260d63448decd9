// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "splicedet/nn/tensor.hpp"

namespace splicedet::nn {

struct Node;
using Var = std::shared_ptr<Node>;

/// One node of the recorded forward graph. `grad` always has the shape of
/// `value`; leaves created with needs_grad=true act as trainable parameters.
struct Node {
  Tensor value;
  Tensor grad;
  bool needs_grad = false;
  std::vector<Var> parents;
  std::function<void(Node&)> backprop;  // accumulates into parents' grads
};

/// Leaf node; `needs_grad` marks it as a parameter for backward().
Var leaf(Tensor value, bool needs_grad = false);
Var parameter(Tensor value);

// --- ops ------------------------------------------------------------------
// Every op validates shapes (std::invalid_argument on mismatch) and has an
// exact adjoint.

/// y = a · b for matrices [m×k]·[k×n].
Var matmul(const Var& a, const Var& b);
/// y = a · bᵀ for matrices [m×k]·[n×k]ᵀ.
Var matmul_nt(const Var& a, const Var& b);
/// Elementwise sum of same-shaped tensors.
Var add(const Var& a, const Var& b);
/// y[i,j] = x[i,j] + b[j] for x [n×d], b [d].
Var add_row_vector(const Var& x, const Var& b);
Var scale(const Var& x, double c);
/// Stack matrices with equal column counts on top of each other.
Var concat_rows(const std::vector<Var>& xs);
/// Rows [begin, end) of a matrix.
Var slice_rows(const Var& x, std::size_t begin, std::size_t end);
/// Concatenate matrices with equal row counts side by side.
Var concat_cols(const std::vector<Var>& xs);
/// Softmax along `axis`, max-subtracted for stability.
Var softmax(const Var& x, std::size_t axis);
/// Exact (erf-based) GELU.
Var gelu(const Var& x);
Var logistic(const Var& x);
/// Row-wise layer normalization with population variance:
/// y = gamma ⊙ (x − mean)/sqrt(var + eps) + beta.
Var layer_norm(const Var& x, const Var& gamma, const Var& beta,
               double eps = 1e-9);
/// y = x · Wᵀ + b for x [n×in], W [out×in], b [out].
Var linear(const Var& x, const Var& w, const Var& b);
/// Two linear layers with GELU between: W2·gelu(W1·x + b1) + b2 per row.
Var mlp_forward(const Var& x, const Var& w1, const Var& b1, const Var& w2,
                const Var& b2);
/// Mean over elements of ½d² for |d| < 1 and |d| − ½ otherwise, d = a − b.
/// Returns a scalar.
Var smoothed_l1(const Var& a, const Var& b);

// --- attention -------------------------------------------------------------

struct AttentionConfig {
  std::size_t model_dim = 0;
  std::size_t heads = 0;
  std::size_t seq_len = 0;
  std::size_t proj_dim = 0;  // k; key/value length after the E/F maps

  std::size_t head_dim() const { return model_dim / heads; }
  /// Throws UsageError on invalid combinations (heads must divide model_dim,
  /// 1 <= proj_dim <= seq_len).
  void validate() const;
};

struct AttentionWeights {
  std::vector<Var> wq, wk, wv;  // per head, each [head_dim × model_dim]
  Var wo;                       // [model_dim × model_dim]
  Var e, f;                     // shared length-reduction maps, [k × seq_len]
};

/// Multi-head attention with low-rank key/value length reduction. Per head:
/// A = softmax((x·Wqᵀ)(E·(x·Wkᵀ))ᵀ / sqrt(head_dim)); out = A·(F·(x·Wvᵀ));
/// heads concatenated, then output-projected. With proj_dim == seq_len and
/// E = F = identity this is exactly standard scaled dot-product attention.
Var linformer_attention(const Var& x, const AttentionWeights& w,
                        const AttentionConfig& cfg);

// --- backward ---------------------------------------------------------------

/// Reverse-mode sweep from a scalar loss; accumulates into the grad of every
/// node that needs it. Throws std::logic_error if no forward graph was
/// recorded (null var) and std::invalid_argument if the loss is not scalar.
void backward(const Var& loss);

void zero_grad(const std::vector<Var>& params);

}  // namespace splicedet::nn
