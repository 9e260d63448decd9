// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "splicedet/image.hpp"
#include "splicedet/nn/adam.hpp"
#include "splicedet/nn/autograd.hpp"
#include "splicedet/rng.hpp"
#include "splicedet/vit/config.hpp"

namespace splicedet::vit {

struct EncoderLayerParams {
  nn::Var ln1_gamma, ln1_beta;
  nn::AttentionWeights attn;
  nn::Var ln2_gamma, ln2_beta;
  nn::Var mlp_w1, mlp_b1, mlp_w2, mlp_b2;
};

struct ModelParams {
  nn::Var patch_embed;  // [model_dim × patch_dim], bias-free
  nn::Var cls;          // [1 × model_dim]
  nn::Var pos;          // [seq_len × model_dim]
  std::vector<EncoderLayerParams> layers;
  nn::Var final_gamma, final_beta;
  nn::Var head_w1, head_b1, head_w2, head_b2;  // per-token reconstruction MLP

  std::vector<nn::Var> all() const;
  // Stable name → tensor enumeration, used by the checkpoint writer. Order is
  // fixed so freshly initialised models are byte-reproducible.
  std::vector<std::pair<std::string, nn::Var>> named() const;
};

ModelParams init_params(const ViTConfig& cfg, Rng& rng);

// Row p of the result is patch p (grid row-major), flattened y, x, channel.
nn::Tensor patchify(const Image& image, const ViTConfig& cfg);
Image unpatchify(const nn::Tensor& patches, const ViTConfig& cfg);

nn::Var embed_tokens(const nn::Var& patches, const ModelParams& params,
                     const ViTConfig& cfg);
nn::Var encode(const nn::Var& tokens, const ModelParams& params,
               const ViTConfig& cfg);
nn::Var reconstruct_patches(const nn::Var& encoded, const ModelParams& params,
                            const ViTConfig& cfg);
// patchify → embed → encode → drop cls → reconstruction head.
nn::Var forward_patches(const nn::Var& patches, const ModelParams& params,
                        const ViTConfig& cfg);

Image reconstruct_image(const Image& image, const ModelParams& params,
                        const ViTConfig& cfg);

// Mean smoothed-L1 over a batch of flattened-patch tensors.
nn::Var reconstruction_loss(const std::vector<nn::Tensor>& batch,
                            const ModelParams& params, const ViTConfig& cfg);

// One optimiser update; returns the loss before the update.
double train_step(const std::vector<nn::Tensor>& batch,
                  const ModelParams& params, nn::Adam& opt,
                  const ViTConfig& cfg);

}  // namespace splicedet::vit
