// SPDX-License-Identifier: Apache-2.0
#include "splicedet/vit/model.hpp"

#include <stdexcept>

#include "splicedet/errors.hpp"

namespace splicedet::vit {

using nn::Tensor;
using nn::Var;

std::vector<Var> ModelParams::all() const {
  std::vector<Var> out;
  for (const auto& [name, v] : named()) {
    (void)name;
    out.push_back(v);
  }
  return out;
}

std::vector<std::pair<std::string, Var>> ModelParams::named() const {
  std::vector<std::pair<std::string, Var>> out;
  out.emplace_back("patch_embed.w", patch_embed);
  out.emplace_back("cls", cls);
  out.emplace_back("pos", pos);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string pre = "layers." + std::to_string(i) + ".";
    out.emplace_back(pre + "ln1.gamma", l.ln1_gamma);
    out.emplace_back(pre + "ln1.beta", l.ln1_beta);
    for (std::size_t h = 0; h < l.attn.wq.size(); ++h) {
      const std::string hs = std::to_string(h);
      out.emplace_back(pre + "attn.wq." + hs, l.attn.wq[h]);
      out.emplace_back(pre + "attn.wk." + hs, l.attn.wk[h]);
      out.emplace_back(pre + "attn.wv." + hs, l.attn.wv[h]);
    }
    out.emplace_back(pre + "attn.wo", l.attn.wo);
    out.emplace_back(pre + "attn.e", l.attn.e);
    out.emplace_back(pre + "attn.f", l.attn.f);
    out.emplace_back(pre + "ln2.gamma", l.ln2_gamma);
    out.emplace_back(pre + "ln2.beta", l.ln2_beta);
    out.emplace_back(pre + "mlp.w1", l.mlp_w1);
    out.emplace_back(pre + "mlp.b1", l.mlp_b1);
    out.emplace_back(pre + "mlp.w2", l.mlp_w2);
    out.emplace_back(pre + "mlp.b2", l.mlp_b2);
  }
  out.emplace_back("final_ln.gamma", final_gamma);
  out.emplace_back("final_ln.beta", final_beta);
  out.emplace_back("head.w1", head_w1);
  out.emplace_back("head.b1", head_b1);
  out.emplace_back("head.w2", head_w2);
  out.emplace_back("head.b2", head_b2);
  return out;
}

namespace {

Var trunc_normal_param(const std::vector<std::size_t>& shape, Rng& rng) {
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = rng.truncated_normal(0.02);
  }
  return nn::parameter(std::move(t));
}

Var const_param(const std::vector<std::size_t>& shape, double value) {
  return nn::parameter(Tensor(shape, value));
}

nn::AttentionConfig attention_config(const ViTConfig& cfg) {
  return {cfg.model_dim, cfg.heads, cfg.seq_len(), cfg.proj_dim};
}

}  // namespace

ModelParams init_params(const ViTConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t d = cfg.model_dim;
  const std::size_t n = cfg.seq_len();
  const std::size_t dh = cfg.head_dim();
  const std::size_t hidden = cfg.mlp_dim();
  ModelParams p;
  p.patch_embed = trunc_normal_param({d, cfg.patch_dim()}, rng);
  p.cls = trunc_normal_param({1, d}, rng);
  p.pos = trunc_normal_param({n, d}, rng);
  p.layers.resize(cfg.depth);
  for (auto& l : p.layers) {
    l.ln1_gamma = const_param({d}, 1.0);
    l.ln1_beta = const_param({d}, 0.0);
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      l.attn.wq.push_back(trunc_normal_param({dh, d}, rng));
      l.attn.wk.push_back(trunc_normal_param({dh, d}, rng));
      l.attn.wv.push_back(trunc_normal_param({dh, d}, rng));
    }
    l.attn.wo = trunc_normal_param({d, d}, rng);
    l.attn.e = trunc_normal_param({cfg.proj_dim, n}, rng);
    l.attn.f = trunc_normal_param({cfg.proj_dim, n}, rng);
    l.ln2_gamma = const_param({d}, 1.0);
    l.ln2_beta = const_param({d}, 0.0);
    l.mlp_w1 = trunc_normal_param({hidden, d}, rng);
    l.mlp_b1 = const_param({hidden}, 0.0);
    l.mlp_w2 = trunc_normal_param({d, hidden}, rng);
    l.mlp_b2 = const_param({d}, 0.0);
  }
  p.final_gamma = const_param({d}, 1.0);
  p.final_beta = const_param({d}, 0.0);
  p.head_w1 = trunc_normal_param({hidden, d}, rng);
  p.head_b1 = const_param({hidden}, 0.0);
  p.head_w2 = trunc_normal_param({cfg.patch_dim(), hidden}, rng);
  p.head_b2 = const_param({cfg.patch_dim()}, 0.0);
  return p;
}

Tensor patchify(const Image& image, const ViTConfig& cfg) {
  if (image.height != static_cast<int>(cfg.image_size) ||
      image.width != static_cast<int>(cfg.image_size) ||
      image.channels != static_cast<int>(cfg.channels)) {
    throw std::invalid_argument("patchify: image does not match model geometry");
  }
  const std::size_t g = cfg.grid();
  const std::size_t ps = cfg.patch_size;
  const std::size_t c = cfg.channels;
  Tensor out({cfg.patch_count(), cfg.patch_dim()});
  for (std::size_t gy = 0; gy < g; ++gy) {
    for (std::size_t gx = 0; gx < g; ++gx) {
      double* row = out.data() + (gy * g + gx) * cfg.patch_dim();
      std::size_t idx = 0;
      for (std::size_t py = 0; py < ps; ++py) {
        for (std::size_t px = 0; px < ps; ++px) {
          for (std::size_t ch = 0; ch < c; ++ch) {
            row[idx++] = image.at(static_cast<int>(gy * ps + py),
                                  static_cast<int>(gx * ps + px),
                                  static_cast<int>(ch));
          }
        }
      }
    }
  }
  return out;
}

Image unpatchify(const Tensor& patches, const ViTConfig& cfg) {
  if (patches.ndim() != 2 || patches.rows() != cfg.patch_count() ||
      patches.cols() != cfg.patch_dim()) {
    throw std::invalid_argument(
        "unpatchify: tensor does not match model geometry");
  }
  const std::size_t g = cfg.grid();
  const std::size_t ps = cfg.patch_size;
  const std::size_t c = cfg.channels;
  Image img(static_cast<int>(cfg.image_size), static_cast<int>(cfg.image_size),
            static_cast<int>(c));
  for (std::size_t gy = 0; gy < g; ++gy) {
    for (std::size_t gx = 0; gx < g; ++gx) {
      const double* row = patches.data() + (gy * g + gx) * cfg.patch_dim();
      std::size_t idx = 0;
      for (std::size_t py = 0; py < ps; ++py) {
        for (std::size_t px = 0; px < ps; ++px) {
          for (std::size_t ch = 0; ch < c; ++ch) {
            img.at(static_cast<int>(gy * ps + py),
                   static_cast<int>(gx * ps + px),
                   static_cast<int>(ch)) = row[idx++];
          }
        }
      }
    }
  }
  return img;
}

Var embed_tokens(const Var& patches, const ModelParams& params,
                 const ViTConfig& cfg) {
  Var tokens = nn::matmul_nt(patches, params.patch_embed);  // [P × D]
  Var seq = nn::concat_rows({params.cls, tokens});          // [n × D]
  (void)cfg;
  return nn::add(seq, params.pos);
}

nn::Var encode(const Var& tokens, const ModelParams& params,
               const ViTConfig& cfg) {
  const nn::AttentionConfig acfg = attention_config(cfg);
  Var x = tokens;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    try {
      Var normed = nn::layer_norm(x, l.ln1_gamma, l.ln1_beta);
      x = nn::add(x, nn::linformer_attention(normed, l.attn, acfg));
      Var normed2 = nn::layer_norm(x, l.ln2_gamma, l.ln2_beta);
      x = nn::add(x, nn::mlp_forward(normed2, l.mlp_w1, l.mlp_b1, l.mlp_w2,
                                     l.mlp_b2));
    } catch (const NumericError& e) {
      throw NumericError("encoder layer " + std::to_string(i) + ": " +
                         e.what());
    }
  }
  return nn::layer_norm(x, params.final_gamma, params.final_beta);
}

Var reconstruct_patches(const Var& encoded, const ModelParams& params,
                        const ViTConfig& cfg) {
  Var tokens = nn::slice_rows(encoded, 1, cfg.seq_len());  // drop cls
  Var raw = nn::mlp_forward(tokens, params.head_w1, params.head_b1,
                            params.head_w2, params.head_b2);
  return nn::logistic(raw);
}

Var forward_patches(const Var& patches, const ModelParams& params,
                    const ViTConfig& cfg) {
  return reconstruct_patches(encode(embed_tokens(patches, params, cfg), params, cfg),
                             params, cfg);
}

Image reconstruct_image(const Image& image, const ModelParams& params,
                        const ViTConfig& cfg) {
  Var patches = nn::leaf(patchify(image, cfg));
  Var recon = forward_patches(patches, params, cfg);
  return unpatchify(recon->value, cfg);
}

Var reconstruction_loss(const std::vector<Tensor>& batch,
                        const ModelParams& params, const ViTConfig& cfg) {
  if (batch.empty()) {
    throw std::invalid_argument("reconstruction_loss: empty batch");
  }
  Var total;
  for (const auto& patches : batch) {
    Var target = nn::leaf(patches);
    Var recon = forward_patches(target, params, cfg);
    Var loss = nn::smoothed_l1(recon, target);
    total = total ? nn::add(total, loss) : loss;
  }
  return nn::scale(total, 1.0 / static_cast<double>(batch.size()));
}

double train_step(const std::vector<Tensor>& batch, const ModelParams& params,
                  nn::Adam& opt, const ViTConfig& cfg) {
  Var loss = reconstruction_loss(batch, params, cfg);
  nn::backward(loss);
  const double value = loss->value[0];
  opt.step();
  return value;
}

}  // namespace splicedet::vit
