// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "splicedet/detect/detect.hpp"
#include "splicedet/morph/morph.hpp"
#include "splicedet/vit/config.hpp"

namespace splicedet::harness {

// Flat dotted-key text config. Unknown keys are hard errors; serialization is
// canonical (sorted keys) so parse → serialize → parse is the identity.
struct PipelineConfig {
  vit::ViTConfig vit;

  std::uint64_t train_steps = 500;
  std::uint64_t train_batch = 16;
  double train_lr = 1e-3;
  std::optional<std::uint64_t> train_seed;  // required before anything random

  std::string threshold_policy = "quantile";
  double threshold_value = 0.99;

  std::uint64_t tiling_stride = 128;

  std::uint64_t post_closing = 3;  // closing element side
  bool post_fill_holes = true;
  std::string post_schedule = "1:2,1:3,2:4,3:6,5:8";  // a:b pairs
  std::uint64_t post_max_passes = 0;                  // 0: schedule length

  std::string data_train_dir;

  void validate() const;             // throws UsageError
  std::uint64_t required_seed() const;
};

PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config_file(const std::string& path);
std::string serialize_config(const PipelineConfig& cfg);

// Environment overrides: key a.b.c reads SPLICEDET_A_B_C when set.
void apply_env_overrides(PipelineConfig& cfg);

morph::PostProcessConfig make_postprocess_config(const PipelineConfig& cfg);
detect::ThresholdPolicy make_threshold_policy(const PipelineConfig& cfg);

}  // namespace splicedet::harness
