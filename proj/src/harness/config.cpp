// SPDX-License-Identifier: Apache-2.0
#include "splicedet/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "splicedet/errors.hpp"

namespace splicedet::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long r = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw UsageError("config: '" + key + "' wants a non-negative integer, got '" +
                     v + "'");
  }
}

double parse_f64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw UsageError("config: '" + key + "' wants a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw UsageError("config: '" + key + "' wants true or false, got '" + v +
                   "'");
}

// shortest decimal form that parses back to the same double
std::string format_f64(double v) {
  for (int prec = 1; prec <= 17; ++prec) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    if (std::stod(os.str()) == v) return os.str();
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct KeyDef {
  std::function<std::optional<std::string>(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

const std::map<std::string, KeyDef>& key_table() {
  static const std::map<std::string, KeyDef> table = [] {
    std::map<std::string, KeyDef> t;
    auto u64 = [&t](const std::string& key, std::uint64_t PipelineConfig::*f) {
      t[key] = {[f](const PipelineConfig& c) {
                  return std::optional<std::string>(std::to_string(c.*f));
                },
                [f, key](PipelineConfig& c, const std::string& v) {
                  c.*f = parse_u64(key, v);
                }};
    };
    auto vit_u64 = [&t](const std::string& key,
                        std::size_t vit::ViTConfig::*f) {
      t[key] = {[f](const PipelineConfig& c) {
                  return std::optional<std::string>(std::to_string(c.vit.*f));
                },
                [f, key](PipelineConfig& c, const std::string& v) {
                  c.vit.*f = static_cast<std::size_t>(parse_u64(key, v));
                }};
    };
    auto f64 = [&t](const std::string& key, double PipelineConfig::*f) {
      t[key] = {[f](const PipelineConfig& c) {
                  return std::optional<std::string>(format_f64(c.*f));
                },
                [f, key](PipelineConfig& c, const std::string& v) {
                  c.*f = parse_f64(key, v);
                }};
    };
    auto str = [&t](const std::string& key, std::string PipelineConfig::*f) {
      t[key] = {[f](const PipelineConfig& c) {
                  return std::optional<std::string>(c.*f);
                },
                [f](PipelineConfig& c, const std::string& v) { c.*f = v; }};
    };
    auto boolean = [&t](const std::string& key, bool PipelineConfig::*f) {
      t[key] = {[f](const PipelineConfig& c) {
                  return std::optional<std::string>(c.*f ? "true" : "false");
                },
                [f, key](PipelineConfig& c, const std::string& v) {
                  c.*f = parse_bool(key, v);
                }};
    };

    str("data.train_dir", &PipelineConfig::data_train_dir);
    u64("postprocess.closing", &PipelineConfig::post_closing);
    boolean("postprocess.fill_holes", &PipelineConfig::post_fill_holes);
    u64("postprocess.max_passes", &PipelineConfig::post_max_passes);
    str("postprocess.schedule", &PipelineConfig::post_schedule);
    str("threshold.policy", &PipelineConfig::threshold_policy);
    f64("threshold.value", &PipelineConfig::threshold_value);
    u64("tiling.stride", &PipelineConfig::tiling_stride);
    u64("train.batch", &PipelineConfig::train_batch);
    f64("train.lr", &PipelineConfig::train_lr);
    t["train.seed"] = {
        [](const PipelineConfig& c) -> std::optional<std::string> {
          if (!c.train_seed) return std::nullopt;
          return std::to_string(*c.train_seed);
        },
        [](PipelineConfig& c, const std::string& v) {
          c.train_seed = parse_u64("train.seed", v);
        }};
    u64("train.steps", &PipelineConfig::train_steps);
    vit_u64("vit.channels", &vit::ViTConfig::channels);
    vit_u64("vit.depth", &vit::ViTConfig::depth);
    vit_u64("vit.heads", &vit::ViTConfig::heads);
    vit_u64("vit.image_size", &vit::ViTConfig::image_size);
    vit_u64("vit.mlp_hidden", &vit::ViTConfig::mlp_hidden);
    vit_u64("vit.model_dim", &vit::ViTConfig::model_dim);
    vit_u64("vit.patch_size", &vit::ViTConfig::patch_size);
    vit_u64("vit.proj_dim", &vit::ViTConfig::proj_dim);
    return t;
  }();
  return table;
}

std::vector<morph::ErodeIsolatedSpec> parse_schedule(const std::string& text) {
  std::vector<morph::ErodeIsolatedSpec> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw UsageError("config: schedule entry '" + item +
                       "' must look like a:b");
    }
    morph::ErodeIsolatedSpec spec;
    spec.a = static_cast<int>(
        parse_u64("postprocess.schedule", trim(item.substr(0, colon))));
    spec.b = static_cast<int>(
        parse_u64("postprocess.schedule", trim(item.substr(colon + 1))));
    out.push_back(spec);
  }
  if (out.empty()) {
    throw UsageError("config: postprocess.schedule must be non-empty");
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  vit.validate();
  if (threshold_policy != "fixed" && threshold_policy != "quantile" &&
      threshold_policy != "otsu") {
    throw UsageError("config: threshold.policy must be fixed, quantile or otsu");
  }
  if (threshold_policy == "quantile" &&
      (threshold_value < 0.0 || threshold_value > 1.0)) {
    throw UsageError("config: quantile threshold.value must be in [0,1]");
  }
  if (tiling_stride < 1) {
    throw UsageError("config: tiling.stride must be at least 1");
  }
  if (train_batch < 1) throw UsageError("config: train.batch must be at least 1");
  if (train_lr <= 0.0) throw UsageError("config: train.lr must be positive");
  if (post_closing < 1) {
    throw UsageError("config: postprocess.closing must be at least 1");
  }
  make_postprocess_config(*this).validate();
}

std::uint64_t PipelineConfig::required_seed() const {
  if (!train_seed) {
    throw UsageError(
        "a seed is required: set train.seed in the config or pass --seed");
  }
  return *train_seed;
}

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = key_table().find(key);
    if (it == key_table().end()) {
      throw UsageError("config line " + std::to_string(lineno) +
                       ": unknown key '" + key + "'");
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw UsageError("config line " + std::to_string(lineno) +
                       ": duplicate key '" + key + "'");
    }
    seen.push_back(key);
    it->second.set(cfg, value);
  }
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, def] : key_table()) {  // std::map: sorted keys
    const auto v = def.get(cfg);
    if (v) os << key << " = " << *v << "\n";
  }
  return os.str();
}

void apply_env_overrides(PipelineConfig& cfg) {
  for (const auto& [key, def] : key_table()) {
    std::string env_name = "SPLICEDET_";
    for (char ch : key) {
      env_name += ch == '.' ? '_' : static_cast<char>(std::toupper(
                                        static_cast<unsigned char>(ch)));
    }
    if (const char* v = std::getenv(env_name.c_str())) {
      def.set(cfg, v);
    }
  }
}

morph::PostProcessConfig make_postprocess_config(const PipelineConfig& cfg) {
  morph::PostProcessConfig pp;
  pp.closing = morph::StructuringElement::square(static_cast<int>(cfg.post_closing));
  pp.fill_holes = cfg.post_fill_holes;
  pp.schedule = parse_schedule(cfg.post_schedule);
  pp.max_passes = static_cast<std::size_t>(cfg.post_max_passes);
  return pp;
}

detect::ThresholdPolicy make_threshold_policy(const PipelineConfig& cfg) {
  detect::ThresholdPolicy policy;
  if (cfg.threshold_policy == "fixed") {
    policy.kind = detect::ThresholdKind::kFixed;
  } else if (cfg.threshold_policy == "quantile") {
    policy.kind = detect::ThresholdKind::kQuantile;
  } else if (cfg.threshold_policy == "otsu") {
    policy.kind = detect::ThresholdKind::kOtsu;
  } else {
    throw UsageError("config: threshold.policy must be fixed, quantile or otsu");
  }
  policy.value = cfg.threshold_value;
  return policy;
}

}  // namespace splicedet::harness
