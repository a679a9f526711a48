/**
 * Copyright 2026 The SACC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sacc/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sacc/error.hpp"
#include "toml.hpp"

namespace sacc {
namespace {

std::string line_of(const toml::node& node) {
  const auto& src = node.source();
  return src.begin.line > 0 ? " (line " + std::to_string(src.begin.line) + ")" : "";
}

// Strict reader over one TOML table: every key must be consumed.
class Section {
 public:
  Section(const toml::table* table, std::string prefix)
      : table_(table), prefix_(std::move(prefix)) {}

  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const toml::node* find(const std::string& key) {
    seen_.insert(key);
    return table_ == nullptr ? nullptr : table_->get(key);
  }

  [[noreturn]] void fail(const std::string& key, const toml::node& node, const std::string& what) {
    throw ConfigError("config key '" + path(key) + "'" + line_of(node) + ": " + what);
  }

  void read(const std::string& key, double& out) {
    if (const auto* n = find(key)) {
      if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
        out = *v;
      } else {
        fail(key, *n, "expected a number");
      }
    }
  }

  template <typename Int>
    requires std::is_integral_v<Int> && (!std::is_same_v<Int, bool>)
  void read(const std::string& key, Int& out) {
    if (const auto* n = find(key)) {
      if (!n->is_integer()) fail(key, *n, "expected an integer");
      int64_t v = *n->value<int64_t>();
      if (std::is_unsigned_v<Int> && v < 0) fail(key, *n, "expected a non-negative integer");
      out = static_cast<Int>(v);
    }
  }

  void read(const std::string& key, bool& out) {
    if (const auto* n = find(key)) {
      if (!n->is_boolean()) fail(key, *n, "expected true or false");
      out = *n->value<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const auto* n = find(key)) {
      if (!n->is_string()) fail(key, *n, "expected a string");
      out = *n->value<std::string>();
    }
  }

  void read(const std::string& key, std::filesystem::path& out) {
    std::string s = out.string();
    read(key, s);
    out = s;
  }

  void read(const std::string& key, float& out) {
    double d = out;
    read(key, d);
    out = static_cast<float>(d);
  }

  std::vector<double> numbers(const std::string& key, size_t count, const toml::node& n) {
    const auto* arr = n.as_array();
    if (arr == nullptr || arr->size() != count) {
      fail(key, n, "expected an array of " + std::to_string(count) + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : *arr) {
      auto v = e.value<double>();
      if (!v) fail(key, n, "expected an array of " + std::to_string(count) + " numbers");
      out.push_back(*v);
    }
    return out;
  }

  void read(const std::string& key, Size& out) {
    if (const auto* n = find(key)) {
      auto v = numbers(key, 2, *n);
      if (v[0] != static_cast<int>(v[0]) || v[1] != static_cast<int>(v[1])) {
        fail(key, *n, "expected integer [height, width]");
      }
      out = {static_cast<int>(v[0]), static_cast<int>(v[1])};
    }
  }

  void read_pair(const std::string& key, double& lo, double& hi) {
    if (const auto* n = find(key)) {
      auto v = numbers(key, 2, *n);
      lo = v[0];
      hi = v[1];
    }
  }

  void read_pair(const std::string& key, int& lo, int& hi) {
    double a = lo, b = hi;
    read_pair(key, a, b);
    lo = static_cast<int>(a);
    hi = static_cast<int>(b);
  }

  std::vector<double> read_array(const std::string& key, size_t count) {
    if (const auto* n = find(key)) return numbers(key, count, *n);
    return {};
  }

  std::vector<std::string> read_strings(const std::string& key, bool& present) {
    present = false;
    std::vector<std::string> out;
    if (const auto* n = find(key)) {
      const auto* arr = n->as_array();
      if (arr == nullptr) fail(key, *n, "expected an array of strings");
      for (const auto& e : *arr) {
        if (!e.is_string()) fail(key, *n, "expected an array of strings");
        out.push_back(*e.value<std::string>());
      }
      present = true;
    }
    return out;
  }

  template <typename F>
  void read_enum(const std::string& key, F&& parse) {
    if (const auto* n = find(key)) {
      if (!n->is_string()) fail(key, *n, "expected a string");
      try {
        parse(*n->value<std::string>());
      } catch (const ConfigError& e) {
        fail(key, *n, e.what());
      }
    }
  }

  Section sub(const std::string& key) {
    const toml::node* n = find(key);
    if (n != nullptr && !n->is_table()) fail(key, *n, "expected a table");
    return Section(n == nullptr ? nullptr : n->as_table(), path(key));
  }

  // Rejects keys nobody asked for.
  void finish() const {
    if (table_ == nullptr) return;
    for (const auto& [k, v] : *table_) {
      std::string key(k.str());
      if (!seen_.count(key)) {
        throw ConfigError("unknown config key '" + path(key) + "'" + line_of(v));
      }
    }
  }

 private:
  const toml::table* table_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_dataset(Section s, data::DatasetSpec& d) {
  s.read_enum("source", [&](const std::string& v) { d.source = data::parse_source(v); });
  s.read("root_path", d.root_path);
  s.read("num_classes", d.num_classes);
  s.read("resize_to", d.resize_to);
  s.read("split_policy", d.split_policy);
  s.read("synset_list", d.synset_list);
  Section syn = s.sub("synthetic");
  syn.read("num_classes", d.synthetic.num_classes);
  syn.read("per_class", d.synthetic.per_class);
  syn.read("image_size", d.synthetic.image_size);
  syn.read("class_separation", d.synthetic.class_separation);
  syn.read("noise_sigma", d.synthetic.noise_sigma);
  syn.read("seed", d.synthetic.rng_seed);
  syn.finish();
  s.finish();
}

void read_model(Section s, model::ModelConfig& m) {
  s.read_enum("backbone", [&](const std::string& v) {
    m.backbone.architecture = model::parse_architecture(v);
    if (m.backbone.architecture == model::Architecture::kSmallConv) m.backbone.output_dim = 64;
  });
  s.read("backbone_dim", m.backbone.output_dim);
  s.read("instance_hidden_dim", m.instance.hidden_dim);
  s.read("instance_dim", m.instance.out_dim);
  s.read("cluster_hidden_dim", m.cluster.hidden_dim);
  s.read("num_clusters", m.cluster.num_clusters);
  s.finish();
}

void read_train(Section s, TrainConfig& t) {
  s.read("learning_rate", t.learning_rate);
  s.read("batch_size", t.batch_size);
  s.read("epochs", t.epochs);
  s.read("tau_g", t.tau_g);
  s.read("tau_h", t.tau_h);
  s.read("optimizer", t.optimizer);
  s.read("adam_beta1", t.adam_beta1);
  s.read("adam_beta2", t.adam_beta2);
  s.read("adam_eps", t.adam_eps);
  s.read("weight_decay", t.weight_decay);
  s.read("seed", t.seed);
  s.read("eval_every", t.eval_every);
  s.read("checkpoint_every", t.checkpoint_every);
  s.read("progress_every", t.progress_every);
  s.read("eval_batch_size", t.eval_batch_size);
  s.read("include_self_term", t.include_self_term);
  s.read("save_embeddings", t.save_embeddings);
  s.read_enum("mode", [&](const std::string& v) { t.mode = parse_mode(v); });
  s.finish();
}

void read_aug(Section s, aug::WeakAugSpec& w, aug::StrongAugSpec& st) {
  Section ws = s.sub("weak");
  ws.read_pair("crop_scale", w.crop_scale_lo, w.crop_scale_hi);
  ws.read_pair("crop_ratio", w.crop_ratio_lo, w.crop_ratio_hi);
  ws.read("hflip_prob", w.hflip_prob);
  if (auto j = ws.read_array("jitter", 4); !j.empty()) {
    w.jitter = {j[0], j[1], j[2], j[3]};
  }
  ws.read("jitter_prob", w.jitter_prob);
  ws.read("grayscale_prob", w.grayscale_prob);
  ws.read("seed", w.rng_seed);
  ws.finish();

  Section ss = s.sub("strong");
  bool present = false;
  auto ops = ss.read_strings("ops", present);
  if (present) {
    st.op_family.clear();
    for (const auto& name : ops) {
      try {
        st.op_family.push_back(aug::parse_op(name));
      } catch (const ConfigError& e) {
        throw ConfigError("config key '" + ss.path("ops") + "': " + e.what());
      }
    }
  }
  ss.read("num_ops", st.num_ops);
  ss.read_pair("magnitude_range", st.magnitude_lo, st.magnitude_hi);
  ss.read("rotate_degrees", st.ranges.rotate_degrees);
  ss.read("shear", st.ranges.shear);
  ss.read("translate", st.ranges.translate);
  ss.read_pair("enhance_range", st.ranges.enhance_lo, st.ranges.enhance_hi);
  ss.read_pair("posterize_bits", st.ranges.posterize_bits_min, st.ranges.posterize_bits_max);
  ss.read("fill", st.fill);
  ss.read("seed", st.rng_seed);
  ss.finish();
  s.finish();
}

RunSettings settings_from_table(const toml::table& root) {
  RunSettings rs;
  rs.model.cluster.num_clusters = 0;  // resolved from the dataset unless given
  Section top(&root, "");
  top.read("output_dir", rs.output_dir);
  read_dataset(top.sub("dataset"), rs.dataset);
  read_model(top.sub("model"), rs.model);
  read_train(top.sub("train"), rs.train);
  read_aug(top.sub("aug"), rs.weak, rs.strong);
  top.finish();
  return rs;
}

toml::table parse_table(const std::string& text, const std::string& source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << " line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
}

void apply_override(toml::table& root, const std::string& dotted, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  if (parts.empty() || parts.back().empty()) throw ConfigError("bad override key '" + dotted + "'");
  toml::table* tbl = &root;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* next = tbl->get(parts[i]);
    if (next == nullptr) {
      tbl->insert(parts[i], toml::table{});
      next = tbl->get(parts[i]);
    }
    if (!next->is_table()) throw ConfigError("override '" + dotted + "': '" + parts[i] + "' is not a table");
    tbl = next->as_table();
  }
  // Values are TOML literals; anything that does not parse is taken as a bare string.
  toml::table scratch;
  bool parsed = true;
  try {
    scratch = toml::parse("v = " + value);
  } catch (const toml::parse_error&) {
    parsed = false;
  }
  if (parsed && scratch.get("v") != nullptr) {
    scratch.get("v")->visit([&](auto&& node) { tbl->insert_or_assign(parts.back(), node); });
  } else {
    tbl->insert_or_assign(parts.back(), value);
  }
}

template <typename T>
toml::array arr(std::initializer_list<T> v) {
  toml::array a;
  for (const T& x : v) a.push_back(x);
  return a;
}

}  // namespace

std::string mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::kFull: return "weak_weak_strong";
    case TrainMode::kWeakWeak: return "weak_weak";
    case TrainMode::kWeakStrong: return "weak_strong";
    case TrainMode::kInstanceOnly: return "with_instance_only";
    case TrainMode::kClusterOnly: return "with_cluster_only";
  }
  return "weak_weak_strong";
}

TrainMode parse_mode(const std::string& name) {
  if (name == "weak_weak_strong" || name == "both") return TrainMode::kFull;
  if (name == "weak_weak") return TrainMode::kWeakWeak;
  if (name == "weak_strong") return TrainMode::kWeakStrong;
  if (name == "with_instance_only") return TrainMode::kInstanceOnly;
  if (name == "with_cluster_only") return TrainMode::kClusterOnly;
  throw ConfigError("unknown training mode '" + name + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (!(tau_g > 0.0)) throw ConfigError("train.tau_g must be > 0");
  if (!(tau_h > 0.0)) throw ConfigError("train.tau_h must be > 0");
  if (optimizer != "adam") throw ConfigError("train.optimizer must be 'adam'");
  if (eval_every < 0 || checkpoint_every < 0 || progress_every < 0) {
    throw ConfigError("train.eval_every/checkpoint_every/progress_every must be >= 0");
  }
  if (eval_batch_size < 1) throw ConfigError("train.eval_batch_size must be >= 1");
}

void RunSettings::validate() const {
  dataset.validate();
  model::ModelConfig m = model;
  if (m.cluster.num_clusters == 0) m.cluster.num_clusters = 2;
  m.validate();
  train.validate();
  weak.validate();
  strong.validate();
}

RunSettings parse_run_config(const std::string& toml_text, const std::string& source) {
  return settings_from_table(parse_table(toml_text, source));
}

RunSettings load_run_config(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  toml::table root = parse_table(buf.str(), path.string());
  for (const auto& [key, value] : overrides) apply_override(root, key, value);
  RunSettings rs = settings_from_table(root);
  if (const char* env = std::getenv("SACC_OUTPUT_ROOT"); env != nullptr && *env != '\0') {
    if (rs.output_dir.is_relative()) rs.output_dir = std::filesystem::path(env) / rs.output_dir;
  }
  return rs;
}

std::string to_toml(const RunSettings& s) {
  const auto& d = s.dataset;
  const auto& syn = d.synthetic;
  toml::table synthetic{{"num_classes", syn.num_classes},
                        {"per_class", syn.per_class},
                        {"image_size", arr({syn.image_size.height, syn.image_size.width})},
                        {"class_separation", syn.class_separation},
                        {"noise_sigma", syn.noise_sigma},
                        {"seed", static_cast<int64_t>(syn.rng_seed)}};
  toml::table dataset{{"source", data::source_name(d.source)},
                      {"root_path", d.root_path.string()},
                      {"num_classes", d.num_classes},
                      {"resize_to", arr({d.resize_to.height, d.resize_to.width})},
                      {"split_policy", d.split_policy},
                      {"synset_list", d.synset_list.string()},
                      {"synthetic", synthetic}};
  const auto& m = s.model;
  toml::table model{{"backbone", model::architecture_name(m.backbone.architecture)},
                    {"backbone_dim", m.backbone.output_dim},
                    {"instance_hidden_dim", m.instance.hidden_dim},
                    {"instance_dim", m.instance.out_dim},
                    {"cluster_hidden_dim", m.cluster.hidden_dim},
                    {"num_clusters", m.cluster.num_clusters}};
  const auto& t = s.train;
  toml::table train{{"learning_rate", t.learning_rate},
                    {"batch_size", t.batch_size},
                    {"epochs", t.epochs},
                    {"tau_g", t.tau_g},
                    {"tau_h", t.tau_h},
                    {"optimizer", t.optimizer},
                    {"adam_beta1", t.adam_beta1},
                    {"adam_beta2", t.adam_beta2},
                    {"adam_eps", t.adam_eps},
                    {"weight_decay", t.weight_decay},
                    {"seed", static_cast<int64_t>(t.seed)},
                    {"eval_every", t.eval_every},
                    {"checkpoint_every", t.checkpoint_every},
                    {"progress_every", t.progress_every},
                    {"eval_batch_size", t.eval_batch_size},
                    {"include_self_term", t.include_self_term},
                    {"save_embeddings", t.save_embeddings},
                    {"mode", mode_name(t.mode)}};
  const auto& w = s.weak;
  toml::table weak{{"crop_scale", arr({w.crop_scale_lo, w.crop_scale_hi})},
                   {"crop_ratio", arr({w.crop_ratio_lo, w.crop_ratio_hi})},
                   {"hflip_prob", w.hflip_prob},
                   {"jitter", arr({w.jitter.brightness, w.jitter.contrast, w.jitter.saturation,
                                   w.jitter.hue})},
                   {"jitter_prob", w.jitter_prob},
                   {"grayscale_prob", w.grayscale_prob},
                   {"seed", static_cast<int64_t>(w.rng_seed)}};
  const auto& st = s.strong;
  toml::array ops;
  for (auto op : st.op_family) ops.push_back(std::string(aug::op_name(op)));
  toml::table strong{{"ops", ops},
                     {"num_ops", st.num_ops},
                     {"magnitude_range", arr({st.magnitude_lo, st.magnitude_hi})},
                     {"rotate_degrees", st.ranges.rotate_degrees},
                     {"shear", st.ranges.shear},
                     {"translate", st.ranges.translate},
                     {"enhance_range", arr({st.ranges.enhance_lo, st.ranges.enhance_hi})},
                     {"posterize_bits", arr({st.ranges.posterize_bits_min, st.ranges.posterize_bits_max})},
                     {"fill", static_cast<double>(st.fill)},
                     {"seed", static_cast<int64_t>(st.rng_seed)}};
  toml::table root{{"output_dir", s.output_dir.string()},
                   {"dataset", dataset},
                   {"model", model},
                   {"train", train},
                   {"aug", toml::table{{"weak", weak}, {"strong", strong}}}};
  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

}  // namespace sacc
