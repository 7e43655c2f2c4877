#include "ofm/runconfig.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ofm/error.hpp"

namespace ofm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw FormatError(where + ": " + what);
}

const json& expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      std::string keys;
      for (const char* k : allowed) {
        if (!keys.empty()) keys += ", ";
        keys += k;
      }
      fail(where, "unknown key '" + item.key() + "' (allowed: " + keys + ")");
    }
  }
}

int64_t get_count(const json& j, const std::string& where, const char* key, int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(where, std::string("'") + key + "' must be an integer");
  return v.get<int64_t>();
}

uint64_t get_seed(const json& j, const std::string& where, const char* key, uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) {
    return static_cast<uint64_t>(v.get<int64_t>());
  }
  fail(where, std::string("'") + key + "' must be a non-negative integer");
}

double get_number(const json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string get_string(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing required key '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_string()) fail(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string get_string_or(const json& j, const std::string& where, const char* key,
                          const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  return get_string(j, where, key);
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(where, std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

DataConfig parse_data(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where, {"synth", "idx", "csv"});
  int sources = static_cast<int>(j.contains("synth")) + static_cast<int>(j.contains("idx")) +
                static_cast<int>(j.contains("csv"));
  if (sources != 1) fail(where, "exactly one of 'synth', 'idx', 'csv' required");

  DataConfig out;
  if (j.contains("synth")) {
    out.source = DataConfig::Source::synth;
    const json& s = expect_object(j.at("synth"), where + ".synth");
    std::string w = where + ".synth";
    reject_unknown(s, w,
                   {"n_per_cell", "n_primary", "n_subsidiary", "dim", "primary_sep",
                    "subsidiary_sep", "noise_sigma", "seed"});
    SynthConfig& c = out.synth;
    c.n_per_cell = get_count(s, w, "n_per_cell", c.n_per_cell);
    c.n_primary = get_count(s, w, "n_primary", c.n_primary);
    c.n_subsidiary = get_count(s, w, "n_subsidiary", c.n_subsidiary);
    c.dim = get_count(s, w, "dim", c.dim);
    c.primary_sep = get_number(s, w, "primary_sep", c.primary_sep);
    c.subsidiary_sep = get_number(s, w, "subsidiary_sep", c.subsidiary_sep);
    c.noise_sigma = get_number(s, w, "noise_sigma", c.noise_sigma);
    c.seed = get_seed(s, w, "seed", c.seed);
  } else if (j.contains("idx")) {
    out.source = DataConfig::Source::idx;
    const json& s = expect_object(j.at("idx"), where + ".idx");
    std::string w = where + ".idx";
    reject_unknown(s, w, {"images", "labels"});
    out.idx_images = get_string(s, w, "images");
    out.idx_labels = get_string(s, w, "labels");
  } else {
    out.source = DataConfig::Source::csv;
    const json& s = expect_object(j.at("csv"), where + ".csv");
    std::string w = where + ".csv";
    reject_unknown(s, w, {"path"});
    out.csv_path = get_string(s, w, "path");
  }
  return out;
}

TrainConfig parse_train(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where,
                 {"strategy", "epochs_primary", "epochs_subsidiary", "epochs_adversarial",
                  "cycles", "batch_size", "optimizer", "lr", "momentum", "beta1", "beta2",
                  "adam_eps", "grl_lambda", "seed", "encoder_freeze_depth"});
  TrainConfig c;
  if (j.contains("strategy")) c.strategy = strategy_from_string(get_string(j, where, "strategy"));
  c.epochs_primary = get_count(j, where, "epochs_primary", c.epochs_primary);
  c.epochs_subsidiary = get_count(j, where, "epochs_subsidiary", c.epochs_subsidiary);
  c.epochs_adversarial = get_count(j, where, "epochs_adversarial", c.epochs_adversarial);
  c.cycles = get_count(j, where, "cycles", c.cycles);
  c.batch_size = get_count(j, where, "batch_size", c.batch_size);
  if (j.contains("optimizer")) {
    c.optimizer = optimizer_from_string(get_string(j, where, "optimizer"));
  }
  c.lr = get_number(j, where, "lr", c.lr);
  c.momentum = get_number(j, where, "momentum", c.momentum);
  c.beta1 = get_number(j, where, "beta1", c.beta1);
  c.beta2 = get_number(j, where, "beta2", c.beta2);
  c.adam_eps = get_number(j, where, "adam_eps", c.adam_eps);
  c.grl_lambda = get_number(j, where, "grl_lambda", c.grl_lambda);
  c.seed = get_seed(j, where, "seed", c.seed);
  c.encoder_freeze_depth = get_count(j, where, "encoder_freeze_depth", c.encoder_freeze_depth);
  return c;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(origin + ": " + e.what(), static_cast<int64_t>(e.byte));
  }
  expect_object(root, origin);
  reject_unknown(root, origin,
                 {"data", "model", "train", "out_dir", "holdout_fraction", "probes"});
  if (!root.contains("data")) fail(origin, "missing required key 'data'");
  if (!root.contains("model")) fail(origin, "missing required key 'model'");

  RunConfig cfg;
  cfg.data = parse_data(root.at("data"), origin + ".data");

  {
    const json& m = expect_object(root.at("model"), origin + ".model");
    std::string w = origin + ".model";
    reject_unknown(m, w, {"widths", "activation", "code_dim"});
    if (m.contains("widths")) {
      const json& a = m.at("widths");
      if (!a.is_array()) fail(w, "'widths' must be an array of integers");
      cfg.hidden_widths.clear();
      for (const json& v : a) {
        if (!v.is_number_integer()) fail(w, "'widths' must be an array of integers");
        cfg.hidden_widths.push_back(v.get<int64_t>());
      }
    }
    if (!m.contains("code_dim")) fail(w, "missing required key 'code_dim'");
    cfg.code_dim = get_count(m, w, "code_dim", 0);
    if (m.contains("activation")) {
      cfg.activation = activation_from_string(get_string(m, w, "activation"));
    }
  }

  if (root.contains("train")) cfg.train = parse_train(root.at("train"), origin + ".train");
  cfg.out_dir = get_string_or(root, origin, "out_dir", cfg.out_dir);
  cfg.holdout_fraction = get_number(root, origin, "holdout_fraction", cfg.holdout_fraction);
  if (root.contains("probes")) {
    const json& p = expect_object(root.at("probes"), origin + ".probes");
    std::string w = origin + ".probes";
    reject_unknown(p, w, {"retrain_subsidiary", "export_codes"});
    cfg.probes.retrain_subsidiary = get_bool(p, w, "retrain_subsidiary", false);
    cfg.probes.export_codes = get_bool(p, w, "export_codes", false);
  }

  cfg.train.validate();
  if (cfg.code_dim < 1) fail(origin + ".model", "'code_dim' must be >= 1");
  for (int64_t v : cfg.hidden_widths) {
    if (v < 1) fail(origin + ".model", "'widths' entries must be >= 1");
  }
  if (!(cfg.holdout_fraction >= 0.0 && cfg.holdout_fraction < 1.0)) {
    fail(origin, "'holdout_fraction' must be in [0, 1)");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

LabeledDataset load_dataset(const DataConfig& cfg) {
  switch (cfg.source) {
    case DataConfig::Source::synth: return gen_two_factor(cfg.synth);
    case DataConfig::Source::csv: return read_csv_vectors(cfg.csv_path);
    case DataConfig::Source::idx: break;
  }
  IdxData idx = read_idx(cfg.idx_images, cfg.idx_labels);
  if (idx.labels.empty()) throw ArgumentError("idx dataset " + cfg.idx_images + " is empty");
  LabeledDataset ds;
  ds.features = std::move(idx.features);
  ds.y_primary = idx.labels;
  ds.y_subsidiary = std::move(idx.labels);
  ds.n_primary_classes = 1 + *std::max_element(ds.y_primary.begin(), ds.y_primary.end());
  ds.n_subsidiary_classes = ds.n_primary_classes;
  ds.validate();
  return ds;
}

}  // namespace ofm
