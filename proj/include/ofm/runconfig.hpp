#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ofm/data.hpp"
#include "ofm/network.hpp"
#include "ofm/train.hpp"

namespace ofm {

// Where the labeled vectors come from. An IDX pair carries one label
// stream, which lands in both y_primary and y_subsidiary: that is the
// flip-the-classifier setup, where the head under adversarial attack
// predicts the same classes the primary head was trained on.
struct DataConfig {
  enum class Source { synth, idx, csv };
  Source source = Source::synth;
  SynthConfig synth;
  std::string idx_images;
  std::string idx_labels;
  std::string csv_path;
};

struct ProbeToggles {
  bool retrain_subsidiary = false;
  bool export_codes = false;
};

// One experiment file: data source, encoder shape, training schedule,
// outputs. Strict-parsed JSON; unknown keys are errors naming the key and
// the allowed set.
struct RunConfig {
  DataConfig data;
  std::vector<int64_t> hidden_widths;  // affine widths of the hidden layers
  int64_t code_dim = 16;               // width of the final (identity) layer
  Activation activation = Activation::relu;
  TrainConfig train;
  std::string out_dir = ".";
  double holdout_fraction = 0.2;  // probe split used by repro-table1
  ProbeToggles probes;

  std::vector<int64_t> encoder_widths() const {
    std::vector<int64_t> w = hidden_widths;
    w.push_back(code_dim);
    return w;
  }
};

// `origin` names the source in error messages (a file path, or "<inline>").
RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

LabeledDataset load_dataset(const DataConfig& cfg);

}  // namespace ofm
