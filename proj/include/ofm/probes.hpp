#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ofm/data.hpp"
#include "ofm/model.hpp"
#include "ofm/train.hpp"

namespace ofm {

enum class Head { primary, subsidiary };

// Diagnostics separating two failure modes of an adversarially trained
// subsidiary head: a flipped classifier (argmax near zero, argmin high) and
// genuinely removed information (both near chance, logits bias-dominated).
struct ProbeReport {
  double argmax_accuracy = 0.0;
  double argmin_accuracy = 0.0;
  double mean_sq_cosine = 0.0;
  double max_abs_cosine = 0.0;
  double logit_minus_bias_max = 0.0;
  double constant_prediction_fraction = 0.0;
  int64_t n_examples = 0;

  std::string to_json() const;
};

// Accuracy under both reductions from a single forward pass; ties break to
// the lowest index.
std::pair<double, double> probe_argmax_argmin(const ModelBundle& bundle, Head head,
                                              const LabeledDataset& data);

// logit_minus_bias_max = max over examples x classes of |W_j^S . E(x)|
// (the input-dependent part of the subsidiary logits);
// constant_prediction_fraction = fraction of examples whose subsidiary
// argmax equals argmax(b^S).
std::pair<double, double> probe_bias_dominance(const ModelBundle& bundle,
                                               const LabeledDataset& data);

// (mean CS^2, max |CS|) of cosine similarity between each code and each
// subsidiary weight row. The mean equals cosine_orthogonality_loss on the
// same inputs.
std::pair<double, double> probe_orthogonality(const ModelBundle& bundle,
                                              const LabeledDataset& data);

// Retrains a freshly initialized subsidiary head on frozen codes and
// returns the per-epoch full-set training loss. The bundle is untouched;
// the fresh head draws from its own stream off cfg.seed, so it never
// collides with training-time draws. Runs cfg.epochs_subsidiary epochs.
std::vector<std::pair<int64_t, double>> probe_retrain_subsidiary(const ModelBundle& bundle,
                                                                 const LabeledDataset& data,
                                                                 const TrainConfig& cfg);

// CSV: c0,...,c{D-1},y_primary,y_subsidiary, one row per example in dataset
// order, 17 significant digits (lossless for 64-bit floats).
void export_codes(const ModelBundle& bundle, const LabeledDataset& data,
                  const std::string& path);

void write_loss_curve(const std::vector<std::pair<int64_t, double>>& curve,
                      const std::string& path);

// All scalar probes over one dataset.
ProbeReport run_probes(const ModelBundle& bundle, const LabeledDataset& data);

}  // namespace ofm
