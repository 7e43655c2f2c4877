#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ofm/data.hpp"
#include "ofm/matrix.hpp"
#include "ofm/model.hpp"

namespace ofm {

// Stage-3 objective driving the encoder away from the subsidiary head.
//   none         skip stage 3 entirely
//   reversed_cce minimize the negated subsidiary cross-entropy
//   grl          ordinary cross-entropy, gradient scaled by -lambda at the
//                code boundary; identical to reversed_cce at lambda = 1
//   cosine       squared cosine similarity between codes and subsidiary
//                weight rows; consumes no subsidiary labels
enum class Strategy { none, reversed_cce, grl, cosine };
enum class Optimizer { sgd, adam };

Strategy strategy_from_string(const std::string& s);
const char* to_string(Strategy s);
Optimizer optimizer_from_string(const std::string& s);
const char* to_string(Optimizer o);

struct TrainConfig {
  Strategy strategy = Strategy::reversed_cce;
  int64_t epochs_primary = 10;      // e1
  int64_t epochs_subsidiary = 10;   // e2
  int64_t epochs_adversarial = 10;  // e3
  int64_t cycles = 3;
  int64_t batch_size = 128;
  Optimizer optimizer = Optimizer::adam;
  double lr = 1e-3;
  double momentum = 0.0;  // sgd only
  double beta1 = 0.9;     // adam
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double grl_lambda = 1.0;
  uint64_t seed = 1;
  // First `encoder_freeze_depth` encoder layers never receive optimizer
  // steps, in any stage.
  int64_t encoder_freeze_depth = 0;

  // epochs may be 0 (stage skipped); cycles and batch_size >= 1; lr > 0.
  void validate() const;
};

// Moment buffers sized lazily on first step to mirror the parameter list.
// Reset at every stage boundary: moments of one objective mean nothing to
// the next.
struct OptimizerState {
  int64_t step = 0;
  std::vector<Matrix> m;  // adam first moment / sgd velocity
  std::vector<Matrix> v;  // adam second moment

  void reset() {
    step = 0;
    m.clear();
    v.clear();
  }
};

// One in-place update over a parameter set. `params` and `grads` are
// parallel lists; shapes must agree pairwise and with any existing state.
void optimizer_step(OptimizerState& state, const std::vector<Matrix*>& params,
                    const std::vector<const Matrix*>& grads, const TrainConfig& cfg);

// One row per epoch. wall_ms is measured, not derived from (config, seed),
// so to_json_line leaves it out to keep reruns byte-identical.
struct MetricsRecord {
  int64_t cycle = 0;
  int64_t stage = 0;
  int64_t epoch = 0;
  double loss_primary = 0.0;
  double loss_subsidiary = 0.0;
  double loss_adversarial = 0.0;
  double mean_sq_cosine = 0.0;
  double argmax_acc = 0.0;  // subsidiary head, argmax reduction
  double argmin_acc = 0.0;  // subsidiary head, argmin reduction
  double wall_ms = 0.0;

  std::string to_json_line() const;
};

// Full-dataset losses and subsidiary-head accuracies for one epoch row.
MetricsRecord eval_metrics(const ModelBundle& bundle, const LabeledDataset& data,
                           const TrainConfig& cfg, int64_t cycle, int64_t stage, int64_t epoch);

// Called with each record as its epoch finishes, so a consumer can stream
// metrics to disk and a killed run still leaves every completed epoch.
using MetricsSink = std::function<void(const MetricsRecord&)>;

// The three stages. Each takes a `cycle` tag that feeds the per-stage
// shuffle seed and the emitted records, so run_cycles(cycles = 1) is
// bit-identical to calling the stages manually with the default tag.
//
// stage1: encoder (above the frozen prefix) + primary head on the primary
//         cross-entropy. Subsidiary head untouched.
// stage2: subsidiary head alone on codes precomputed from the frozen
//         encoder.
// stage3: encoder alone (above the frozen prefix) against the frozen
//         subsidiary head, objective per cfg.strategy. The cosine path
//         never reads y_subsidiary.
std::vector<MetricsRecord> stage1_primary(ModelBundle& bundle, const LabeledDataset& data,
                                          const TrainConfig& cfg, int64_t cycle = 0,
                                          const MetricsSink& sink = {});
std::vector<MetricsRecord> stage2_subsidiary(ModelBundle& bundle, const LabeledDataset& data,
                                             const TrainConfig& cfg, int64_t cycle = 0,
                                             const MetricsSink& sink = {});
std::vector<MetricsRecord> stage3_adversarial(ModelBundle& bundle, const LabeledDataset& data,
                                              const TrainConfig& cfg, int64_t cycle = 0,
                                              const MetricsSink& sink = {});

// stage1 -> stage2 -> stage3 repeated cfg.cycles times. strategy none drops
// stage3, leaving the encoder untouched by any adversary.
std::vector<MetricsRecord> run_cycles(ModelBundle& bundle, const LabeledDataset& data,
                                      const TrainConfig& cfg, const MetricsSink& sink = {});

}  // namespace ofm
