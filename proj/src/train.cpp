#include "ofm/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "ofm/error.hpp"
#include "ofm/kernels.hpp"
#include "ofm/losses.hpp"
#include "ofm/network.hpp"
#include "ofm/rng.hpp"

namespace ofm {

Strategy strategy_from_string(const std::string& s) {
  if (s == "none") return Strategy::none;
  if (s == "reversed_cce") return Strategy::reversed_cce;
  if (s == "grl") return Strategy::grl;
  if (s == "cosine") return Strategy::cosine;
  throw ArgumentError("unknown strategy '" + s +
                      "' (expected none, reversed_cce, grl or cosine)");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::reversed_cce: return "reversed_cce";
    case Strategy::grl: return "grl";
    case Strategy::cosine: return "cosine";
  }
  throw ArgumentError("invalid strategy value");
}

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw ArgumentError("unknown optimizer '" + s + "' (expected sgd or adam)");
}

const char* to_string(Optimizer o) {
  switch (o) {
    case Optimizer::sgd: return "sgd";
    case Optimizer::adam: return "adam";
  }
  throw ArgumentError("invalid optimizer value");
}

void TrainConfig::validate() const {
  if (epochs_primary < 0 || epochs_subsidiary < 0 || epochs_adversarial < 0) {
    throw ArgumentError("TrainConfig: epochs must be >= 0");
  }
  if (cycles < 1) throw ArgumentError("TrainConfig: cycles must be >= 1");
  if (batch_size < 1) throw ArgumentError("TrainConfig: batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ArgumentError("TrainConfig: lr must be > 0");
  if (!(momentum >= 0.0) || momentum >= 1.0) {
    throw ArgumentError("TrainConfig: momentum must be in [0, 1)");
  }
  if (!(beta1 >= 0.0) || beta1 >= 1.0 || !(beta2 >= 0.0) || beta2 >= 1.0) {
    throw ArgumentError("TrainConfig: adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ArgumentError("TrainConfig: adam eps must be > 0");
  if (!std::isfinite(grl_lambda)) throw ArgumentError("TrainConfig: grl_lambda must be finite");
  if (encoder_freeze_depth < 0) {
    throw ArgumentError("TrainConfig: encoder_freeze_depth must be >= 0");
  }
}

void optimizer_step(OptimizerState& state, const std::vector<Matrix*>& params,
                    const std::vector<const Matrix*>& grads, const TrainConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ArgumentError("optimizer_step: " + std::to_string(params.size()) + " params vs " +
                        std::to_string(grads.size()) + " grads");
  }
  if (state.m.empty()) {
    for (const Matrix* p : params) state.m.emplace_back(p->rows, p->cols);
    if (cfg.optimizer == Optimizer::adam) {
      for (const Matrix* p : params) state.v.emplace_back(p->rows, p->cols);
    }
  }
  if (state.m.size() != params.size()) {
    throw ArgumentError("optimizer_step: state sized for " + std::to_string(state.m.size()) +
                        " params, got " + std::to_string(params.size()));
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state.m[i])) {
      throw ArgumentError("optimizer_step: shape mismatch at param " + std::to_string(i));
    }
  }

  state.step += 1;
  if (cfg.optimizer == Optimizer::adam) {
    double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
      Matrix& p = *params[i];
      const Matrix& g = *grads[i];
      Matrix& m = state.m[i];
      Matrix& v = state.v[i];
      for (size_t k = 0; k < p.data.size(); ++k) {
        m.data[k] = cfg.beta1 * m.data[k] + (1.0 - cfg.beta1) * g.data[k];
        v.data[k] = cfg.beta2 * v.data[k] + (1.0 - cfg.beta2) * g.data[k] * g.data[k];
        p.data[k] -= cfg.lr * (m.data[k] / c1) / (std::sqrt(v.data[k] / c2) + cfg.adam_eps);
      }
    }
  } else {
    for (size_t i = 0; i < params.size(); ++i) {
      Matrix& p = *params[i];
      const Matrix& g = *grads[i];
      Matrix& vel = state.m[i];
      for (size_t k = 0; k < p.data.size(); ++k) {
        vel.data[k] = cfg.momentum * vel.data[k] + g.data[k];
        p.data[k] -= cfg.lr * vel.data[k];
      }
    }
  }
}

namespace {

// JSON has no inf/nan literals; a diverged loss serializes as null rather
// than corrupting the line.
void append_json_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string MetricsRecord::to_json_line() const {
  std::string out = "{\"cycle\":" + std::to_string(cycle) +
                    ",\"stage\":" + std::to_string(stage) +
                    ",\"epoch\":" + std::to_string(epoch);
  const std::pair<const char*, double> fields[] = {
      {"loss_primary", loss_primary},       {"loss_subsidiary", loss_subsidiary},
      {"loss_adversarial", loss_adversarial}, {"mean_sq_cosine", mean_sq_cosine},
      {"argmax_acc", argmax_acc},           {"argmin_acc", argmin_acc},
  };
  for (const auto& [name, value] : fields) {
    out += ",\"";
    out += name;
    out += "\":";
    append_json_number(out, value);
  }
  out += '}';
  return out;
}

namespace {

void check_stage_inputs(const char* stage, const ModelBundle& bundle, const LabeledDataset& data,
                        const TrainConfig& cfg) {
  cfg.validate();
  bundle.validate();
  if (data.size() < 1) throw ArgumentError(std::string(stage) + ": empty dataset");
  data.validate();
  if (data.dim() != bundle.input_dim()) {
    throw ArgumentError(std::string(stage) + ": data dim " + std::to_string(data.dim()) +
                        " != model input dim " + std::to_string(bundle.input_dim()));
  }
  if (cfg.encoder_freeze_depth > static_cast<int64_t>(bundle.encoder.layers.size())) {
    throw ArgumentError(std::string(stage) + ": encoder_freeze_depth " +
                        std::to_string(cfg.encoder_freeze_depth) + " exceeds " +
                        std::to_string(bundle.encoder.layers.size()) + " encoder layers");
  }
}

std::vector<int> gather_labels(const std::vector<int>& v, const std::vector<int64_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int64_t i : idx) out.push_back(v[static_cast<size_t>(i)]);
  return out;
}

// Parameter/gradient lists for the encoder layers above the frozen prefix,
// in a fixed (layer, weights-then-bias) order shared by all stages.
void collect_encoder(ModelBundle& bundle, const TrainConfig& cfg, BackwardResult& back,
                     std::vector<Matrix*>& params, std::vector<const Matrix*>& grads) {
  for (size_t i = static_cast<size_t>(cfg.encoder_freeze_depth);
       i < bundle.encoder.layers.size(); ++i) {
    params.push_back(&bundle.encoder.layers[i].weights);
    grads.push_back(&back.layer_grads[i].weights);
    params.push_back(&bundle.encoder.layers[i].bias);
    grads.push_back(&back.layer_grads[i].bias);
  }
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

MetricsRecord eval_metrics(const ModelBundle& bundle, const LabeledDataset& data,
                           const TrainConfig& cfg, int64_t cycle, int64_t stage, int64_t epoch) {
  MetricsRecord rec;
  rec.cycle = cycle;
  rec.stage = stage;
  rec.epoch = epoch;

  Matrix codes = encode(bundle, data.features);
  Matrix logits_p = head_logits(bundle.primary_head, codes);
  Matrix logits_s = head_logits(bundle.subsidiary_head, codes);
  rec.loss_primary = softmax_cce(logits_p, data.y_primary).value;
  rec.loss_subsidiary = softmax_cce(logits_s, data.y_subsidiary).value;
  rec.mean_sq_cosine = cosine_orthogonality_loss(bundle.subsidiary_head.weights, codes).value;

  switch (cfg.strategy) {
    case Strategy::none: rec.loss_adversarial = 0.0; break;
    case Strategy::reversed_cce: rec.loss_adversarial = -rec.loss_subsidiary; break;
    case Strategy::grl: rec.loss_adversarial = -cfg.grl_lambda * rec.loss_subsidiary; break;
    case Strategy::cosine: rec.loss_adversarial = rec.mean_sq_cosine; break;
  }

  int64_t hit_max = 0, hit_min = 0;
  for (int64_t i = 0; i < logits_s.rows; ++i) {
    int label = data.y_subsidiary[static_cast<size_t>(i)];
    if (argmax_index(logits_s.row(i), logits_s.cols) == label) ++hit_max;
    if (argmin_index(logits_s.row(i), logits_s.cols) == label) ++hit_min;
  }
  rec.argmax_acc = static_cast<double>(hit_max) / static_cast<double>(logits_s.rows);
  rec.argmin_acc = static_cast<double>(hit_min) / static_cast<double>(logits_s.rows);
  return rec;
}

std::vector<MetricsRecord> stage1_primary(ModelBundle& bundle, const LabeledDataset& data,
                                          const TrainConfig& cfg, int64_t cycle,
                                          const MetricsSink& sink) {
  check_stage_inputs("stage1", bundle, data, cfg);
  uint64_t stage_key = mix_seed(cfg.seed, 0x10 + 1, static_cast<uint64_t>(cycle));
  OptimizerState opt;

  std::vector<MetricsRecord> records;
  for (int64_t epoch = 0; epoch < cfg.epochs_primary; ++epoch) {
    double t0 = now_ms();
    for (const auto& idx : batch_iter(data.size(), cfg.batch_size, stage_key, epoch)) {
      Matrix xb = take_matrix_rows(data.features, idx);
      std::vector<int> yb = gather_labels(data.y_primary, idx);

      auto [codes, cache] = forward(bundle.encoder, xb);
      Matrix logits = layer_affine(bundle.primary_head, codes);
      LossResult loss = softmax_cce(logits, yb);
      AffineGrads head = layer_backward(bundle.primary_head, codes, logits, loss.grad);
      BackwardResult back = backward(bundle.encoder, cache, head.input);

      std::vector<Matrix*> params;
      std::vector<const Matrix*> grads;
      collect_encoder(bundle, cfg, back, params, grads);
      params.push_back(&bundle.primary_head.weights);
      grads.push_back(&head.weights);
      params.push_back(&bundle.primary_head.bias);
      grads.push_back(&head.bias);
      optimizer_step(opt, params, grads, cfg);
    }
    MetricsRecord rec = eval_metrics(bundle, data, cfg, cycle, 1, epoch);
    rec.wall_ms = now_ms() - t0;
    if (sink) sink(rec);
    records.push_back(rec);
  }
  return records;
}

std::vector<MetricsRecord> stage2_subsidiary(ModelBundle& bundle, const LabeledDataset& data,
                                             const TrainConfig& cfg, int64_t cycle,
                                             const MetricsSink& sink) {
  check_stage_inputs("stage2", bundle, data, cfg);
  uint64_t stage_key = mix_seed(cfg.seed, 0x10 + 2, static_cast<uint64_t>(cycle));
  OptimizerState opt;

  // The encoder is frozen for the whole stage, so each input's code never
  // changes: compute them all once.
  Matrix codes = encode(bundle, data.features);

  std::vector<MetricsRecord> records;
  for (int64_t epoch = 0; epoch < cfg.epochs_subsidiary; ++epoch) {
    double t0 = now_ms();
    for (const auto& idx : batch_iter(data.size(), cfg.batch_size, stage_key, epoch)) {
      Matrix cb = take_matrix_rows(codes, idx);
      std::vector<int> yb = gather_labels(data.y_subsidiary, idx);

      Matrix logits = layer_affine(bundle.subsidiary_head, cb);
      LossResult loss = softmax_cce(logits, yb);
      AffineGrads head = layer_backward(bundle.subsidiary_head, cb, logits, loss.grad);

      std::vector<Matrix*> params = {&bundle.subsidiary_head.weights,
                                     &bundle.subsidiary_head.bias};
      std::vector<const Matrix*> grads = {&head.weights, &head.bias};
      optimizer_step(opt, params, grads, cfg);
    }
    MetricsRecord rec = eval_metrics(bundle, data, cfg, cycle, 2, epoch);
    rec.wall_ms = now_ms() - t0;
    if (sink) sink(rec);
    records.push_back(rec);
  }
  return records;
}

std::vector<MetricsRecord> stage3_adversarial(ModelBundle& bundle, const LabeledDataset& data,
                                              const TrainConfig& cfg, int64_t cycle,
                                              const MetricsSink& sink) {
  check_stage_inputs("stage3", bundle, data, cfg);
  if (cfg.strategy == Strategy::none) {
    throw ArgumentError("stage3: strategy none has no adversarial objective");
  }
  uint64_t stage_key = mix_seed(cfg.seed, 0x10 + 3, static_cast<uint64_t>(cycle));
  OptimizerState opt;

  std::vector<MetricsRecord> records;
  for (int64_t epoch = 0; epoch < cfg.epochs_adversarial; ++epoch) {
    double t0 = now_ms();
    for (const auto& idx : batch_iter(data.size(), cfg.batch_size, stage_key, epoch)) {
      Matrix xb = take_matrix_rows(data.features, idx);
      auto [codes, cache] = forward(bundle.encoder, xb);

      Matrix grad_codes;
      if (cfg.strategy == Strategy::cosine) {
        // Label-free by construction: only the feature rows reach this path.
        grad_codes = cosine_orthogonality_loss(bundle.subsidiary_head.weights, codes).grad;
      } else {
        std::vector<int> yb = gather_labels(data.y_subsidiary, idx);
        Matrix logits = layer_affine(bundle.subsidiary_head, codes);
        if (cfg.strategy == Strategy::reversed_cce) {
          LossResult loss = reversed_cce(logits, yb);
          grad_codes = kernels::matmul(loss.grad, bundle.subsidiary_head.weights);
        } else {
          LossResult loss = softmax_cce(logits, yb);
          grad_codes =
              grl_scale(kernels::matmul(loss.grad, bundle.subsidiary_head.weights),
                        cfg.grl_lambda);
        }
        // The subsidiary head is frozen here; its own gradients are never
        // formed.
      }

      BackwardResult back = backward(bundle.encoder, cache, grad_codes);
      std::vector<Matrix*> params;
      std::vector<const Matrix*> grads;
      collect_encoder(bundle, cfg, back, params, grads);
      optimizer_step(opt, params, grads, cfg);
    }
    MetricsRecord rec = eval_metrics(bundle, data, cfg, cycle, 3, epoch);
    rec.wall_ms = now_ms() - t0;
    if (sink) sink(rec);
    records.push_back(rec);
  }
  return records;
}

std::vector<MetricsRecord> run_cycles(ModelBundle& bundle, const LabeledDataset& data,
                                      const TrainConfig& cfg, const MetricsSink& sink) {
  cfg.validate();
  std::vector<MetricsRecord> records;
  for (int64_t cycle = 0; cycle < cfg.cycles; ++cycle) {
    auto append = [&](std::vector<MetricsRecord> part) {
      records.insert(records.end(), part.begin(), part.end());
    };
    append(stage1_primary(bundle, data, cfg, cycle, sink));
    append(stage2_subsidiary(bundle, data, cfg, cycle, sink));
    if (cfg.strategy != Strategy::none) {
      append(stage3_adversarial(bundle, data, cfg, cycle, sink));
    }
  }
  return records;
}

}  // namespace ofm
