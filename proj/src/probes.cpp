#include "ofm/probes.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ofm/error.hpp"
#include "ofm/losses.hpp"
#include "ofm/network.hpp"
#include "ofm/rng.hpp"

namespace ofm {

namespace {

void check_probe_inputs(const char* probe, const ModelBundle& bundle,
                        const LabeledDataset& data) {
  bundle.validate();
  if (data.size() < 1) throw ArgumentError(std::string(probe) + ": empty dataset");
  data.validate();
  if (data.dim() != bundle.input_dim()) {
    throw ArgumentError(std::string(probe) + ": data dim " + std::to_string(data.dim()) +
                        " != model input dim " + std::to_string(bundle.input_dim()));
  }
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string ProbeReport::to_json() const {
  std::string out = "{\n";
  const std::pair<const char*, double> fields[] = {
      {"argmax_accuracy", argmax_accuracy},
      {"argmin_accuracy", argmin_accuracy},
      {"mean_sq_cosine", mean_sq_cosine},
      {"max_abs_cosine", max_abs_cosine},
      {"logit_minus_bias_max", logit_minus_bias_max},
      {"constant_prediction_fraction", constant_prediction_fraction},
  };
  for (const auto& [name, value] : fields) {
    out += "  \"";
    out += name;
    out += "\": ";
    out += json_number(value);
    out += ",\n";
  }
  out += "  \"n_examples\": " + std::to_string(n_examples) + "\n}";
  return out;
}

std::pair<double, double> probe_argmax_argmin(const ModelBundle& bundle, Head head,
                                              const LabeledDataset& data) {
  check_probe_inputs("probe_argmax_argmin", bundle, data);
  const DenseLayer& layer =
      head == Head::primary ? bundle.primary_head : bundle.subsidiary_head;
  const std::vector<int>& labels = head == Head::primary ? data.y_primary : data.y_subsidiary;

  Matrix logits = head_logits(layer, encode(bundle, data.features));
  int64_t hit_max = 0, hit_min = 0;
  for (int64_t i = 0; i < logits.rows; ++i) {
    int label = labels[static_cast<size_t>(i)];
    if (label < 0 || label >= logits.cols) {
      throw ArgumentError("probe_argmax_argmin: label " + std::to_string(label) +
                          " out of range for " + std::to_string(logits.cols) + " classes");
    }
    if (argmax_index(logits.row(i), logits.cols) == label) ++hit_max;
    if (argmin_index(logits.row(i), logits.cols) == label) ++hit_min;
  }
  double n = static_cast<double>(logits.rows);
  return {static_cast<double>(hit_max) / n, static_cast<double>(hit_min) / n};
}

std::pair<double, double> probe_bias_dominance(const ModelBundle& bundle,
                                               const LabeledDataset& data) {
  check_probe_inputs("probe_bias_dominance", bundle, data);
  Matrix codes = encode(bundle, data.features);
  // Bias-free logits isolate the input-dependent term W_j^S . E(x).
  Matrix raw = kernels::matmul_nt(codes, bundle.subsidiary_head.weights);
  double lmb_max = max_abs(raw);

  const Matrix& bias = bundle.subsidiary_head.bias;
  int64_t bias_arg = argmax_index(bias.row(0), bias.cols);
  Matrix logits = head_logits(bundle.subsidiary_head, codes);
  int64_t constant = 0;
  for (int64_t i = 0; i < logits.rows; ++i) {
    if (argmax_index(logits.row(i), logits.cols) == bias_arg) ++constant;
  }
  return {lmb_max, static_cast<double>(constant) / static_cast<double>(logits.rows)};
}

std::pair<double, double> probe_orthogonality(const ModelBundle& bundle,
                                              const LabeledDataset& data) {
  check_probe_inputs("probe_orthogonality", bundle, data);
  Matrix codes = encode(bundle, data.features);
  const Matrix& w = bundle.subsidiary_head.weights;

  // The mean must agree with cosine_orthogonality_loss to the last bit, so
  // the accumulation mirrors it: per-code partial sums, then one serial sum.
  double max_abs_cs = 0.0;
  for (int64_t i = 0; i < codes.rows; ++i) {
    for (int64_t j = 0; j < w.rows; ++j) {
      double cs = std::fabs(cosine_similarity({codes.row(i), static_cast<size_t>(codes.cols)},
                                              {w.row(j), static_cast<size_t>(w.cols)}));
      if (cs > max_abs_cs) max_abs_cs = cs;
    }
  }
  double mean_sq = cosine_orthogonality_loss(w, codes).value;
  return {mean_sq, max_abs_cs};
}

std::vector<std::pair<int64_t, double>> probe_retrain_subsidiary(const ModelBundle& bundle,
                                                                 const LabeledDataset& data,
                                                                 const TrainConfig& cfg) {
  check_probe_inputs("probe_retrain_subsidiary", bundle, data);
  cfg.validate();

  Matrix codes = encode(bundle, data.features);
  DenseLayer head = make_dense(bundle.code_dim(), bundle.n_subsidiary(), Activation::identity,
                               mix_seed(cfg.seed, 0x52, 0));
  uint64_t stage_key = mix_seed(cfg.seed, 0x52, 1);
  OptimizerState opt;

  std::vector<std::pair<int64_t, double>> curve;
  for (int64_t epoch = 0; epoch < cfg.epochs_subsidiary; ++epoch) {
    for (const auto& idx : batch_iter(data.size(), cfg.batch_size, stage_key, epoch)) {
      Matrix cb = take_matrix_rows(codes, idx);
      std::vector<int> yb;
      yb.reserve(idx.size());
      for (int64_t r : idx) yb.push_back(data.y_subsidiary[static_cast<size_t>(r)]);

      Matrix logits = layer_affine(head, cb);
      LossResult loss = softmax_cce(logits, yb);
      AffineGrads hg = layer_backward(head, cb, logits, loss.grad);
      std::vector<Matrix*> params = {&head.weights, &head.bias};
      std::vector<const Matrix*> grads = {&hg.weights, &hg.bias};
      optimizer_step(opt, params, grads, cfg);
    }
    double full = softmax_cce(layer_affine(head, codes), data.y_subsidiary).value;
    curve.emplace_back(epoch, full);
  }
  return curve;
}

void export_codes(const ModelBundle& bundle, const LabeledDataset& data,
                  const std::string& path) {
  check_probe_inputs("export_codes", bundle, data);
  Matrix codes = encode(bundle, data.features);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int64_t j = 0; j < codes.cols; ++j) out << 'c' << j << ',';
  out << "y_primary,y_subsidiary\n";
  char buf[32];
  for (int64_t i = 0; i < codes.rows; ++i) {
    for (int64_t j = 0; j < codes.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", codes(i, j));
      out << buf << ',';
    }
    out << data.y_primary[static_cast<size_t>(i)] << ','
        << data.y_subsidiary[static_cast<size_t>(i)] << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_loss_curve(const std::vector<std::pair<int64_t, double>>& curve,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "epoch,loss\n";
  char buf[32];
  for (const auto& [epoch, loss] : curve) {
    std::snprintf(buf, sizeof buf, "%.17g", loss);
    out << epoch << ',' << buf << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

ProbeReport run_probes(const ModelBundle& bundle, const LabeledDataset& data) {
  ProbeReport rep;
  auto [amax, amin] = probe_argmax_argmin(bundle, Head::subsidiary, data);
  rep.argmax_accuracy = amax;
  rep.argmin_accuracy = amin;
  auto [mean_sq, max_cs] = probe_orthogonality(bundle, data);
  rep.mean_sq_cosine = mean_sq;
  rep.max_abs_cosine = max_cs;
  auto [lmb, cpf] = probe_bias_dominance(bundle, data);
  rep.logit_minus_bias_max = lmb;
  rep.constant_prediction_fraction = cpf;
  rep.n_examples = data.size();
  return rep;
}

}  // namespace ofm
