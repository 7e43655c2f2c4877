#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ofm/data.hpp"
#include "ofm/losses.hpp"
#include "ofm/model.hpp"
#include "ofm/probes.hpp"
#include "ofm/train.hpp"

using namespace ofm;
namespace fs = std::filesystem;

namespace {

LabeledDataset small_task(uint64_t seed = 31) {
  SynthConfig cfg;
  cfg.n_per_cell = 8;
  cfg.n_primary = 3;
  cfg.n_subsidiary = 2;
  cfg.dim = 8;
  cfg.noise_sigma = 0.5;
  cfg.seed = seed;
  return gen_two_factor(cfg);
}

// Encoder passes the input through; heads are hand-set, so every probe value
// is computable by eye.
ModelBundle passthrough_bundle(int64_t dim, int64_t n_primary, int64_t n_subsidiary) {
  ModelBundle b;
  DenseLayer id{Matrix(dim, dim), Matrix(1, dim), Activation::identity};
  for (int64_t i = 0; i < dim; ++i) id.weights(i, i) = 1.0;
  b.encoder.layers.push_back(id);
  b.primary_head =
      DenseLayer{Matrix(n_primary, dim), Matrix(1, n_primary), Activation::identity};
  b.subsidiary_head =
      DenseLayer{Matrix(n_subsidiary, dim), Matrix(1, n_subsidiary), Activation::identity};
  return b;
}

fs::path temp_file(const char* name) {
  fs::path dir = fs::temp_directory_path() / "ofm-test-probes";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("argmax and argmin probes with hand-set heads") {
  // dataset: four examples in feature dim 2, primary labels 0,0,1,1
  LabeledDataset ds;
  ds.features = Matrix(4, 2);
  ds.features(0, 0) = 1.0;
  ds.features(1, 0) = 2.0;
  ds.features(2, 1) = 1.0;
  ds.features(3, 1) = 3.0;
  ds.y_primary = {0, 0, 1, 1};
  ds.y_subsidiary = {0, 1, 0, 1};
  ds.n_primary_classes = 2;
  ds.n_subsidiary_classes = 2;

  ModelBundle b = passthrough_bundle(2, 2, 2);
  // primary head reads the true feature: logit_j = x_j, always correct
  b.primary_head.weights(0, 0) = 1.0;
  b.primary_head.weights(1, 1) = 1.0;
  auto [amax, amin] = probe_argmax_argmin(b, Head::primary, ds);
  CHECK(amax == 1.0);
  CHECK(amin == 0.0);

  // subsidiary head constant: ties break to index 0, so argmax predicts 0
  // everywhere and argmin also predicts 0 everywhere
  auto [smax, smin] = probe_argmax_argmin(b, Head::subsidiary, ds);
  CHECK(smax == 0.5);
  CHECK(smin == 0.5);

  // flipped head: argmax always wrong, argmin always right
  b.subsidiary_head.weights(0, 0) = -1.0;
  b.subsidiary_head.weights(0, 1) = 5.0;
  b.subsidiary_head.weights(1, 0) = 5.0;
  b.subsidiary_head.weights(1, 1) = -1.0;
  ds.y_subsidiary = {0, 0, 1, 1};
  auto [fmax, fmin] = probe_argmax_argmin(b, Head::subsidiary, ds);
  CHECK(fmax == 0.0);
  CHECK(fmin == 1.0);
}

TEST_CASE("bias dominance is total when the encoder output is zero") {
  LabeledDataset ds = small_task();
  ModelBundle b = passthrough_bundle(8, 3, 2);
  for (auto& v : b.encoder.layers[0].weights.data) v = 0.0;  // codes are all zero
  b.subsidiary_head.bias(0, 1) = 2.0;  // argmax(bias) = 1

  auto [lmb, cpf] = probe_bias_dominance(b, ds);
  CHECK(lmb == 0.0);
  CHECK(cpf == 1.0);

  // letting one coordinate through reintroduces input dependence
  b.encoder.layers[0].weights(3, 3) = 0.1;
  b.subsidiary_head.weights(0, 3) = 0.5;
  auto [lmb2, cpf2] = probe_bias_dominance(b, ds);
  CHECK(lmb2 > 0.0);
  CHECK(lmb2 < 1.0);   // 0.05 * |x_3| stays small
  CHECK(cpf2 == 1.0);  // bias gap 2.0 still dominates every |w . e|
}

TEST_CASE("orthogonality probe equals the loss value on the same inputs") {
  LabeledDataset ds = small_task();
  ModelBundle b = make_bundle(8, {6, 4}, Activation::relu, 3, 2, 5);
  auto [mean_sq, max_abs_cs] = probe_orthogonality(b, ds);

  Matrix codes = encode(b, ds.features);
  LossResult lr = cosine_orthogonality_loss(b.subsidiary_head.weights, codes);
  CHECK(mean_sq == doctest::Approx(lr.value).epsilon(1e-12));
  CHECK(max_abs_cs >= 0.0);
  CHECK(max_abs_cs <= 1.0);
  CHECK(mean_sq <= max_abs_cs * max_abs_cs + 1e-12);
}

TEST_CASE("logit_minus_bias_max obeys the cosine norm bound") {
  LabeledDataset ds = small_task();
  ModelBundle b = make_bundle(8, {6, 4}, Activation::relu, 3, 2, 6);
  ProbeReport rep = run_probes(b, ds);

  double max_row = 0.0;
  for (int64_t j = 0; j < b.subsidiary_head.weights.rows; ++j) {
    max_row = std::max(max_row, norm2(b.subsidiary_head.weights.row(j),
                                      b.subsidiary_head.weights.cols));
  }
  Matrix codes = encode(b, ds.features);
  double max_code = 0.0;
  for (int64_t i = 0; i < codes.rows; ++i) {
    max_code = std::max(max_code, norm2(codes.row(i), codes.cols));
  }
  // |w . e| = |CS| |w| |e| up to the epsilon guard in CS
  CHECK(rep.logit_minus_bias_max <= rep.max_abs_cosine * max_row * max_code + 1e-9);
  CHECK(rep.n_examples == ds.size());
}

TEST_CASE("run_probes bundles the individual probes unchanged") {
  LabeledDataset ds = small_task();
  ModelBundle b = make_bundle(8, {4}, Activation::relu, 3, 2, 7);
  ProbeReport rep = run_probes(b, ds);
  auto [amax, amin] = probe_argmax_argmin(b, Head::subsidiary, ds);
  auto [lmb, cpf] = probe_bias_dominance(b, ds);
  auto [mean_sq, max_cs] = probe_orthogonality(b, ds);
  CHECK(rep.argmax_accuracy == amax);
  CHECK(rep.argmin_accuracy == amin);
  CHECK(rep.logit_minus_bias_max == lmb);
  CHECK(rep.constant_prediction_fraction == cpf);
  CHECK(rep.mean_sq_cosine == mean_sq);
  CHECK(rep.max_abs_cosine == max_cs);

  std::string js = rep.to_json();
  for (const char* key :
       {"argmax_accuracy", "argmin_accuracy", "mean_sq_cosine", "max_abs_cosine",
        "logit_minus_bias_max", "constant_prediction_fraction", "n_examples"}) {
    CHECK(js.find(key) != std::string::npos);
  }
}

TEST_CASE("retrain probe leaves the bundle alone and converges to chance on dead codes") {
  LabeledDataset ds = small_task();
  ModelBundle b = passthrough_bundle(8, 3, 2);
  for (auto& v : b.encoder.layers[0].weights.data) v = 0.0;  // no signal survives

  TrainConfig cfg;
  cfg.epochs_subsidiary = 40;
  cfg.batch_size = 16;
  cfg.lr = 3e-3;
  cfg.seed = 17;

  uint64_t before = bundle_fingerprint(b);
  auto curve = probe_retrain_subsidiary(b, ds, cfg);
  CHECK(bundle_fingerprint(b) == before);
  REQUIRE(curve.size() == 40);
  CHECK(curve.front().first == 0);
  CHECK(curve.back().first == 39);
  // constant codes: the best any head can do is the class prior, here ln 2
  CHECK(curve.back().second == doctest::Approx(std::log(2.0)).epsilon(1e-3));

  // a fresh head on informative codes does strictly better
  ModelBundle live = passthrough_bundle(8, 3, 2);
  auto live_curve = probe_retrain_subsidiary(live, ds, cfg);
  CHECK(live_curve.back().second < curve.back().second);

  // deterministic: the probe draws only from its own streams
  auto again = probe_retrain_subsidiary(live, ds, cfg);
  CHECK(again == live_curve);
}

TEST_CASE("export_codes round-trips through the csv reader") {
  LabeledDataset ds = small_task();
  ModelBundle b = make_bundle(8, {6, 4}, Activation::relu, 3, 2, 8);
  fs::path p = temp_file("codes.csv");
  export_codes(b, ds, p.string());

  LabeledDataset r = read_csv_vectors(p.string());
  CHECK(r.size() == ds.size());
  CHECK(r.dim() == b.code_dim());
  CHECK(bit_equal(r.features, encode(b, ds.features)));
  CHECK(r.y_primary == ds.y_primary);
  CHECK(r.y_subsidiary == ds.y_subsidiary);
}

TEST_CASE("write_loss_curve emits epoch,loss rows") {
  fs::path p = temp_file("curve.csv");
  write_loss_curve({{0, 0.5}, {1, 0.25}}, p.string());
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,loss");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "0,");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "1,");
}
