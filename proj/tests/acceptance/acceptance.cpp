// Acceptance gate: one PASS/FAIL line per criterion, exit 0 iff all pass.
// Tolerances are pinned here, not configurable; every run is deterministic.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ofm/data.hpp"
#include "ofm/error.hpp"
#include "ofm/gradcheck.hpp"
#include "ofm/losses.hpp"
#include "ofm/model.hpp"
#include "ofm/network.hpp"
#include "ofm/probes.hpp"
#include "ofm/rng.hpp"
#include "ofm/train.hpp"

namespace fs = std::filesystem;
using namespace ofm;

namespace {

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Matrix random_matrix(int64_t r, int64_t c, Mt64& rng, double lo = -2.0, double hi = 2.0) {
  Matrix m(r, c);
  for (int64_t i = 0; i < m.size(); ++i) m.data[(size_t)i] = rng.uniform(lo, hi);
  return m;
}

std::vector<int> random_labels(int64_t n, int64_t k, Mt64& rng) {
  std::vector<int> y((size_t)n);
  for (auto& v : y) v = (int)rng.below(k);
  return y;
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion1() {
  constexpr double kEps = 1e-5;
  constexpr double kTol = 1e-4;
  double t0 = now_s();
  double worst = 0.0;
  int instances = 0;

  for (uint64_t t = 0; t < 5; ++t) {
    Mt64 rng(mix_seed(0xACC0, 1, t));
    int64_t n = 2 + (int64_t)(t % 3);
    int64_t k = 2 + (int64_t)(t % 4);

    {  // primary/subsidiary cross entropy wrt logits
      Matrix logits = random_matrix(n, k, rng, -3.0, 3.0);
      auto labels = random_labels(n, k, rng);
      LossResult lr = softmax_cce(logits, labels);
      Matrix fd = finite_difference_grad(
          [&] { return softmax_cce(logits, labels).value; }, logits, kEps);
      worst = std::max(worst, max_grad_discrepancy(lr.grad, fd));
      ++instances;
    }
    {  // reversed cross entropy wrt logits
      Matrix logits = random_matrix(n, k, rng, -3.0, 3.0);
      auto labels = random_labels(n, k, rng);
      LossResult lr = reversed_cce(logits, labels);
      Matrix fd = finite_difference_grad(
          [&] { return reversed_cce(logits, labels).value; }, logits, kEps);
      worst = std::max(worst, max_grad_discrepancy(lr.grad, fd));
      ++instances;
    }
    {  // cosine orthogonality wrt codes
      Matrix w_s = random_matrix(k, 4 + (int64_t)t, rng);
      Matrix codes = random_matrix(n, 4 + (int64_t)t, rng);
      LossResult lr = cosine_orthogonality_loss(w_s, codes);
      Matrix fd = finite_difference_grad(
          [&] { return cosine_orthogonality_loss(w_s, codes).value; }, codes, kEps);
      worst = std::max(worst, max_grad_discrepancy(lr.grad, fd));
      ++instances;
    }
    {  // gradient-reversal scaling of the code gradient
      const double lambda = 1.7;
      Matrix w_s = random_matrix(k, 5, rng);
      Matrix b_s = random_matrix(1, k, rng);
      Matrix codes = random_matrix(n, 5, rng);
      auto labels = random_labels(n, k, rng);
      DenseLayer head{w_s, b_s, Activation::identity};
      auto loss_value = [&] {
        return -lambda * softmax_cce(head_logits(head, codes), labels).value;
      };
      Matrix logits = head_logits(head, codes);
      LossResult lr = softmax_cce(logits, labels);
      AffineGrads hg = layer_backward(head, codes, logits, lr.grad);
      Matrix analytic = grl_scale(hg.input, lambda);
      Matrix fd = finite_difference_grad(loss_value, codes, kEps);
      worst = std::max(worst, max_grad_discrepancy(analytic, fd));
      ++instances;
    }
  }

  // full encoder -> head composition, every parameter matrix
  for (uint64_t t = 0; t < 2; ++t) {
    Mt64 rng(mix_seed(0xACC0, 2, t));
    Activation act = t == 0 ? Activation::relu : Activation::mfm;
    ModelBundle bundle = make_bundle(5, {8, 4}, act, 3, 2, mix_seed(0xACC0, 3, t));
    Matrix x = random_matrix(4, 5, rng);
    auto labels = random_labels(4, 3, rng);

    auto loss_value = [&] {
      return softmax_cce(head_logits(bundle.primary_head, encode(bundle, x)), labels).value;
    };
    auto [codes, cache] = forward(bundle.encoder, x);
    Matrix logits = head_logits(bundle.primary_head, codes);
    LossResult lr = softmax_cce(logits, labels);
    AffineGrads hg = layer_backward(bundle.primary_head, codes, logits, lr.grad);
    BackwardResult br = backward(bundle.encoder, cache, hg.input);

    std::vector<Matrix*> params;
    std::vector<const Matrix*> grads;
    for (size_t l = 0; l < bundle.encoder.layers.size(); ++l) {
      params.push_back(&bundle.encoder.layers[l].weights);
      grads.push_back(&br.layer_grads[l].weights);
      params.push_back(&bundle.encoder.layers[l].bias);
      grads.push_back(&br.layer_grads[l].bias);
    }
    params.push_back(&bundle.primary_head.weights);
    grads.push_back(&hg.weights);
    params.push_back(&bundle.primary_head.bias);
    grads.push_back(&hg.bias);

    for (size_t p = 0; p < params.size(); ++p) {
      Matrix fd = finite_difference_grad(loss_value, *params[p], kEps);
      worst = std::max(worst, max_grad_discrepancy(*grads[p], fd));
      ++instances;
    }
  }

  double dt = now_s() - t0;
  bool pass = worst < kTol && instances >= 20 && dt < 10.0;
  return {pass, fmt("%d instances, max rel err %.2e (tol %.0e, eps %.0e), %.2fs",
                    instances, worst, kTol, kEps, dt)};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion2() {
  double t0 = now_s();

  SynthConfig sc;
  sc.n_per_cell = 100;
  sc.n_primary = 10;
  sc.n_subsidiary = 2;
  sc.dim = 32;
  sc.primary_sep = 3.0;
  sc.subsidiary_sep = 1.5;
  sc.noise_sigma = 0.6;
  sc.seed = 11;
  LabeledDataset ds = gen_two_factor(sc);
  // the probed labels are the ten primary classes; the generator's second
  // factor stays as a nuisance dimension
  ds.y_subsidiary = ds.y_primary;
  ds.n_subsidiary_classes = ds.n_primary_classes;
  auto [train_set, holdout] = split_dataset(ds, 0.25, 5);

  ModelBundle shared = make_bundle(32, {16}, Activation::relu, 10, 10, 3);
  TrainConfig base;
  base.strategy = Strategy::none;
  base.epochs_primary = 20;
  base.epochs_subsidiary = 10;
  base.batch_size = 64;
  base.lr = 3e-3;
  base.seed = 3;
  stage1_primary(shared, train_set, base);
  stage2_subsidiary(shared, train_set, base);

  auto [nx, nn] = probe_argmax_argmin(shared, Head::subsidiary, holdout);

  ModelBundle rev = shared;
  {
    TrainConfig c = base;
    c.strategy = Strategy::reversed_cce;
    c.epochs_adversarial = 60;
    c.lr = 0.01;
    stage3_adversarial(rev, train_set, c);
  }
  auto [rx, rn] = probe_argmax_argmin(rev, Head::subsidiary, holdout);

  ModelBundle cos = shared;
  {
    TrainConfig c = base;
    c.strategy = Strategy::cosine;
    c.epochs_adversarial = 60;
    c.lr = 0.01;
    stage3_adversarial(cos, train_set, c);
  }
  auto [cx, cn] = probe_argmax_argmin(cos, Head::subsidiary, holdout);

  double dt = now_s() - t0;
  bool pass = nx >= 0.95 && nn <= 0.02 && rx <= 0.05 && rn >= 0.70 && cx >= 0.05 &&
              cx <= 0.20 && cn >= 0.05 && cn <= 0.20 && dt <= 900.0;
  return {pass, fmt("none %.3f/%.3f  reversed %.3f/%.3f  cosine %.3f/%.3f, %.1fs",
                    nx, nn, rx, rn, cx, cn, dt)};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion3() {
  SynthConfig sc;
  sc.n_per_cell = 60;
  sc.n_primary = 2;
  sc.n_subsidiary = 4;
  sc.dim = 16;
  sc.primary_sep = 3.0;
  sc.subsidiary_sep = 3.0;
  sc.noise_sigma = 0.5;
  sc.seed = 7;
  LabeledDataset full = gen_two_factor(sc);

  // subsidiary class 0 kept entirely, others subsampled to 60%: the head's
  // bias then has a decisive argmax for the dominance probe
  std::vector<int64_t> keep;
  for (int64_t i = 0; i < full.size(); ++i) {
    if (full.y_subsidiary[(size_t)i] == 0 || i % 5 < 3) keep.push_back(i);
  }
  Batch b = take_rows(full, keep);
  LabeledDataset ds;
  ds.features = std::move(b.features);
  ds.y_primary = std::move(b.y_primary);
  ds.y_subsidiary = std::move(b.y_subsidiary);
  ds.n_primary_classes = 2;
  ds.n_subsidiary_classes = 4;

  ModelBundle bundle = make_bundle(16, {32, 8}, Activation::relu, 2, 4, 3);
  TrainConfig cfg;
  cfg.strategy = Strategy::cosine;
  cfg.epochs_primary = 15;
  cfg.epochs_subsidiary = 15;
  cfg.epochs_adversarial = 25;
  cfg.cycles = 3;
  cfg.batch_size = 32;
  cfg.lr = 3e-3;
  cfg.seed = 3;
  run_cycles(bundle, ds, cfg);

  TrainConfig last = cfg;
  last.epochs_adversarial = 80;
  last.lr = 0.01;
  stage3_adversarial(bundle, ds, last, 7);

  ProbeReport rep = run_probes(bundle, ds);

  double max_row = 0.0;
  for (int64_t j = 0; j < bundle.subsidiary_head.weights.rows; ++j) {
    max_row = std::max(max_row, norm2(bundle.subsidiary_head.weights.row(j),
                                      bundle.subsidiary_head.weights.cols));
  }
  Matrix codes = encode(bundle, ds.features);
  double max_code = 0.0;
  for (int64_t i = 0; i < codes.rows; ++i) {
    max_code = std::max(max_code, norm2(codes.row(i), codes.cols));
  }
  double bound = rep.max_abs_cosine * max_row * max_code + 1e-9;

  bool pass = rep.mean_sq_cosine <= 1e-3 && rep.constant_prediction_fraction >= 0.99 &&
              rep.logit_minus_bias_max <= bound;
  return {pass, fmt("mean_sq %.2e (<=1e-3)  cpf %.4f (>=0.99)  lmb %.3e <= bound %.3e",
                    rep.mean_sq_cosine, rep.constant_prediction_fraction,
                    rep.logit_minus_bias_max, bound)};
}

// ------------------------------------------------------- criteria 4 and 5

struct AdaptOutcome {
  double tgt_base = 0.0, tgt_can = 0.0, src_base = 0.0, src_can = 0.0;
  double s2_base = 0.0, s2_can = 0.0;
};

double primary_error(const ModelBundle& b, const LabeledDataset& d, int domain) {
  LabeledDataset sub = filter_by_subsidiary(d, domain);
  auto [amax, amin] = probe_argmax_argmin(b, Head::primary, sub);
  (void)amin;
  return 1.0 - amax;
}

// Two-domain run: subsidiary = domain, primary labels seen only for domain 0.
// Cycles alternate a fresh antisymmetric subsidiary head (rows +-w stay exact
// negatives under the optimizers, so its span is the one discriminative
// direction) with the cosine purge; full_s1 re-runs stage 1 inside each cycle.
AdaptOutcome run_adaptation(uint64_t s, bool full_s1, int cycles, int64_t code_dim,
                            int64_t e2, int64_t e3, double s_sep, double noise,
                            int64_t n_cell, int64_t s2_epochs) {
  SynthConfig sc;
  sc.n_per_cell = n_cell;
  sc.n_primary = 5;
  sc.n_subsidiary = 2;
  sc.dim = 24;
  sc.primary_sep = 2.5;
  sc.subsidiary_sep = s_sep;
  sc.noise_sigma = noise;
  sc.seed = 100 + s;
  LabeledDataset ds = gen_two_factor(sc);
  auto [train_all, holdout] = split_dataset(ds, 0.25, s);
  LabeledDataset source_train = filter_by_subsidiary(train_all, 0);

  TrainConfig cfg;
  cfg.strategy = Strategy::cosine;
  cfg.epochs_primary = 30;
  cfg.epochs_subsidiary = e2;
  cfg.epochs_adversarial = e3;
  cfg.batch_size = 64;
  cfg.lr = 3e-3;
  cfg.seed = 300 + s;

  ModelBundle base = make_bundle(24, {code_dim}, Activation::relu, 5, 2, 200 + s);
  ModelBundle can = base;

  stage1_primary(base, source_train, cfg);

  AdaptOutcome out;
  out.tgt_base = primary_error(base, holdout, 1);
  out.src_base = primary_error(base, holdout, 0);

  stage1_primary(can, source_train, cfg, 0);
  for (int c = 0; c < cycles; ++c) {
    if (full_s1 && c > 0) stage1_primary(can, source_train, cfg, c);
    DenseLayer sh = make_dense(can.code_dim(), 2, Activation::identity,
                               mix_seed(cfg.seed, 0x53, (uint64_t)c));
    for (int64_t j = 0; j < sh.weights.cols; ++j) sh.weights(1, j) = -sh.weights(0, j);
    sh.bias(0, 1) = -sh.bias(0, 0);
    can.subsidiary_head = sh;
    stage2_subsidiary(can, train_all, cfg, c);
    stage3_adversarial(can, train_all, cfg, c);
  }
  {
    // primary head realigned to the purged codes; encoder held fixed
    TrainConfig fin = cfg;
    fin.epochs_primary = 60;
    fin.encoder_freeze_depth = 1;
    stage1_primary(can, source_train, fin, cycles);
  }
  out.tgt_can = primary_error(can, holdout, 1);
  out.src_can = primary_error(can, holdout, 0);

  if (s2_epochs > 0) {
    TrainConfig s2cfg = cfg;
    s2cfg.epochs_subsidiary = s2_epochs;
    out.s2_base = probe_retrain_subsidiary(base, train_all, s2cfg).back().second;
    out.s2_can = probe_retrain_subsidiary(can, train_all, s2cfg).back().second;
  }
  return out;
}

Outcome criterion4() {
  double tb = 0, tc = 0, sb = 0, sc2 = 0;
  for (uint64_t s = 1; s <= 5; ++s) {
    AdaptOutcome r = run_adaptation(s, true, 4, 8, 30, 25, 4.0, 0.6, 150, 0);
    tb += r.tgt_base;
    tc += r.tgt_can;
    sb += r.src_base;
    sc2 += r.src_can;
  }
  tb /= 5, tc /= 5, sb /= 5, sc2 /= 5;
  double rel_drop = (tb - tc) / tb;
  double degrade = sc2 - sb;
  bool pass = rel_drop >= 0.30 && degrade <= 0.02;
  return {pass, fmt("target err %.3f -> %.3f (rel drop %.1f%%, need >=30%%)  "
                    "source %.3f -> %.3f (degrade %.1f pts, need <=2)",
                    tb, tc, 100 * rel_drop, sb, sc2, 100 * degrade)};
}

Outcome criterion5() {
  const double floor = std::log(2.0);
  bool pass = true;
  std::string detail;
  for (uint64_t s = 1; s <= 5; ++s) {
    AdaptOutcome r = run_adaptation(s, false, 24, 8, 30, 40, 2.5, 0.6, 200, 40);
    bool ok = r.s2_can > r.s2_base && std::fabs(r.s2_can - floor) <= 0.1;
    pass = pass && ok;
    detail += fmt("%s%.3f>%.3f", s == 1 ? "" : " ", r.s2_can, r.s2_base);
  }
  return {pass, fmt("retrained-head loss adapted>unadapted, |adapted-ln2|<=0.1: %s",
                    detail.c_str())};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6() {
  SynthConfig sc;
  sc.n_per_cell = 10;
  sc.n_primary = 3;
  sc.n_subsidiary = 4;
  sc.dim = 8;
  sc.primary_sep = 2.0;
  sc.subsidiary_sep = 2.0;
  sc.noise_sigma = 0.8;
  sc.seed = 21;
  LabeledDataset ds = gen_two_factor(sc);

  ModelBundle a = make_bundle(8, {5}, Activation::relu, 3, 4, 9);
  ModelBundle b = a;
  uint64_t before = encoder_fingerprint(a);

  TrainConfig cfg;
  cfg.epochs_adversarial = 1;
  cfg.batch_size = ds.size();  // exactly one optimizer step
  cfg.lr = 2e-3;
  cfg.seed = 13;

  TrainConfig ga = cfg;
  ga.strategy = Strategy::grl;
  ga.grl_lambda = 1.0;
  stage3_adversarial(a, ds, ga);

  TrainConfig gb = cfg;
  gb.strategy = Strategy::reversed_cce;
  stage3_adversarial(b, ds, gb);

  uint64_t fa = encoder_fingerprint(a), fb = encoder_fingerprint(b);
  bool moved = fa != before;
  bool heads_frozen = head_fingerprint(a.subsidiary_head) == head_fingerprint(b.subsidiary_head);
  bool pass = fa == fb && moved && heads_frozen;
  return {pass, fmt("encoder fingerprints %016llx %s %016llx after one step (lambda=1)",
                    (unsigned long long)fa, fa == fb ? "==" : "!=",
                    (unsigned long long)fb)};
}

// ---------------------------------------------------------------- criterion 7

std::string read_file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion7() {
#ifndef OFM_CLI_PATH
  return {false, "cli path not compiled in"};
#else
  fs::path tmp = fs::temp_directory_path() / "ofm-acceptance-c7";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp);

  fs::path cfg = tmp / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({
  "data": {"synth": {"n_per_cell": 20, "n_primary": 3, "n_subsidiary": 2, "dim": 10,
                      "primary_sep": 2.5, "subsidiary_sep": 2.0, "noise_sigma": 0.7,
                      "seed": 5}},
  "model": {"widths": [12], "activation": "relu", "code_dim": 6},
  "train": {"strategy": "cosine", "epochs_primary": 4, "epochs_subsidiary": 4,
             "epochs_adversarial": 4, "cycles": 2, "batch_size": 16, "lr": 0.003,
             "seed": 11}
})";
  }

  auto run = [&](const char* sub) {
    std::string cmd = std::string(OFM_CLI_PATH) + " train --config " + cfg.string() +
                      " --out " + (tmp / sub).string() + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  int ra = run("a"), rb = run("b");
  if (ra != 0 || rb != 0) return {false, fmt("cli exited %d / %d", ra, rb)};

  std::string ma = read_file_bytes(tmp / "a" / "metrics.jsonl");
  std::string mb = read_file_bytes(tmp / "b" / "metrics.jsonl");
  std::string oa = read_file_bytes(tmp / "a" / "model.ofm");
  std::string ob = read_file_bytes(tmp / "b" / "model.ofm");
  bool pass = !ma.empty() && !oa.empty() && ma == mb && oa == ob;
  return {pass, fmt("metrics %zu bytes %s, model %zu bytes %s", ma.size(),
                    ma == mb ? "identical" : "DIFFER", oa.size(),
                    oa == ob ? "identical" : "DIFFER")};
#endif
}

// ---------------------------------------------------------------- criterion 8

void put_u32be(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {(unsigned char)(v >> 24), (unsigned char)(v >> 16),
                        (unsigned char)(v >> 8), (unsigned char)v};
  out.write((const char*)b, 4);
}

Outcome criterion8() {
  fs::path tmp = fs::temp_directory_path() / "ofm-acceptance-c8";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp);

  fs::path img = tmp / "images.idx", lab = tmp / "labels.idx";
  {
    std::ofstream out(img, std::ios::binary);
    put_u32be(out, 0x803);
    put_u32be(out, 2);
    put_u32be(out, 2);
    put_u32be(out, 3);
    for (int i = 0; i < 12; ++i) out.put((char)i);
  }
  {
    std::ofstream out(lab, std::ios::binary);
    put_u32be(out, 0x801);
    put_u32be(out, 2);
    out.put((char)3);
    out.put((char)1);
  }

  IdxData d = read_idx(img.string(), lab.string());
  bool exact = d.features.rows == 2 && d.features.cols == 6 && d.labels.size() == 2 &&
               d.labels[0] == 3 && d.labels[1] == 1;
  for (int64_t i = 0; exact && i < 2; ++i) {
    for (int64_t j = 0; j < 6; ++j) {
      if (d.features(i, j) != (double)(i * 6 + j) / 255.0) exact = false;
    }
  }

  bool bad_magic = false;
  {
    fs::path bad = tmp / "bad_magic.idx";
    std::ofstream out(bad, std::ios::binary);
    put_u32be(out, 0x802);
    put_u32be(out, 2);
    put_u32be(out, 2);
    put_u32be(out, 3);
    for (int i = 0; i < 12; ++i) out.put((char)i);
    out.close();
    try {
      read_idx(bad.string(), lab.string());
    } catch (const FormatError&) {
      bad_magic = true;
    }
  }

  bool truncated = false;
  {
    fs::path cut = tmp / "truncated.idx";
    std::ofstream out(cut, std::ios::binary);
    put_u32be(out, 0x803);
    put_u32be(out, 2);
    put_u32be(out, 2);
    put_u32be(out, 3);
    for (int i = 0; i < 5; ++i) out.put((char)i);
    out.close();
    try {
      read_idx(cut.string(), lab.string());
    } catch (const FormatError&) {
      truncated = true;
    }
  }

  bool mismatch = false;
  {
    fs::path lab3 = tmp / "labels3.idx";
    std::ofstream out(lab3, std::ios::binary);
    put_u32be(out, 0x801);
    put_u32be(out, 3);
    out.put((char)0);
    out.put((char)1);
    out.put((char)2);
    out.close();
    try {
      read_idx(img.string(), lab3.string());
    } catch (const ConsistencyError&) {
      mismatch = true;
    }
  }

  ModelBundle bundle = make_bundle(6, {8, 4}, Activation::mfm, 3, 2, 17);
  fs::path m1 = tmp / "m1.ofm", m2 = tmp / "m2.ofm";
  save_bundle(bundle, m1.string());
  ModelBundle loaded = load_bundle(m1.string());
  save_bundle(loaded, m2.string());
  bool round_trip = bundle_fingerprint(loaded) == bundle_fingerprint(bundle) &&
                    bit_equal(loaded.encoder.layers[0].weights,
                              bundle.encoder.layers[0].weights) &&
                    read_file_bytes(m1) == read_file_bytes(m2);

  bool pass = exact && bad_magic && truncated && mismatch && round_trip;
  return {pass, fmt("fixture %s, bad magic %s, truncation %s, count mismatch %s, "
                    "round trip %s",
                    exact ? "exact" : "WRONG", bad_magic ? "rejected" : "ACCEPTED",
                    truncated ? "rejected" : "ACCEPTED", mismatch ? "rejected" : "ACCEPTED",
                    round_trip ? "bit-exact" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Row rows[] = {
      {1, "gradient suite", criterion1},
      {2, "argmax/argmin table", criterion2},
      {3, "bias dominance", criterion3},
      {4, "adaptation trend", criterion4},
      {5, "retrainability ordering", criterion5},
      {6, "gradient-reversal equivalence", criterion6},
      {7, "training determinism", criterion7},
      {8, "format conformance", criterion8},
  };

  int failed = 0;
  for (const Row& r : rows) {
    Outcome o;
    try {
      o = r.fn();
    } catch (const std::exception& e) {
      o = {false, fmt("exception: %s", e.what())};
    }
    std::printf("%s  %d  %-30s  %s\n", o.pass ? "PASS" : "FAIL", r.id, r.name,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
