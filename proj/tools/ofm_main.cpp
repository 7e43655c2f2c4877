#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ofm/data.hpp"
#include "ofm/error.hpp"
#include "ofm/model.hpp"
#include "ofm/probes.hpp"
#include "ofm/runconfig.hpp"
#include "ofm/train.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ofm;

struct CliArgs {
  std::string config_path;
  std::string model_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_given = false;
};

// --seed retargets every stream the run draws from; --out wins over the
// config's out_dir.
RunConfig load_effective_config(const CliArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.seed_given) {
    cfg.train.seed = args.seed;
    cfg.data.synth.seed = args.seed;
  }
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::string join_path(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

int cmd_synth(const CliArgs& args) {
  RunConfig cfg = load_effective_config(args);
  if (cfg.data.source != DataConfig::Source::synth) {
    throw ArgumentError("synth: config " + args.config_path + " has no data.synth section");
  }
  LabeledDataset ds = gen_two_factor(cfg.data.synth);
  std::string path = join_path(cfg.out_dir, "dataset.csv");
  write_csv_vectors(ds, path);
  std::printf("wrote %s (%lld rows, dim %lld)\n", path.c_str(),
              static_cast<long long>(ds.size()), static_cast<long long>(ds.dim()));
  return 0;
}

ModelBundle build_bundle(const RunConfig& cfg, const LabeledDataset& ds) {
  return make_bundle(ds.dim(), cfg.encoder_widths(), cfg.activation, ds.n_primary_classes,
                     ds.n_subsidiary_classes, cfg.train.seed);
}

int cmd_train(const CliArgs& args) {
  RunConfig cfg = load_effective_config(args);
  LabeledDataset ds = load_dataset(cfg.data);
  ModelBundle bundle = build_bundle(cfg, ds);

  std::string metrics_path = join_path(cfg.out_dir, "metrics.jsonl");
  std::string model_path = join_path(cfg.out_dir, "model.ofm");
  std::ofstream metrics(metrics_path, std::ios::binary);
  if (!metrics) throw IoError("cannot open " + metrics_path + " for writing");

  int64_t n_records = 0;
  try {
    run_cycles(bundle, ds, cfg.train, [&](const MetricsRecord& rec) {
      metrics << rec.to_json_line() << '\n';
      metrics.flush();
      ++n_records;
    });
    save_bundle(bundle, model_path);
  } catch (const std::exception& e) {
    // Flag the partial outputs before the error propagates.
    std::ofstream failed(join_path(cfg.out_dir, "FAILED"));
    failed << e.what() << '\n';
    throw;
  }
  std::printf("wrote %s and %s (%lld records)\n", model_path.c_str(), metrics_path.c_str(),
              static_cast<long long>(n_records));
  return 0;
}

int cmd_probe(const CliArgs& args) {
  RunConfig cfg = load_effective_config(args);
  std::string model_path =
      args.model_path.empty() ? join_path(cfg.out_dir, "model.ofm") : args.model_path;
  ModelBundle bundle = load_bundle(model_path);
  LabeledDataset ds = load_dataset(cfg.data);

  ProbeReport rep = run_probes(bundle, ds);
  std::string report = rep.to_json();
  std::string report_path = join_path(cfg.out_dir, "probe.json");
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + report_path + " for writing");
    out << report << '\n';
  }
  std::printf("%s\n", report.c_str());

  if (cfg.probes.retrain_subsidiary) {
    auto curve = probe_retrain_subsidiary(bundle, ds, cfg.train);
    write_loss_curve(curve, join_path(cfg.out_dir, "s2_loss.csv"));
  }
  if (cfg.probes.export_codes) {
    export_codes(bundle, ds, join_path(cfg.out_dir, "codes.csv"));
  }
  return 0;
}

void append_cell(std::string& out, const char* name, double v, bool last = false) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "\"%s\": %.17g%s", name, v, last ? "" : ", ");
  out += buf;
}

int cmd_repro_table1(const CliArgs& args) {
  RunConfig cfg = load_effective_config(args);
  LabeledDataset ds = load_dataset(cfg.data);
  auto [train_set, holdout] = split_dataset(ds, cfg.holdout_fraction, cfg.train.seed);
  const LabeledDataset& eval_set = holdout.size() > 0 ? holdout : train_set;

  // One shared checkpoint (primary training + subsidiary head fit), then
  // each variant applies only its own adversarial stage, so the table
  // isolates the strategy.
  ModelBundle shared = build_bundle(cfg, train_set);
  TrainConfig base = cfg.train;
  stage1_primary(shared, train_set, base);
  stage2_subsidiary(shared, train_set, base);

  struct Row {
    const char* name;
    Strategy strategy;
    double argmax = 0.0, argmin = 0.0;
  };
  Row rows[] = {{"no_adversary", Strategy::none},
                {"reversed_cce", Strategy::reversed_cce},
                {"cosine", Strategy::cosine}};
  for (Row& row : rows) {
    ModelBundle variant = shared;
    if (row.strategy != Strategy::none) {
      TrainConfig vcfg = base;
      vcfg.strategy = row.strategy;
      stage3_adversarial(variant, train_set, vcfg);
    }
    auto [amax, amin] = probe_argmax_argmin(variant, Head::subsidiary, eval_set);
    row.argmax = amax;
    row.argmin = amin;
  }

  std::string out = "{\n  \"table\": {\n    \"argmax\": {";
  append_cell(out, rows[0].name, rows[0].argmax);
  append_cell(out, rows[1].name, rows[1].argmax);
  append_cell(out, rows[2].name, rows[2].argmax, true);
  out += "},\n    \"argmin\": {";
  append_cell(out, rows[0].name, rows[0].argmin);
  append_cell(out, rows[1].name, rows[1].argmin);
  append_cell(out, rows[2].name, rows[2].argmin, true);
  out += "}\n  },\n  \"meta\": {\n    \"n_eval\": " + std::to_string(eval_set.size()) +
         ",\n    \"n_train\": " + std::to_string(train_set.size()) +
         ",\n    \"subsidiary_classes\": " + std::to_string(ds.n_subsidiary_classes) + "\n  }\n}";

  std::string path = join_path(cfg.out_dir, "table1.json");
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << out << '\n';
  }
  std::printf("%s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial feature-disentanglement trainer"};
  app.require_subcommand(1);

  CliArgs args;
  auto add_common = [&](CLI::App* sub, bool with_model) {
    sub->add_option("--config", args.config_path, "run configuration JSON")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config out_dir)");
    sub->add_option("--seed", args.seed, "seed override for all random streams")
        ->each([&](const std::string&) { args.seed_given = true; });
    if (with_model) {
      sub->add_option("--model", args.model_path,
                      "model file (default: <out_dir>/model.ofm)");
    }
  };

  CLI::App* synth = app.add_subcommand("synth", "generate the configured synthetic dataset CSV");
  add_common(synth, false);
  CLI::App* train = app.add_subcommand("train", "run the staged training cycles");
  add_common(train, false);
  CLI::App* probe = app.add_subcommand("probe", "run diagnostics against a trained model");
  add_common(probe, true);
  CLI::App* repro =
      app.add_subcommand("repro-table1", "compare adversarial strategies from one checkpoint");
  add_common(repro, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(args);
    if (train->parsed()) return cmd_train(args);
    if (probe->parsed()) return cmd_probe(args);
    return cmd_repro_table1(args);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}
