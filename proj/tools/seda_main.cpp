#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "seda/corpus.hpp"
#include "seda/experiment.hpp"
#include "seda/io.hpp"
#include "seda/metrics.hpp"
#include "seda/model.hpp"
#include "seda/seda.hpp"
#include "seda/train.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using Clock = std::chrono::steady_clock;

struct Run {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> configs;
  std::uint64_t seed = 0;
  Clock::time_point started = Clock::now();

  // One manifest per output file, written beside it.
  void manifest(const std::string& out_path) const {
    seda::RunManifest m;
    m.command = command;
    for (const std::string& cfg : configs) m.config_digests[cfg] = seda::file_digest(cfg);
    m.inputs = inputs;
    m.outputs = {out_path};
    m.seed = seed;
    m.tool_version = kVersion;
    m.duration_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    seda::write_manifest(out_path + ".manifest.json", m);
  }
};

// Relative inputs that do not exist locally fall back to SEDA_DATA_DIR.
std::string resolve_input(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  const char* base = std::getenv("SEDA_DATA_DIR");
  if (!base) return path;
  fs::path candidate = fs::path(base) / path;
  return fs::exists(candidate) ? candidate.string() : path;
}

void require_readable(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw CLI::ValidationError("missing file: " + path);
}

seda::ModelConfig model_config_from(const std::string& path, bool has_seed,
                                    std::uint64_t seed) {
  seda::ModelConfig cfg =
      path.empty() ? seda::ModelConfig{}
                   : seda::ModelConfig::from_key_values(seda::read_key_values(path));
  if (has_seed) cfg.seed = seed;
  return cfg;
}

seda::SedaConfig seda_config_from(const std::string& path) {
  return path.empty() ? seda::SedaConfig{}
                      : seda::SedaConfig::from_key_values(seda::read_key_values(path));
}

void print_report(const seda::EvalReport& r, const std::string& title) {
  std::printf("%s\n", title.c_str());
  std::printf("  %-18s P=%.4f R=%.4f F1=%.4f\n", "exact", r.exact.precision, r.exact.recall,
              r.exact.f1);
  std::printf("  %-18s EBP=%.4f EBR=%.4f EBF=%.4f\n", "boundary", r.boundary.ebp,
              r.boundary.ebr, r.boundary.ebf);
  std::printf("  %-18s P=%.4f R=%.4f F1=%.4f\n", "discontinuous", r.subset_discontinuous.precision,
              r.subset_discontinuous.recall, r.subset_discontinuous.f1);
  std::printf("  %-18s P=%.4f R=%.4f F1=%.4f\n", "cross_sentence",
              r.subset_cross_sentence.precision, r.subset_cross_sentence.recall,
              r.subset_cross_sentence.f1);
  std::printf("  counts gold=%ld pred=%ld matched=%ld\n", r.counts.gold, r.counts.predicted,
              r.counts.matched);
}

std::string report_to_json(const seda::EvalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "{\"precision\":%.10g,\"recall\":%.10g,\"f1\":%.10g,"
                "\"ebp\":%.10g,\"ebr\":%.10g,\"ebf\":%.10g,"
                "\"disc_f1\":%.10g,\"cross_f1\":%.10g,"
                "\"gold\":%ld,\"pred\":%ld,\"matched\":%ld}",
                r.exact.precision, r.exact.recall, r.exact.f1, r.boundary.ebp, r.boundary.ebr,
                r.boundary.ebf, r.subset_discontinuous.f1, r.subset_cross_sentence.f1,
                r.counts.gold, r.counts.predicted, r.counts.matched);
  return buf;
}

seda::EntitySets subset_sets(const seda::EntitySets& sets, seda::Subset subset,
                             const std::vector<seda::Document>& docs) {
  seda::EntitySets out;
  for (const seda::Document& doc : docs) {
    auto it = sets.find(doc.id);
    if (it == sets.end()) continue;
    out[doc.id] = seda::subset_filter(it->second, subset, doc.sentence_breaks);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity-centric augmentation toolkit for grid-based discontinuous NER"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = 0;
  bool has_seed = false;
  app.add_option("--seed", seed, "Run seed; overrides config seeds")
      ->each([&](const std::string&) { has_seed = true; });

  std::string in_path, out_path, corpus_dir, config_path, ckpt_path, gold_path, pred_path;
  std::string mode, mask_token = "[MASK]", dev_path, entities_path, subset, ebf_variant;
  std::vector<std::string> method_specs;
  bool unified = false;
  double step = 1e-3;
  int iterations = 0;

  CLI::App* ingest = app.add_subcommand("ingest", "Parse a standoff corpus directory");
  ingest->add_option("--corpus", corpus_dir, "Directory of .txt/.ann pairs")->required();
  ingest->add_option("--out", out_path)->required();

  CLI::App* segment = app.add_subcommand("segment", "Newline-baseline segmentation");
  segment->add_option("--mode", mode, "Segmentation mode")->default_val("newline");
  segment->add_option("--in", in_path)->required();
  segment->add_option("--out", out_path)->required();

  CLI::App* mask = app.add_subcommand("mask", "Mask context around gold entities");
  mask->add_option("--mode", mode)->required()
      ->check(CLI::IsMember({"before_first", "after_last", "both_sides"}));
  mask->add_option("--mask-token", mask_token);
  mask->add_option("--in", in_path)->required();
  mask->add_option("--out", out_path)->required();

  CLI::App* train_cmd = app.add_subcommand("train", "Train the grid tagger");
  train_cmd->add_option("--config", config_path, "Model config (key=value)");
  train_cmd->add_option("--data", in_path, "Training samples")->required();
  train_cmd->add_option("--dev", dev_path, "Dev documents for per-epoch metrics");
  train_cmd->add_option("--out", out_path, "Checkpoint path")->required();

  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict tag grids for samples");
  predict_cmd->add_option("--ckpt", ckpt_path)->required();
  predict_cmd->add_option("--in", in_path, "Samples")->required();
  predict_cmd->add_option("--out", out_path, "Grid records")->required();
  predict_cmd->add_option("--entities", entities_path,
                          "Also write decoded entities in document coordinates");

  CLI::App* augment = app.add_subcommand("augment", "Run the augmentation pipeline");
  augment->add_option("--ckpt", ckpt_path)->required();
  augment->add_option("--in", in_path, "Documents")->required();
  augment->add_option("--config", config_path, "Pipeline config (key=value)");
  augment->add_option("--mode", mode)->default_val("once")->check(CLI::IsMember({"once", "mul"}));
  augment->add_option("--iterations", iterations, "Override max_iterations for --mode mul");
  augment->add_option("--anchors", pred_path, "External anchor predictions (default: model)");
  augment->add_option("--out", out_path, "Augmented samples")->required();
  augment->add_option("--pred", entities_path, "Also write pipeline predictions");

  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold");
  evaluate_cmd->add_option("--pred", pred_path)->required();
  evaluate_cmd->add_option("--gold", gold_path, "Gold documents")->required();
  evaluate_cmd->add_option("--subset", subset)
      ->check(CLI::IsMember({"discontinuous", "cross_sentence"}));
  evaluate_cmd->add_flag("--unified", unified, "Drop cross-sentence gold (legacy protocol)");
  evaluate_cmd->add_option("--ebf-variant", ebf_variant)
      ->default_val("matched")
      ->check(CLI::IsMember({"matched", "literal"}));
  evaluate_cmd->add_option("--out", out_path, "Structured report record");

  CLI::App* report_cmd = app.add_subcommand("report", "Cross-sentence coverage/accuracy");
  bool cross_flag = false;
  report_cmd->add_flag("--cross-sentence", cross_flag)->required();
  report_cmd->add_option("--gold", gold_path)->required();
  report_cmd
      ->add_option("--method", method_specs,
                   "name=<samples.jsonl>:<pred.jsonl>, repeatable")
      ->required();
  report_cmd->add_option("--out", out_path);

  CLI::App* ablate = app.add_subcommand("ablate", "Sweep supplemental-interval settings");
  ablate->add_option("--ckpt", ckpt_path)->required();
  ablate->add_option("--in", in_path, "Documents with gold")->required();
  ablate->add_option("--config", config_path, "Base pipeline config");
  ablate->add_option("--out", out_path, "Row records");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_option("--config", config_path, "Model config (key=value)");
  gradcheck->add_option("--step", step)->default_val(1e-3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  Run run;
  for (int k = 0; k < argc; ++k) run.command += std::string(k ? " " : "") + argv[k];
  run.seed = has_seed ? seed : seda::ModelConfig{}.seed;

  try {
    if (!config_path.empty()) {
      config_path = resolve_input(config_path);
      require_readable(config_path);
      run.configs.push_back(config_path);
    }
    auto input = [&](std::string& path) -> const std::string& {
      path = resolve_input(path);
      require_readable(path);
      run.inputs.push_back(path);
      return path;
    };

    if (*ingest) {
      std::vector<seda::Document> docs = seda::read_corpus_dir(input(corpus_dir));
      seda::write_documents(out_path, docs);
      run.manifest(out_path);
      std::printf("ingested %zu documents -> %s\n", docs.size(), out_path.c_str());
    } else if (*segment) {
      if (mode != "newline") throw seda::ConfigError("unknown segmentation mode '" + mode + "'");
      std::vector<seda::Sample> samples;
      for (const seda::Document& doc : seda::read_documents(input(in_path)))
        for (seda::Sample& s : seda::split_newline(doc)) samples.push_back(std::move(s));
      seda::write_samples(out_path, samples);
      run.manifest(out_path);
      std::printf("wrote %zu samples -> %s\n", samples.size(), out_path.c_str());
    } else if (*mask) {
      std::vector<seda::Document> docs = seda::read_documents(input(in_path));
      long skipped = 0;
      for (seda::Document& doc : docs) {
        seda::MaskResult r =
            seda::mask_context(doc, seda::mask_mode_from_string(mode), mask_token);
        skipped += r.skipped_no_entities;
        doc = std::move(r.doc);
      }
      seda::write_documents(out_path, docs);
      run.manifest(out_path);
      if (skipped > 0)
        std::fprintf(stderr, "warning: %ld entity-free documents left unmasked\n", skipped);
      std::printf("masked %zu documents -> %s\n", docs.size(), out_path.c_str());
    } else if (*train_cmd) {
      seda::ModelConfig cfg = model_config_from(config_path, has_seed, seed);
      std::vector<seda::Sample> samples = seda::read_samples(input(in_path));
      std::vector<seda::Sample> dev_samples;
      std::vector<seda::Document> dev_docs;
      if (!dev_path.empty()) {
        dev_docs = seda::read_documents(input(dev_path));
        dev_samples = seda::newline_samples(dev_docs);
      }
      seda::TrainResult result = seda::train(samples, cfg, dev_samples, dev_docs);
      for (const seda::Checkpoint& c : result.checkpoints)
        std::printf("epoch %d: dev EBF=%.4f dev F1=%.4f\n", c.epoch, c.dev_ebf, c.dev_f1);
      if (!result.checkpoints.empty()) {
        seda::BoundarySelection best = seda::select_boundaries(result.checkpoints, dev_docs);
        seda::restore(result.model, result.checkpoints[size_t(best.checkpoint_index)]);
        std::printf("selected epoch %d by dev EBF\n",
                    result.checkpoints[size_t(best.checkpoint_index)].epoch);
      }
      seda::save_model(out_path, result.model);
      run.manifest(out_path);
      std::printf("checkpoint -> %s\n", out_path.c_str());
    } else if (*predict_cmd) {
      seda::GridModel model = seda::load_model(input(ckpt_path));
      std::vector<seda::Sample> samples = seda::read_samples(input(in_path));
      std::vector<seda::TagGrid> grids;
      long repaired = 0;
      for (const seda::Sample& s : samples) {
        if (s.tokens.empty()) continue;
        seda::PredictResult r = seda::predict(model, s);
        repaired += r.repaired_cells;
        grids.push_back(std::move(r.grid));
      }
      seda::write_grids(out_path, grids, model.scheme());
      run.manifest(out_path);
      if (!entities_path.empty()) {
        seda::EntitySets sets = seda::predict_documents(model, samples);
        seda::write_entity_sets(entities_path, sets);
        run.manifest(entities_path);
      }
      std::printf("predicted %zu grids (%ld repaired cells) -> %s\n", grids.size(), repaired,
                  out_path.c_str());
    } else if (*augment) {
      seda::GridModel model = seda::load_model(input(ckpt_path));
      std::vector<seda::Document> docs = seda::read_documents(input(in_path));
      seda::SedaConfig cfg = seda_config_from(config_path);
      if (iterations > 0) cfg.max_iterations = iterations;
      std::optional<seda::EntitySets> anchors;
      if (!pred_path.empty()) anchors = seda::read_entity_sets(input(pred_path));

      std::map<std::string, std::vector<seda::Sample>> samples;
      seda::EntitySets predictions;
      if (mode == "once") {
        seda::SedaRunResult result = seda::run_once(docs, model, cfg, anchors);
        samples = std::move(result.samples);
        predictions = std::move(result.predictions);
        std::printf("coverage: all %ld/%ld, cross-sentence %ld/%ld\n",
                    result.coverage.all.covered, result.coverage.all.total,
                    result.coverage.cross_sentence.covered, result.coverage.cross_sentence.total);
      } else {
        seda::SedaMulResult result = seda::run_mul(docs, model, cfg, anchors);
        samples = std::move(result.last_samples);
        predictions = std::move(result.combined);
        std::printf("ran %d iterations (%s combiner)\n", result.iterations_run,
                    seda::to_string(cfg.combiner));
      }
      std::vector<seda::Sample> flat;
      for (const seda::Document& doc : docs) {
        auto it = samples.find(doc.id);
        if (it == samples.end()) continue;
        for (const seda::Sample& s : it->second) flat.push_back(s);
      }
      seda::write_samples(out_path, flat);
      run.manifest(out_path);
      if (!entities_path.empty()) {
        for (const seda::Document& doc : docs) predictions.try_emplace(doc.id);
        seda::write_entity_sets(entities_path, predictions);
        run.manifest(entities_path);
      }
      std::printf("wrote %zu augmented samples -> %s\n", flat.size(), out_path.c_str());
    } else if (*evaluate_cmd) {
      seda::EntitySets pred = seda::read_entity_sets(input(pred_path));
      std::vector<seda::Document> docs = seda::read_documents(input(gold_path));
      seda::EvalOptions opts;
      opts.unified = unified;
      opts.variant = seda::ebf_variant_from_string(ebf_variant);
      if (!subset.empty()) {
        seda::Subset s = seda::subset_from_string(subset);
        if (unified) docs = seda::unified_filter(docs);
        opts.unified = false;
        pred = subset_sets(pred, s, docs);
        for (seda::Document& doc : docs)
          doc.gold = seda::subset_filter(doc.gold, s, doc.sentence_breaks);
      }
      seda::EvalReport report = seda::evaluate(pred, docs, opts);
      print_report(report, subset.empty() ? "all entities" : "subset: " + subset);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << report_to_json(report) << "\n";
        run.manifest(out_path);
      }
    } else if (*report_cmd) {
      std::vector<seda::Document> docs = seda::read_documents(input(gold_path));
      std::vector<seda::MethodOutput> methods;
      for (const std::string& spec : method_specs) {
        size_t eq = spec.find('=');
        size_t colon = spec.rfind(':');
        if (eq == std::string::npos || colon == std::string::npos || colon <= eq)
          throw seda::ConfigError("--method wants name=<samples>:<pred>, got '" + spec + "'");
        seda::MethodOutput m;
        m.name = spec.substr(0, eq);
        std::string samples_file = spec.substr(eq + 1, colon - eq - 1);
        std::string pred_file = spec.substr(colon + 1);
        for (seda::Sample& s : seda::read_samples(input(samples_file)))
          m.samples[s.doc_id].push_back(std::move(s));
        m.predictions = seda::read_entity_sets(input(pred_file));
        methods.push_back(std::move(m));
      }
      std::vector<seda::CrossSentenceRow> rows = seda::cross_sentence_report(methods, docs);
      std::ofstream out;
      if (!out_path.empty()) out.open(out_path);
      for (const seda::CrossSentenceRow& row : rows) {
        if (row.applicable)
          std::printf("%-16s coverage=%.4f accuracy=%.4f (n=%ld)\n", row.name.c_str(),
                      row.coverage, row.accuracy, row.total);
        else
          std::printf("%-16s n/a (no cross-sentence gold)\n", row.name.c_str());
        if (out.is_open()) {
          char buf[256];
          std::snprintf(buf, sizeof buf,
                        "{\"method\":\"%s\",\"applicable\":%s,\"coverage\":%.10g,"
                        "\"accuracy\":%.10g,\"total\":%ld}",
                        row.name.c_str(), row.applicable ? "true" : "false", row.coverage,
                        row.accuracy, row.total);
          out << buf << "\n";
        }
      }
      if (out.is_open()) {
        out.close();
        run.manifest(out_path);
      }
    } else if (*ablate) {
      seda::GridModel model = seda::load_model(input(ckpt_path));
      std::vector<seda::Document> docs = seda::read_documents(input(in_path));
      seda::SedaConfig base = seda_config_from(config_path);
      std::ofstream out;
      if (!out_path.empty()) out.open(out_path);
      const char* dirs[] = {"only look forward", "only look backward", "look both sides"};
      const char* targets[] = {"ES", "NES", "BOTH"};
      for (int size_opt : {2, 3, 4}) {
        for (int d = 0; d < 3; ++d) {
          for (int t = 0; t < 3; ++t) {
            seda::SedaConfig cfg = base;
            cfg.es_enabled = t != 1;
            cfg.nes_enabled = t != 0;
            cfg.look_forward = d != 1 ? size_opt : 0;
            cfg.look_backward = d != 0 ? size_opt : 0;
            seda::SedaRunResult result = seda::run_once(docs, model, cfg);
            seda::EvalReport report = seda::evaluate(result.predictions, docs);
            std::printf("%-18s =%d (%-4s) P=%.4f R=%.4f F1=%.4f\n", dirs[d], size_opt,
                        targets[t], report.exact.precision, report.exact.recall,
                        report.exact.f1);
            if (out.is_open()) {
              char buf[256];
              std::snprintf(buf, sizeof buf,
                            "{\"direction\":\"%s\",\"size\":%d,\"target\":\"%s\","
                            "\"f1\":%.10g}",
                            dirs[d], size_opt, targets[t], report.exact.f1);
              out << buf << "\n";
            }
          }
        }
      }
      if (out.is_open()) {
        out.close();
        run.manifest(out_path);
      }
    } else if (*gradcheck) {
      seda::ModelConfig cfg = model_config_from(config_path, has_seed, seed);
      cfg.dropout = 0.0;
      seda::Vocab vocab;
      for (const char* w : {"severe", "muscle", "pain", "in", "legs", "and"}) vocab.add(w);
      seda::TagScheme scheme(cfg.tag_mode, {"ADR", "DIS"});
      seda::GridModel model(cfg, vocab, scheme);
      std::vector<seda::Entity> entities{seda::Entity::from_token_indices("ADR", {0, 1, 2}),
                                         seda::Entity::from_token_indices("DIS", {4})};
      seda::TagGrid gold = seda::encode(entities, 6, scheme);
      seda::GradCheckReport report =
          seda::gradient_check(model, {1, 2, 3, 4, 5, 6}, gold, step);
      for (const auto& group : report.groups)
        std::printf("%-12s max rel error %.3e over %zu coordinates\n", group.name.c_str(),
                    group.max_rel_error, group.checked);
      std::printf("max relative gradient error: %.3e\n", report.max_rel_error);
      return report.max_rel_error <= 1e-4 ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const seda::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const seda::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
