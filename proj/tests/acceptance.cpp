// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criterion 9 is dataset-gated and reports SKIP when the
// clinical corpora are not present. The CLI binary path arrives as argv[1]
// (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "seda/corpus.hpp"
#include "seda/experiment.hpp"
#include "seda/grid.hpp"
#include "seda/io.hpp"
#include "seda/metrics.hpp"
#include "seda/model.hpp"
#include "seda/rng.hpp"
#include "seda/seda.hpp"
#include "seda/synth.hpp"
#include "seda/train.hpp"

using namespace seda;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

int failures = 0;
int checked = 0;

void verdict(int criterion, bool ok, const std::string& detail) {
  ++checked;
  if (!ok) ++failures;
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
}

void skip(int criterion, const std::string& detail) {
  ++checked;
  std::printf("[SKIP] criterion %d: %s\n", criterion, detail.c_str());
  std::fflush(stdout);
}

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median3(double a, double b, double c) {
  std::vector<double> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v[1];
}

// --- criterion 1: grid round-trip ------------------------------------------

std::vector<Entity> random_entities(Rng& rng, int n, int max_entities) {
  std::vector<Entity> out;
  std::set<int> used;
  for (int e = rng.range(0, max_entities); e > 0; --e) {
    const bool disc = rng.bernoulli(0.45);
    const int want = disc ? rng.range(3, 5) : rng.range(1, 3);
    std::vector<int> picks;
    for (int attempt = 0; attempt < 40 && static_cast<int>(picks.size()) < want; ++attempt) {
      int ix = rng.range(0, n - 1);
      if (!used.count(ix)) {
        used.insert(ix);
        picks.push_back(ix);
      }
    }
    if (picks.empty()) continue;
    std::sort(picks.begin(), picks.end());
    if (disc && picks.size() >= 2) {
      bool has_gap = false;
      for (size_t k = 0; k + 1 < picks.size(); ++k)
        has_gap = has_gap || picks[k + 1] > picks[k] + 1;
      if (!has_gap) continue;
    }
    out.push_back(Entity::from_token_indices(rng.bernoulli(0.5) ? "ADR" : "DIS", picks));
  }
  return dedupe_entities(out);
}

void criterion_1() {
  auto start = Clock::now();
  Rng rng(20250808);
  long trials = 0, round_trips = 0, disc = 0, total = 0;
  bool conflicts_raised = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.range(2, 30);
    std::vector<Entity> entities = random_entities(rng, n, 4);
    for (const Entity& e : entities) disc += e.discontinuous(), ++total;
    const TagScheme scheme(trial % 2 ? TagMode::Extended : TagMode::Base, {"ADR", "DIS"});
    TagGrid grid = encode(entities, n, scheme);
    ++trials;
    round_trips += dedupe_entities(decode(grid, scheme)) == entities;
  }
  // Constructed THW collisions must raise, never pass silently.
  const TagScheme scheme(TagMode::Base, {"ADR", "DIS"});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Entity> clash{Entity::from_token_indices("ADR", {1, trial % 3 + 2, 6}),
                              Entity::from_token_indices("DIS", {1, (trial + 1) % 3 + 2, 6})};
    try {
      encode(clash, 8, scheme);
      conflicts_raised = false;
    } catch (const EncodeConflictError&) {
    }
  }
  const double secs = elapsed(start);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "grid round-trip %ld/%ld, %.0f%% discontinuous, conflicts %s, %.1fs",
                round_trips, trials, 100.0 * double(disc) / double(total),
                conflicts_raised ? "raised" : "SILENT", secs);
  verdict(1, round_trips == trials && disc * 10 >= total * 3 && conflicts_raised && secs < 10.0,
          buf);
}

// --- criterion 2: EBF oracle -----------------------------------------------

long oracle_matched(const std::vector<int>& pred, const std::vector<int>& gold) {
  std::vector<int> match_g(gold.size(), -1);
  std::function<bool(size_t, std::vector<bool>&)> try_assign = [&](size_t p,
                                                                   std::vector<bool>& seen) {
    for (size_t g = 0; g < gold.size(); ++g) {
      if (pred[p] != gold[g] || seen[g]) continue;
      seen[g] = true;
      if (match_g[g] < 0 || try_assign(size_t(match_g[g]), seen)) {
        match_g[g] = static_cast<int>(p);
        return true;
      }
    }
    return false;
  };
  long matched = 0;
  for (size_t p = 0; p < pred.size(); ++p) {
    std::vector<bool> seen(gold.size(), false);
    matched += try_assign(p, seen);
  }
  return matched;
}

void criterion_2() {
  Rng rng(2);
  bool exact = true;
  for (int trial = 0; trial < 500 && exact; ++trial) {
    EntitySets gold, pred;
    long total_gold = 0, total_pred = 0, want_matched = 0, want_literal = 0;
    for (int d = rng.range(1, 4); d > 0; --d) {
      std::string id = "d" + std::to_string(d);
      std::vector<int> gold_tails, pred_tails;
      for (int k = rng.range(0, 5); k > 0; --k) {
        int head = rng.range(0, 6), tail = head + 10 + rng.range(0, 3);
        gold[id].push_back(Entity::from_token_indices("A", {head, tail}));
        gold_tails.push_back(tail);
      }
      gold.try_emplace(id);
      for (int k = rng.range(0, 5); k > 0; --k) {
        int head = rng.range(0, 6), tail = head + 10 + rng.range(0, 3);
        pred[id].push_back(Entity::from_token_indices("A", {head, tail}));
        pred_tails.push_back(tail);
      }
      total_gold += static_cast<long>(gold_tails.size());
      total_pred += static_cast<long>(pred_tails.size());
      want_matched += oracle_matched(pred_tails, gold_tails);
      long lit = 0;
      for (int p : pred_tails)
        for (int g : gold_tails) lit += p == g;
      want_literal += lit;
    }
    BoundaryScores mat = ebf(pred, gold, EbfVariant::Matched);
    BoundaryScores lit = ebf(pred, gold, EbfVariant::Literal);
    exact = exact && mat.counts.matched == want_matched;
    exact = exact && lit.counts.matched == want_literal;
    auto f_of = [](double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; };
    const double want_mp = total_pred ? double(want_matched) / double(total_pred) : 0.0;
    const double want_mr = total_gold ? double(want_matched) / double(total_gold) : 0.0;
    const double want_lp = total_pred ? double(want_literal) / double(total_pred) : 0.0;
    const double want_lr = total_gold ? double(want_literal) / double(total_gold) : 0.0;
    exact = exact && mat.ebp == want_mp && mat.ebr == want_mr &&
            mat.ebf == f_of(want_mp, want_mr) && lit.ebp == want_lp && lit.ebr == want_lr &&
            lit.ebf == f_of(want_lp, want_lr);
  }
  verdict(2, exact, exact ? "matched and literal EBF equal the brute-force oracles on 500 "
                            "configurations, exactly"
                          : "EBF oracle mismatch");
}

// --- criterion 3: segmentation partition ------------------------------------

void criterion_3() {
  Rng rng(3);
  SedaConfig cfg;
  bool ok = true;
  std::string why = "";
  for (int trial = 0; trial < 500 && ok; ++trial) {
    const int n = rng.range(1, 2400);
    std::string raw;
    for (int k = 0; k < n; ++k) raw += (k ? " t" : "t") + std::to_string(k);
    Document doc = make_document("d", raw);
    std::vector<Entity> preds;
    for (int e = rng.range(0, 6); e > 0; --e) {
      int a = rng.range(0, n - 1);
      int b = std::min(n - 1, a + rng.range(0, 8));
      std::vector<int> toks{a, b};
      if (b - a > 1 && rng.bernoulli(0.5)) toks = {a, a + (b - a) / 2, b};
      preds.push_back(Entity::from_token_indices("ADR", toks));
    }
    preds = dedupe_entities(preds);
    const int grid_size = grid_size_for(n, cfg);
    std::vector<Segment> segments = build_segments(doc, preds, grid_size);
    int cursor = 0;
    for (const Segment& seg : segments) {
      if (seg.doc_range.start != cursor || seg.doc_range.end <= seg.doc_range.start) {
        ok = false;
        why = "tiling broken";
      }
      cursor = seg.doc_range.end;
      if (seg.parity == SegmentParity::EvenText && seg.doc_range.length() > grid_size) {
        ok = false;
        why = "even block exceeds grid size";
      }
    }
    if (cursor != n) {
      ok = false;
      why = "segments do not cover the document";
    }
    for (const Entity& e : preds) {
      Span cover = e.covering_interval();
      bool inside = false;
      for (const Segment& seg : segments)
        inside = inside || (seg.parity == SegmentParity::OddEntity &&
                            seg.doc_range.start <= cover.start && cover.end <= seg.doc_range.end);
      if (!inside) {
        ok = false;
        why = "anchor interval split";
      }
    }
  }
  // Boundary lengths fall into the higher table row.
  const int bounds[] = {200, 350, 500, 1000, 1350, 1500, 2000};
  const int sizes[] = {9, 11, 13, 15, 16, 17, 19};
  for (size_t k = 0; k < 7; ++k)
    if (grid_size_for(bounds[k], cfg) != sizes[k]) {
      ok = false;
      why = "table boundary " + std::to_string(bounds[k]);
    }
  verdict(3, ok,
          ok ? "500 random documents tile exactly; anchors never split; table boundaries "
               "200/350/500/1000/1350/1500/2000 -> 9/11/13/15/16/17/19"
             : "segmentation: " + why);
}

// --- criterion 4: coverage contrast ----------------------------------------

std::vector<Document> criterion_corpus() {
  SynthOptions opts;
  opts.n_docs = 200;
  opts.seed = 4;
  return gen_corpus(opts);
}

void criterion_4() {
  auto start = Clock::now();
  std::vector<Document> docs = criterion_corpus();
  long base_total = 0, base_covered = 0;
  for (const Document& doc : docs) {
    CoverageReport r = coverage(split_newline(doc), doc);
    base_total += r.cross_sentence.total;
    base_covered += r.cross_sentence.covered;
  }
  ModelConfig tiny;
  tiny.d_h = 8;
  tiny.d_ed = 4;
  tiny.d_et = 2;
  tiny.d_c = 4;
  tiny.dilations = {1};
  Vocab vocab;
  vocab.add("w0");
  GridModel model(tiny, vocab, TagScheme(TagMode::Base, {"ADR", "DIS"}));
  EntitySets oracle;
  for (const Document& doc : docs) oracle[doc.id] = doc.gold;
  SedaRunResult seda = run_once(docs, model, SedaConfig{}, oracle);
  const double secs = elapsed(start);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "newline cross-sentence coverage %ld/%ld, oracle-anchored %ld/%ld, %.1fs",
                base_covered, base_total, seda.coverage.cross_sentence.covered,
                seda.coverage.cross_sentence.total, secs);
  verdict(4,
          base_total > 0 && base_covered == 0 &&
              seda.coverage.cross_sentence.total == base_total &&
              seda.coverage.cross_sentence.covered == base_total && secs < 30.0,
          buf);
}

// --- criterion 5: gradient check (toy config) --------------------------------

void criterion_5() {
  auto start = Clock::now();
  ModelConfig cfg;  // toy defaults
  cfg.dropout = 0.0;
  Vocab vocab;
  for (const char* w : {"severe", "muscle", "pain", "in", "legs", "and"}) vocab.add(w);
  TagScheme scheme(TagMode::Base, {"ADR", "DIS"});
  GridModel model(cfg, vocab, scheme);
  std::vector<Entity> entities{Entity::from_token_indices("ADR", {0, 1, 2}),
                               Entity::from_token_indices("DIS", {4})};
  TagGrid gold = encode(entities, 6, scheme);
  GradCheckReport report = gradient_check(model, {1, 2, 3, 4, 5, 6}, gold, 1e-3);
  const double secs = elapsed(start);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "max relative gradient error %.3e over %zu groups (%ld params), %.1fs",
                report.max_rel_error, report.groups.size(), model.parameter_count(), secs);
  verdict(5, report.max_rel_error <= 1e-4 && secs < 60.0, buf);
}

// --- criterion 6: overfit check ----------------------------------------------

void criterion_6() {
  auto start = Clock::now();
  SynthOptions opts;
  opts.n_docs = 50;
  opts.cross_sentence = false;
  opts.seed = 6;
  std::vector<Document> docs = gen_corpus(opts);
  std::vector<Sample> samples = newline_samples(docs);
  ModelConfig cfg;  // toy defaults
  cfg.epochs = 60;
  cfg.seed = 6;
  TrainResult result = train(samples, cfg);
  EntitySets pred = predict_documents(result.model, samples);
  for (const Document& doc : docs) pred.try_emplace(doc.id);
  EvalReport report = evaluate(pred, docs);
  const double secs = elapsed(start);
  char buf[256];
  std::snprintf(buf, sizeof buf, "train-set exact F1 %.4f on 50 synthetic documents, %.0fs",
                report.exact.f1, secs);
  verdict(6, report.exact.f1 >= 0.95 && secs < 300.0, buf);
}

// --- criterion 7: directional SEDA check -------------------------------------

void criterion_7() {
  std::vector<Document> all = criterion_corpus();
  CorpusSplit split = split_corpus(all);
  std::vector<double> base_f1, once_f1, base_disc, once_disc, mul_disc;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    ExperimentConfig cfg;
    cfg.model.seed = seed;
    cfg.seda.max_iterations = 3;
    cfg.seda.combiner = Combiner::Intersection;
    ExperimentResult r = run_experiment(split.train, split.dev, split.test, cfg);
    base_f1.push_back(r.baseline.exact.f1);
    once_f1.push_back(r.once.exact.f1);
    base_disc.push_back(r.baseline.subset_discontinuous.f1);
    once_disc.push_back(r.once.subset_discontinuous.f1);
    mul_disc.push_back(r.mul.subset_discontinuous.f1);
    std::printf("  seed %llu: baseline F1 %.4f (disc %.4f) | once F1 %.4f (disc %.4f) | "
                "mul disc %.4f\n",
                static_cast<unsigned long long>(seed), r.baseline.exact.f1,
                r.baseline.subset_discontinuous.f1, r.once.exact.f1,
                r.once.subset_discontinuous.f1, r.mul.subset_discontinuous.f1);
    std::fflush(stdout);
  }
  const double mb = median3(base_f1[0], base_f1[1], base_f1[2]);
  const double mo = median3(once_f1[0], once_f1[1], once_f1[2]);
  const double mbd = median3(base_disc[0], base_disc[1], base_disc[2]);
  const double mod = median3(once_disc[0], once_disc[1], once_disc[2]);
  const double mmd = median3(mul_disc[0], mul_disc[1], mul_disc[2]);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "median F1: once %.4f vs baseline %.4f; disc F1: once %.4f vs baseline %.4f; "
                "mul disc %.4f >= once-0.02",
                mo, mb, mod, mbd, mmd);
  verdict(7, mo >= mb && mod > mbd && mmd >= mod - 0.02, buf);
}

// --- criterion 8: softmax and CLN numerics -----------------------------------

void criterion_8() {
  ModelConfig cfg;  // toy defaults
  Vocab vocab;
  for (int k = 0; k < 40; ++k) vocab.add("w" + std::to_string(k));
  GridModel model(cfg, vocab, TagScheme(TagMode::Base, {"ADR", "DIS"}));
  Rng rng(8);
  bool softmax_ok = true, cln_ok = true;
  double worst_sum = 0.0, worst_mu = 0.0, worst_std = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.range(1, 24);
    std::vector<int> ids;
    for (int k = 0; k < n; ++k) ids.push_back(rng.range(0, 39));
    Trace t = forward(model, ids);
    const int T = model.num_tags();
    for (size_t cell = 0; cell < size_t(n) * size_t(n); ++cell) {
      double sum = 0.0;
      for (int tt = 0; tt < T; ++tt) sum += t.Y[cell * size_t(T) + size_t(tt)];
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      softmax_ok = softmax_ok && std::abs(sum - 1.0) <= 1e-6;
    }
    for (int j = 0; j < n; ++j) {
      if (t.sigma[size_t(j)] < kClnSigmaEps) continue;  // degenerate inputs excluded
      double mu = 0.0, var = 0.0;
      for (int k = 0; k < cfg.d_h; ++k) mu += t.norm[size_t(j) * cfg.d_h + size_t(k)];
      mu /= cfg.d_h;
      for (int k = 0; k < cfg.d_h; ++k) {
        double v = t.norm[size_t(j) * cfg.d_h + size_t(k)] - mu;
        var += v * v;
      }
      var /= cfg.d_h;
      worst_mu = std::max(worst_mu, std::abs(mu));
      worst_std = std::max(worst_std, std::abs(std::sqrt(var) - 1.0));
      cln_ok = cln_ok && std::abs(mu) <= 1e-5 && std::abs(std::sqrt(var) - 1.0) <= 1e-5;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "softmax row sums within %.1e of 1; CLN core |mean| <= %.1e, |std-1| <= %.1e",
                worst_sum, worst_mu, worst_std);
  verdict(8, softmax_ok && cln_ok, buf);
}

// --- criterion 9: dataset-gated count checks ---------------------------------

struct CorpusCounts {
  long total = 0, disc = 0, cross = 0;
};

CorpusCounts count_entities(const std::vector<Document>& docs) {
  CorpusCounts c;
  for (const Document& doc : docs)
    for (const Entity& e : doc.gold) {
      ++c.total;
      c.disc += e.discontinuous();
      c.cross += e.cross_sentence(doc.sentence_breaks);
    }
  return c;
}

long unified_count(std::vector<Document> docs) {
  long n = 0;
  for (const Document& doc : unified_filter(std::move(docs)))
    n += static_cast<long>(doc.gold.size());
  return n;
}

void criterion_9() {
  namespace fs = std::filesystem;
  const char* env = std::getenv("SEDA_DATA_DIR");
  const fs::path base = env ? fs::path(env) : fs::path("data");
  struct Gate {
    const char* name;
    const char* split;  // subdirectory holding .txt/.ann pairs
    long total, disc, cross;
    long unified;  // -1: not checked
  };
  // CADEC counts cover the whole corpus; the ShARe gates check the test
  // split counts and their unified-protocol reductions.
  const Gate gates[] = {{"cadec", "all", 6318, 675, 0, -1},
                        {"share13", "test", 5340, -1, -1, 5333},
                        {"share14", "test", 7993, -1, -1, 7922}};
  bool any = false, ok = true;
  std::string detail;
  for (const Gate& gate : gates) {
    fs::path dir = base / gate.name / gate.split;
    if (!fs::is_directory(dir)) continue;
    any = true;
    std::vector<Document> docs = read_corpus_dir(dir.string());
    CorpusCounts c = count_entities(docs);
    bool this_ok = c.total == gate.total && (gate.disc < 0 || c.disc == gate.disc) &&
                   (gate.cross < 0 || c.cross == gate.cross) &&
                   (gate.unified < 0 || unified_count(docs) == gate.unified);
    ok = ok && this_ok;
    detail += std::string(detail.empty() ? "" : "; ") + gate.name + " total " +
              std::to_string(c.total) + "/" + std::to_string(gate.total);
  }
  if (!any) {
    skip(9, "clinical corpora not present under " + base.string() +
               " (set SEDA_DATA_DIR to <dir> with cadec/all, share13/test, share14/test)");
    return;
  }
  verdict(9, ok, detail);
}

// --- criterion 10: CLI determinism -------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_10(const std::string& cli) {
  namespace fs = std::filesystem;
  if (cli.empty() || !fs::exists(cli)) {
    verdict(10, false, "CLI binary not supplied (pass its path as argv[1])");
    return;
  }
  fs::path tmp = fs::temp_directory_path() / "seda_acceptance_determinism";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  // A small corpus on disk, then the same pipeline twice into separate
  // directories: ingest -> segment -> train -> predict -> augment ->
  // evaluate. Output records must be byte-identical.
  SynthOptions opts;
  opts.n_docs = 8;
  opts.seed = 10;
  std::vector<Document> docs = gen_corpus(opts);
  fs::path corpus = tmp / "corpus";
  fs::create_directories(corpus);
  for (const Document& doc : docs) {
    std::ofstream txt(corpus / (doc.id + ".txt"));
    txt << doc.raw;
    std::ofstream ann(corpus / (doc.id + ".ann"));
    int t = 1;
    for (const Entity& e : doc.gold) {
      ann << "T" << t++ << "\t" << e.label();
      for (size_t k = 0; k < e.spans().size(); ++k) {
        const Span& s = e.spans()[k];
        ann << (k ? ";" : " ") << doc.tokens[size_t(s.start)].char_start << " "
            << doc.tokens[size_t(s.end - 1)].char_end;
      }
      ann << "\tx\n";
    }
  }
  std::ofstream cfg(tmp / "model.cfg");
  cfg << "epochs = 3\nbatch_size = 4\nseed = 11\n";
  cfg.close();

  auto pipeline = [&](const fs::path& dir) {
    fs::create_directories(dir);
    auto sh = [&](const std::string& args) {
      std::string cmd = cli + " " + args + " >> " + (dir / "log.txt").string() + " 2>&1";
      return std::system(cmd.c_str());
    };
    int rc = 0;
    rc |= sh("ingest --corpus " + corpus.string() + " --out " + (dir / "docs.jsonl").string());
    rc |= sh("segment --mode newline --in " + (dir / "docs.jsonl").string() + " --out " +
             (dir / "samples.jsonl").string());
    rc |= sh("train --config " + (tmp / "model.cfg").string() + " --data " +
             (dir / "samples.jsonl").string() + " --out " + (dir / "model.ckpt").string());
    rc |= sh("predict --ckpt " + (dir / "model.ckpt").string() + " --in " +
             (dir / "samples.jsonl").string() + " --out " + (dir / "grids.jsonl").string() +
             " --entities " + (dir / "pred.jsonl").string());
    rc |= sh("augment --ckpt " + (dir / "model.ckpt").string() + " --in " +
             (dir / "docs.jsonl").string() + " --mode once --out " +
             (dir / "aug.jsonl").string() + " --pred " + (dir / "aug_pred.jsonl").string());
    rc |= sh("evaluate --pred " + (dir / "aug_pred.jsonl").string() + " --gold " +
             (dir / "docs.jsonl").string() + " --out " + (dir / "report.json").string());
    return rc;
  };
  int rc1 = pipeline(tmp / "run1");
  int rc2 = pipeline(tmp / "run2");
  bool ok = rc1 == 0 && rc2 == 0;
  std::string differing;
  for (const char* name :
       {"docs.jsonl", "samples.jsonl", "model.ckpt", "grids.jsonl", "pred.jsonl", "aug.jsonl",
        "aug_pred.jsonl", "report.json"}) {
    if (slurp(tmp / "run1" / name) != slurp(tmp / "run2" / name)) {
      ok = false;
      differing += std::string(" ") + name;
    }
  }
  verdict(10, ok,
          ok ? "two identical CLI pipelines produced byte-identical records (8 outputs)"
             : "pipeline rc=(" + std::to_string(rc1) + "," + std::to_string(rc2) +
                   ") differing:" + differing);
  if (ok) fs::remove_all(tmp);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(cli);
  std::printf("%d criteria checked, %d failed\n", checked, failures);
  return failures == 0 ? 0 : 1;
}
