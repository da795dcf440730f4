#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "seda/corpus.hpp"
#include "seda/io.hpp"
#include "seda/seda.hpp"
#include "seda/synth.hpp"
#include "seda/train.hpp"

using namespace seda;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("seda_io_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("document records round-trip through the exchange format") {
  SynthOptions opts;
  opts.n_docs = 12;
  std::vector<Document> docs = gen_corpus(opts);
  TempDir tmp;
  write_documents(tmp.file("docs.jsonl"), docs);
  std::vector<Document> back = read_documents(tmp.file("docs.jsonl"));
  REQUIRE(back.size() == docs.size());
  for (size_t k = 0; k < docs.size(); ++k) {
    CHECK(back[k].id == docs[k].id);
    CHECK(back[k].sentence_breaks == docs[k].sentence_breaks);
    CHECK(back[k].gold == docs[k].gold);
    REQUIRE(back[k].tokens.size() == docs[k].tokens.size());
    for (size_t t = 0; t < docs[k].tokens.size(); ++t)
      CHECK(back[k].tokens[t].text == docs[k].tokens[t].text);
  }
  // Byte-identical on rewrite.
  write_documents(tmp.file("again.jsonl"), back);
  std::ifstream a(tmp.file("docs.jsonl")), b(tmp.file("again.jsonl"));
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("sample records round-trip") {
  SynthOptions opts;
  opts.n_docs = 6;
  std::vector<Document> docs = gen_corpus(opts);
  std::vector<Sample> samples;
  SedaConfig cfg;
  for (const Document& doc : docs)
    for (Sample& s : augment_document(doc, doc.gold, cfg)) samples.push_back(std::move(s));
  TempDir tmp;
  write_samples(tmp.file("samples.jsonl"), samples);
  std::vector<Sample> back = read_samples(tmp.file("samples.jsonl"));
  REQUIRE(back.size() == samples.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    CHECK(back[k].id == samples[k].id);
    CHECK(back[k].doc_id == samples[k].doc_id);
    CHECK(back[k].kind == samples[k].kind);
    CHECK(back[k].tokens == samples[k].tokens);
    CHECK(back[k].offset_map == samples[k].offset_map);
    CHECK(back[k].gold == samples[k].gold);
    CHECK(back[k].anchors == samples[k].anchors);
  }
}

TEST_CASE("grid records round-trip sparsely") {
  TagScheme scheme(TagMode::Extended, {"ADR", "DIS"});
  std::vector<Entity> entities{Entity::from_token_indices("ADR", {0, 1, 4}),
                               Entity::from_token_indices("DIS", {2})};
  TagGrid grid = encode(entities, 6, scheme, "s1");
  TempDir tmp;
  write_grids(tmp.file("grids.jsonl"), {grid}, scheme);
  std::vector<TagGrid> back = read_grids(tmp.file("grids.jsonl"), scheme);
  REQUIRE(back.size() == 1);
  CHECK(back[0].sample_id == "s1");
  CHECK(back[0].n == grid.n);
  CHECK(back[0].cells == grid.cells);
  // The file stays sparse: one line, few cells.
  std::ifstream in(tmp.file("grids.jsonl"));
  std::string line;
  std::getline(in, line);
  CHECK(line.find("NONE") == std::string::npos);
}

TEST_CASE("entity sets round-trip and parse document records too") {
  EntitySets sets{{"a", {Entity::from_token_indices("ADR", {0, 2})}}, {"b", {}}};
  TempDir tmp;
  write_entity_sets(tmp.file("pred.jsonl"), sets);
  CHECK(read_entity_sets(tmp.file("pred.jsonl")) == sets);

  SynthOptions opts;
  opts.n_docs = 2;
  std::vector<Document> docs = gen_corpus(opts);
  write_documents(tmp.file("docs.jsonl"), docs);
  EntitySets from_docs = read_entity_sets(tmp.file("docs.jsonl"));
  CHECK(from_docs.at(docs[0].id) == docs[0].gold);
}

TEST_CASE("corpus directory ingestion pairs .txt with .ann") {
  TempDir tmp;
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(tmp.file(name));
    out << content;
  };
  put("doc2.txt", "severe muscle pain in legs");
  put("doc2.ann", "T1\tADR 0 18;22 26\tsevere muscle pain legs\n");
  put("doc1.txt", "no entities here");
  put("doc1.ann", "");
  put("orphan.txt", "no sibling ann file");
  std::vector<Document> docs = read_corpus_dir(tmp.path.string());
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "doc1");  // id order
  CHECK(docs[1].id == "doc2");
  CHECK(docs[1].gold.size() == 1);
  CHECK_THROWS_AS(read_corpus_dir(tmp.file("missing")), ParseError);
}

TEST_CASE("key=value parsing") {
  std::map<std::string, std::string> kv = parse_key_values(
      "# comment\n"
      "es = 1\n"
      "look_forward=4  # trailing comment\n"
      "\n"
      "combiner = intersection\n");
  CHECK(kv.at("es") == "1");
  CHECK(kv.at("look_forward") == "4");
  CHECK(kv.at("combiner") == "intersection");
  CHECK_THROWS_AS(parse_key_values("not a pair\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("= value\n"), ConfigError);
}

TEST_CASE("model checkpoints reload bit-exactly") {
  SynthOptions opts;
  opts.n_docs = 6;
  std::vector<Document> docs = gen_corpus(opts);
  std::vector<Sample> samples;
  for (const Document& doc : docs)
    for (Sample& s : split_newline(doc)) samples.push_back(std::move(s));
  ModelConfig cfg;
  cfg.d_h = 12;
  cfg.d_ed = 4;
  cfg.d_et = 2;
  cfg.d_c = 6;
  cfg.dilations = {1, 2};
  cfg.epochs = 2;
  cfg.batch_size = 4;
  TrainResult result = train(samples, cfg);

  TempDir tmp;
  save_model(tmp.file("model.ckpt"), result.model);
  GridModel loaded = load_model(tmp.file("model.ckpt"));
  CHECK(loaded.vocab().id_to_token == result.model.vocab().id_to_token);
  CHECK(loaded.scheme().labels() == result.model.scheme().labels());
  for (size_t k = 0; k < loaded.params().size(); ++k) {
    CHECK(loaded.params()[k]->name == result.model.params()[k]->name);
    CHECK(loaded.params()[k]->w == result.model.params()[k]->w);
  }
  // Identical predictions after reload.
  PredictResult a = predict(result.model, samples[0]);
  PredictResult b = predict(loaded, samples[0]);
  CHECK(a.grid.cells == b.grid.cells);

  CHECK_THROWS_AS(load_model(tmp.file("nope.ckpt")), ParseError);
  std::ofstream junk(tmp.file("junk.ckpt"));
  junk << "not a checkpoint";
  junk.close();
  CHECK_THROWS_AS(load_model(tmp.file("junk.ckpt")), ParseError);
}

TEST_CASE("manifest and digests") {
  TempDir tmp;
  std::ofstream cfg(tmp.file("run.cfg"));
  cfg << "es = 1\n";
  cfg.close();
  std::string digest = file_digest(tmp.file("run.cfg"));
  CHECK(digest.size() == 16);
  CHECK(digest == file_digest(tmp.file("run.cfg")));

  RunManifest manifest;
  manifest.command = "seda segment --mode newline";
  manifest.config_digests[tmp.file("run.cfg")] = digest;
  manifest.inputs = {"in.jsonl"};
  manifest.outputs = {"out.jsonl"};
  manifest.seed = 42;
  manifest.tool_version = "0.1.0";
  manifest.duration_seconds = 0.25;
  write_manifest(tmp.file("out.jsonl.manifest.json"), manifest);
  std::ifstream in(tmp.file("out.jsonl.manifest.json"));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"seed\": 42") != std::string::npos);
  CHECK(text.find(digest) != std::string::npos);
}
