#include <algorithm>
#include <cctype>
#include <cstdio>

#include "seda/corpus.hpp"
#include "seda/rng.hpp"
#include "seda/synth.hpp"

namespace seda {

namespace {

struct Item {
  std::string text;
  int entity_slot = -1;  // index into the document's entity plan, -1 = filler
};

// A sentence is a list of indivisible units; an entity construct is one
// unit, so later insertions can never split an earlier entity.
using Unit = std::vector<Item>;
using Sentence = std::vector<Unit>;

std::string filler(Rng& rng) { return "w" + std::to_string(rng.range(0, 29)); }
std::string connector(Rng& rng) { return "c" + std::to_string(rng.range(0, 2)); }

std::string entity_token(Rng& rng, const std::string& label) {
  std::string lower;
  for (char c : label) lower.push_back(static_cast<char>(std::tolower(c)));
  return lower + std::to_string(rng.range(0, 5));
}

// Inserts a construct at a random unit boundary, padded with one filler on
// each side so neighbouring entities never touch.
void insert_padded(Sentence& sentence, Rng& rng, Unit core) {
  Unit block;
  block.push_back({filler(rng), -1});
  for (Item& item : core) block.push_back(std::move(item));
  block.push_back({filler(rng), -1});
  size_t pos = size_t(rng.range(0, static_cast<int>(sentence.size())));
  sentence.insert(sentence.begin() + static_cast<long>(pos), std::move(block));
}

}  // namespace

std::vector<Document> gen_corpus(const SynthOptions& options) {
  std::vector<Document> docs;
  Rng rng(derive_seed(options.seed, "synth"));

  for (int d = 0; d < options.n_docs; ++d) {
    const int n_sentences = rng.range(3, 6);
    std::vector<Sentence> sentences(static_cast<size_t>(n_sentences));
    for (Sentence& s : sentences) {
      const int len = rng.range(5, 9);
      for (int k = 0; k < len; ++k) s.push_back({{filler(rng), -1}});
    }

    std::vector<std::string> plans;
    auto new_plan = [&]() {
      plans.push_back(options.labels[size_t(rng.below(options.labels.size()))]);
      return static_cast<int>(plans.size()) - 1;
    };

    // Quotas per 10 documents: 36 flat, 2 within-sentence discontinuous,
    // 2 cross-sentence.
    const int cycle = d % 10;
    const int n_flat = cycle < 6 ? 4 : 3;
    const bool want_within = cycle == 0 || cycle == 5;
    const bool want_cross = options.cross_sentence && (cycle == 2 || cycle == 7);

    for (int k = 0; k < n_flat; ++k) {
      const int slot = new_plan();
      Unit core;
      const int len = rng.range(1, 3);
      for (int t = 0; t < len; ++t) core.push_back({entity_token(rng, plans.back()), slot});
      insert_padded(sentences[size_t(rng.range(0, n_sentences - 1))], rng, std::move(core));
    }
    if (want_within) {
      const int slot = new_plan();
      const std::string label = plans.back();
      Unit core;
      for (int t = 0, m = rng.range(1, 2); t < m; ++t)
        core.push_back({entity_token(rng, label), slot});
      for (int t = 0, m = rng.range(1, 2); t < m; ++t) core.push_back({connector(rng), -1});
      core.push_back({entity_token(rng, label), slot});
      insert_padded(sentences[size_t(rng.range(0, n_sentences - 1))], rng, std::move(core));
    }
    if (want_cross) {
      const int slot = new_plan();
      const std::string label = plans.back();
      const int s = rng.range(0, n_sentences - 2);
      // First fragment at the end of sentence s, second shortly after the
      // newline: within reach of the default look_forward/look_backward.
      Unit left_unit;
      for (int t = 0, m = rng.range(1, 2); t < m; ++t)
        left_unit.push_back({entity_token(rng, label), slot});
      left_unit.push_back({connector(rng), -1});
      sentences[size_t(s)].push_back(std::move(left_unit));
      Unit right_unit;
      right_unit.push_back({connector(rng), -1});
      right_unit.push_back({entity_token(rng, label), slot});
      sentences[size_t(s + 1)].insert(sentences[size_t(s + 1)].begin(), std::move(right_unit));
    }

    // Materialize.
    std::string raw;
    std::vector<std::vector<int>> slot_tokens(plans.size());
    int index = 0;
    for (size_t s = 0; s < sentences.size(); ++s) {
      if (s > 0) raw.push_back('\n');
      bool first_in_sentence = true;
      for (const Unit& unit : sentences[s]) {
        for (const Item& item : unit) {
          if (!first_in_sentence) raw.push_back(' ');
          first_in_sentence = false;
          raw += item.text;
          if (item.entity_slot >= 0) slot_tokens[size_t(item.entity_slot)].push_back(index);
          ++index;
        }
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04d", d);
    Document doc = make_document(id, raw);
    for (size_t k = 0; k < plans.size(); ++k)
      doc.gold.push_back(Entity::from_token_indices(plans[k], slot_tokens[k]));
    doc.gold = dedupe_entities(std::move(doc.gold));
    doc.validate();
    docs.push_back(std::move(doc));
  }
  return docs;
}

CorpusSplit split_corpus(const std::vector<Document>& docs, double dev_frac, double test_frac) {
  CorpusSplit split;
  const size_t n = docs.size();
  const size_t n_dev = size_t(double(n) * dev_frac);
  const size_t n_test = size_t(double(n) * test_frac);
  const size_t n_train = n - n_dev - n_test;
  for (size_t k = 0; k < n; ++k) {
    if (k < n_train)
      split.train.push_back(docs[k]);
    else if (k < n_train + n_dev)
      split.dev.push_back(docs[k]);
    else
      split.test.push_back(docs[k]);
  }
  return split;
}

}  // namespace seda
