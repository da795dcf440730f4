#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seda/types.hpp"

namespace seda {

// Synthetic corpus generator for pipeline experiments and tests. Entities
// draw from small per-label vocabularies so a from-scratch model can learn
// them; discontinuous entities separate their fragments with dedicated
// connector tokens; cross-sentence entities put the first fragment at the
// end of one sentence and the second shortly after the next newline, within
// reach of the default supplemental intervals.
struct SynthOptions {
  int n_docs = 200;
  std::uint64_t seed = 1;
  // Per 10 documents the quotas yield 36 flat, 2 within-sentence
  // discontinuous and 2 cross-sentence entities: 10% discontinuous, half of
  // those cross-sentence.
  bool cross_sentence = true;        // disable to drop the cross quota
  std::vector<std::string> labels = {"ADR", "DIS"};
};

std::vector<Document> gen_corpus(const SynthOptions& options);

// Deterministic split into train/dev/test by position.
struct CorpusSplit {
  std::vector<Document> train, dev, test;
};

CorpusSplit split_corpus(const std::vector<Document>& docs, double dev_frac = 0.1,
                         double test_frac = 0.2);

}  // namespace seda
