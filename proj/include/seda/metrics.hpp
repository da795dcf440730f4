#pragma once

#include <string>
#include <vector>

#include "seda/types.hpp"

namespace seda {

struct PrfTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MatchCounts {
  long gold = 0;
  long predicted = 0;
  long matched = 0;
};

// EBP/EBR/EBF over entity tail tokens. `literal` follows the raw double-sum
// formulas and can exceed 1 when duplicate tails exist; `matched` (default)
// counts a one-to-one tail matching and stays within [0, 1].
enum class EbfVariant { Matched, Literal };
// What identifies a boundary: the tail token alone, or head and tail.
enum class BoundaryMode { Tail, HeadTail };
// Boundaries compare by token index within the document (default) or by
// surface string.
enum class BoundaryKey { Index, Surface };

EbfVariant ebf_variant_from_string(const std::string& s);

struct BoundaryScores {
  double ebp = 0.0;
  double ebr = 0.0;
  double ebf = 0.0;
  MatchCounts counts;               // matched counts the one-to-one matching;
                                    // for the literal variant it holds the
                                    // raw cross-pair sum
  bool empty_denominator = false;   // some denominator was 0 and yielded 0
};

struct EvalReport {
  PrfTriple exact;
  BoundaryScores boundary;
  PrfTriple subset_all;
  PrfTriple subset_discontinuous;
  PrfTriple subset_cross_sentence;
  MatchCounts counts;
};

// Micro-averaged exact-match P/R/F1: an entity matches iff label and full
// span set are identical. Every pred key must exist in gold (AlignmentError
// otherwise); gold documents without predictions score as empty predictions.
PrfTriple exact_prf(const EntitySets& pred, const EntitySets& gold,
                    MatchCounts* counts = nullptr);

// Surface strings are needed only for BoundaryKey::Surface; pass the token
// texts per document id in that case.
using TokenTexts = std::map<std::string, std::vector<std::string>>;

BoundaryScores ebf(const EntitySets& pred, const EntitySets& gold,
                   EbfVariant variant = EbfVariant::Matched,
                   BoundaryMode mode = BoundaryMode::Tail,
                   BoundaryKey key = BoundaryKey::Index,
                   const TokenTexts* texts = nullptr);

enum class Subset { Discontinuous, CrossSentence };

Subset subset_from_string(const std::string& s);

// Entities satisfying the subset predicate. Cross-sentence needs the owning
// document's sentence breaks.
std::vector<Entity> subset_filter(const std::vector<Entity>& entities, Subset subset,
                                  const std::vector<int>& sentence_breaks = {});

// Legacy protocol: strips cross-sentence entities from every document's gold.
std::vector<Document> unified_filter(std::vector<Document> gold_docs);

struct EvalOptions {
  EbfVariant variant = EbfVariant::Matched;
  BoundaryMode boundary_mode = BoundaryMode::Tail;
  bool unified = false;
};

// Full report: exact scores, boundary scores, and exact scores restricted to
// the discontinuous and cross-sentence subsets (both sides filtered).
EvalReport evaluate(const EntitySets& pred, const std::vector<Document>& gold_docs,
                    const EvalOptions& options = {});

EntitySets gold_sets(const std::vector<Document>& docs);

}  // namespace seda
