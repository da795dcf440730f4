#include <algorithm>
#include <map>

#include "seda/metrics.hpp"

namespace seda {

namespace {

double f_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

PrfTriple triple_from_counts(const MatchCounts& c, bool* empty_flag = nullptr) {
  PrfTriple t;
  if (c.predicted > 0) t.precision = double(c.matched) / double(c.predicted);
  if (c.gold > 0) t.recall = double(c.matched) / double(c.gold);
  if ((c.predicted == 0 || c.gold == 0) && empty_flag) *empty_flag = true;
  t.f1 = f_score(t.precision, t.recall);
  return t;
}

const std::vector<Entity>* find_or_empty(const EntitySets& sets, const std::string& id) {
  static const std::vector<Entity> kEmpty;
  auto it = sets.find(id);
  return it == sets.end() ? &kEmpty : &it->second;
}

void check_alignment(const EntitySets& pred, const EntitySets& gold) {
  for (const auto& [id, _] : pred)
    if (!gold.count(id))
      throw AlignmentError("predictions for unknown document id '" + id + "'");
}

// Boundary identity of one entity under the given mode/key.
using Boundary = std::pair<std::string, std::string>;

Boundary boundary_of(const Entity& e, BoundaryMode mode, BoundaryKey key,
                     const std::vector<std::string>* texts) {
  auto token_key = [&](int ix) {
    if (key == BoundaryKey::Index) return std::to_string(ix);
    if (!texts || ix >= static_cast<int>(texts->size()))
      throw ConsistencyError("surface-keyed boundary needs token texts");
    return (*texts)[size_t(ix)];
  };
  std::string tail = token_key(e.last_token());
  std::string head = mode == BoundaryMode::HeadTail ? token_key(e.first_token()) : "";
  return {head, tail};
}

}  // namespace

EbfVariant ebf_variant_from_string(const std::string& s) {
  if (s == "matched") return EbfVariant::Matched;
  if (s == "literal") return EbfVariant::Literal;
  throw ConfigError("unknown EBF variant '" + s + "'");
}

Subset subset_from_string(const std::string& s) {
  if (s == "discontinuous") return Subset::Discontinuous;
  if (s == "cross_sentence") return Subset::CrossSentence;
  throw ConfigError("unknown subset '" + s + "'");
}

PrfTriple exact_prf(const EntitySets& pred, const EntitySets& gold, MatchCounts* counts) {
  check_alignment(pred, gold);
  MatchCounts c;
  for (const auto& [id, gold_ents] : gold) {
    std::vector<Entity> g = dedupe_entities(gold_ents);
    std::vector<Entity> p = dedupe_entities(*find_or_empty(pred, id));
    c.gold += static_cast<long>(g.size());
    c.predicted += static_cast<long>(p.size());
    for (const Entity& e : p)
      if (std::binary_search(g.begin(), g.end(), e)) c.matched++;
  }
  if (counts) *counts = c;
  return triple_from_counts(c);
}

BoundaryScores ebf(const EntitySets& pred, const EntitySets& gold, EbfVariant variant,
                   BoundaryMode mode, BoundaryKey key, const TokenTexts* texts) {
  check_alignment(pred, gold);
  BoundaryScores out;
  long total_pred = 0, total_gold = 0;
  long score_sum = 0;
  for (const auto& [id, gold_ents] : gold) {
    const std::vector<Entity>& pred_ents = *find_or_empty(pred, id);
    const std::vector<std::string>* doc_texts = nullptr;
    if (key == BoundaryKey::Surface) {
      if (!texts || !texts->count(id))
        throw ConsistencyError("surface-keyed boundaries need token texts for '" + id + "'");
      doc_texts = &texts->at(id);
    }
    std::map<Boundary, long> g_counts, p_counts;
    for (const Entity& e : gold_ents) g_counts[boundary_of(e, mode, key, doc_texts)]++;
    for (const Entity& e : pred_ents) p_counts[boundary_of(e, mode, key, doc_texts)]++;
    total_gold += static_cast<long>(gold_ents.size());
    total_pred += static_cast<long>(pred_ents.size());
    if (variant == EbfVariant::Literal) {
      // Raw cross-pair sum of the indicator, per document.
      for (const auto& [b, pc] : p_counts) {
        auto it = g_counts.find(b);
        if (it != g_counts.end()) score_sum += pc * it->second;
      }
    } else {
      // One-to-one matching on boundary identity = multiset intersection.
      for (const auto& [b, pc] : p_counts) {
        auto it = g_counts.find(b);
        if (it != g_counts.end()) score_sum += std::min(pc, it->second);
      }
    }
  }
  out.counts = {total_gold, total_pred, score_sum};
  if (total_pred > 0) out.ebp = double(score_sum) / double(total_pred);
  if (total_gold > 0) out.ebr = double(score_sum) / double(total_gold);
  out.empty_denominator = total_pred == 0 || total_gold == 0;
  out.ebf = f_score(out.ebp, out.ebr);
  return out;
}

std::vector<Entity> subset_filter(const std::vector<Entity>& entities, Subset subset,
                                  const std::vector<int>& sentence_breaks) {
  std::vector<Entity> out;
  for (const Entity& e : entities) {
    bool keep = subset == Subset::Discontinuous ? e.discontinuous()
                                                : e.cross_sentence(sentence_breaks);
    if (keep) out.push_back(e);
  }
  return out;
}

std::vector<Document> unified_filter(std::vector<Document> gold_docs) {
  for (Document& doc : gold_docs) {
    std::vector<Entity> kept;
    for (const Entity& e : doc.gold)
      if (!e.cross_sentence(doc.sentence_breaks)) kept.push_back(e);
    doc.gold = std::move(kept);
  }
  return gold_docs;
}

EntitySets gold_sets(const std::vector<Document>& docs) {
  EntitySets sets;
  for (const Document& doc : docs) sets[doc.id] = doc.gold;
  return sets;
}

EvalReport evaluate(const EntitySets& pred, const std::vector<Document>& gold_docs,
                    const EvalOptions& options) {
  std::vector<Document> docs =
      options.unified ? unified_filter(gold_docs) : gold_docs;
  EntitySets gold = gold_sets(docs);

  EvalReport report;
  report.exact = exact_prf(pred, gold, &report.counts);
  report.boundary = ebf(pred, gold, options.variant, options.boundary_mode);
  report.subset_all = report.exact;

  auto restricted = [&](Subset subset) {
    EntitySets p, g;
    for (const Document& doc : docs) {
      g[doc.id] = subset_filter(doc.gold, subset, doc.sentence_breaks);
      auto it = pred.find(doc.id);
      if (it != pred.end())
        p[doc.id] = subset_filter(it->second, subset, doc.sentence_breaks);
    }
    return exact_prf(p, g);
  };
  report.subset_discontinuous = restricted(Subset::Discontinuous);
  report.subset_cross_sentence = restricted(Subset::CrossSentence);
  return report;
}

}  // namespace seda
