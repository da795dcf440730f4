#include <algorithm>

#include "seda/corpus.hpp"

namespace seda {

std::vector<Sample> split_newline(const Document& doc) {
  std::vector<Sample> samples;
  std::vector<int> bounds;
  bounds.push_back(0);
  for (int b : doc.sentence_breaks) bounds.push_back(b);
  bounds.push_back(doc.size());

  for (size_t k = 0; k + 1 < bounds.size(); ++k) {
    int start = bounds[k], end = bounds[k + 1];
    if (start >= end) continue;
    Sample s;
    s.id = doc.id + "#s" + std::to_string(k);
    s.doc_id = doc.id;
    s.kind = SampleKind::NES;
    for (int i = start; i < end; ++i) {
      s.tokens.push_back(doc.tokens[i].text);
      s.offset_map.push_back(i);
    }
    for (const Entity& e : doc.gold)
      if (s.contains_doc_entity(e)) s.gold.push_back(s.project_from_doc(e));
    s.gold = dedupe_entities(std::move(s.gold));
    samples.push_back(std::move(s));
  }
  return samples;
}

MaskMode mask_mode_from_string(const std::string& s) {
  if (s == "before_first") return MaskMode::BeforeFirst;
  if (s == "after_last") return MaskMode::AfterLast;
  if (s == "both_sides") return MaskMode::BothSides;
  throw ConfigError("unknown mask mode '" + s + "'");
}

MaskResult mask_context(const Document& doc, MaskMode mode, const std::string& mask_token) {
  MaskResult result{doc, false};
  if (doc.gold.empty()) {
    result.skipped_no_entities = true;
    return result;
  }
  int first = doc.size(), last = -1;
  for (const Entity& e : doc.gold) {
    first = std::min(first, e.first_token());
    last = std::max(last, e.last_token());
  }
  bool mask_before = mode != MaskMode::AfterLast;
  bool mask_after = mode != MaskMode::BeforeFirst;
  for (int i = 0; i < doc.size(); ++i) {
    if ((mask_before && i < first) || (mask_after && i > last))
      result.doc.tokens[i].text = mask_token;
  }
  return result;
}

CoverageReport coverage(const std::vector<Sample>& samples, const Document& doc) {
  for (const Sample& s : samples) {
    if (s.doc_id != doc.id)
      throw ConsistencyError("sample " + s.id + " does not belong to document " + doc.id);
    for (int ix : s.offset_map)
      if (ix < 0 || ix >= doc.size())
        throw ConsistencyError("sample " + s.id + " maps outside document " + doc.id);
  }
  CoverageReport report;
  for (const Entity& e : doc.gold) {
    bool covered = std::any_of(samples.begin(), samples.end(), [&](const Sample& s) {
      return s.contains_doc_entity(e);
    });
    report.all.total++;
    report.all.covered += covered;
    if (e.discontinuous()) {
      report.discontinuous.total++;
      report.discontinuous.covered += covered;
    }
    if (e.cross_sentence(doc.sentence_breaks)) {
      report.cross_sentence.total++;
      report.cross_sentence.covered += covered;
    }
  }
  return report;
}

}  // namespace seda
