#include <algorithm>
#include <sstream>

#include "seda/corpus.hpp"
#include "seda/seda.hpp"

namespace seda {

Combiner combiner_from_string(const std::string& s) {
  if (s == "intersection") return Combiner::Intersection;
  if (s == "replace") return Combiner::Replace;
  throw ConfigError("unknown combiner '" + s + "'");
}

const char* to_string(Combiner c) {
  return c == Combiner::Intersection ? "intersection" : "replace";
}

std::vector<GridSizeRow> SedaConfig::default_grid_size_table() {
  return {{200, 7}, {350, 9}, {500, 11}, {1000, 13}, {1350, 15}, {1500, 16}, {2000, 17}};
}

void SedaConfig::validate() const {
  if (look_forward < 0 || look_backward < 0)
    throw ConfigError("supplemental interval sizes must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  int prev_len = 0;
  for (const GridSizeRow& row : grid_size_table) {
    if (row.max_len <= prev_len) throw ConfigError("grid size table bounds must increase");
    if (row.size < 1) throw ConfigError("grid sizes must be >= 1");
    prev_len = row.max_len;
  }
  if (default_grid_size < 1) throw ConfigError("default grid size must be >= 1");
}

SedaConfig SedaConfig::from_key_values(const std::map<std::string, std::string>& kv) {
  SedaConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto to_int = [](const std::string& s, const char* key) {
    try {
      size_t pos = 0;
      int v = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad integer for ") + key + ": '" + s + "'");
    }
  };
  auto to_bool = [&](const std::string& s, const char* key) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw ConfigError(std::string("bad boolean for ") + key + ": '" + s + "'");
  };
  if (auto* v = get("es")) cfg.es_enabled = to_bool(*v, "es");
  if (auto* v = get("nes")) cfg.nes_enabled = to_bool(*v, "nes");
  if (auto* v = get("look_forward")) cfg.look_forward = to_int(*v, "look_forward");
  if (auto* v = get("look_backward")) cfg.look_backward = to_int(*v, "look_backward");
  if (auto* v = get("max_iterations")) cfg.max_iterations = to_int(*v, "max_iterations");
  if (auto* v = get("combiner")) cfg.combiner = combiner_from_string(*v);
  if (auto* v = get("grid_size_table")) {
    cfg.grid_size_table.clear();
    std::istringstream ss(*v);
    std::string part;
    while (std::getline(ss, part, ',')) {
      size_t colon = part.find(':');
      if (colon == std::string::npos)
        throw ConfigError("grid_size_table rows look like '200:7' or '*:19'");
      std::string bound = part.substr(0, colon);
      bound.erase(std::remove(bound.begin(), bound.end(), ' '), bound.end());
      int size = to_int(part.substr(colon + 1), "grid_size_table");
      if (bound == "*")
        cfg.default_grid_size = size;
      else
        cfg.grid_size_table.push_back({to_int(bound, "grid_size_table"), size});
    }
  }
  cfg.validate();
  return cfg;
}

int grid_size_for(int doc_length, const SedaConfig& config) {
  for (const GridSizeRow& row : config.grid_size_table)
    if (doc_length < row.max_len) return row.size;
  return config.default_grid_size;
}

std::vector<Segment> build_segments(const Document& doc, const std::vector<Entity>& predictions,
                                    int grid_size) {
  const int n = doc.size();
  for (const Entity& e : predictions)
    if (e.first_token() < 0 || e.last_token() >= n)
      throw RangeError("prediction outside document " + doc.id);

  // Merge overlapping/adjacent covering intervals into anchor intervals.
  struct Anchor {
    Span range;
    std::vector<int> sources;
  };
  std::vector<int> by_start(predictions.size());
  for (size_t k = 0; k < predictions.size(); ++k) by_start[k] = static_cast<int>(k);
  std::sort(by_start.begin(), by_start.end(), [&](int a, int b) {
    Span sa = predictions[size_t(a)].covering_interval();
    Span sb = predictions[size_t(b)].covering_interval();
    return sa != sb ? sa < sb : a < b;
  });
  std::vector<Anchor> anchors;
  for (int id : by_start) {
    Span cover = predictions[size_t(id)].covering_interval();
    if (!anchors.empty() && cover.start <= anchors.back().range.end) {
      anchors.back().range.end = std::max(anchors.back().range.end, cover.end);
      anchors.back().sources.push_back(id);
    } else {
      anchors.push_back({cover, {id}});
    }
  }

  // Alternate even text runs and odd anchor intervals; position numbers
  // advance by two so odd segments always sit at odd positions even when a
  // text run is empty.
  std::vector<Segment> segments;
  auto emit_even = [&](int position, int start, int end) {
    int block = 1;
    for (int at = start; at < end; at += grid_size) {
      Segment seg;
      seg.parity = SegmentParity::EvenText;
      seg.block_id = std::to_string(position) + "-" + std::to_string(block++);
      seg.doc_range = {at, std::min(end, at + grid_size)};
      segments.push_back(std::move(seg));
    }
  };
  int cursor = 0;
  int position = 0;
  for (const Anchor& anchor : anchors) {
    emit_even(position, cursor, anchor.range.start);
    Segment odd;
    odd.parity = SegmentParity::OddEntity;
    odd.block_id = std::to_string(position + 1);
    odd.doc_range = anchor.range;
    odd.source_entity_ids = anchor.sources;
    segments.push_back(std::move(odd));
    cursor = anchor.range.end;
    position += 2;
  }
  emit_even(position, cursor, n);
  return segments;
}

namespace {

Sample sample_from_range(const Document& doc, const std::string& id, SampleKind kind,
                         Span range, std::vector<int> anchors) {
  Sample s;
  s.id = id;
  s.doc_id = doc.id;
  s.kind = kind;
  s.anchors = std::move(anchors);
  for (int i = range.start; i < range.end; ++i) {
    s.tokens.push_back(doc.tokens[size_t(i)].text);
    s.offset_map.push_back(i);
  }
  for (const Entity& e : doc.gold)
    if (s.contains_doc_entity(e)) s.gold.push_back(s.project_from_doc(e));
  s.gold = dedupe_entities(std::move(s.gold));
  return s;
}

}  // namespace

std::vector<Sample> localize(const Document& doc, const std::vector<Segment>& segments) {
  std::vector<Sample> samples;
  int counter = 0;
  auto next_id = [&]() { return doc.id + "#a" + std::to_string(counter++); };

  for (size_t k = 0; k < segments.size(); ++k) {
    const Segment& seg = segments[k];
    if (seg.parity == SegmentParity::EvenText) {
      if (k + 1 < segments.size() && segments[k + 1].parity == SegmentParity::OddEntity) {
        const Segment& odd = segments[k + 1];
        samples.push_back(sample_from_range(doc, next_id(), SampleKind::ES,
                                            {seg.doc_range.start, odd.doc_range.end},
                                            odd.source_entity_ids));
        ++k;  // odd segment consumed
      } else {
        samples.push_back(
            sample_from_range(doc, next_id(), SampleKind::NES, seg.doc_range, {}));
      }
    } else {
      // Odd segment at the document start (or after another odd): a bare ES
      // sample.
      samples.push_back(sample_from_range(doc, next_id(), SampleKind::ES, seg.doc_range,
                                          seg.source_entity_ids));
    }
  }
  return samples;
}

Sample supplement(const Sample& sample, const Document& doc, const SedaConfig& config) {
  const bool enabled = (sample.kind == SampleKind::ES && config.es_enabled) ||
                       (sample.kind == SampleKind::NES && config.nes_enabled);
  if (!enabled || sample.offset_map.empty()) return sample;

  Sample out = sample;
  out.tokens.clear();
  out.offset_map.clear();
  const int first = sample.offset_map.front();
  const int last = sample.offset_map.back();
  const int lead = std::max(0, first - config.look_backward);
  const int tail = std::min(doc.size() - 1, last + config.look_forward);
  for (int i = lead; i < first; ++i) {
    out.tokens.push_back(doc.tokens[size_t(i)].text);
    out.offset_map.push_back(i);
  }
  for (size_t k = 0; k < sample.offset_map.size(); ++k) {
    out.tokens.push_back(sample.tokens[k]);
    out.offset_map.push_back(sample.offset_map[k]);
  }
  for (int i = last + 1; i <= tail; ++i) {
    out.tokens.push_back(doc.tokens[size_t(i)].text);
    out.offset_map.push_back(i);
  }
  // Re-project gold over the widened window.
  out.gold.clear();
  for (const Entity& e : doc.gold)
    if (out.contains_doc_entity(e)) out.gold.push_back(out.project_from_doc(e));
  out.gold = dedupe_entities(std::move(out.gold));
  return out;
}

std::vector<Sample> augment_document(const Document& doc, const std::vector<Entity>& anchors,
                                     const SedaConfig& config) {
  const int grid_size = grid_size_for(doc.size(), config);
  std::vector<Segment> segments = build_segments(doc, anchors, grid_size);
  std::vector<Sample> samples = localize(doc, segments);
  for (Sample& s : samples) s = supplement(s, doc, config);
  return samples;
}

BoundarySelection select_boundaries(const std::vector<Checkpoint>& checkpoints,
                                    const std::vector<Document>& dev_docs, bool by_f1) {
  if (checkpoints.empty()) throw RangeError("no checkpoints to select from");
  BoundarySelection best;
  double best_score = -1.0;
  for (size_t k = 0; k < checkpoints.size(); ++k) {
    EvalReport report = evaluate(checkpoints[k].dev_predictions, dev_docs);
    const double score = by_f1 ? report.exact.f1 : report.boundary.ebf;
    if (score >= best_score) {  // ties break toward the later epoch
      best_score = score;
      best.checkpoint_index = static_cast<int>(k);
    }
  }
  best.predictions = checkpoints[size_t(best.checkpoint_index)].dev_predictions;
  return best;
}

namespace {

// Merge-back for augmented samples. Sample views are partial: an entity
// whose tokens touch an edge where the view was cut (not a document edge)
// may continue beyond it, so it is suppressed here; a real entity shows up
// fully interior in an overlapping neighbouring view.
EntitySets predict_and_merge(const GridModel& model, const std::vector<Sample>& samples,
                             const std::map<std::string, int>& doc_lengths, long* skipped) {
  EntitySets sets;
  long degenerate = 0;
  for (const Sample& sample : samples) {
    if (sample.tokens.empty()) continue;
    PredictResult pred = predict(model, sample);
    std::vector<Entity> entities;
    try {
      entities = decode(pred.grid, model.scheme());
    } catch (const DecodeDegenerateError&) {
      ++degenerate;
      continue;
    }
    const int doc_len = doc_lengths.at(sample.doc_id);
    const bool left_cut = sample.offset_map.front() > 0;
    const bool right_cut = sample.offset_map.back() < doc_len - 1;
    std::vector<Entity>& doc_set = sets[sample.doc_id];
    for (const Entity& e : entities) {
      if (left_cut && e.first_token() == 0) continue;
      if (right_cut && e.last_token() == sample.size() - 1) continue;
      doc_set.push_back(sample.map_to_doc(e));
    }
  }
  for (auto& [id, entities] : sets) entities = dedupe_entities(std::move(entities));
  if (skipped) *skipped = degenerate;
  return sets;
}

CoverageReport merge_coverage(CoverageReport a, const CoverageReport& b) {
  a.all.total += b.all.total;
  a.all.covered += b.all.covered;
  a.discontinuous.total += b.discontinuous.total;
  a.discontinuous.covered += b.discontinuous.covered;
  a.cross_sentence.total += b.cross_sentence.total;
  a.cross_sentence.covered += b.cross_sentence.covered;
  return a;
}

EntitySets baseline_anchors(const std::vector<Document>& docs, const GridModel& model,
                            long* skipped) {
  std::vector<Sample> samples;
  for (const Document& doc : docs)
    for (Sample& s : split_newline(doc)) samples.push_back(std::move(s));
  return predict_documents(model, samples, skipped);
}

}  // namespace

SedaRunResult run_once(const std::vector<Document>& docs, const GridModel& model,
                       const SedaConfig& config,
                       const std::optional<EntitySets>& anchors_override) {
  config.validate();
  SedaRunResult result;
  result.anchors = anchors_override ? *anchors_override
                                    : baseline_anchors(docs, model, &result.skipped_degenerate);

  std::vector<Sample> all_samples;
  std::map<std::string, int> doc_lengths;
  for (const Document& doc : docs) {
    static const std::vector<Entity> kNone;
    auto it = result.anchors.find(doc.id);
    const std::vector<Entity>& anchors = it == result.anchors.end() ? kNone : it->second;
    std::vector<Sample> samples = augment_document(doc, anchors, config);
    result.coverage = merge_coverage(result.coverage, coverage(samples, doc));
    doc_lengths[doc.id] = doc.size();
    for (Sample& s : samples) {
      all_samples.push_back(s);
      result.samples[doc.id].push_back(std::move(s));
    }
  }
  long skipped = 0;
  result.predictions = predict_and_merge(model, all_samples, doc_lengths, &skipped);
  result.skipped_degenerate += skipped;
  // Documents with no predicted entities still get an (empty) entry.
  for (const Document& doc : docs)
    result.predictions.try_emplace(doc.id);
  return result;
}

namespace {

EntitySets intersect_sets(const EntitySets& a, const EntitySets& b) {
  EntitySets out;
  for (const auto& [id, entities] : a) {
    auto it = b.find(id);
    if (it == b.end()) {
      out[id] = {};
      continue;
    }
    std::vector<Entity> sorted_b = dedupe_entities(it->second);
    std::vector<Entity> kept;
    for (const Entity& e : dedupe_entities(entities))
      if (std::binary_search(sorted_b.begin(), sorted_b.end(), e)) kept.push_back(e);
    out[id] = std::move(kept);
  }
  return out;
}

}  // namespace

SedaMulResult run_mul(const std::vector<Document>& docs, const GridModel& model,
                      const SedaConfig& config,
                      const std::optional<EntitySets>& initial_anchors,
                      const ModelFactory& factory,
                      const std::vector<Document>* dev_docs) {
  config.validate();
  SedaMulResult result;
  std::optional<EntitySets> anchors = initial_anchors;
  std::optional<EntitySets> dev_anchors;
  double best_dev_ebf = -1.0;
  GridModel current = model;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    if (factory) current = factory(iter, anchors ? *anchors : EntitySets{});
    SedaRunResult step = run_once(docs, current, config, anchors);
    if (iter == 1)
      result.combined = step.predictions;
    else if (config.combiner == Combiner::Intersection)
      result.combined = intersect_sets(result.combined, step.predictions);
    else
      result.combined = step.predictions;
    result.per_iteration.push_back(step.predictions);
    result.iterations_run = iter;
    result.last_samples = std::move(step.samples);
    anchors = step.predictions;

    if (dev_docs && !dev_docs->empty()) {
      SedaRunResult dev_step = run_once(*dev_docs, current, config, dev_anchors);
      dev_anchors = dev_step.predictions;
      EvalReport report = evaluate(dev_step.predictions, *dev_docs);
      if (report.boundary.ebf < best_dev_ebf + config.plateau_eps && iter > 1) break;
      best_dev_ebf = std::max(best_dev_ebf, report.boundary.ebf);
    }
  }
  return result;
}

std::vector<CrossSentenceRow> cross_sentence_report(const std::vector<MethodOutput>& methods,
                                                    const std::vector<Document>& gold_docs) {
  std::vector<CrossSentenceRow> rows;
  for (const MethodOutput& method : methods) {
    CrossSentenceRow row;
    row.name = method.name;
    long covered = 0, correct = 0;
    for (const Document& doc : gold_docs) {
      static const std::vector<Sample> kNoSamples;
      auto sit = method.samples.find(doc.id);
      const std::vector<Sample>& samples = sit == method.samples.end() ? kNoSamples : sit->second;
      static const std::vector<Entity> kNoPred;
      auto pit = method.predictions.find(doc.id);
      const std::vector<Entity>& preds = pit == method.predictions.end() ? kNoPred : pit->second;
      std::vector<Entity> sorted_preds = dedupe_entities(preds);
      for (const Entity& e : doc.gold) {
        if (!e.cross_sentence(doc.sentence_breaks)) continue;
        row.total++;
        if (std::any_of(samples.begin(), samples.end(),
                        [&](const Sample& s) { return s.contains_doc_entity(e); }))
          ++covered;
        if (std::binary_search(sorted_preds.begin(), sorted_preds.end(), e)) ++correct;
      }
    }
    row.applicable = row.total > 0;
    if (row.applicable) {
      row.coverage = double(covered) / double(row.total);
      row.accuracy = double(correct) / double(row.total);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace seda
