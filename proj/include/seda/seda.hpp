#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seda/metrics.hpp"
#include "seda/model.hpp"
#include "seda/train.hpp"
#include "seda/types.hpp"

namespace seda {

// One row of the grid-size table: documents with length in
// [previous bound, max_len) get this even-block size cap.
struct GridSizeRow {
  int max_len = 0;
  int size = 0;
};

enum class Combiner { Intersection, Replace };

Combiner combiner_from_string(const std::string& s);
const char* to_string(Combiner c);

struct SedaConfig {
  bool es_enabled = true;
  bool nes_enabled = true;
  int look_forward = 4;
  int look_backward = 4;
  std::vector<GridSizeRow> grid_size_table = default_grid_size_table();
  int default_grid_size = 19;  // lengths beyond the last bound
  int max_iterations = 3;
  Combiner combiner = Combiner::Intersection;
  double plateau_eps = 1e-4;   // minimum dev-EBF improvement to continue

  static std::vector<GridSizeRow> default_grid_size_table();
  void validate() const;
  static SedaConfig from_key_values(const std::map<std::string, std::string>& kv);
};

// First row whose bound exceeds doc_length; beyond the last bound the
// default applies. Bounds are half-open: length exactly 200 falls in the
// 200~350 row.
int grid_size_for(int doc_length, const SedaConfig& config);

enum class SegmentParity { OddEntity, EvenText };

struct Segment {
  SegmentParity parity = SegmentParity::EvenText;
  std::string block_id;              // "1" for odd, "2-1", "2-2", ... for even
  Span doc_range;
  std::vector<int> source_entity_ids;  // predictions anchoring an odd segment
};

// Boundary-driven segmentation: every predicted entity's minimal covering
// interval becomes (part of) an odd segment; overlapping or adjacent
// intervals merge; interstitial text forms even segments split into blocks
// of at most grid_size tokens. The segments partition the document.
std::vector<Segment> build_segments(const Document& doc, const std::vector<Entity>& predictions,
                                    int grid_size);

// Merges each odd segment with its immediately preceding even block into one
// ES sample that ends at the last anchored-entity token; remaining even
// blocks become standalone NES samples. Gold entities project into a sample
// iff all spans fall inside it.
std::vector<Sample> localize(const Document& doc, const std::vector<Segment>& segments);

// Prepends up to look_backward and appends up to look_forward document
// tokens (clipped at the edges) when supplementation is enabled for the
// sample's kind; gold is re-projected over the widened window.
Sample supplement(const Sample& sample, const Document& doc, const SedaConfig& config);

// build_segments + localize + supplement for one document.
std::vector<Sample> augment_document(const Document& doc, const std::vector<Entity>& anchors,
                                     const SedaConfig& config);

// Checkpoint selection for the boundary prediction phase: the checkpoint
// whose stored dev predictions maximize dev EBF (matched variant); ties
// break toward the later epoch. by_f1 selects by exact F1 instead (the
// "w/o EBF" ablation).
struct BoundarySelection {
  int checkpoint_index = -1;
  EntitySets predictions;
};

BoundarySelection select_boundaries(const std::vector<Checkpoint>& checkpoints,
                                    const std::vector<Document>& dev_docs, bool by_f1 = false);

struct SedaRunResult {
  std::map<std::string, std::vector<Sample>> samples;  // per document id
  EntitySets predictions;                              // document coordinates
  EntitySets anchors;                                  // what drove segmentation
  CoverageReport coverage;                             // gold vs augmented samples
  long skipped_degenerate = 0;                         // samples whose decode hit the path cap
};

// One augmentation pass: anchor with the model's own predictions on the
// newline baseline (or the override), rebuild samples around the anchors,
// re-predict, and map everything back to document coordinates.
SedaRunResult run_once(const std::vector<Document>& docs, const GridModel& model,
                       const SedaConfig& config,
                       const std::optional<EntitySets>& anchors_override = std::nullopt);

// Optional per-iteration model refresh; receives the iteration number (1-based)
// and the anchors that will drive it.
using ModelFactory = std::function<GridModel(int iteration, const EntitySets& anchors)>;

struct SedaMulResult {
  EntitySets combined;
  int iterations_run = 0;
  std::vector<EntitySets> per_iteration;
  std::map<std::string, std::vector<Sample>> last_samples;  // final iteration's views
};

// Iterative refinement: iteration t is anchored by the raw predictions of
// iteration t-1 (iteration 1 by initial_anchors, or the model's own baseline
// predictions) and folded into the running result by the configured
// combiner. Stops at max_iterations, or earlier when dev EBF (computed by
// running the same iteration on dev_docs) stops improving.
SedaMulResult run_mul(const std::vector<Document>& docs, const GridModel& model,
                      const SedaConfig& config,
                      const std::optional<EntitySets>& initial_anchors = std::nullopt,
                      const ModelFactory& factory = nullptr,
                      const std::vector<Document>* dev_docs = nullptr);

struct MethodOutput {
  std::string name;
  std::map<std::string, std::vector<Sample>> samples;
  EntitySets predictions;
};

struct CrossSentenceRow {
  std::string name;
  bool applicable = false;  // false when gold has no cross-sentence entities
  double coverage = 0.0;    // fraction fully contained in some sample
  double accuracy = 0.0;    // fraction exactly predicted
  long total = 0;
};

std::vector<CrossSentenceRow> cross_sentence_report(const std::vector<MethodOutput>& methods,
                                                    const std::vector<Document>& gold_docs);

}  // namespace seda
