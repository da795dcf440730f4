#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seda/types.hpp"

namespace seda {

// Word-pair relation tags. The base scheme is {NONE, NNW, THW-label}; the
// extended scheme adds the mirror tags {PNW, HTW-label}.
//
// Cell placement convention (enforced as an invariant):
//   NNW    at (i, j) with i < j           strictly upper triangle
//   THW-l  at (tail, head) with tail >= head   lower triangle incl. diagonal
//   PNW    at (j, i) with i < j           strictly lower triangle
//   HTW-l  at (head, tail) with head < tail    strictly upper triangle
enum class TagMode { Base, Extended };

TagMode tag_mode_from_string(const std::string& s);

class TagScheme {
 public:
  TagScheme() = default;
  TagScheme(TagMode mode, std::vector<std::string> labels);

  TagMode mode() const { return mode_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int num_tags() const;

  static constexpr int kNone = 0;
  static constexpr int kNnw = 1;
  int thw(int label_index) const { return 2 + label_index; }
  int pnw() const;               // extended mode only
  int htw(int label_index) const;  // extended mode only

  bool is_thw(int tag) const { return tag >= 2 && tag < 2 + num_labels(); }
  bool is_htw(int tag) const;
  int label_of(int tag) const;  // for THW/HTW tags
  int num_labels() const { return static_cast<int>(labels_.size()); }
  int label_index(const std::string& label) const;  // -1 when unknown

  std::string tag_name(int tag) const;
  int tag_from_name(const std::string& name) const;

  // Whether `tag` may legally occupy cell (i, j).
  bool placement_ok(int i, int j, int tag) const;

 private:
  TagMode mode_ = TagMode::Base;
  std::vector<std::string> labels_;
};

struct TagGrid {
  std::string sample_id;
  int n = 0;
  std::vector<std::uint16_t> cells;  // row-major n*n, tag ids

  TagGrid() = default;
  TagGrid(std::string id, int n_) : sample_id(std::move(id)), n(n_), cells(size_t(n_) * n_, 0) {}

  int at(int i, int j) const { return cells[size_t(i) * n + j]; }
  void set(int i, int j, int tag) { cells[size_t(i) * n + j] = static_cast<std::uint16_t>(tag); }
};

// Writes the tag grid for a set of entities over a sample of length n.
// Extended-mode mirror tags are written only into cells still free after the
// base tags; two entities demanding different THW labels in the same cell
// raise EncodeConflictError naming both.
TagGrid encode(const std::vector<Entity>& entities, int n, const TagScheme& scheme,
               std::string sample_id = "");

struct DecodeDiagnostics {
  long misplaced_cells = 0;     // tags outside their legal triangle, treated as NONE
  long mirror_mismatches = 0;   // PNW/HTW without the matching NNW/THW
};

// Recovers the entity set: one entity per NNW path head -> ... -> tail for
// every THW cell. Mirror tags are consulted for diagnostics only. More than
// `path_cap` paths for a single THW cell raises DecodeDegenerateError.
std::vector<Entity> decode(const TagGrid& grid, const TagScheme& scheme,
                           DecodeDiagnostics* diag = nullptr, long path_cap = 1000);

}  // namespace seda
