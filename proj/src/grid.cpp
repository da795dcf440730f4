#include <algorithm>

#include "seda/grid.hpp"

namespace seda {

TagMode tag_mode_from_string(const std::string& s) {
  if (s == "base") return TagMode::Base;
  if (s == "extended") return TagMode::Extended;
  throw ConfigError("unknown tag mode '" + s + "'");
}

TagScheme::TagScheme(TagMode mode, std::vector<std::string> labels)
    : mode_(mode), labels_(std::move(labels)) {
  if (labels_.empty()) throw ConfigError("tag scheme needs at least one label");
}

int TagScheme::num_tags() const {
  int base = 2 + num_labels();
  return mode_ == TagMode::Base ? base : base + 1 + num_labels();
}

int TagScheme::pnw() const {
  if (mode_ != TagMode::Extended) throw ConfigError("PNW requires the extended scheme");
  return 2 + num_labels();
}

int TagScheme::htw(int label_index) const {
  if (mode_ != TagMode::Extended) throw ConfigError("HTW requires the extended scheme");
  return 3 + num_labels() + label_index;
}

bool TagScheme::is_htw(int tag) const {
  return mode_ == TagMode::Extended && tag >= 3 + num_labels() && tag < num_tags();
}

int TagScheme::label_of(int tag) const {
  if (is_thw(tag)) return tag - 2;
  if (is_htw(tag)) return tag - 3 - num_labels();
  throw RangeError("tag " + std::to_string(tag) + " carries no label");
}

int TagScheme::label_index(const std::string& label) const {
  for (int i = 0; i < num_labels(); ++i)
    if (labels_[i] == label) return i;
  return -1;
}

std::string TagScheme::tag_name(int tag) const {
  if (tag == kNone) return "NONE";
  if (tag == kNnw) return "NNW";
  if (is_thw(tag)) return "THW-" + labels_[label_of(tag)];
  if (mode_ == TagMode::Extended && tag == pnw()) return "PNW";
  if (is_htw(tag)) return "HTW-" + labels_[label_of(tag)];
  throw RangeError("tag id " + std::to_string(tag) + " out of range");
}

int TagScheme::tag_from_name(const std::string& name) const {
  if (name == "NONE") return kNone;
  if (name == "NNW") return kNnw;
  if (name == "PNW") return pnw();
  auto labeled = [&](const std::string& prefix) {
    int ix = label_index(name.substr(prefix.size()));
    if (ix < 0) throw ParseError("unknown entity label in tag '" + name + "'");
    return ix;
  };
  if (name.rfind("THW-", 0) == 0) return thw(labeled("THW-"));
  if (name.rfind("HTW-", 0) == 0) return htw(labeled("HTW-"));
  throw ParseError("unknown tag name '" + name + "'");
}

bool TagScheme::placement_ok(int i, int j, int tag) const {
  if (tag == kNone) return true;
  if (tag == kNnw) return i < j;
  if (is_thw(tag)) return i >= j;
  if (mode_ == TagMode::Extended && tag == pnw()) return i > j;
  if (is_htw(tag)) return i < j;
  return false;
}

TagGrid encode(const std::vector<Entity>& entities, int n, const TagScheme& scheme,
               std::string sample_id) {
  TagGrid grid(std::move(sample_id), n);
  // Track which entity owns each THW cell so conflicts can name both sides.
  std::vector<int> thw_owner(size_t(n) * n, -1);

  for (size_t e = 0; e < entities.size(); ++e) {
    const Entity& ent = entities[e];
    int label_ix = scheme.label_index(ent.label());
    if (label_ix < 0)
      throw EncodeConflictError("label '" + ent.label() + "' is not in the tag scheme");
    std::vector<int> words = ent.token_indices();
    if (words.back() >= n)
      throw RangeError("entity token " + std::to_string(words.back()) +
                       " outside sample of length " + std::to_string(n));

    for (size_t m = 0; m + 1 < words.size(); ++m)
      grid.set(words[m], words[m + 1], TagScheme::kNnw);

    int head = words.front(), tail = words.back();
    int want = scheme.thw(label_ix);
    int have = grid.at(tail, head);
    if (scheme.is_thw(have) && have != want) {
      const Entity& other = entities[size_t(thw_owner[size_t(tail) * n + head])];
      throw EncodeConflictError(
          "THW conflict at cell (" + std::to_string(tail) + "," + std::to_string(head) +
          "): entity '" + other.label() + "' vs entity '" + ent.label() + "'");
    }
    grid.set(tail, head, want);
    thw_owner[size_t(tail) * n + head] = static_cast<int>(e);
  }

  if (scheme.mode() == TagMode::Extended) {
    // Mirror tags are auxiliary; base tags keep their cells on collision.
    for (const Entity& ent : entities) {
      std::vector<int> words = ent.token_indices();
      int label_ix = scheme.label_index(ent.label());
      for (size_t m = 0; m + 1 < words.size(); ++m)
        if (grid.at(words[m + 1], words[m]) == TagScheme::kNone)
          grid.set(words[m + 1], words[m], scheme.pnw());
      int head = words.front(), tail = words.back();
      if (head != tail && grid.at(head, tail) == TagScheme::kNone)
        grid.set(head, tail, scheme.htw(label_ix));
    }
  }
  return grid;
}

namespace {

// Depth-first enumeration of strictly increasing NNW paths from `at` to
// `tail`. Appends one entity per complete path.
void follow_paths(const TagGrid& grid, int at, int tail, std::vector<int>& path,
                  const std::string& label, std::vector<Entity>& out, long& budget) {
  if (at == tail) {
    if (--budget < 0)
      throw DecodeDegenerateError("more than the configured cap of NNW paths for THW cell (" +
                                  std::to_string(tail) + "," + std::to_string(path.front()) +
                                  ")");
    out.push_back(Entity::from_token_indices(label, path));
    return;
  }
  for (int j = at + 1; j <= tail; ++j) {
    if (grid.at(at, j) == TagScheme::kNnw) {
      path.push_back(j);
      follow_paths(grid, j, tail, path, label, out, budget);
      path.pop_back();
    }
  }
}

}  // namespace

std::vector<Entity> decode(const TagGrid& grid, const TagScheme& scheme,
                           DecodeDiagnostics* diag, long path_cap) {
  DecodeDiagnostics local;
  DecodeDiagnostics& d = diag ? *diag : local;

  const int n = grid.n;
  std::vector<Entity> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int tag = grid.at(i, j);
      if (tag == TagScheme::kNone) continue;
      if (!scheme.placement_ok(i, j, tag)) {
        d.misplaced_cells++;
        continue;
      }
      if (tag == TagScheme::kNnw) {
        if (scheme.mode() == TagMode::Extended && grid.at(j, i) != scheme.pnw())
          d.mirror_mismatches++;
      } else if (scheme.is_thw(tag)) {
        const int tail = i, head = j;
        const std::string& label = scheme.labels()[scheme.label_of(tag)];
        std::vector<int> path{head};
        long budget = path_cap;
        follow_paths(grid, head, tail, path, label, out, budget);
      } else if (scheme.mode() == TagMode::Extended && tag == scheme.pnw()) {
        if (grid.at(j, i) != TagScheme::kNnw) d.mirror_mismatches++;
      } else if (scheme.is_htw(tag)) {
        int mirrored = grid.at(j, i);
        if (!scheme.is_thw(mirrored) || scheme.label_of(mirrored) != scheme.label_of(tag))
          d.mirror_mismatches++;
      }
    }
  }
  // Deterministic order by (head, tail, label); duplicates collapse.
  std::sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) {
    if (a.first_token() != b.first_token()) return a.first_token() < b.first_token();
    if (a.last_token() != b.last_token()) return a.last_token() < b.last_token();
    return a < b;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace seda
