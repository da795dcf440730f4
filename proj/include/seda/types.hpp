#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace seda {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct BoundaryError : Error {
  using Error::Error;
};
struct EncodeConflictError : Error {
  using Error::Error;
};
struct DecodeDegenerateError : Error {
  using Error::Error;
};
struct AlignmentError : Error {
  using Error::Error;
};
struct ConsistencyError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct TrainDivergedError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Core corpus types
// ---------------------------------------------------------------------------

struct Token {
  int index = 0;          // 0-based position in the document
  std::string text;       // surface form, non-empty, no whitespace
  int char_start = 0;     // character offset into the raw text
  int char_end = 0;       // exclusive
};

// Half-open token range [start, end).
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  bool contains(int tok) const { return tok >= start && tok < end; }

  friend bool operator==(const Span& a, const Span& b) = default;
  friend auto operator<=>(const Span& a, const Span& b) = default;
};

// A typed set of ordered, disjoint, non-adjacent token spans. A single span
// is a flat entity; two or more spans make it discontinuous.
class Entity {
 public:
  Entity() = default;
  // Normalizes: sorts spans, merges overlapping/adjacent ones, validates.
  Entity(std::string label, std::vector<Span> spans);

  static Entity from_token_indices(std::string label, std::vector<int> indices);

  const std::string& label() const { return label_; }
  const std::vector<Span>& spans() const { return spans_; }

  // All token indices, ascending.
  std::vector<int> token_indices() const;
  int first_token() const { return spans_.front().start; }
  int last_token() const { return spans_.back().end - 1; }
  // Minimal contiguous interval covering every fragment.
  Span covering_interval() const { return {first_token(), spans_.back().end}; }

  bool discontinuous() const { return spans_.size() >= 2; }
  // True when the spans touch two or more newline-delimited sentences.
  bool cross_sentence(const std::vector<int>& sentence_breaks) const;

  friend bool operator==(const Entity& a, const Entity& b) {
    return a.label_ == b.label_ && a.spans_ == b.spans_;
  }
  friend auto operator<=>(const Entity& a, const Entity& b) = default;

 private:
  std::string label_;
  std::vector<Span> spans_;
};

// Sentence index of a token given sorted break positions (each break is the
// first token of a new sentence; token 0 starts sentence 0 implicitly).
int sentence_of(int token_index, const std::vector<int>& sentence_breaks);

struct Document {
  std::string id;
  std::string raw;                  // original text; may be empty for records
                                    // re-read from the exchange format
  std::vector<Token> tokens;
  std::vector<int> sentence_breaks; // ascending, each in (0, tokens.size())
  std::vector<Entity> gold;

  int size() const { return static_cast<int>(tokens.size()); }
  int sentence_count() const { return static_cast<int>(sentence_breaks.size()) + 1; }
  // Throws ConsistencyError when an invariant is violated.
  void validate() const;
};

enum class SampleKind { ES, NES };

const char* to_string(SampleKind kind);
SampleKind sample_kind_from_string(const std::string& s);

// A model input unit: a slice of a document plus supplemental context, with
// a strictly increasing map from sample positions back to document positions.
struct Sample {
  std::string id;
  std::string doc_id;
  SampleKind kind = SampleKind::NES;
  std::vector<std::string> tokens;
  std::vector<int> offset_map;      // sample index -> document index
  std::vector<Entity> gold;         // in sample coordinates
  std::vector<int> anchors;         // prediction ids anchoring an ES sample

  int size() const { return static_cast<int>(tokens.size()); }
  // Document index of sample token i.
  int to_doc(int i) const { return offset_map.at(i); }
  // Sample index of document token, or -1 when absent.
  int from_doc(int doc_index) const;
  // True when every span of a document-coordinate entity lies in the sample.
  bool contains_doc_entity(const Entity& e) const;
  // Remaps a document-coordinate entity into sample coordinates.
  Entity project_from_doc(const Entity& e) const;
  // Remaps a sample-coordinate entity back into document coordinates.
  Entity map_to_doc(const Entity& e) const;
};

struct SubsetCount {
  long total = 0;
  long covered = 0;
};

struct CoverageReport {
  SubsetCount all;
  SubsetCount discontinuous;
  SubsetCount cross_sentence;
};

// Per-document entity sets keyed by document id; the common currency of the
// metrics and pipeline modules.
using EntitySets = std::map<std::string, std::vector<Entity>>;

// Sorts and deduplicates by (label, span set).
std::vector<Entity> dedupe_entities(std::vector<Entity> entities);

}  // namespace seda
