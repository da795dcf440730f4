#include "seda/types.hpp"

#include <algorithm>

namespace seda {

Entity::Entity(std::string label, std::vector<Span> spans) : label_(std::move(label)) {
  if (spans.empty()) throw RangeError("entity '" + label_ + "' has no spans");
  std::sort(spans.begin(), spans.end());
  for (const Span& s : spans) {
    if (s.start < 0 || s.end <= s.start)
      throw RangeError("entity '" + label_ + "' has an empty or negative span");
  }
  // Merge overlapping and adjacent fragments so `discontinuous` is well
  // defined.
  for (const Span& s : spans) {
    if (!spans_.empty() && s.start <= spans_.back().end) {
      spans_.back().end = std::max(spans_.back().end, s.end);
    } else {
      spans_.push_back(s);
    }
  }
}

Entity Entity::from_token_indices(std::string label, std::vector<int> indices) {
  if (indices.empty()) throw RangeError("entity '" + label + "' has no tokens");
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  std::vector<Span> spans;
  for (int ix : indices) {
    if (!spans.empty() && ix == spans.back().end) {
      ++spans.back().end;
    } else {
      spans.push_back({ix, ix + 1});
    }
  }
  return Entity(std::move(label), std::move(spans));
}

std::vector<int> Entity::token_indices() const {
  std::vector<int> out;
  for (const Span& s : spans_)
    for (int i = s.start; i < s.end; ++i) out.push_back(i);
  return out;
}

bool Entity::cross_sentence(const std::vector<int>& sentence_breaks) const {
  return sentence_of(first_token(), sentence_breaks) !=
         sentence_of(last_token(), sentence_breaks);
}

int sentence_of(int token_index, const std::vector<int>& sentence_breaks) {
  auto it = std::upper_bound(sentence_breaks.begin(), sentence_breaks.end(), token_index);
  return static_cast<int>(it - sentence_breaks.begin());
}

void Document::validate() const {
  for (size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.text.empty()) throw ConsistencyError(id + ": empty token at " + std::to_string(i));
    if (t.char_start >= t.char_end)
      throw ConsistencyError(id + ": token " + std::to_string(i) + " has an empty char range");
    if (i > 0 && tokens[i - 1].char_end > t.char_start)
      throw ConsistencyError(id + ": overlapping token char ranges at " + std::to_string(i));
  }
  int prev = 0;
  for (int b : sentence_breaks) {
    if (b <= prev || b >= size())
      throw ConsistencyError(id + ": sentence break " + std::to_string(b) + " out of order");
    prev = b;
  }
  for (const Entity& e : gold) {
    if (e.first_token() < 0 || e.last_token() >= size())
      throw ConsistencyError(id + ": gold entity outside token range");
  }
}

const char* to_string(SampleKind kind) {
  return kind == SampleKind::ES ? "ES" : "NES";
}

SampleKind sample_kind_from_string(const std::string& s) {
  if (s == "ES") return SampleKind::ES;
  if (s == "NES") return SampleKind::NES;
  throw ParseError("unknown sample kind '" + s + "'");
}

int Sample::from_doc(int doc_index) const {
  auto it = std::lower_bound(offset_map.begin(), offset_map.end(), doc_index);
  if (it == offset_map.end() || *it != doc_index) return -1;
  return static_cast<int>(it - offset_map.begin());
}

bool Sample::contains_doc_entity(const Entity& e) const {
  for (int ix : e.token_indices())
    if (from_doc(ix) < 0) return false;
  return true;
}

Entity Sample::project_from_doc(const Entity& e) const {
  std::vector<int> indices;
  for (int ix : e.token_indices()) {
    int local = from_doc(ix);
    if (local < 0) throw RangeError("entity token outside sample " + id);
    indices.push_back(local);
  }
  return Entity::from_token_indices(e.label(), std::move(indices));
}

Entity Sample::map_to_doc(const Entity& e) const {
  std::vector<int> indices;
  for (int ix : e.token_indices()) {
    if (ix < 0 || ix >= size()) throw RangeError("entity token outside sample " + id);
    indices.push_back(offset_map[ix]);
  }
  return Entity::from_token_indices(e.label(), std::move(indices));
}

std::vector<Entity> dedupe_entities(std::vector<Entity> entities) {
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
  return entities;
}

}  // namespace seda
