#include <algorithm>
#include <sstream>

#include "seda/corpus.hpp"

namespace seda {

namespace {

std::vector<std::string> split_char(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Maps a character fragment [cs, ce) onto the tokens it fully covers.
// Throws BoundaryError when either edge cuts through a token.
Span fragment_to_span(const Document& doc, int cs, int ce, int line_no) {
  auto where = [&](int boundary) {
    for (const Token& t : doc.tokens)
      if (t.char_start < boundary && boundary < t.char_end)
        return std::optional<Token>(t);
    return std::optional<Token>();
  };
  if (auto t = where(cs))
    throw BoundaryError("line " + std::to_string(line_no) + ": fragment start " +
                        std::to_string(cs) + " splits token '" + t->text + "' (index " +
                        std::to_string(t->index) + ")");
  if (auto t = where(ce))
    throw BoundaryError("line " + std::to_string(line_no) + ": fragment end " +
                        std::to_string(ce) + " splits token '" + t->text + "' (index " +
                        std::to_string(t->index) + ")");
  int first = -1, last = -1;
  for (const Token& t : doc.tokens) {
    if (t.char_start >= cs && t.char_end <= ce) {
      if (first < 0) first = t.index;
      last = t.index;
    }
  }
  if (first < 0)
    throw BoundaryError("line " + std::to_string(line_no) + ": fragment [" +
                        std::to_string(cs) + "," + std::to_string(ce) +
                        ") covers no token");
  return {first, last + 1};
}

}  // namespace

Document parse_standoff(const std::string& raw_text, const std::string& annotations,
                        std::string doc_id) {
  Document doc = make_document(std::move(doc_id), raw_text);
  const int raw_len = static_cast<int>(raw_text.size());

  std::istringstream lines(annotations);
  std::string line;
  int line_no = 0;
  std::vector<Entity> entities;
  while (std::getline(lines, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    // Brat record types other than text-bound entities are skipped.
    if (line[0] == 'R' || line[0] == 'E' || line[0] == 'A' || line[0] == 'N' || line[0] == '*')
      continue;
    if (line[0] != 'T')
      throw ParseError(doc.id + " line " + std::to_string(line_no) +
                       ": unrecognized annotation record");
    std::vector<std::string> cols = split_char(line, '\t');
    if (cols.size() < 2)
      throw ParseError(doc.id + " line " + std::to_string(line_no) +
                       ": expected ID<TAB>LABEL offsets[<TAB>surface]");

    // Second column: LABEL s1 e1;s2 e2;...
    std::istringstream head(cols[1]);
    std::string label;
    head >> label;
    if (label.empty())
      throw ParseError(doc.id + " line " + std::to_string(line_no) + ": missing label");
    std::string offsets;
    std::getline(head, offsets);
    offsets = trim(offsets);
    if (offsets.empty())
      throw ParseError(doc.id + " line " + std::to_string(line_no) + ": missing offsets");

    std::vector<Span> spans;
    for (const std::string& frag : split_char(offsets, ';')) {
      std::istringstream fs(trim(frag));
      long cs = -1, ce = -1;
      if (!(fs >> cs >> ce) || !(fs >> std::ws).eof())
        throw ParseError(doc.id + " line " + std::to_string(line_no) +
                         ": malformed fragment '" + frag + "'");
      if (cs < 0 || ce > raw_len || cs >= ce)
        throw RangeError(doc.id + " line " + std::to_string(line_no) + ": offsets [" +
                         std::to_string(cs) + "," + std::to_string(ce) +
                         ") outside text of length " + std::to_string(raw_len));
      spans.push_back(fragment_to_span(doc, static_cast<int>(cs), static_cast<int>(ce),
                                       line_no));
    }
    entities.emplace_back(label, std::move(spans));
  }
  doc.gold = dedupe_entities(std::move(entities));
  return doc;
}

}  // namespace seda
