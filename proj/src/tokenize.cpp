#include <cctype>

#include "seda/corpus.hpp"

namespace seda {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(const std::string& raw_text) {
  std::vector<Token> tokens;
  size_t pos = 0;
  const size_t n = raw_text.size();
  auto emit = [&](size_t start, size_t end) {
    Token t;
    t.index = static_cast<int>(tokens.size());
    t.text = raw_text.substr(start, end - start);
    t.char_start = static_cast<int>(start);
    t.char_end = static_cast<int>(end);
    tokens.push_back(std::move(t));
  };
  while (pos < n) {
    if (is_space(raw_text[pos])) {
      ++pos;
      continue;
    }
    if (is_punct(raw_text[pos])) {
      emit(pos, pos + 1);
      ++pos;
      continue;
    }
    size_t start = pos;
    while (pos < n && !is_space(raw_text[pos]) && !is_punct(raw_text[pos])) ++pos;
    emit(start, pos);
  }
  return tokens;
}

std::string reconstruct(const std::string& raw_text, const std::vector<Token>& tokens) {
  std::string out;
  size_t pos = 0;
  for (const Token& t : tokens) {
    out.append(raw_text, pos, static_cast<size_t>(t.char_start) - pos);
    out.append(t.text);
    pos = static_cast<size_t>(t.char_end);
  }
  out.append(raw_text, pos, raw_text.size() - pos);
  return out;
}

Document make_document(std::string id, std::string raw_text) {
  Document doc;
  doc.id = std::move(id);
  doc.tokens = tokenize(raw_text);
  for (size_t i = 1; i < doc.tokens.size(); ++i) {
    // A break sits at token i when a newline occurs in the gap before it.
    int gap_start = doc.tokens[i - 1].char_end;
    int gap_end = doc.tokens[i].char_start;
    bool has_newline = false;
    for (int p = gap_start; p < gap_end; ++p)
      if (raw_text[static_cast<size_t>(p)] == '\n') has_newline = true;
    if (has_newline) doc.sentence_breaks.push_back(static_cast<int>(i));
  }
  doc.raw = std::move(raw_text);
  return doc;
}

}  // namespace seda
