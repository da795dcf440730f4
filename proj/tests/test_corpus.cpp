#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "seda/corpus.hpp"
#include "seda/rng.hpp"

using namespace seda;

namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

std::string random_text(Rng& rng) {
  static const char* words[] = {"pain", "knee", "the", "a", "severe", "x"};
  static const char* punct[] = {".", ",", ";", "!"};
  static const char* gaps[] = {" ", "  ", "\n", " \n ", "\t"};
  std::string s;
  const int n = rng.range(0, 12);
  for (int k = 0; k < n; ++k) {
    if (k > 0) s += gaps[rng.below(5)];
    s += words[rng.below(6)];
    if (rng.bernoulli(0.3)) s += punct[rng.below(4)];
  }
  return s;
}

}  // namespace

TEST_CASE("tokenize splits whitespace and peels punctuation") {
  CHECK(texts(tokenize("stomach pain.")) == std::vector<std::string>{"stomach", "pain", "."});
  CHECK(texts(tokenize("")).empty());
  CHECK(texts(tokenize("knee,the")) == std::vector<std::string>{"knee", ",", "the"});
}

TEST_CASE("tokenize round-trips through recorded offsets") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::string raw = random_text(rng);
    CHECK(reconstruct(raw, tokenize(raw)) == raw);
  }
  std::string raw = "  severe muscle\npain, in legs!  ";
  CHECK(reconstruct(raw, tokenize(raw)) == raw);
}

TEST_CASE("make_document records newline sentence breaks") {
  Document doc = make_document("d", "a b\nc d\n\ne");
  CHECK(doc.size() == 5);
  CHECK(doc.sentence_breaks == std::vector<int>{2, 4});
  CHECK(sentence_of(0, doc.sentence_breaks) == 0);
  CHECK(sentence_of(3, doc.sentence_breaks) == 1);
  CHECK(sentence_of(4, doc.sentence_breaks) == 2);
}

TEST_CASE("parse_standoff maps fragments to token spans") {
  // "severe muscle pain in legs": fragment [0,18) covers tokens 0..2,
  // fragment [22,26) covers token 4.
  Document doc = parse_standoff("severe muscle pain in legs", "T1\tADR 0 18;22 26\tsurface");
  REQUIRE(doc.gold.size() == 1);
  const Entity& e = doc.gold[0];
  CHECK(e.label() == "ADR");
  CHECK(e.spans() == std::vector<Span>{{0, 3}, {4, 5}});
  CHECK(e.discontinuous());
}

TEST_CASE("parse_standoff: empty annotations give empty gold") {
  Document doc = parse_standoff("some text here", "");
  CHECK(doc.gold.empty());
}

TEST_CASE("parse_standoff merges adjacent fragments and dedupes") {
  // Fragments [0,6) and [7,13) cover tokens 0 and 1: adjacent, merged.
  Document doc = parse_standoff("severe muscle pain",
                                "T1\tADR 0 6;7 13\tx\nT2\tADR 0 13\tx");
  REQUIRE(doc.gold.size() == 1);
  CHECK(doc.gold[0].spans() == std::vector<Span>{{0, 2}});
  CHECK_FALSE(doc.gold[0].discontinuous());
}

TEST_CASE("parse_standoff error paths") {
  CHECK_THROWS_AS(parse_standoff("ab cd", "T1\tADR zero 2\tx"), ParseError);
  CHECK_THROWS_AS(parse_standoff("ab cd", "T1\tADR 0 99\tx"), RangeError);
  // Boundary inside token "cd".
  CHECK_THROWS_AS(parse_standoff("ab cd", "T1\tADR 0 4\tx"), BoundaryError);
  CHECK_THROWS_AS(parse_standoff("ab cd", "bogus line without tabs"), ParseError);
  // Non-entity annotation lines are skipped.
  CHECK(parse_standoff("ab cd", "#1\tAnnotatorNotes T1\tcomment").gold.empty());
  CHECK(parse_standoff("ab cd", "R1\tRel Arg1:T1 Arg2:T2").gold.empty());
}

TEST_CASE("split_newline drops entities cut by the newline") {
  // The two discontinuous entities straddle the newline and disappear from
  // every sample's gold; the flat one inside sentence 2 survives.
  Document doc = make_document("d", "reports severe muscle\npain in legs and ankles");
  doc.gold.push_back(Entity("ADR", {{1, 4}, {5, 6}}));  // severe muscle pain + legs
  doc.gold.push_back(Entity("ADR", {{1, 4}, {7, 8}}));  // severe muscle pain + ankles
  doc.gold.push_back(Entity("DIS", {{5, 6}}));          // legs
  doc.gold = dedupe_entities(doc.gold);
  std::vector<Sample> samples = split_newline(doc);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].gold.empty());
  REQUIRE(samples[1].gold.size() == 1);
  CHECK(samples[1].gold[0].label() == "DIS");
  // Projected + dropped = total.
  size_t projected = samples[0].gold.size() + samples[1].gold.size();
  CHECK(projected + 2 == doc.gold.size());
}

TEST_CASE("split_newline: single sentence keeps gold intact") {
  Document doc = make_document("d", "severe pain today");
  doc.gold.push_back(Entity("ADR", {{0, 2}}));
  std::vector<Sample> samples = split_newline(doc);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].gold == doc.gold);
  CHECK(samples[0].kind == SampleKind::NES);
}

TEST_CASE("split_newline projects offsets into sample coordinates") {
  Document doc = make_document("d", "a b c\nd ent f\ng h");
  doc.gold.push_back(Entity("DIS", {{4, 5}}));  // "ent", sentence 2
  std::vector<Sample> samples = split_newline(doc);
  REQUIRE(samples.size() == 3);
  REQUIRE(samples[1].gold.size() == 1);
  CHECK(samples[1].gold[0].spans() == std::vector<Span>{{1, 2}});
  CHECK(samples[1].map_to_doc(samples[1].gold[0]) == doc.gold[0]);
}

TEST_CASE("split_newline partitions the document") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::string raw = random_text(rng);
    Document doc = make_document("d", raw);
    std::vector<Sample> samples = split_newline(doc);
    std::vector<int> covered;
    for (const Sample& s : samples)
      for (int ix : s.offset_map) covered.push_back(ix);
    std::vector<int> expect(size_t(doc.size()));
    for (int i = 0; i < doc.size(); ++i) expect[size_t(i)] = i;
    CHECK(covered == expect);
  }
}

TEST_CASE("mask_context modes") {
  Document doc = make_document("d", "A B ENT C D");
  doc.gold.push_back(Entity("X", {{2, 3}}));

  MaskResult both = mask_context(doc, MaskMode::BothSides, "[M]");
  CHECK(texts(both.doc.tokens) ==
        std::vector<std::string>{"[M]", "[M]", "ENT", "[M]", "[M]"});
  CHECK_FALSE(both.skipped_no_entities);
  CHECK(both.doc.gold == doc.gold);

  // First entity token at index 0: nothing precedes, document unchanged.
  Document front = make_document("d", "ENT C D");
  front.gold.push_back(Entity("X", {{0, 1}}));
  MaskResult before = mask_context(front, MaskMode::BeforeFirst, "[M]");
  CHECK(texts(before.doc.tokens) == texts(front.tokens));

  Document empty = make_document("d", "A B C");
  MaskResult skipped = mask_context(empty, MaskMode::BothSides, "[M]");
  CHECK(skipped.skipped_no_entities);
  CHECK(texts(skipped.doc.tokens) == texts(empty.tokens));
}

TEST_CASE("mask_context never touches the entity interval") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.range(3, 14);
    std::string raw;
    for (int k = 0; k < n; ++k) raw += (k ? " t" : "t") + std::to_string(k);
    Document doc = make_document("d", raw);
    int a = rng.range(0, n - 1), b = rng.range(0, n - 1);
    if (a > b) std::swap(a, b);
    doc.gold.push_back(Entity("X", {{a, a + 1}}));
    if (b > a) doc.gold.push_back(Entity("X", {{b, b + 1}}));
    MaskResult r = mask_context(doc, MaskMode::BothSides);
    for (int i = a; i <= b; ++i) CHECK(r.doc.tokens[size_t(i)].text == doc.tokens[size_t(i)].text);
  }
}

TEST_CASE("coverage: newline split misses cross-sentence entities") {
  Document doc = make_document("d", "severe muscle\npain in legs");
  doc.gold.push_back(Entity("ADR", {{0, 2}, {2, 3}}));  // merges to [0,3): crosses
  std::vector<Sample> samples = split_newline(doc);
  CoverageReport report = coverage(samples, doc);
  CHECK(report.all.total == 1);
  CHECK(report.all.covered == 0);
  CHECK(report.cross_sentence.total == 1);
  CHECK(report.cross_sentence.covered == 0);
}

TEST_CASE("coverage: whole-document sample covers everything") {
  Document doc = make_document("d", "a ent b\nc ent2 d");
  doc.gold.push_back(Entity("X", {{1, 2}}));
  doc.gold.push_back(Entity("X", {{1, 2}, {4, 5}}));
  Sample whole;
  whole.id = "d#w";
  whole.doc_id = "d";
  for (int i = 0; i < doc.size(); ++i) {
    whole.tokens.push_back(doc.tokens[size_t(i)].text);
    whole.offset_map.push_back(i);
  }
  CoverageReport report = coverage({whole}, doc);
  CHECK(report.all.total == 2);
  CHECK(report.all.covered == 2);
  CHECK(report.discontinuous.covered == 1);
}

TEST_CASE("coverage: brute-force containment check") {
  Document doc = make_document("d", "a b c d\ne f g h\ni j k l");
  doc.gold.push_back(Entity("X", {{1, 3}}));             // flat, sentence 0
  doc.gold.push_back(Entity("X", {{5, 6}, {7, 8}}));     // disc, sentence 1
  doc.gold.push_back(Entity("X", {{3, 4}, {4, 5}}));     // merges: crosses 0|1
  doc.gold.push_back(Entity("X", {{6, 7}, {9, 10}}));    // disc, crosses 1|2
  doc.gold = dedupe_entities(doc.gold);
  std::vector<Sample> samples = split_newline(doc);
  CoverageReport report = coverage(samples, doc);
  // Brute force: an entity is covered iff a sample contains all spans.
  long covered = 0;
  for (const Entity& e : doc.gold) {
    for (const Sample& s : samples) {
      std::set<int> have(s.offset_map.begin(), s.offset_map.end());
      bool all = true;
      for (int ix : e.token_indices()) all = all && have.count(ix);
      if (all) {
        ++covered;
        break;
      }
    }
  }
  CHECK(report.all.covered == covered);
  CHECK(report.cross_sentence.covered == 0);
  CHECK(report.cross_sentence.total == 2);
}

TEST_CASE("coverage rejects samples pointing outside the document") {
  Document doc = make_document("d", "a b");
  Sample bad;
  bad.id = "d#b";
  bad.doc_id = "d";
  bad.tokens = {"a", "b", "c"};
  bad.offset_map = {0, 1, 2};
  CHECK_THROWS_AS(coverage({bad}, doc), ConsistencyError);
}

TEST_CASE("entity invariants") {
  // Adjacent spans merge at construction.
  Entity merged("X", {{0, 2}, {2, 4}});
  CHECK(merged.spans() == std::vector<Span>{{0, 4}});
  CHECK_FALSE(merged.discontinuous());
  CHECK(Entity("X", {{0, 1}, {2, 3}}).discontinuous());
  CHECK_THROWS_AS(Entity("X", {}), RangeError);
  CHECK_THROWS_AS(Entity("X", {{2, 2}}), RangeError);
}
