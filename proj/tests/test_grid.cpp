#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "seda/grid.hpp"
#include "seda/rng.hpp"

using namespace seda;

namespace {

const TagScheme kBase{TagMode::Base, {"ADR", "DIS"}};
const TagScheme kExt{TagMode::Extended, {"ADR", "DIS"}};

// Random entity set over n tokens: non-overlapping token sets, distinct
// (tail, head) cells by construction, >= 30% discontinuous overall.
std::vector<Entity> random_entities(Rng& rng, int n, int max_entities) {
  std::vector<Entity> out;
  std::set<int> used;
  const int count = rng.range(0, max_entities);
  for (int e = 0; e < count; ++e) {
    const bool disc = rng.bernoulli(0.45);
    const int want = disc ? rng.range(3, 5) : rng.range(1, 3);
    std::vector<int> picks;
    for (int attempt = 0; attempt < 40 && static_cast<int>(picks.size()) < want; ++attempt) {
      int ix = rng.range(0, n - 1);
      if (!used.count(ix)) {
        used.insert(ix);
        picks.push_back(ix);
      }
    }
    if (picks.empty()) continue;
    std::sort(picks.begin(), picks.end());
    if (disc && picks.size() >= 2) {
      // Force a gap so the entity stays discontinuous after merging.
      bool has_gap = false;
      for (size_t k = 0; k + 1 < picks.size(); ++k)
        has_gap = has_gap || picks[k + 1] > picks[k] + 1;
      if (!has_gap) continue;
    }
    const char* label = rng.bernoulli(0.5) ? "ADR" : "DIS";
    out.push_back(Entity::from_token_indices(label, picks));
  }
  return dedupe_entities(out);
}

}  // namespace

TEST_CASE("tag scheme ids and names round-trip") {
  CHECK(kBase.num_tags() == 4);
  CHECK(kExt.num_tags() == 7);
  for (const TagScheme& scheme : {kBase, kExt}) {
    for (int tag = 0; tag < scheme.num_tags(); ++tag)
      CHECK(scheme.tag_from_name(scheme.tag_name(tag)) == tag);
  }
  CHECK(kBase.tag_name(kBase.thw(0)) == "THW-ADR");
  CHECK(kExt.tag_name(kExt.htw(1)) == "HTW-DIS");
  CHECK_THROWS_AS(kBase.tag_from_name("THW-XXX"), ParseError);
}

TEST_CASE("encode writes NNW above and THW below the diagonal") {
  // "I do experience stomach pain from time to time": ADR over tokens {3,4}.
  std::vector<Entity> entities{Entity::from_token_indices("ADR", {3, 4})};
  TagGrid grid = encode(entities, 9, kBase);
  CHECK(grid.at(3, 4) == TagScheme::kNnw);
  CHECK(grid.at(4, 3) == kBase.thw(0));
  int nonzero = 0;
  for (int v : grid.cells) nonzero += v != 0;
  CHECK(nonzero == 2);
}

TEST_CASE("encode: no entities means an all-NONE grid") {
  TagGrid grid = encode({}, 5, kBase);
  CHECK(std::all_of(grid.cells.begin(), grid.cells.end(), [](int v) { return v == 0; }));
}

TEST_CASE("encode a discontinuous entity and decode it back") {
  std::vector<Entity> entities{Entity::from_token_indices("DIS", {2, 3, 7})};
  TagGrid grid = encode(entities, 9, kBase);
  CHECK(grid.at(2, 3) == TagScheme::kNnw);
  CHECK(grid.at(3, 7) == TagScheme::kNnw);
  CHECK(grid.at(7, 2) == kBase.thw(1));
  CHECK(dedupe_entities(decode(grid, kBase)) == entities);
}

TEST_CASE("single-word entity sits on the diagonal") {
  std::vector<Entity> entities{Entity::from_token_indices("ADR", {4})};
  TagGrid grid = encode(entities, 6, kBase);
  CHECK(grid.at(4, 4) == kBase.thw(0));
  CHECK(dedupe_entities(decode(grid, kBase)) == entities);
}

TEST_CASE("encode conflicts are loud") {
  // Same (tail, head) with different labels is undecidable for the scheme.
  std::vector<Entity> entities{Entity::from_token_indices("ADR", {1, 2, 5}),
                               Entity::from_token_indices("DIS", {1, 3, 5})};
  CHECK_THROWS_AS(encode(entities, 6, kBase), EncodeConflictError);
  // Same label is fine: both paths decode.
  std::vector<Entity> same{Entity::from_token_indices("ADR", {1, 2, 5}),
                           Entity::from_token_indices("ADR", {1, 3, 5})};
  TagGrid grid = encode(same, 6, kBase);
  CHECK(dedupe_entities(decode(grid, kBase)) == dedupe_entities(same));
  // Out-of-range token.
  CHECK_THROWS_AS(encode({Entity::from_token_indices("ADR", {7})}, 6, kBase), RangeError);
  // Unknown label.
  CHECK_THROWS_AS(encode({Entity::from_token_indices("XXX", {1})}, 6, kBase),
                  EncodeConflictError);
}

TEST_CASE("decode the worked grid example") {
  TagGrid grid("fig", 9);
  grid.set(3, 4, TagScheme::kNnw);
  grid.set(4, 3, kBase.thw(0));
  std::vector<Entity> expect{Entity::from_token_indices("ADR", {3, 4})};
  CHECK(decode(grid, kBase) == expect);
  CHECK(decode(TagGrid("empty", 7), kBase).empty());
}

TEST_CASE("decode treats misplaced tags as NONE and counts them") {
  TagGrid grid("bad", 5);
  grid.set(3, 1, TagScheme::kNnw);   // NNW below the diagonal
  grid.set(1, 3, kBase.thw(0));      // THW above the diagonal
  DecodeDiagnostics diag;
  CHECK(decode(grid, kBase, &diag).empty());
  CHECK(diag.misplaced_cells == 2);
}

TEST_CASE("decode path cap guards against degenerate grids") {
  // A dense NNW band creates exponentially many head->tail paths.
  const int n = 24;
  TagGrid grid("dense", n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) grid.set(i, j, TagScheme::kNnw);
  grid.set(n - 1, 0, kBase.thw(0));
  CHECK_THROWS_AS(decode(grid, kBase), DecodeDegenerateError);
  CHECK_NOTHROW(decode(grid, kBase, nullptr, 1 << 30));
}

TEST_CASE("round-trip: decode(encode(E)) == E on 1000 random samples") {
  Rng rng(1898);
  long disc_seen = 0, total = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.range(2, 30);
    std::vector<Entity> entities = random_entities(rng, n, 4);
    for (const Entity& e : entities) disc_seen += e.discontinuous(), ++total;
    const TagScheme& scheme = trial % 2 == 0 ? kBase : kExt;
    TagGrid grid = encode(entities, n, scheme);
    CHECK(dedupe_entities(decode(grid, scheme)) == entities);
  }
  CHECK(disc_seen * 10 >= total * 3);  // >= 30% discontinuous overall
}

TEST_CASE("extended grids decode exactly like their base projection") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.range(2, 20);
    std::vector<Entity> entities = random_entities(rng, n, 3);
    TagGrid ext = encode(entities, n, kExt);
    // Project: every extended tag becomes NONE.
    TagGrid base = ext;
    for (auto& cell : base.cells)
      if (cell >= kExt.pnw()) cell = TagScheme::kNone;
    CHECK(decode(ext, kExt) == decode(base, kBase));
  }
}

TEST_CASE("decoded entities always have strictly increasing indices") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.range(2, 16);
    TagGrid grid("rnd", n);
    // Random tag soup, then repair-by-decode must stay sane.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rng.bernoulli(0.15)) grid.set(i, j, static_cast<int>(rng.below(4)));
    std::vector<Entity> entities;
    try {
      entities = decode(grid, kBase, nullptr, 200);
    } catch (const DecodeDegenerateError&) {
      continue;
    }
    for (const Entity& e : entities) {
      std::vector<int> ids = e.token_indices();
      for (size_t k = 0; k + 1 < ids.size(); ++k) CHECK(ids[k] < ids[k + 1]);
    }
  }
}

TEST_CASE("extended mirrors yield consistency diagnostics, not entities") {
  TagGrid grid("m", 4);
  grid.set(1, 0, kExt.pnw());        // PNW without its NNW mirror
  grid.set(0, 2, kExt.htw(0));       // HTW without its THW mirror
  DecodeDiagnostics diag;
  CHECK(decode(grid, kExt, &diag).empty());
  CHECK(diag.mirror_mismatches == 2);
}
