#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seda/types.hpp"

namespace seda {

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

// Deterministic, reversible tokenization: split on whitespace, then split
// every ASCII punctuation character into its own token, so "pain." becomes
// [pain][.] and "knee,the" becomes [knee][,][the]. Joining token texts with
// the original inter-token characters reproduces the input byte for byte.
std::vector<Token> tokenize(const std::string& raw_text);

// Rebuilds the raw text from tokens and their recorded char offsets.
std::string reconstruct(const std::string& raw_text, const std::vector<Token>& tokens);

// Tokenizes and derives newline sentence breaks; gold is left empty.
Document make_document(std::string id, std::string raw_text);

// ---------------------------------------------------------------------------
// Standoff ingestion
// ---------------------------------------------------------------------------

// Parses brat-style standoff annotations over the raw text:
//
//   T1<TAB>ADR 0 18;22 26<TAB>severe muscle pain legs
//
// Character fragments map to the covering token spans; adjacent fragments
// merge; duplicate annotations (same label and span set) deduplicate. Lines
// whose id does not start with 'T' (notes, relations, attributes) are
// skipped. A fragment boundary that cuts through a token is a hard error.
Document parse_standoff(const std::string& raw_text, const std::string& annotations,
                        std::string doc_id = "doc");

// ---------------------------------------------------------------------------
// Baseline segmentation, masking, coverage
// ---------------------------------------------------------------------------

// One sample per newline-delimited sentence. A gold entity is projected into
// a sample only when all of its spans fall inside that sample; entities cut
// by a newline are dropped from every sample's gold.
std::vector<Sample> split_newline(const Document& doc);

enum class MaskMode { BeforeFirst, AfterLast, BothSides };

MaskMode mask_mode_from_string(const std::string& s);

struct MaskResult {
  Document doc;
  bool skipped_no_entities = false;  // warning flag: mode requested on an
                                     // entity-free document is a no-op
};

// Replaces every token before the first entity token and/or after the last
// entity token with mask_token. Entity offsets are untouched; the raw text
// and char offsets keep their original values, so masked documents do not
// round-trip to raw text.
MaskResult mask_context(const Document& doc, MaskMode mode,
                        const std::string& mask_token = "[MASK]");

// An entity counts as covered iff some single sample contains all its spans.
CoverageReport coverage(const std::vector<Sample>& samples, const Document& doc);

}  // namespace seda
