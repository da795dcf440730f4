#pragma once

#include <map>
#include <string>
#include <vector>

#include "seda/grid.hpp"
#include "seda/model.hpp"
#include "seda/types.hpp"

namespace seda {

// Line-delimited exchange records. Documents:
//   {"id", "tokens", "sentence_breaks", "entities":[{"label","spans"}]}
// Samples additionally carry {"doc_id", "kind", "offset_map", "anchors"}.
// Grids are sparse: {"sample_id", "n", "cells":[[i,j,"TAG"],...]}.

std::string document_to_json(const Document& doc);
Document document_from_json(const std::string& line);

std::string sample_to_json(const Sample& sample);
Sample sample_from_json(const std::string& line);

void write_documents(const std::string& path, const std::vector<Document>& docs);
std::vector<Document> read_documents(const std::string& path);

void write_samples(const std::string& path, const std::vector<Sample>& samples);
std::vector<Sample> read_samples(const std::string& path);

void write_grids(const std::string& path, const std::vector<TagGrid>& grids,
                 const TagScheme& scheme);
std::vector<TagGrid> read_grids(const std::string& path, const TagScheme& scheme);

// Prediction records: {"id", "entities":[...]}; document records parse too.
void write_entity_sets(const std::string& path, const EntitySets& sets);
EntitySets read_entity_sets(const std::string& path);

// Ingestion: every <doc>.txt with a sibling <doc>.ann in the directory, in
// id order.
std::vector<Document> read_corpus_dir(const std::string& dir);

// Plain-text key=value configuration ('#' starts a comment).
std::map<std::string, std::string> read_key_values(const std::string& path);
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Model checkpoints: a JSON header (config, vocabulary, labels, tensor
// manifest) followed by raw little-endian doubles, so weights round-trip
// bit-exactly.
void save_model(const std::string& path, const GridModel& model);
GridModel load_model(const std::string& path);

// Every CLI subcommand writes one of these beside its outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config_digests;  // path -> fnv1a hex
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string tool_version;
  double duration_seconds = 0.0;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

std::string file_digest(const std::string& path);

}  // namespace seda
