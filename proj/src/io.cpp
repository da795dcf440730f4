#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seda/corpus.hpp"
#include "seda/io.hpp"
#include "seda/rng.hpp"

namespace seda {

namespace {

using Json = nlohmann::ordered_json;

Json entity_to_json(const Entity& e) {
  Json spans = Json::array();
  for (const Span& s : e.spans()) spans.push_back(Json::array({s.start, s.end}));
  return Json{{"label", e.label()}, {"spans", std::move(spans)}};
}

Entity entity_from_json(const Json& j) {
  std::vector<Span> spans;
  for (const Json& s : j.at("spans"))
    spans.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
  return Entity(j.at("label").get<std::string>(), std::move(spans));
}

Json entities_to_json(const std::vector<Entity>& entities) {
  Json arr = Json::array();
  for (const Entity& e : entities) arr.push_back(entity_to_json(e));
  return arr;
}

std::vector<Entity> entities_from_json(const Json& arr) {
  std::vector<Entity> out;
  for (const Json& e : arr) out.push_back(entity_from_json(e));
  return out;
}

Json parse_line(const std::string& line, const char* what) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& err) {
    throw ParseError(std::string("bad ") + what + " record: " + err.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  return in;
}

}  // namespace

std::string document_to_json(const Document& doc) {
  Json j;
  j["id"] = doc.id;
  Json tokens = Json::array();
  for (const Token& t : doc.tokens) tokens.push_back(t.text);
  j["tokens"] = std::move(tokens);
  j["sentence_breaks"] = doc.sentence_breaks;
  j["entities"] = entities_to_json(doc.gold);
  return j.dump();
}

Document document_from_json(const std::string& line) {
  Json j = parse_line(line, "document");
  Document doc;
  doc.id = j.at("id").get<std::string>();
  // Exchange records carry token texts only; regenerate plausible char
  // offsets (single spaces, newlines at sentence breaks) so invariants hold.
  doc.sentence_breaks = j.at("sentence_breaks").get<std::vector<int>>();
  int offset = 0;
  int index = 0;
  for (const Json& t : j.at("tokens")) {
    Token tok;
    tok.index = index;
    tok.text = t.get<std::string>();
    tok.char_start = offset;
    tok.char_end = offset + static_cast<int>(tok.text.size());
    offset = tok.char_end + 1;
    doc.tokens.push_back(tok);
    if (index > 0) doc.raw.push_back(std::binary_search(doc.sentence_breaks.begin(),
                                                        doc.sentence_breaks.end(), index)
                                         ? '\n'
                                         : ' ');
    doc.raw += doc.tokens.back().text;
    ++index;
  }
  doc.gold = entities_from_json(j.at("entities"));
  doc.validate();
  return doc;
}

std::string sample_to_json(const Sample& sample) {
  Json j;
  j["id"] = sample.id;
  j["doc_id"] = sample.doc_id;
  j["kind"] = to_string(sample.kind);
  j["tokens"] = sample.tokens;
  j["offset_map"] = sample.offset_map;
  j["entities"] = entities_to_json(sample.gold);
  if (!sample.anchors.empty()) j["anchors"] = sample.anchors;
  return j.dump();
}

Sample sample_from_json(const std::string& line) {
  Json j = parse_line(line, "sample");
  Sample s;
  s.id = j.at("id").get<std::string>();
  s.doc_id = j.at("doc_id").get<std::string>();
  s.kind = sample_kind_from_string(j.at("kind").get<std::string>());
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  s.offset_map = j.at("offset_map").get<std::vector<int>>();
  s.gold = entities_from_json(j.at("entities"));
  if (j.contains("anchors")) s.anchors = j.at("anchors").get<std::vector<int>>();
  if (s.tokens.size() != s.offset_map.size())
    throw ParseError("sample " + s.id + ": offset_map length mismatch");
  return s;
}

void write_documents(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out = open_out(path);
  for (const Document& doc : docs) out << document_to_json(doc) << '\n';
}

std::vector<Document> read_documents(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<Document> docs;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) docs.push_back(document_from_json(line));
  return docs;
}

void write_samples(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out = open_out(path);
  for (const Sample& s : samples) out << sample_to_json(s) << '\n';
}

std::vector<Sample> read_samples(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<Sample> samples;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) samples.push_back(sample_from_json(line));
  return samples;
}

void write_grids(const std::string& path, const std::vector<TagGrid>& grids,
                 const TagScheme& scheme) {
  std::ofstream out = open_out(path);
  for (const TagGrid& g : grids) {
    Json cells = Json::array();
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (g.at(i, j) != TagScheme::kNone)
          cells.push_back(Json::array({i, j, scheme.tag_name(g.at(i, j))}));
    Json j{{"sample_id", g.sample_id}, {"n", g.n}, {"cells", std::move(cells)}};
    out << j.dump() << '\n';
  }
}

std::vector<TagGrid> read_grids(const std::string& path, const TagScheme& scheme) {
  std::ifstream in = open_in(path);
  std::vector<TagGrid> grids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = parse_line(line, "grid");
    TagGrid g(j.at("sample_id").get<std::string>(), j.at("n").get<int>());
    for (const Json& cell : j.at("cells")) {
      int i = cell.at(0).get<int>(), jj = cell.at(1).get<int>();
      if (i < 0 || i >= g.n || jj < 0 || jj >= g.n)
        throw RangeError("grid cell outside " + g.sample_id);
      g.set(i, jj, scheme.tag_from_name(cell.at(2).get<std::string>()));
    }
    grids.push_back(std::move(g));
  }
  return grids;
}

void write_entity_sets(const std::string& path, const EntitySets& sets) {
  std::ofstream out = open_out(path);
  for (const auto& [id, entities] : sets) {
    Json j{{"id", id}, {"entities", entities_to_json(entities)}};
    out << j.dump() << '\n';
  }
}

EntitySets read_entity_sets(const std::string& path) {
  std::ifstream in = open_in(path);
  EntitySets sets;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = parse_line(line, "prediction");
    sets[j.at("id").get<std::string>()] = entities_from_json(j.at("entities"));
  }
  return sets;
}

std::vector<Document> read_corpus_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError("not a directory: " + dir);
  std::vector<fs::path> texts;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      texts.push_back(entry.path());
  std::sort(texts.begin(), texts.end());

  std::vector<Document> docs;
  for (const fs::path& txt : texts) {
    fs::path ann = txt;
    ann.replace_extension(".ann");
    if (!fs::exists(ann)) continue;
    std::ostringstream raw, annotations;
    raw << open_in(txt.string()).rdbuf();
    annotations << open_in(ann.string()).rdbuf();
    docs.push_back(parse_standoff(raw.str(), annotations.str(), txt.stem().string()));
  }
  return docs;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ostringstream text;
  text << open_in(path).rdbuf();
  return parse_key_values(text.str());
}

// Checkpoint format: magic, little-endian u64 header length, JSON header,
// then raw doubles in registry order.
static const char kMagic[8] = {'S', 'E', 'D', 'A', 'C', 'K', '0', '1'};

void save_model(const std::string& path, const GridModel& model) {
  Json header;
  const ModelConfig& cfg = model.config();
  header["format"] = 1;
  header["config"] = {{"d_h", cfg.d_h},
                      {"d_ed", cfg.d_ed},
                      {"d_et", cfg.d_et},
                      {"d_c", cfg.d_c},
                      {"dilations", cfg.dilations},
                      {"dropout", cfg.dropout},
                      {"lr_encoder", cfg.lr_encoder},
                      {"lr_other", cfg.lr_other},
                      {"weight_decay", cfg.weight_decay},
                      {"warm_factor", cfg.warm_factor},
                      {"batch_size", cfg.batch_size},
                      {"epochs", cfg.epochs},
                      {"seed", cfg.seed},
                      {"none_weight", cfg.none_weight},
                      {"tag_mode", cfg.tag_mode == TagMode::Base ? "base" : "extended"}};
  header["vocab"] = model.vocab().id_to_token;
  header["labels"] = model.scheme().labels();
  Json tensors = Json::array();
  for (const Param* p : model.params())
    tensors.push_back(Json{{"name", p->name}, {"shape", p->shape}});
  header["tensors"] = std::move(tensors);

  std::string head = header.dump();
  std::ofstream out = open_out(path);
  out.write(kMagic, sizeof kMagic);
  std::uint64_t len = head.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const Param* p : model.params())
    out.write(reinterpret_cast<const char*>(p->w.data()),
              static_cast<std::streamsize>(p->w.size() * sizeof(double)));
}

GridModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ParseError(path + " is not a model checkpoint");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  std::string head(len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(len));
  if (!in) throw ParseError(path + ": truncated checkpoint header");
  Json header = parse_line(head, "checkpoint header");

  ModelConfig cfg;
  const Json& jc = header.at("config");
  cfg.d_h = jc.at("d_h").get<int>();
  cfg.d_ed = jc.at("d_ed").get<int>();
  cfg.d_et = jc.at("d_et").get<int>();
  cfg.d_c = jc.at("d_c").get<int>();
  cfg.dilations = jc.at("dilations").get<std::vector<int>>();
  cfg.dropout = jc.at("dropout").get<double>();
  cfg.lr_encoder = jc.at("lr_encoder").get<double>();
  cfg.lr_other = jc.at("lr_other").get<double>();
  cfg.weight_decay = jc.at("weight_decay").get<double>();
  cfg.warm_factor = jc.at("warm_factor").get<double>();
  cfg.batch_size = jc.at("batch_size").get<int>();
  cfg.epochs = jc.at("epochs").get<int>();
  cfg.seed = jc.at("seed").get<std::uint64_t>();
  cfg.none_weight = jc.at("none_weight").get<double>();
  cfg.tag_mode = tag_mode_from_string(jc.at("tag_mode").get<std::string>());

  Vocab vocab;
  std::vector<std::string> id_to_token = header.at("vocab").get<std::vector<std::string>>();
  if (id_to_token.empty() || id_to_token[0] != "<unk>")
    throw ParseError(path + ": vocabulary must start with <unk>");
  for (size_t k = 1; k < id_to_token.size(); ++k) vocab.add(id_to_token[k]);

  TagScheme scheme(cfg.tag_mode, header.at("labels").get<std::vector<std::string>>());
  GridModel model(cfg, std::move(vocab), std::move(scheme));

  const Json& tensors = header.at("tensors");
  std::vector<Param*> params = model.params();
  if (tensors.size() != params.size())
    throw ParseError(path + ": tensor manifest does not match this build");
  for (size_t k = 0; k < params.size(); ++k) {
    if (tensors[k].at("name").get<std::string>() != params[k]->name)
      throw ParseError(path + ": unexpected tensor " +
                       tensors[k].at("name").get<std::string>());
    in.read(reinterpret_cast<char*>(params[k]->w.data()),
            static_cast<std::streamsize>(params[k]->w.size() * sizeof(double)));
    if (!in) throw ParseError(path + ": truncated tensor data");
  }
  return model;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  Json j;
  j["command"] = manifest.command;
  j["config_digests"] = manifest.config_digests;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["duration_seconds"] = manifest.duration_seconds;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string file_digest(const std::string& path) {
  std::ostringstream text;
  text << open_in(path).rdbuf();
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(text.str())));
  return buf;
}

}  // namespace seda
