#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "seda/corpus.hpp"
#include "seda/experiment.hpp"
#include "seda/grid.hpp"
#include "seda/io.hpp"
#include "seda/metrics.hpp"
#include "seda/model.hpp"
#include "seda/seda.hpp"
#include "seda/synth.hpp"
#include "seda/train.hpp"

namespace py = pybind11;
using namespace seda;

namespace {

std::string span_repr(const Span& s) {
  return "Span(" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")";
}

std::string entity_repr(const Entity& e) {
  std::ostringstream out;
  out << "Entity(" << e.label() << ", [";
  for (size_t k = 0; k < e.spans().size(); ++k)
    out << (k ? ", " : "") << span_repr(e.spans()[k]);
  out << "])";
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grid-tagging discontinuous NER with entity-centric augmentation";
#ifdef SEDA_VERSION
  m.attr("__version__") = SEDA_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  py::register_exception<Error>(m, "SedaError");

  // ---- core types ----------------------------------------------------------
  py::class_<Span>(m, "Span")
      .def(py::init<int, int>(), py::arg("start"), py::arg("end"))
      .def_readonly("start", &Span::start)
      .def_readonly("end", &Span::end)
      .def("__len__", &Span::length)
      .def("__eq__", [](const Span& a, const Span& b) { return a == b; })
      .def("__repr__", &span_repr);

  py::class_<Entity>(m, "Entity")
      .def(py::init<std::string, std::vector<Span>>(), py::arg("label"), py::arg("spans"))
      .def_static("from_token_indices", &Entity::from_token_indices, py::arg("label"),
                  py::arg("indices"))
      .def_property_readonly("label", &Entity::label)
      .def_property_readonly("spans", &Entity::spans)
      .def("token_indices", &Entity::token_indices)
      .def("discontinuous", &Entity::discontinuous)
      .def("cross_sentence", &Entity::cross_sentence, py::arg("sentence_breaks"))
      .def("__eq__", [](const Entity& a, const Entity& b) { return a == b; })
      .def("__repr__", &entity_repr);

  py::class_<Token>(m, "Token")
      .def_readonly("index", &Token::index)
      .def_readonly("text", &Token::text)
      .def_readonly("char_start", &Token::char_start)
      .def_readonly("char_end", &Token::char_end)
      .def("__repr__", [](const Token& t) { return "Token(" + t.text + ")"; });

  py::class_<Document>(m, "Document")
      .def_readonly("id", &Document::id)
      .def_readonly("raw", &Document::raw)
      .def_readonly("tokens", &Document::tokens)
      .def_readonly("sentence_breaks", &Document::sentence_breaks)
      .def_readwrite("gold", &Document::gold)
      .def("__len__", &Document::size);

  py::enum_<SampleKind>(m, "SampleKind")
      .value("ES", SampleKind::ES)
      .value("NES", SampleKind::NES);

  py::class_<Sample>(m, "Sample")
      .def_readonly("id", &Sample::id)
      .def_readonly("doc_id", &Sample::doc_id)
      .def_readonly("kind", &Sample::kind)
      .def_readonly("tokens", &Sample::tokens)
      .def_readonly("offset_map", &Sample::offset_map)
      .def_readonly("gold", &Sample::gold)
      .def_readonly("anchors", &Sample::anchors)
      .def("__len__", &Sample::size);

  py::class_<SubsetCount>(m, "SubsetCount")
      .def_readonly("total", &SubsetCount::total)
      .def_readonly("covered", &SubsetCount::covered);

  py::class_<CoverageReport>(m, "CoverageReport")
      .def_readonly("all", &CoverageReport::all)
      .def_readonly("discontinuous", &CoverageReport::discontinuous)
      .def_readonly("cross_sentence", &CoverageReport::cross_sentence);

  // ---- corpus ---------------------------------------------------------------
  m.def("tokenize", &tokenize, py::arg("raw_text"));
  m.def("make_document", &make_document, py::arg("id"), py::arg("raw_text"));
  m.def("parse_standoff", &parse_standoff, py::arg("raw_text"), py::arg("annotations"),
        py::arg("doc_id") = "doc");
  m.def("split_newline", &split_newline, py::arg("doc"));
  m.def(
      "mask_context",
      [](const Document& doc, const std::string& mode, const std::string& token) {
        MaskResult r = mask_context(doc, mask_mode_from_string(mode), token);
        return py::make_tuple(r.doc, r.skipped_no_entities);
      },
      py::arg("doc"), py::arg("mode"), py::arg("mask_token") = "[MASK]");
  m.def("coverage", &coverage, py::arg("samples"), py::arg("doc"));

  // ---- grid -----------------------------------------------------------------
  py::class_<TagScheme>(m, "TagScheme")
      .def(py::init([](const std::string& mode, std::vector<std::string> labels) {
             return TagScheme(tag_mode_from_string(mode), std::move(labels));
           }),
           py::arg("mode"), py::arg("labels"))
      .def_property_readonly("labels", &TagScheme::labels)
      .def_property_readonly("num_tags", &TagScheme::num_tags)
      .def("tag_name", &TagScheme::tag_name, py::arg("tag"));

  py::class_<TagGrid>(m, "TagGrid")
      .def_readonly("sample_id", &TagGrid::sample_id)
      .def_readonly("n", &TagGrid::n)
      .def("at", &TagGrid::at, py::arg("i"), py::arg("j"))
      .def_property_readonly("cells",
                             [](const TagGrid& g) { return std::vector<int>(g.cells.begin(),
                                                                            g.cells.end()); });

  m.def("encode", &encode, py::arg("entities"), py::arg("n"), py::arg("scheme"),
        py::arg("sample_id") = "");
  m.def(
      "decode",
      [](const TagGrid& grid, const TagScheme& scheme, long path_cap) {
        return decode(grid, scheme, nullptr, path_cap);
      },
      py::arg("grid"), py::arg("scheme"), py::arg("path_cap") = 1000);

  // ---- metrics ---------------------------------------------------------------
  py::class_<PrfTriple>(m, "PrfTriple")
      .def_readonly("precision", &PrfTriple::precision)
      .def_readonly("recall", &PrfTriple::recall)
      .def_readonly("f1", &PrfTriple::f1);

  py::class_<BoundaryScores>(m, "BoundaryScores")
      .def_readonly("ebp", &BoundaryScores::ebp)
      .def_readonly("ebr", &BoundaryScores::ebr)
      .def_readonly("ebf", &BoundaryScores::ebf);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("exact", &EvalReport::exact)
      .def_readonly("boundary", &EvalReport::boundary)
      .def_readonly("subset_discontinuous", &EvalReport::subset_discontinuous)
      .def_readonly("subset_cross_sentence", &EvalReport::subset_cross_sentence);

  m.def("exact_prf",
        [](const EntitySets& pred, const EntitySets& gold) { return exact_prf(pred, gold); },
        py::arg("pred"), py::arg("gold"));
  m.def(
      "ebf",
      [](const EntitySets& pred, const EntitySets& gold, const std::string& variant) {
        BoundaryScores b = ebf(pred, gold, ebf_variant_from_string(variant));
        return py::make_tuple(b.ebp, b.ebr, b.ebf);
      },
      py::arg("pred"), py::arg("gold"), py::arg("variant") = "matched");
  m.def(
      "subset_filter",
      [](const std::vector<Entity>& entities, const std::string& subset,
         const std::vector<int>& breaks) {
        return subset_filter(entities, subset_from_string(subset), breaks);
      },
      py::arg("entities"), py::arg("subset"), py::arg("sentence_breaks") = std::vector<int>{});
  m.def("unified_filter", &unified_filter, py::arg("gold_docs"));
  m.def(
      "evaluate",
      [](const EntitySets& pred, const std::vector<Document>& docs, bool unified,
         const std::string& variant) {
        EvalOptions opts;
        opts.unified = unified;
        opts.variant = ebf_variant_from_string(variant);
        return evaluate(pred, docs, opts);
      },
      py::arg("pred"), py::arg("gold_docs"), py::arg("unified") = false,
      py::arg("variant") = "matched");

  // ---- tagger -----------------------------------------------------------------
  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("d_h", &ModelConfig::d_h)
      .def_readwrite("d_ed", &ModelConfig::d_ed)
      .def_readwrite("d_et", &ModelConfig::d_et)
      .def_readwrite("d_c", &ModelConfig::d_c)
      .def_readwrite("dilations", &ModelConfig::dilations)
      .def_readwrite("dropout", &ModelConfig::dropout)
      .def_readwrite("lr_encoder", &ModelConfig::lr_encoder)
      .def_readwrite("lr_other", &ModelConfig::lr_other)
      .def_readwrite("weight_decay", &ModelConfig::weight_decay)
      .def_readwrite("warm_factor", &ModelConfig::warm_factor)
      .def_readwrite("batch_size", &ModelConfig::batch_size)
      .def_readwrite("epochs", &ModelConfig::epochs)
      .def_readwrite("seed", &ModelConfig::seed)
      .def_readwrite("none_weight", &ModelConfig::none_weight);

  py::class_<GridModel>(m, "GridModel")
      .def_property_readonly("parameter_count", &GridModel::parameter_count)
      .def_property_readonly("labels",
                             [](const GridModel& g) { return g.scheme().labels(); });

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_readonly("epoch", &Checkpoint::epoch)
      .def_readonly("dev_ebf", &Checkpoint::dev_ebf)
      .def_readonly("dev_f1", &Checkpoint::dev_f1);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("checkpoints", &TrainResult::checkpoints)
      .def_readonly("epoch_losses", &TrainResult::epoch_losses);

  m.def("train", &train, py::arg("train_samples"), py::arg("config"),
        py::arg("dev_samples") = std::vector<Sample>{},
        py::arg("dev_docs") = std::vector<Document>{},
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "predict",
      [](const GridModel& model, const Sample& sample) { return predict(model, sample).grid; },
      py::arg("model"), py::arg("sample"));
  m.def(
      "predict_documents",
      [](const GridModel& model, const std::vector<Sample>& samples) {
        return predict_documents(model, samples);
      },
      py::arg("model"), py::arg("samples"), py::call_guard<py::gil_scoped_release>());
  m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def(
      "gradient_check",
      [](GridModel& model, const std::vector<int>& ids, const TagGrid& gold, double step) {
        GradCheckReport r = gradient_check(model, ids, gold, step);
        py::dict per_group;
        for (const auto& g : r.groups) per_group[py::str(g.name)] = g.max_rel_error;
        return py::make_tuple(r.max_rel_error, per_group);
      },
      py::arg("model"), py::arg("ids"), py::arg("gold"), py::arg("step") = 1e-3);

  // ---- augmentation pipeline ----------------------------------------------------
  py::class_<SedaConfig>(m, "SedaConfig")
      .def(py::init<>())
      .def_readwrite("es_enabled", &SedaConfig::es_enabled)
      .def_readwrite("nes_enabled", &SedaConfig::nes_enabled)
      .def_readwrite("look_forward", &SedaConfig::look_forward)
      .def_readwrite("look_backward", &SedaConfig::look_backward)
      .def_readwrite("max_iterations", &SedaConfig::max_iterations);

  py::class_<SedaRunResult>(m, "SedaRunResult")
      .def_readonly("samples", &SedaRunResult::samples)
      .def_readonly("predictions", &SedaRunResult::predictions)
      .def_readonly("anchors", &SedaRunResult::anchors)
      .def_readonly("coverage", &SedaRunResult::coverage);

  py::class_<SedaMulResult>(m, "SedaMulResult")
      .def_readonly("combined", &SedaMulResult::combined)
      .def_readonly("iterations_run", &SedaMulResult::iterations_run);

  m.def("grid_size_for", &grid_size_for, py::arg("doc_length"),
        py::arg("config") = SedaConfig{});
  m.def("build_segments", &build_segments, py::arg("doc"), py::arg("predictions"),
        py::arg("grid_size"));
  m.def("localize", &localize, py::arg("doc"), py::arg("segments"));
  m.def("supplement", &supplement, py::arg("sample"), py::arg("doc"), py::arg("config"));
  m.def("augment_document", &augment_document, py::arg("doc"), py::arg("anchors"),
        py::arg("config"));
  m.def(
      "run_once",
      [](const std::vector<Document>& docs, const GridModel& model, const SedaConfig& cfg,
         const std::optional<EntitySets>& anchors) { return run_once(docs, model, cfg, anchors); },
      py::arg("docs"), py::arg("model"), py::arg("config") = SedaConfig{},
      py::arg("anchors") = std::nullopt, py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_mul",
      [](const std::vector<Document>& docs, const GridModel& model, const SedaConfig& cfg) {
        return run_mul(docs, model, cfg);
      },
      py::arg("docs"), py::arg("model"), py::arg("config") = SedaConfig{},
      py::call_guard<py::gil_scoped_release>());

  py::class_<Segment>(m, "Segment")
      .def_property_readonly(
          "parity",
          [](const Segment& s) {
            return s.parity == SegmentParity::OddEntity ? "odd_entity" : "even_text";
          })
      .def_readonly("block_id", &Segment::block_id)
      .def_readonly("doc_range", &Segment::doc_range)
      .def_readonly("source_entity_ids", &Segment::source_entity_ids);

  // ---- synthetic corpora and files ----------------------------------------------
  py::class_<SynthOptions>(m, "SynthOptions")
      .def(py::init<>())
      .def_readwrite("n_docs", &SynthOptions::n_docs)
      .def_readwrite("seed", &SynthOptions::seed)
      .def_readwrite("cross_sentence", &SynthOptions::cross_sentence)
      .def_readwrite("labels", &SynthOptions::labels);

  m.def("gen_corpus", &gen_corpus, py::arg("options") = SynthOptions{});
  m.def("read_documents", &read_documents, py::arg("path"));
  m.def("write_documents", &write_documents, py::arg("path"), py::arg("docs"));
  m.def("read_samples", &read_samples, py::arg("path"));
  m.def("write_samples", &write_samples, py::arg("path"), py::arg("samples"));
  m.def("read_corpus_dir", &read_corpus_dir, py::arg("dir"));
}
