#include "seda/experiment.hpp"

#include "seda/corpus.hpp"

namespace seda {

std::vector<Sample> newline_samples(const std::vector<Document>& docs) {
  std::vector<Sample> samples;
  for (const Document& doc : docs)
    for (Sample& s : split_newline(doc)) samples.push_back(std::move(s));
  return samples;
}

namespace {

std::vector<Sample> augmented_split(const std::vector<Document>& docs,
                                    const EntitySets& anchors, const SedaConfig& config) {
  std::vector<Sample> samples;
  for (const Document& doc : docs) {
    static const std::vector<Entity> kNone;
    auto it = anchors.find(doc.id);
    const std::vector<Entity>& a = it == anchors.end() ? kNone : it->second;
    for (Sample& s : augment_document(doc, a, config)) samples.push_back(std::move(s));
  }
  return samples;
}

// The boundary phase and the final predictor use different checkpoints: dev
// EBF picks the model whose predictions anchor segmentation, dev exact F1
// picks the model that scores the re-arranged samples.
struct ModelPair {
  GridModel anchor;
  GridModel predictor;
};

ModelPair split_roles(TrainResult& result, const std::vector<Document>& dev_docs,
                      bool select_by_f1) {
  ModelPair pair{result.model, result.model};
  if (result.checkpoints.empty()) return pair;
  BoundarySelection anchor_sel =
      select_boundaries(result.checkpoints, dev_docs, select_by_f1);
  restore(pair.anchor, result.checkpoints[size_t(anchor_sel.checkpoint_index)]);
  size_t best_f1 = 0;
  for (size_t k = 1; k < result.checkpoints.size(); ++k)
    if (result.checkpoints[k].dev_f1 >= result.checkpoints[best_f1].dev_f1) best_f1 = k;
  restore(pair.predictor, result.checkpoints[best_f1]);
  return pair;
}

EntitySets anchors_for(const GridModel& anchor_model, const std::vector<Document>& docs) {
  return predict_documents(anchor_model, newline_samples(docs));
}

}  // namespace

ExperimentResult run_experiment(const std::vector<Document>& train_docs,
                                const std::vector<Document>& dev_docs,
                                const std::vector<Document>& test_docs,
                                const ExperimentConfig& config) {
  std::vector<Sample> train_base = newline_samples(train_docs);
  std::vector<Sample> dev_base = newline_samples(dev_docs);
  std::vector<Sample> test_base = newline_samples(test_docs);

  TrainResult base_training = train(train_base, config.model, dev_base, dev_docs);
  ModelPair base = split_roles(base_training, dev_docs, config.select_by_f1);

  ExperimentResult result;
  result.model = base.predictor;
  result.baseline_predictions = predict_documents(base.predictor, test_base);
  for (const Document& doc : test_docs) result.baseline_predictions.try_emplace(doc.id);
  result.baseline = evaluate(result.baseline_predictions, test_docs);
  for (const Sample& s : test_base) result.baseline_samples[s.doc_id].push_back(s);

  ModelPair seda = base;
  if (config.retrain_on_augmented) {
    // Each split is augmented around the boundary model's own predictions on
    // that split; gold anchors are never used here.
    std::vector<Sample> train_aug =
        augmented_split(train_docs, anchors_for(base.anchor, train_docs), config.seda);
    std::vector<Sample> dev_aug =
        augmented_split(dev_docs, anchors_for(base.anchor, dev_docs), config.seda);
    TrainResult seda_training = train(train_aug, config.model, dev_aug, dev_docs);
    seda = split_roles(seda_training, dev_docs, config.select_by_f1);
    result.model = seda.predictor;
  }

  EntitySets test_anchors = anchors_for(seda.anchor, test_docs);
  result.once_run = run_once(test_docs, seda.predictor, config.seda, test_anchors);
  result.once_predictions = result.once_run.predictions;
  result.once = evaluate(result.once_predictions, test_docs);

  SedaMulResult mul = run_mul(test_docs, seda.predictor, config.seda, test_anchors);
  result.mul_predictions = mul.combined;
  for (const Document& doc : test_docs) result.mul_predictions.try_emplace(doc.id);
  result.mul = evaluate(result.mul_predictions, test_docs);
  return result;
}

}  // namespace seda
