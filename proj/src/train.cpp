#include <algorithm>
#include <cmath>
#include <set>

#include "seda/grid.hpp"
#include "seda/train.hpp"

namespace seda {

void restore(GridModel& model, const Checkpoint& checkpoint) {
  std::vector<Param*> params = model.params();
  if (params.size() != checkpoint.weights.size())
    throw ConsistencyError("checkpoint does not match the model's parameter registry");
  for (size_t k = 0; k < params.size(); ++k) {
    if (params[k]->w.size() != checkpoint.weights[k].size())
      throw ConsistencyError("checkpoint tensor " + params[k]->name + " has the wrong size");
    params[k]->w = checkpoint.weights[k];
  }
}

std::vector<std::string> collect_labels(const std::vector<Sample>& samples) {
  std::set<std::string> labels;
  for (const Sample& s : samples)
    for (const Entity& e : s.gold) labels.insert(e.label());
  return {labels.begin(), labels.end()};
}

EntitySets predict_documents(const GridModel& model, const std::vector<Sample>& samples,
                             long* skipped_degenerate) {
  EntitySets sets;
  long skipped = 0;
  for (const Sample& sample : samples) {
    if (sample.tokens.empty()) continue;
    PredictResult pred = predict(model, sample);
    std::vector<Entity> entities;
    try {
      entities = decode(pred.grid, model.scheme());
    } catch (const DecodeDegenerateError&) {
      ++skipped;
      continue;
    }
    std::vector<Entity>& doc_set = sets[sample.doc_id];
    for (const Entity& e : entities) doc_set.push_back(sample.map_to_doc(e));
  }
  for (auto& [id, entities] : sets) entities = dedupe_entities(std::move(entities));
  if (skipped_degenerate) *skipped_degenerate = skipped;
  return sets;
}

TrainResult train(const std::vector<Sample>& train_samples, const ModelConfig& config,
                  const std::vector<Sample>& dev_samples,
                  const std::vector<Document>& dev_docs) {
  config.validate();
  if (train_samples.empty()) throw RangeError("training needs at least one sample");

  Vocab vocab;
  for (const Sample& s : train_samples)
    for (const std::string& tok : s.tokens) vocab.add(tok);

  std::vector<std::string> labels = collect_labels(train_samples);
  if (labels.empty()) labels.push_back("ENT");
  TagScheme scheme(config.tag_mode, labels);

  TrainResult result{GridModel(config, vocab, scheme), {}, {}};
  GridModel& model = result.model;

  // Gold grids, built once.
  std::vector<TagGrid> grids;
  std::vector<size_t> usable;
  grids.reserve(train_samples.size());
  for (size_t k = 0; k < train_samples.size(); ++k) {
    const Sample& s = train_samples[k];
    if (s.tokens.empty()) continue;
    grids.push_back(encode(s.gold, s.size(), scheme, s.id));
    usable.push_back(k);
  }
  if (usable.empty()) throw RangeError("no non-empty training samples");

  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  Rng dropout_rng(derive_seed(config.seed, "dropout"));

  const long batches_per_epoch =
      (static_cast<long>(usable.size()) + config.batch_size - 1) / config.batch_size;
  const long total_steps = std::max(1L, batches_per_epoch * config.epochs);
  long step = 0;

  std::vector<size_t> order(usable.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t at = 0; at < order.size();) {
      const size_t batch_end = std::min(order.size(), at + size_t(config.batch_size));
      for (Param* p : model.params()) p->zero_grad();
      double batch_loss = 0.0;
      for (size_t b = at; b < batch_end; ++b) {
        const Sample& s = train_samples[usable[order[b]]];
        const TagGrid& gold = grids[order[b]];
        std::vector<int> ids = vocab.lookup_all(s.tokens);
        Trace trace = forward(model, ids, true, &dropout_rng);
        batch_loss += loss_and_backward(model, trace, gold);
      }
      const double inv = 1.0 / double(batch_end - at);
      batch_loss *= inv;
      if (!std::isfinite(batch_loss))
        throw TrainDivergedError("loss became non-finite at epoch " + std::to_string(epoch));
      epoch_loss += batch_loss * double(batch_end - at);

      ++step;
      double lr_scale = 1.0;
      if (config.warm_factor > 0.0) {
        const double warm_steps = config.warm_factor * double(total_steps);
        lr_scale = std::min(1.0, double(step) / std::max(1.0, warm_steps));
      }
      for (Param* p : model.params()) {
        const double lr =
            (p->encoder_group ? config.lr_encoder : config.lr_other) * lr_scale;
        for (size_t k = 0; k < p->w.size(); ++k)
          p->w[k] -= lr * (p->g[k] * inv + config.weight_decay * p->w[k]);
      }
      at = batch_end;
    }
    result.epoch_losses.push_back(epoch_loss / double(usable.size()));

    if (!dev_samples.empty() && !dev_docs.empty()) {
      Checkpoint ckpt;
      ckpt.epoch = epoch;
      ckpt.dev_predictions = predict_documents(model, dev_samples);
      EvalReport report = evaluate(ckpt.dev_predictions, dev_docs);
      ckpt.dev_ebf = report.boundary.ebf;
      ckpt.dev_f1 = report.exact.f1;
      for (const Param* p : model.params()) ckpt.weights.push_back(p->w);
      result.checkpoints.push_back(std::move(ckpt));
    }
  }
  return result;
}

}  // namespace seda
