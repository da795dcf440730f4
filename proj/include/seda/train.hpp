#pragma once

#include <string>
#include <vector>

#include "seda/metrics.hpp"
#include "seda/model.hpp"
#include "seda/types.hpp"

namespace seda {

struct Checkpoint {
  int epoch = 0;
  double dev_ebf = 0.0;
  double dev_f1 = 0.0;
  EntitySets dev_predictions;               // document coordinates
  std::vector<std::vector<double>> weights; // snapshot, registry order
};

void restore(GridModel& model, const Checkpoint& checkpoint);

struct TrainResult {
  GridModel model;                   // state after the last epoch
  std::vector<Checkpoint> checkpoints;
  std::vector<double> epoch_losses;
};

// Builds the vocabulary and tag scheme from the training samples, then runs
// plain SGD with the two-group learning-rate scheme, per-epoch shuffling,
// optional warmup and weight decay. With dev samples given, every epoch ends
// with dev predictions, dev EBF and dev exact F1 recorded in a checkpoint.
// A NaN loss aborts with TrainDivergedError.
TrainResult train(const std::vector<Sample>& train_samples, const ModelConfig& config,
                  const std::vector<Sample>& dev_samples = {},
                  const std::vector<Document>& dev_docs = {});

// Predicts every sample, decodes, and maps entities back to document
// coordinates, deduplicating per document. Samples whose decode exceeds the
// path cap contribute nothing; the count lands in *skipped_degenerate.
EntitySets predict_documents(const GridModel& model, const std::vector<Sample>& samples,
                             long* skipped_degenerate = nullptr);

// Convenience: entity labels present in sample gold, sorted and deduplicated.
std::vector<std::string> collect_labels(const std::vector<Sample>& samples);

}  // namespace seda
