#pragma once

#include <string>
#include <vector>

#include "seda/metrics.hpp"
#include "seda/model.hpp"
#include "seda/seda.hpp"
#include "seda/synth.hpp"
#include "seda/train.hpp"
#include "seda/types.hpp"

namespace seda {

// The comparison protocol: train on the newline baseline, pick the best
// checkpoint by dev EBF, then augment the training split around the model's
// own predictions and retrain before running the augmentation passes on the
// evaluation split.
struct ExperimentConfig {
  ModelConfig model;
  SedaConfig seda;
  bool retrain_on_augmented = true;
  bool select_by_f1 = false;  // the "w/o EBF" ablation
};

struct ExperimentResult {
  EvalReport baseline;
  EvalReport once;
  EvalReport mul;
  EntitySets baseline_predictions;
  EntitySets once_predictions;
  EntitySets mul_predictions;
  SedaRunResult once_run;                 // samples + coverage of the once pass
  std::map<std::string, std::vector<Sample>> baseline_samples;
  GridModel model;                        // the model used for the SEDA passes
};

ExperimentResult run_experiment(const std::vector<Document>& train_docs,
                                const std::vector<Document>& dev_docs,
                                const std::vector<Document>& test_docs,
                                const ExperimentConfig& config);

std::vector<Sample> newline_samples(const std::vector<Document>& docs);

}  // namespace seda
