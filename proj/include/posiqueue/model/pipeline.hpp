#pragma once

#include <string>
#include <vector>

#include "posiqueue/corpus.hpp"
#include "posiqueue/model/eval.hpp"
#include "posiqueue/model/gbdt.hpp"
#include "posiqueue/model/labels.hpp"
#include "posiqueue/textfeat/features.hpp"

namespace posiqueue::model {

/// Feature names in flattened order, taken from the cached vectors.
inline std::vector<std::string> cache_feature_order(const textfeat::FeatureCache& cache) {
  if (cache.empty()) return {};
  return textfeat::feature_names(cache.begin()->second);
}

struct PipelineResult {
  GBDTModel model;
  EvalReport report;
  std::size_t n_examples = 0;
};

/// labels -> split -> train on the train part -> evaluate on the held-out part.
inline PipelineResult train_and_evaluate(const Corpus& corpus, Kind kind, const textfeat::FeatureCache& features,
                                         const TrainConfig& config) {
  auto examples = build_labels(corpus, kind, features);
  auto split = split_train_test(examples, config);
  PipelineResult r;
  r.n_examples = examples.size();
  r.model = train_gbdt(split.train, config, cache_feature_order(features), kind);
  r.report = evaluate(r.model, split.test);
  return r;
}

/// Recreates a trained model's held-out split from its stored config.
inline std::vector<LabeledExample> held_out_split(const Corpus& corpus, const GBDTModel& model,
                                                  const textfeat::FeatureCache& features) {
  return split_train_test(build_labels(corpus, model.kind, features), model.config).test;
}

}  // namespace posiqueue::model
