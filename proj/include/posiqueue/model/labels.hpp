#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/textfeat/features.hpp"

namespace posiqueue::model {

struct LabeledExample {
  std::string contribution_id;
  std::vector<double> features;
  int label = 0;  // 1 = desirable (top quartile), 0 = undesirable (bottom half)

  bool operator==(const LabeledExample&) const = default;
};

struct ScoredItem {
  std::string id;
  std::int64_t score = 0;
};

/// Quartile labels by rank (score ascending, ties by id ascending). Item at
/// rank r of n falls in quartile k when floor(k*n/4) <= r < floor((k+1)*n/4):
/// quartile 3 -> 1, quartiles 0 and 1 -> 0, quartile 2 omitted.
inline std::map<std::string, int> quartile_labels(std::vector<ScoredItem> items) {
  if (items.size() < 4)
    throw Error(ErrorCode::insufficient_data,
                "need at least 4 items to form quartiles, got " + std::to_string(items.size()));
  std::sort(items.begin(), items.end(), [](const ScoredItem& a, const ScoredItem& b) {
    return a.score != b.score ? a.score < b.score : a.id < b.id;
  });
  const std::size_t n = items.size();
  const std::size_t half = (2 * n) / 4;
  const std::size_t top = (3 * n) / 4;
  std::map<std::string, int> labels;
  for (std::size_t r = 0; r < n; ++r) {
    if (r < half) labels[items[r].id] = 0;
    else if (r >= top) labels[items[r].id] = 1;
  }
  return labels;
}

inline std::vector<ScoredItem> scored_items(const Corpus& corpus, Kind kind) {
  std::vector<ScoredItem> items;
  for (const auto* c : corpus.of_kind(kind)) items.push_back({c->id, c->score});
  return items;
}

/// Labeled, flattened examples in contribution-id order.
inline std::vector<LabeledExample> build_labels(const Corpus& corpus, Kind kind,
                                                const textfeat::FeatureCache& features) {
  auto labels = quartile_labels(scored_items(corpus, kind));
  std::vector<LabeledExample> out;
  out.reserve(labels.size());
  for (const auto& [id, label] : labels) {
    auto it = features.find(id);
    if (it == features.end()) throw Error(ErrorCode::not_found, "no features cached for " + id);
    out.push_back(LabeledExample{id, textfeat::flatten(it->second), label});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Train/test split

struct TrainConfig {
  int max_depth = 6;
  int rounds = 200;
  double learning_rate = 0.1;
  int min_leaf = 10;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
  double lambda = 1.0;

  void validate() const {
    if (max_depth < 1) throw Error(ErrorCode::invalid_argument, "max_depth must be >= 1");
    if (rounds < 0) throw Error(ErrorCode::invalid_argument, "rounds must be >= 0");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw Error(ErrorCode::invalid_argument, "learning_rate must be in (0, 1]");
    if (min_leaf < 1) throw Error(ErrorCode::invalid_argument, "min_leaf must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
      throw Error(ErrorCode::invalid_argument, "split_ratio must be in (0, 1)");
    if (lambda < 0.0) throw Error(ErrorCode::invalid_argument, "lambda must be >= 0");
  }
};

namespace detail {

// Portable Fisher-Yates: std::shuffle and std::uniform_int_distribution are
// not specified bit-for-bit across standard libraries.
template <typename T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    std::swap(v[i - 1], v[static_cast<std::size_t>(r % bound)]);
  }
}

}  // namespace detail

struct Split {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
};

/// Seeded shuffle; |train| = round(split_ratio * n). With stratification each
/// class contributes round(split_ratio * n_class) rows to train, adjusted so the
/// total stays exact.
inline Split split_train_test(const std::vector<LabeledExample>& examples, const TrainConfig& config) {
  config.validate();
  const std::size_t n = examples.size();
  if (n < 5) throw Error(ErrorCode::insufficient_data, "need at least 5 examples to split");
  const auto n_train = static_cast<std::size_t>(std::llround(config.split_ratio * static_cast<double>(n)));
  std::mt19937_64 rng(config.seed);

  std::vector<bool> in_train(n, false);
  if (config.stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (examples[i].label ? pos : neg).push_back(i);
    detail::portable_shuffle(pos, rng);
    detail::portable_shuffle(neg, rng);
    auto pos_train = static_cast<std::size_t>(std::llround(config.split_ratio * static_cast<double>(pos.size())));
    pos_train = std::min(pos_train, n_train);
    std::size_t neg_train = n_train - pos_train;
    if (neg_train > neg.size()) {
      pos_train += neg_train - neg.size();
      neg_train = neg.size();
    }
    if (pos_train == 0 || neg_train == 0 || pos_train == pos.size() || neg_train == neg.size())
      throw Error(ErrorCode::stratification,
                  "stratified split leaves a class empty (positives=" + std::to_string(pos.size()) +
                      ", negatives=" + std::to_string(neg.size()) + ")");
    for (std::size_t k = 0; k < pos_train; ++k) in_train[pos[k]] = true;
    for (std::size_t k = 0; k < neg_train; ++k) in_train[neg[k]] = true;
  } else {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    detail::portable_shuffle(idx, rng);
    for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = true;
  }

  Split s;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? s.train : s.test).push_back(examples[i]);
  return s;
}

}  // namespace posiqueue::model
