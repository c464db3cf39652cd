#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "posiqueue/actions/engine.hpp"
#include "posiqueue/corpus.hpp"
#include "posiqueue/model/gbdt.hpp"
#include "posiqueue/queue/percentile.hpp"
#include "posiqueue/queue/queue.hpp"
#include "posiqueue/textfeat/features.hpp"
#include "posiqueue/textfeat/lexicon.hpp"

namespace posiqueue::service {

/// Scores contributions with the per-kind models, memoising by id.
class Scorer {
 public:
  Scorer(model::GBDTModel post_model, model::GBDTModel comment_model, textfeat::LexiconSet lexicons,
         textfeat::FeatureCache precomputed = {})
      : post_(std::move(post_model)),
        comment_(std::move(comment_model)),
        lex_(std::move(lexicons)),
        precomputed_(std::move(precomputed)) {
    if (post_.kind != Kind::post || comment_.kind != Kind::comment)
      throw Error(ErrorCode::invalid_argument, "models must be trained for posts and comments respectively");
    config_.embedding_dim = embedding_dim(post_);
    if (embedding_dim(comment_) != config_.embedding_dim)
      throw Error(ErrorCode::shape_mismatch, "post and comment models disagree on embedding size");
    config_.validate();
  }

  int score(const Contribution& c) {
    if (auto it = memo_.find(c.id); it != memo_.end()) return it->second;
    auto pre = precomputed_.find(c.id);
    auto fv = pre != precomputed_.end() ? pre->second : textfeat::extract_features(c, lex_, config_);
    auto x = textfeat::flatten(fv);
    int s = model::desirability_score(c.is_post() ? post_ : comment_, x);
    memo_.emplace(c.id, s);
    return s;
  }

  /// Desirability of every contribution; repeat calls only score new ids.
  queue::DesirabilityMap score_all(const Corpus& corpus) {
    queue::DesirabilityMap out;
    out.reserve(corpus.contributions().size());
    for (const auto& c : corpus.contributions()) out.emplace(c.id, score(c));
    return out;
  }

  const textfeat::LexiconSet& lexicons() const { return lex_; }
  const textfeat::FeatureConfig& feature_config() const { return config_; }

 private:
  static std::size_t embedding_dim(const model::GBDTModel& m) {
    std::size_t n = 0;
    for (const auto& name : m.feature_order)
      if (name.rfind("emb:", 0) == 0) ++n;
    return n;
  }

  model::GBDTModel post_, comment_;
  textfeat::LexiconSet lex_;
  textfeat::FeatureCache precomputed_;
  textfeat::FeatureConfig config_;
  std::map<std::string, int> memo_;
};

/// Immutable read model served to request handlers. Rebuilt after every
/// mutation and swapped in whole.
struct Snapshot {
  Corpus corpus;
  actions::DerivedState state;
  queue::DesirabilityMap desirability;
  queue::ScoreDeltaMap score_delta;
  queue::CuePool post_pool, comment_pool;
  queue::MetricTable metrics;
  queue::FilterMeta filter_meta;
  double newcomer_threshold_days = queue::kDefaultNewcomerDays;

  const queue::CuePool& pool_for(Kind k) const { return k == Kind::post ? post_pool : comment_pool; }

  int desirability_of(const Contribution& c) const { return queue::desirability_of(desirability, c.id); }

  queue::CueCategory cue_of(const Contribution& c) const { return pool_for(c.kind).category(desirability_of(c)); }

  std::int64_t score_of(const Contribution& c) const { return queue::effective_score(c, score_delta); }

  std::optional<std::string> flair_of(const Contribution& c) const {
    auto it = state.flairs.find(c.id);
    return it != state.flairs.end() ? std::optional<std::string>(it->second) : c.flair;
  }
};

inline std::shared_ptr<const Snapshot> build_snapshot(const actions::ActionEngine& engine, Scorer& scorer,
                                                      double newcomer_threshold_days) {
  auto s = std::make_shared<Snapshot>();
  s->corpus = engine.corpus();
  s->state = engine.state();
  s->newcomer_threshold_days = newcomer_threshold_days;
  s->desirability = scorer.score_all(s->corpus);
  for (const auto& [id, d] : s->state.score_delta) s->score_delta.emplace(id, d);
  std::vector<double> posts, comments;
  for (const auto& c : s->corpus.contributions())
    (c.is_post() ? posts : comments).push_back(queue::desirability_of(s->desirability, c.id));
  s->post_pool = queue::CuePool(posts);
  s->comment_pool = queue::CuePool(comments);
  s->metrics = queue::build_metric_table(s->corpus, s->desirability, newcomer_threshold_days, s->score_delta);
  s->filter_meta = queue::slider_maxima(s->metrics);
  return s;
}

}  // namespace posiqueue::service
