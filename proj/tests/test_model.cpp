#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "posiqueue/model/eval.hpp"
#include "posiqueue/model/gbdt.hpp"
#include "posiqueue/model/labels.hpp"
#include "posiqueue/model/pipeline.hpp"
#include "support.hpp"

using namespace posiqueue;
using namespace posiqueue::model;
using namespace testsupport;

namespace {

std::vector<ScoredItem> items(const std::vector<std::int64_t>& scores) {
  std::vector<ScoredItem> out;
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({"i" + std::to_string(i), scores[i]});
  return out;
}

std::vector<LabeledExample> examples(std::size_t n, std::size_t positives) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"e" + std::to_string(i), {static_cast<double>(i)}, i < positives ? 1 : 0});
  return out;
}

// Random dataset: d features, labels from a noisy threshold on two of them.
std::vector<LabeledExample> random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> z;
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledExample ex{"r" + std::to_string(i), {}, 0};
    for (std::size_t f = 0; f < d; ++f) ex.features.push_back(f % 3 == 2 ? std::round(z(rng)) : z(rng));
    ex.label = ex.features[0] + 0.5 * ex.features[1 % d] + z(rng) > 0 ? 1 : 0;
    out.push_back(std::move(ex));
  }
  out[0].label = 1;
  out[1].label = 0;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Labels

TEST(Labels, EightDistinctScores) {
  auto l = quartile_labels(items({10, 20, 30, 40, 50, 60, 70, 80}));
  EXPECT_EQ(l, (std::map<std::string, int>{{"i0", 0}, {"i1", 0}, {"i2", 0}, {"i3", 0}, {"i6", 1}, {"i7", 1}}));
}

TEST(Labels, AllTiesUseIdOrder) {
  auto l = quartile_labels(items({5, 5, 5, 5, 5, 5, 5, 5}));
  EXPECT_EQ(l, (std::map<std::string, int>{{"i0", 0}, {"i1", 0}, {"i2", 0}, {"i3", 0}, {"i6", 1}, {"i7", 1}}));
}

TEST(Labels, FourItems) {
  auto l = quartile_labels(items({4, 1, 3, 2}));
  EXPECT_EQ(l, (std::map<std::string, int>{{"i1", 0}, {"i3", 0}, {"i0", 1}}));
  EXPECT_EQ(error_code([] { quartile_labels(items({1, 2, 3})); }), ErrorCode::insufficient_data);
}

TEST(Labels, MatchOracleOnRandomCorpora) {
  oracle::Rng rng(2024);
  for (std::size_t i = 0; i < 200; ++i) {
    auto lc = oracle::random_label_case(rng, i);
    std::string why;
    EXPECT_TRUE(oracle::labels_match(lc, Kind::post, &why)) << "case " << i << ": " << why;
    EXPECT_TRUE(oracle::labels_match(lc, Kind::comment, &why)) << "case " << i << ": " << why;
  }
}

TEST(Labels, MissingFeaturesIsNotFound) {
  auto c = small_corpus();
  textfeat::FeatureCache none;
  auto more = c.with_additions({}, {post("p3", "a1", 800000), post("p4", "a1", 800000)});
  EXPECT_EQ(error_code([&] { build_labels(more, Kind::post, none); }), ErrorCode::not_found);
}

// ---------------------------------------------------------------------------
// Split

TEST(Split, SizesAndDeterminism) {
  TrainConfig cfg;
  cfg.seed = 3;
  auto ex = examples(100, 50);
  auto a = split_train_test(ex, cfg);
  EXPECT_EQ(a.train.size(), 80u);
  EXPECT_EQ(a.test.size(), 20u);
  auto b = split_train_test(ex, cfg);
  EXPECT_EQ(a.train, b.train);
  std::size_t test_pos = 0;
  for (const auto& e : a.test) test_pos += static_cast<std::size_t>(e.label);
  EXPECT_NEAR(static_cast<double>(test_pos), 10.0, 1.0);
  cfg.seed = 4;
  EXPECT_NE(split_train_test(ex, cfg).train, a.train);
}

TEST(Split, UnstratifiedKeepsTotal) {
  TrainConfig cfg;
  cfg.stratified = false;
  cfg.split_ratio = 0.7;
  auto s = split_train_test(examples(33, 3), cfg);
  EXPECT_EQ(s.train.size(), 23u);
  EXPECT_EQ(s.test.size(), 10u);
}

TEST(Split, Errors) {
  TrainConfig cfg;
  EXPECT_EQ(error_code([&] { split_train_test(examples(4, 2), cfg); }), ErrorCode::insufficient_data);
  EXPECT_EQ(error_code([&] { split_train_test(examples(10, 1), cfg); }), ErrorCode::stratification);
  cfg.split_ratio = 1.0;
  EXPECT_EQ(error_code([&] { split_train_test(examples(10, 5), cfg); }), ErrorCode::invalid_argument);
}

// ---------------------------------------------------------------------------
// Training

TEST(Gbdt, SeparableToyReachesPerfectTrainingAccuracy) {
  std::vector<LabeledExample> train;
  for (int i = 0; i < 40; ++i) train.push_back({"t" + std::to_string(i), {static_cast<double>(i), 7.0}, i >= 20});
  TrainConfig cfg;
  cfg.rounds = 50;
  cfg.min_leaf = 2;
  auto m = train_gbdt(train, cfg);
  for (const auto& ex : train) EXPECT_EQ(predict_probability(m, ex.features) >= 0.5, ex.label == 1);
  EXPECT_EQ(m.trees.front().nodes.front().feature, 0);
  EXPECT_DOUBLE_EQ(m.trees.front().nodes.front().threshold, 19.5);
}

TEST(Gbdt, ZeroRoundsPredictsPrior) {
  TrainConfig cfg;
  cfg.rounds = 0;
  auto m = train_gbdt(examples(10, 5), cfg);
  EXPECT_DOUBLE_EQ(predict_probability(m, std::vector<double>{3.0}), 0.5);
  auto m2 = train_gbdt(examples(10, 2), cfg);
  EXPECT_NEAR(predict_probability(m2, std::vector<double>{0.0}), 0.2, 1e-12);
}

TEST(Gbdt, DegenerateAndShapeErrors) {
  TrainConfig cfg;
  EXPECT_EQ(error_code([&] { train_gbdt(examples(10, 0), cfg); }), ErrorCode::degenerate_training);
  EXPECT_EQ(error_code([&] { train_gbdt({}, cfg); }), ErrorCode::degenerate_training);
  auto ragged = examples(10, 5);
  ragged[3].features.push_back(1.0);
  EXPECT_EQ(error_code([&] { train_gbdt(ragged, cfg); }), ErrorCode::shape_mismatch);
  cfg.rounds = 1;
  auto m = train_gbdt(examples(10, 5), cfg);
  EXPECT_EQ(error_code([&] { predict_probability(m, std::vector<double>{1.0, 2.0}); }), ErrorCode::shape_mismatch);
  cfg.max_depth = 0;
  EXPECT_EQ(error_code([&] { train_gbdt(examples(10, 5), cfg); }), ErrorCode::invalid_argument);
}

TEST(Gbdt, HandBuiltStump) {
  GBDTModel m;
  m.feature_order = {"x"};
  Tree t;
  t.nodes = {TreeNode{0, 0.5, 1, 2, 0.0, 0}, TreeNode{-1, 0, -1, -1, -1.0, 0}, TreeNode{-1, 0, -1, -1, 1.0, 0}};
  m.trees.push_back(t);
  EXPECT_NEAR(predict_probability(m, std::vector<double>{0.0}), 0.2689414213699951, 1e-12);
  EXPECT_NEAR(predict_probability(m, std::vector<double>{0.5}), 0.7310585786300049, 1e-12);
}

TEST(Gbdt, StructureLossAndRoundTripOnRandomData) {
  std::mt19937_64 rng(17);
  TempDir dir;
  for (int trial = 0; trial < 20; ++trial) {
    TrainConfig cfg;
    cfg.rounds = 30;
    cfg.max_depth = 1 + trial % 6;
    cfg.min_leaf = 1 + trial % 7;
    cfg.learning_rate = trial % 2 ? 0.3 : 1.0;
    auto data = random_dataset(rng, 60 + 10 * static_cast<std::size_t>(trial), 1 + trial % 5);
    auto m = train_gbdt(data, cfg);
    ASSERT_EQ(m.loss_trace.size(), 31u);
    for (std::size_t r = 1; r < m.loss_trace.size(); ++r) EXPECT_LE(m.loss_trace[r], m.loss_trace[r - 1]);
    for (const auto& tree : m.trees) {
      EXPECT_LE(tree.depth(), cfg.max_depth);
      for (const auto& node : tree.nodes) {
        if (node.is_leaf() && tree.nodes.size() > 1) {
          EXPECT_GE(node.support, cfg.min_leaf);
        }
      }
    }
    save_model(m, dir / "m.json");
    auto back = load_model(dir / "m.json");
    EXPECT_EQ(back.trees.size(), m.trees.size());
    std::normal_distribution<double> z;
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x;
      for (std::size_t f = 0; f < m.feature_order.size(); ++f) x.push_back(z(rng));
      EXPECT_EQ(predict_probability(back, x), predict_probability(m, x));
    }
  }
}

TEST(Gbdt, DesirabilityRounding) {
  EXPECT_EQ(score_from_probability(0.14), 14);
  EXPECT_EQ(score_from_probability(0.5), 50);
  EXPECT_EQ(score_from_probability(0.615), 62);
  EXPECT_EQ(score_from_probability(0.0), 0);
  EXPECT_EQ(score_from_probability(1.0), 100);
  EXPECT_EQ(score_from_probability(0.004999), 0);
}

TEST(ModelFile, RejectsMalformedDocuments) {
  TempDir dir;
  TrainConfig cfg;
  cfg.rounds = 2;
  cfg.min_leaf = 1;
  auto j = to_json(train_gbdt(examples(10, 5), cfg));
  auto bad = [&](json doc) { return error_code([&] { model_from_json(doc); }); };
  auto v = j;
  v["format"] = 99;
  EXPECT_EQ(bad(v), ErrorCode::parse_error);
  v = j;
  v["kind"] = "thread";
  EXPECT_EQ(bad(v), ErrorCode::parse_error);
  v = j;
  v["trees"][0]["left"][0] = 0;
  EXPECT_EQ(bad(v), ErrorCode::parse_error);
  v = j;
  v.erase("base_score");
  EXPECT_EQ(bad(v), ErrorCode::parse_error);
  spit(dir / "x.json", "{nope");
  EXPECT_EQ(error_code([&] { load_model(dir / "x.json"); }), ErrorCode::parse_error);
  EXPECT_EQ(error_code([&] { load_model(dir / "missing.json"); }), ErrorCode::io_error);
}

// ---------------------------------------------------------------------------
// Evaluation

TEST(Auc, ClosedForms) {
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1}), 0.5);
  EXPECT_EQ(error_code([] { auc(std::vector<double>{0.3, 0.4}, std::vector<int>{1, 1}); }), ErrorCode::undefined_auc);
}

TEST(Auc, MatchesPairwiseOracle) {
  oracle::Rng rng(8);
  std::vector<double> s;
  std::vector<int> l;
  for (std::size_t i = 0; i < 300; ++i) {
    oracle::random_auc_instance(rng, i, s, l);
    EXPECT_NEAR(auc(s, l), oracle::pairwise_auc(s, l), 1e-9);
  }
}

TEST(Auc, RandomScoresNearHalf) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(10000);
  std::vector<int> l(10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    l[i] = i % 2 ? 1 : 0;
  }
  EXPECT_NEAR(auc(s, l), 0.5, 0.02);
}

TEST(Evaluate, ConfusionAndTable) {
  GBDTModel m;
  m.feature_order = {"x"};
  Tree t;
  t.nodes = {TreeNode{0, 0.5, 1, 2, 0.0, 0}, TreeNode{-1, 0, -1, -1, -3.0, 0}, TreeNode{-1, 0, -1, -1, 3.0, 0}};
  m.trees.push_back(t);
  std::vector<LabeledExample> test = {{"a", {0.0}, 0}, {"b", {1.0}, 1}, {"c", {1.0}, 0}, {"d", {0.0}, 0}};
  auto r = evaluate(m, test);
  EXPECT_EQ(r.confusion, (Confusion{1, 1, 2, 0}));
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.confusion.tp + r.confusion.fp + r.confusion.tn + r.confusion.fn, r.n_test);
  EXPECT_EQ(error_code([&] { evaluate(m, {}); }), ErrorCode::insufficient_data);
  auto table = format_table("science", r, std::nullopt);
  EXPECT_EQ(table,
            "| Subreddit | Posts Acc | Posts AUC | Comments Acc | Comments AUC |\n"
            "|---|---|---|---|---|\n"
            "| science | 75.0% | 0.833 | - | - |\n");
  auto j = to_json(r);
  EXPECT_EQ(j["confusion"]["tp"], 1);
  EXPECT_EQ(j["kind"], "post");
}

TEST(Pipeline, HeldOutSplitIsReproducible) {
  oracle::Rng rng(4);
  auto lc = oracle::random_label_case(rng, 1, 50);
  while (lc.corpus.post_count() < 40) lc = oracle::random_label_case(rng, 1, 50);
  TrainConfig cfg;
  cfg.rounds = 5;
  cfg.min_leaf = 1;
  cfg.seed = 12;
  auto r = train_and_evaluate(lc.corpus, Kind::post, lc.features, cfg);
  auto test = held_out_split(lc.corpus, r.model, lc.features);
  EXPECT_EQ(test.size(), r.report.n_test);
  EXPECT_EQ(evaluate(r.model, test).auc, r.report.auc);
  EXPECT_EQ(r.model.feature_order, cache_feature_order(lc.features));
}
