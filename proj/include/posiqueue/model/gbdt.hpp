#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/model/labels.hpp"

namespace posiqueue::model {

inline constexpr int kModelFormat = 1;

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight
  std::int64_t support = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary tree stored as a node array; node 0 is the root. Rows with
/// x[feature] < threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const {
    int k = 0;
    while (!nodes[k].is_leaf()) {
      const auto& n = nodes[k];
      k = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[k].value;
  }

  int depth() const {
    if (nodes.empty()) return 0;
    int best = 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [k, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[k].is_leaf()) {
        stack.emplace_back(nodes[k].left, d + 1);
        stack.emplace_back(nodes[k].right, d + 1);
      }
    }
    return best;
  }

  bool operator==(const Tree&) const = default;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

struct GBDTModel {
  std::vector<Tree> trees;
  double base_score = 0.0;
  std::vector<std::string> feature_order;
  Kind kind = Kind::post;
  TrainConfig config;
  std::size_t n_train = 0;
  std::vector<double> loss_trace;  // mean training log-loss after each round; [0] is the prior

  double predict_margin(std::span<const double> x) const {
    if (x.size() != feature_order.size())
      throw Error(ErrorCode::shape_mismatch, "feature vector has " + std::to_string(x.size()) +
                                                 " entries, model expects " +
                                                 std::to_string(feature_order.size()));
    double m = base_score;
    for (const auto& t : trees) m += t.predict(x);
    return m;
  }

  bool operator==(const GBDTModel&) const = default;
};

inline double predict_probability(const GBDTModel& model, std::span<const double> features) {
  return sigmoid(model.predict_margin(features));
}

/// round(100 * p), halves rounding up. The 1e-9 nudge absorbs binary
/// representation error (0.615 * 100 == 61.49999999999999).
inline int score_from_probability(double p) {
  double s = std::floor(100.0 * p + 0.5 + 1e-9);
  return static_cast<int>(std::clamp(s, 0.0, 100.0));
}

inline int desirability_score(const GBDTModel& model, std::span<const double> features) {
  return score_from_probability(predict_probability(model, features));
}

// ---------------------------------------------------------------------------
// Training

namespace detail {

inline double log_loss(const std::vector<double>& margin, const std::vector<int>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    // log(1 + exp(-m)) for y=1, log(1 + exp(m)) for y=0, computed stably
    double m = y[i] ? -margin[i] : margin[i];
    total += m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
  }
  return total / static_cast<double>(y.size());
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct NodeStats {
  double g = 0.0, h = 0.0;
  std::int64_t n = 0;
};

// Exact greedy builder over column-presorted row orders. Grows one level at a
// time; each level scans every feature once across all open nodes.
class TreeBuilder {
 public:
  TreeBuilder(const std::vector<double>& x, std::size_t n_rows, std::size_t n_features,
              const std::vector<std::vector<std::uint32_t>>& sorted, const TrainConfig& cfg)
      : x_(x), n_(n_rows), d_(n_features), sorted_(sorted), cfg_(cfg), sorted_x_(n_features) {
    // Values in each column's sorted order, so the split scan reads memory
    // sequentially instead of striding through the row-major matrix.
    for (std::size_t f = 0; f < d_; ++f) {
      sorted_x_[f].resize(n_);
      for (std::size_t i = 0; i < n_; ++i) sorted_x_[f][i] = x_[static_cast<std::size_t>(sorted_[f][i]) * d_ + f];
    }
  }

  Tree build(const std::vector<double>& grad, const std::vector<double>& hess,
             std::vector<int>& leaf_of_row) {
    Tree tree;
    tree.nodes.push_back(TreeNode{});
    std::vector<int> node_depth{0};
    std::vector<NodeStats> stats(1);
    leaf_of_row.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      stats[0].g += grad[i];
      stats[0].h += hess[i];
    }
    stats[0].n = static_cast<std::int64_t>(n_);

    std::vector<int> open{0};
    for (int depth = 0; depth < cfg_.max_depth && !open.empty(); ++depth) {
      std::vector<int> splittable;
      for (int k : open)
        if (stats[k].n >= 2 * static_cast<std::int64_t>(cfg_.min_leaf)) splittable.push_back(k);
      if (splittable.empty()) break;

      std::vector<SplitCandidate> best(tree.nodes.size());
      std::vector<char> active(tree.nodes.size(), 0);
      for (int k : splittable) active[k] = 1;
      find_splits(grad, hess, leaf_of_row, stats, active, best);

      std::vector<int> next_open;
      std::vector<int> remap(tree.nodes.size(), -1);
      for (int k : splittable) {
        if (best[k].feature < 0 || best[k].gain <= kMinGain) continue;
        int l = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        tree.nodes[k].feature = best[k].feature;
        tree.nodes[k].threshold = best[k].threshold;
        tree.nodes[k].left = l;
        tree.nodes[k].right = l + 1;
        node_depth.push_back(depth + 1);
        node_depth.push_back(depth + 1);
        stats.resize(tree.nodes.size());
        remap[k] = l;
        next_open.push_back(l);
        next_open.push_back(l + 1);
      }
      if (next_open.empty()) break;
      for (std::size_t i = 0; i < n_; ++i) {
        int k = leaf_of_row[i];
        if (k < static_cast<int>(remap.size()) && remap[k] >= 0) {
          const auto& node = tree.nodes[k];
          int child = x_[i * d_ + static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
          leaf_of_row[i] = child;
          stats[child].g += grad[i];
          stats[child].h += hess[i];
          stats[child].n += 1;
        }
      }
      open = std::move(next_open);
    }

    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      auto& node = tree.nodes[k];
      node.support = stats[k].n;
      if (node.is_leaf()) node.value = -stats[k].g / (stats[k].h + cfg_.lambda) * cfg_.learning_rate;
    }
    return tree;
  }

 private:
  static constexpr double kMinGain = 1e-12;

  void find_splits(const std::vector<double>& grad, const std::vector<double>& hess,
                   const std::vector<int>& leaf_of_row, const std::vector<NodeStats>& totals,
                   const std::vector<char>& active, std::vector<SplitCandidate>& best) const {
    const double lambda = cfg_.lambda;
    const auto min_leaf = static_cast<std::int64_t>(cfg_.min_leaf);
    struct Scan {
      NodeStats left;
      double last_x = 0.0;
    };
    std::vector<Scan> scan(active.size());
    auto score = [lambda](double g, double h) { return g * g / (h + lambda); };

    for (std::size_t f = 0; f < d_; ++f) {
      for (std::size_t k = 0; k < scan.size(); ++k) scan[k] = Scan{};
      const auto& rows = sorted_[f];
      const auto& vals = sorted_x_[f];
      for (std::size_t i = 0; i < n_; ++i) {
        std::uint32_t row = rows[i];
        int k = leaf_of_row[row];
        if (!active[k]) continue;
        double xv = vals[i];
        auto& s = scan[k];
        const auto& t = totals[k];
        if (s.left.n >= min_leaf && t.n - s.left.n >= min_leaf && xv > s.last_x) {
          double gl = s.left.g, hl = s.left.h;
          double gain = 0.5 * (score(gl, hl) + score(t.g - gl, t.h - hl) - score(t.g, t.h));
          if (gain > best[k].gain) {
            double thr = s.last_x + (xv - s.last_x) / 2.0;
            if (!(thr > s.last_x) || thr > xv) thr = xv;
            best[k] = SplitCandidate{gain, static_cast<int>(f), thr};
          }
        }
        s.left.g += grad[row];
        s.left.h += hess[row];
        s.left.n += 1;
        s.last_x = xv;
      }
    }
  }

  const std::vector<double>& x_;
  std::size_t n_, d_;
  const std::vector<std::vector<std::uint32_t>>& sorted_;
  const TrainConfig& cfg_;
  std::vector<std::vector<double>> sorted_x_;
};

}  // namespace detail

/// Gradient-boosted trees on binary log-loss with second-order leaf weights.
/// A round whose tree would raise the training loss is shrunk by halving its
/// leaf weights until it does not, so the loss trace never increases.
inline GBDTModel train_gbdt(const std::vector<LabeledExample>& train, const TrainConfig& config,
                            std::vector<std::string> feature_order = {}, Kind kind = Kind::post) {
  config.validate();
  if (train.empty()) throw Error(ErrorCode::degenerate_training, "no training rows");
  const std::size_t n = train.size();
  const std::size_t d = train.front().features.size();
  for (const auto& ex : train)
    if (ex.features.size() != d) throw Error(ErrorCode::shape_mismatch, "ragged feature vectors in training set");
  if (feature_order.empty()) {
    for (std::size_t f = 0; f < d; ++f) feature_order.push_back("f" + std::to_string(f));
  } else if (feature_order.size() != d) {
    throw Error(ErrorCode::shape_mismatch, "feature_order length does not match feature vectors");
  }

  std::vector<int> y(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = train[i].label ? 1 : 0;
    positives += static_cast<std::size_t>(y[i]);
  }
  if (positives == 0 || positives == n)
    throw Error(ErrorCode::degenerate_training, "training set contains a single class");

  GBDTModel model;
  model.kind = kind;
  model.config = config;
  model.feature_order = std::move(feature_order);
  model.n_train = n;
  const double prior = static_cast<double>(positives) / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i) std::copy(train[i].features.begin(), train[i].features.end(), x.begin() + static_cast<std::ptrdiff_t>(i * d));

  std::vector<std::vector<std::uint32_t>> sorted(d, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    auto& ord = sorted[f];
    std::iota(ord.begin(), ord.end(), 0u);
    std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
      return x[a * d + f] < x[b * d + f];
    });
  }

  std::vector<double> margin(n, model.base_score);
  double loss = detail::log_loss(margin, y);
  model.loss_trace.push_back(loss);

  detail::TreeBuilder builder(x, n, d, sorted, config);
  std::vector<double> grad(n), hess(n), trial(n);
  std::vector<int> leaf_of_row;
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margin[i]);
      grad[i] = p - y[i];
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    Tree tree = builder.build(grad, hess, leaf_of_row);

    double trial_loss = loss;
    for (int attempt = 0; attempt < 30; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = margin[i] + tree.nodes[leaf_of_row[i]].value;
      trial_loss = detail::log_loss(trial, y);
      if (trial_loss <= loss) break;
      for (auto& node : tree.nodes)
        if (node.is_leaf()) node.value *= 0.5;
    }
    if (trial_loss > loss) {
      for (auto& node : tree.nodes)
        if (node.is_leaf()) node.value = 0.0;
      trial_loss = loss;
      trial = margin;
    }
    margin.swap(trial);
    loss = trial_loss;
    model.loss_trace.push_back(loss);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Model file

inline json train_config_to_json(const TrainConfig& c) {
  return json{{"max_depth", c.max_depth}, {"rounds", c.rounds},       {"learning_rate", c.learning_rate},
              {"min_leaf", c.min_leaf},   {"split_ratio", c.split_ratio}, {"seed", c.seed},
              {"stratified", c.stratified}, {"lambda", c.lambda}};
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.max_depth = j.value("max_depth", c.max_depth);
  c.rounds = j.value("rounds", c.rounds);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.min_leaf = j.value("min_leaf", c.min_leaf);
  c.split_ratio = j.value("split_ratio", c.split_ratio);
  c.seed = j.value("seed", c.seed);
  c.stratified = j.value("stratified", c.stratified);
  c.lambda = j.value("lambda", c.lambda);
  return c;
}

inline json to_json(const GBDTModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         value = json::array(), support = json::array();
    for (const auto& node : t.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
      support.push_back(node.support);
    }
    trees.push_back(json{{"feature", feature}, {"threshold", threshold}, {"left", left},
                         {"right", right},     {"value", value},         {"support", support}});
  }
  return json{{"format", kModelFormat},
              {"kind", std::string(to_token(m.kind))},
              {"feature_order", m.feature_order},
              {"config", train_config_to_json(m.config)},
              {"base_score", m.base_score},
              {"n_train", m.n_train},
              {"loss_trace", m.loss_trace},
              {"trees", trees}};
}

inline GBDTModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<int>() != kModelFormat)
      throw Error(ErrorCode::parse_error, "unsupported model format " + j.at("format").dump());
    GBDTModel m;
    auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::parse_error, "model kind must be post or comment");
    m.kind = *kind;
    m.feature_order = j.at("feature_order").get<std::vector<std::string>>();
    m.config = train_config_from_json(j.at("config"));
    m.base_score = j.at("base_score").get<double>();
    m.n_train = j.value("n_train", std::size_t{0});
    m.loss_trace = j.value("loss_trace", std::vector<double>{});
    const auto d = static_cast<int>(m.feature_order.size());
    for (const auto& jt : j.at("trees")) {
      auto feature = jt.at("feature").get<std::vector<int>>();
      auto threshold = jt.at("threshold").get<std::vector<double>>();
      auto left = jt.at("left").get<std::vector<int>>();
      auto right = jt.at("right").get<std::vector<int>>();
      auto value = jt.at("value").get<std::vector<double>>();
      auto support = jt.value("support", std::vector<std::int64_t>(feature.size(), 0));
      const auto size = feature.size();
      if (threshold.size() != size || left.size() != size || right.size() != size || value.size() != size ||
          support.size() != size || size == 0)
        throw Error(ErrorCode::parse_error, "tree arrays have inconsistent lengths");
      Tree t;
      for (std::size_t k = 0; k < size; ++k) {
        TreeNode node{feature[k], threshold[k], left[k], right[k], value[k], support[k]};
        if (!node.is_leaf()) {
          auto in_range = [&](int c) { return c > static_cast<int>(k) && c < static_cast<int>(size); };
          if (node.feature >= d || !in_range(node.left) || !in_range(node.right))
            throw Error(ErrorCode::parse_error, "tree node " + std::to_string(k) + " is malformed");
        }
        t.nodes.push_back(node);
      }
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("model file: ") + e.what());
  }
}

inline void save_model(const GBDTModel& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << to_json(m).dump() << '\n';
}

inline GBDTModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, "model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace posiqueue::model
