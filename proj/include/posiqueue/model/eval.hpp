#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "posiqueue/error.hpp"
#include "posiqueue/model/gbdt.hpp"
#include "posiqueue/model/labels.hpp"

namespace posiqueue::model {

/// Rank-based ROC AUC: P(score_pos > score_neg) + 0.5 * P(tie), using
/// mid-ranks over tied groups.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw Error(ErrorCode::shape_mismatch, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double mid_rank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        pos_rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::undefined_auc, "AUC needs both classes present");
  double u = pos_rank_sum - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  bool operator==(const Confusion&) const = default;
};

struct EvalReport {
  Kind kind = Kind::post;
  double accuracy = 0.0;
  double auc = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  Confusion confusion;
  double threshold = 0.5;
};

/// Scores every test row; a row is predicted desirable when p >= threshold.
inline EvalReport evaluate(const GBDTModel& m, const std::vector<LabeledExample>& test, double threshold = 0.5) {
  if (test.empty()) throw Error(ErrorCode::insufficient_data, "empty test set");
  EvalReport r;
  r.kind = m.kind;
  r.n_train = m.n_train;
  r.n_test = test.size();
  r.threshold = threshold;
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& ex : test) {
    double p = predict_probability(m, ex.features);
    scores.push_back(p);
    labels.push_back(ex.label);
    bool predicted = p >= threshold;
    if (predicted && ex.label) ++r.confusion.tp;
    else if (predicted) ++r.confusion.fp;
    else if (ex.label) ++r.confusion.fn;
    else ++r.confusion.tn;
  }
  r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) / static_cast<double>(r.n_test);
  r.auc = auc(scores, labels);
  return r;
}

inline json to_json(const EvalReport& r) {
  return json{{"kind", std::string(to_token(r.kind))},
              {"accuracy", r.accuracy},
              {"auc", r.auc},
              {"n_train", r.n_train},
              {"n_test", r.n_test},
              {"threshold", r.threshold},
              {"confusion",
               {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}}};
}

/// Markdown table with one row per community: accuracy as a percentage with
/// one decimal, AUC with three decimals, "-" for a missing kind.
inline std::string format_table(const std::string& subreddit, const std::optional<EvalReport>& posts,
                                const std::optional<EvalReport>& comments) {
  auto acc = [](const std::optional<EvalReport>& r) {
    if (!r) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", r->accuracy * 100.0);
    return std::string(buf);
  };
  auto area = [](const std::optional<EvalReport>& r) {
    if (!r) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r->auc);
    return std::string(buf);
  };
  std::string out = "| Subreddit | Posts Acc | Posts AUC | Comments Acc | Comments AUC |\n";
  out += "|---|---|---|---|---|\n";
  out += "| " + (subreddit.empty() ? std::string("-") : subreddit) + " | " + acc(posts) + " | " + area(posts) +
         " | " + acc(comments) + " | " + area(comments) + " |\n";
  return out;
}

}  // namespace posiqueue::model
