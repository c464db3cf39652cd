#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/jsonl.hpp"
#include "posiqueue/queue/percentile.hpp"

namespace posiqueue::queue {

inline constexpr double kDefaultNewcomerDays = 30.0;

using DesirabilityMap = std::unordered_map<std::string, int>;
using ScoreDeltaMap = std::unordered_map<std::string, std::int64_t>;

inline std::int64_t effective_score(const Contribution& c, const ScoreDeltaMap& delta) {
  auto it = delta.find(c.id);
  return c.score + (it == delta.end() ? 0 : it->second);
}

inline int desirability_of(const DesirabilityMap& d, const std::string& id) {
  auto it = d.find(id);
  return it == d.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Aggregates

struct PostAggregates {
  double avg_comment_desirability = 0.0;
  double avg_comment_score = 0.0;
  std::int64_t newcomer_commenters = 0;

  bool operator==(const PostAggregates&) const = default;
};

/// Averages over the post's comment section. A commenter is a newcomer when
/// any of their comments there was written less than `newcomer_threshold_days`
/// after their account was created.
inline PostAggregates compute_post_aggregates(const Corpus& corpus, std::string_view post_id,
                                              const DesirabilityMap& desirability,
                                              double newcomer_threshold_days = kDefaultNewcomerDays,
                                              const ScoreDeltaMap& score_delta = {}) {
  auto section = comment_section(corpus, post_id);
  PostAggregates agg;
  if (section.empty()) return agg;
  double d_sum = 0.0, s_sum = 0.0;
  std::set<std::string> newcomers;
  const double threshold_s = newcomer_threshold_days * static_cast<double>(kSecondsPerDay);
  for (const auto* c : section) {
    d_sum += desirability_of(desirability, c->id);
    s_sum += static_cast<double>(effective_score(*c, score_delta));
    const auto& author = corpus.author_of(*c);
    if (static_cast<double>(c->created_utc - author.created_utc) < threshold_s) newcomers.insert(author.id);
  }
  const auto n = static_cast<double>(section.size());
  agg.avg_comment_desirability = d_sum / n;
  agg.avg_comment_score = s_sum / n;
  agg.newcomer_commenters = static_cast<std::int64_t>(newcomers.size());
  return agg;
}

// ---------------------------------------------------------------------------
// Metric table

enum class Metric {
  desirability,
  score,
  author_karma,
  author_age_days,
  avg_comment_desirability,
  avg_comment_score,
  newcomer_commenters,
};

inline constexpr std::array kAllMetrics = {Metric::desirability,      Metric::score,
                                           Metric::author_karma,      Metric::author_age_days,
                                           Metric::avg_comment_desirability, Metric::avg_comment_score,
                                           Metric::newcomer_commenters};

inline constexpr std::string_view to_token(Metric m) {
  switch (m) {
    case Metric::desirability: return "desirability";
    case Metric::score: return "score";
    case Metric::author_karma: return "author_karma";
    case Metric::author_age_days: return "author_age_days";
    case Metric::avg_comment_desirability: return "avg_comment_desirability";
    case Metric::avg_comment_score: return "avg_comment_score";
    case Metric::newcomer_commenters: return "newcomer_commenters";
  }
  return "";
}

/// Query/filter token: "min_" + metric token.
inline std::string filter_token(Metric m) { return "min_" + std::string(to_token(m)); }

inline constexpr double step_of(Metric m) { return m == Metric::author_age_days ? 0.1 : 1.0; }

struct PostMetrics {
  std::string id;
  std::int64_t created_utc = 0;
  std::int64_t num_reports = 0;
  std::int64_t author_created_utc = 0;
  double desirability = 0.0;
  double score = 0.0;
  double author_karma = 0.0;
  double author_age_days = 0.0;  // account age when the post was written
  PostAggregates aggregates;

  double value(Metric m) const {
    switch (m) {
      case Metric::desirability: return desirability;
      case Metric::score: return score;
      case Metric::author_karma: return author_karma;
      case Metric::author_age_days: return author_age_days;
      case Metric::avg_comment_desirability: return aggregates.avg_comment_desirability;
      case Metric::avg_comment_score: return aggregates.avg_comment_score;
      case Metric::newcomer_commenters: return static_cast<double>(aggregates.newcomer_commenters);
    }
    return 0.0;
  }

  bool operator==(const PostMetrics&) const = default;
};

using MetricTable = std::map<std::string, PostMetrics>;

inline MetricTable build_metric_table(const Corpus& corpus, const DesirabilityMap& desirability,
                                      double newcomer_threshold_days = kDefaultNewcomerDays,
                                      const ScoreDeltaMap& score_delta = {}) {
  MetricTable table;
  for (const auto* p : corpus.posts()) {
    const auto& author = corpus.author_of(*p);
    PostMetrics m;
    m.id = p->id;
    m.created_utc = p->created_utc;
    m.num_reports = p->num_reports;
    m.author_created_utc = author.created_utc;
    m.desirability = desirability_of(desirability, p->id);
    m.score = static_cast<double>(effective_score(*p, score_delta));
    m.author_karma = static_cast<double>(author.karma);
    m.author_age_days = static_cast<double>(p->created_utc - author.created_utc) / kSecondsPerDay;
    m.aggregates = compute_post_aggregates(corpus, p->id, desirability, newcomer_threshold_days, score_delta);
    table.emplace(p->id, std::move(m));
  }
  return table;
}

inline json to_json(const PostMetrics& m) {
  return json{{"id", m.id},
              {"created_utc", m.created_utc},
              {"num_reports", m.num_reports},
              {"author_created_utc", m.author_created_utc},
              {"desirability", m.desirability},
              {"score", m.score},
              {"author_karma", m.author_karma},
              {"author_age_days", m.author_age_days},
              {"avg_comment_desirability", m.aggregates.avg_comment_desirability},
              {"avg_comment_score", m.aggregates.avg_comment_score},
              {"newcomer_commenters", m.aggregates.newcomer_commenters}};
}

inline PostMetrics post_metrics_from_json(const json& j) {
  try {
    PostMetrics m;
    m.id = j.at("id").get<std::string>();
    m.created_utc = j.at("created_utc").get<std::int64_t>();
    m.num_reports = j.at("num_reports").get<std::int64_t>();
    m.author_created_utc = j.at("author_created_utc").get<std::int64_t>();
    m.desirability = j.at("desirability").get<double>();
    m.score = j.at("score").get<double>();
    m.author_karma = j.at("author_karma").get<double>();
    m.author_age_days = j.at("author_age_days").get<double>();
    m.aggregates.avg_comment_desirability = j.at("avg_comment_desirability").get<double>();
    m.aggregates.avg_comment_score = j.at("avg_comment_score").get<double>();
    m.aggregates.newcomer_commenters = j.at("newcomer_commenters").get<std::int64_t>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("metric record: ") + e.what());
  }
}

inline void write_metric_cache(const MetricTable& table, const std::filesystem::path& path) {
  std::vector<json> records;
  for (const auto& [_, m] : table) records.push_back(to_json(m));
  jsonl::write_file(path, records);
}

inline MetricTable read_metric_cache(const std::filesystem::path& path) {
  MetricTable table;
  for (const auto& r : jsonl::read_file(path)) {
    auto m = post_metrics_from_json(r);
    table.emplace(m.id, std::move(m));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Filtering

/// Seven optional minimum thresholds; absent means unfiltered.
struct FilterSpec {
  std::array<std::optional<double>, kAllMetrics.size()> minimum{};

  std::optional<double>& operator[](Metric m) { return minimum[static_cast<std::size_t>(m)]; }
  const std::optional<double>& operator[](Metric m) const { return minimum[static_cast<std::size_t>(m)]; }

  bool empty() const {
    return std::none_of(minimum.begin(), minimum.end(), [](const auto& v) { return v.has_value(); });
  }

  void validate() const {
    for (auto m : kAllMetrics) {
      const auto& v = (*this)[m];
      if (!v) continue;
      if (!std::isfinite(*v)) throw Error(ErrorCode::invalid_argument, filter_token(m) + " must be finite");
      bool bounded_0_100 = m == Metric::desirability || m == Metric::avg_comment_desirability;
      bool non_negative = m == Metric::author_karma || m == Metric::author_age_days ||
                          m == Metric::newcomer_commenters;
      if (bounded_0_100 && (*v < 0.0 || *v > 100.0))
        throw Error(ErrorCode::invalid_argument, filter_token(m) + " must be within [0, 100]");
      if (non_negative && *v < 0.0) throw Error(ErrorCode::invalid_argument, filter_token(m) + " must be >= 0");
    }
  }

  bool admits(const PostMetrics& m) const {
    for (auto metric : kAllMetrics) {
      const auto& threshold = (*this)[metric];
      if (threshold && !(m.value(metric) >= *threshold)) return false;
    }
    return true;
  }

  bool operator==(const FilterSpec&) const = default;
};

inline const PostMetrics& metrics_for(const MetricTable& metrics, const std::string& id) {
  auto it = metrics.find(id);
  if (it == metrics.end()) throw Error(ErrorCode::not_found, "no metrics for post " + id);
  return it->second;
}

/// Posts meeting every present threshold, original order preserved.
inline std::vector<const Contribution*> filter_queue(const std::vector<const Contribution*>& posts,
                                                     const FilterSpec& spec, const MetricTable& metrics) {
  std::vector<const Contribution*> out;
  for (const auto* p : posts)
    if (spec.admits(metrics_for(metrics, p->id))) out.push_back(p);
  return out;
}

// ---------------------------------------------------------------------------
// Sorting

enum class SortKey {
  newest,
  oldest,
  most_reported,
  most_desirable,
  highest_score,
  newest_author,
  highest_karma,
  highest_comment_desirability,
  highest_comment_score,
  most_newcomer_commenters,
};

inline constexpr std::array kAllSortKeys = {
    SortKey::newest,         SortKey::oldest,        SortKey::most_reported,
    SortKey::most_desirable, SortKey::highest_score, SortKey::newest_author,
    SortKey::highest_karma,  SortKey::highest_comment_desirability,
    SortKey::highest_comment_score, SortKey::most_newcomer_commenters};

inline constexpr std::string_view to_token(SortKey k) {
  switch (k) {
    case SortKey::newest: return "newest";
    case SortKey::oldest: return "oldest";
    case SortKey::most_reported: return "most_reported";
    case SortKey::most_desirable: return "most_desirable";
    case SortKey::highest_score: return "highest_score";
    case SortKey::newest_author: return "newest_author";
    case SortKey::highest_karma: return "highest_karma";
    case SortKey::highest_comment_desirability: return "highest_comment_desirability";
    case SortKey::highest_comment_score: return "highest_comment_score";
    case SortKey::most_newcomer_commenters: return "most_newcomer_commenters";
  }
  return "newest";
}

inline std::optional<SortKey> parse_sort_key(std::string_view token) {
  for (auto k : kAllSortKeys)
    if (to_token(k) == token) return k;
  return std::nullopt;
}

/// Menu label shown next to each sort option.
inline constexpr std::string_view menu_label(SortKey k) {
  switch (k) {
    case SortKey::newest: return "Newest First";
    case SortKey::oldest: return "Oldest First";
    case SortKey::most_reported: return "Most Reported First";
    case SortKey::most_desirable: return "Most Desirable First";
    case SortKey::highest_score: return "Highest Score First";
    case SortKey::newest_author: return "Newest Author First";
    case SortKey::highest_karma: return "Highest Karma First";
    case SortKey::highest_comment_desirability: return "Highest Comment Desirability First";
    case SortKey::highest_comment_score: return "Highest Comment Score First";
    case SortKey::most_newcomer_commenters: return "Most Newcomer Commenters First";
  }
  return "";
}

/// Primary key for a sort option, arranged so that larger sorts first.
inline double sort_value(SortKey key, const PostMetrics& m) {
  switch (key) {
    case SortKey::newest: return static_cast<double>(m.created_utc);
    case SortKey::oldest: return -static_cast<double>(m.created_utc);
    case SortKey::most_reported: return static_cast<double>(m.num_reports);
    case SortKey::most_desirable: return m.desirability;
    case SortKey::highest_score: return m.score;
    case SortKey::newest_author: return static_cast<double>(m.author_created_utc);
    case SortKey::highest_karma: return m.author_karma;
    case SortKey::highest_comment_desirability: return m.aggregates.avg_comment_desirability;
    case SortKey::highest_comment_score: return m.aggregates.avg_comment_score;
    case SortKey::most_newcomer_commenters: return static_cast<double>(m.aggregates.newcomer_commenters);
  }
  return 0.0;
}

/// Stable sort by key; ties by created_utc descending, then id ascending.
inline std::vector<const Contribution*> sort_queue(std::vector<const Contribution*> posts, SortKey key,
                                                   const MetricTable& metrics) {
  std::vector<std::pair<const PostMetrics*, const Contribution*>> decorated;
  decorated.reserve(posts.size());
  for (const auto* p : posts) decorated.emplace_back(&metrics_for(metrics, p->id), p);
  std::stable_sort(decorated.begin(), decorated.end(), [key](const auto& a, const auto& b) {
    double ka = sort_value(key, *a.first), kb = sort_value(key, *b.first);
    if (ka != kb) return ka > kb;
    if (a.first->created_utc != b.first->created_utc) return a.first->created_utc > b.first->created_utc;
    return a.second->id < b.second->id;
  });
  for (std::size_t i = 0; i < posts.size(); ++i) posts[i] = decorated[i].second;
  return posts;
}

// ---------------------------------------------------------------------------
// Slider metadata

struct SliderSpec {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
  bool operator==(const SliderSpec&) const = default;
};

struct FilterMeta {
  std::map<std::string, SliderSpec> sliders;  // keyed by metric token
};

inline constexpr double kSliderPercentile = 0.8;

inline double ceil_to_step(double v, double step) {
  // Tolerance keeps values already on the grid from rounding up a whole step
  // (3.3 in tenths, or 12 computed by interpolation as 12.000000000000002).
  double x = v / step;
  double k = std::ceil(x - 1e-9 * std::max(1.0, std::abs(x)));
  return step == 1.0 ? k : std::round(k * step * 1e6) / 1e6;
}

/// Desirability is fixed to [0, 100]. Every other slider tops out at the
/// metric's 80th-percentile value over posts, rounded up to its step.
inline FilterMeta slider_maxima(const MetricTable& metrics) {
  FilterMeta meta;
  for (auto m : kAllMetrics) {
    SliderSpec s;
    s.step = step_of(m);
    if (m == Metric::desirability) {
      s.max = 100.0;
    } else if (!metrics.empty()) {
      std::vector<double> values;
      values.reserve(metrics.size());
      for (const auto& [_, pm] : metrics) values.push_back(pm.value(m));
      s.max = std::max(0.0, ceil_to_step(quantile_linear(std::span<const double>(values), kSliderPercentile), s.step));
    }
    meta.sliders.emplace(std::string(to_token(m)), s);
  }
  return meta;
}

inline json to_json(const FilterMeta& meta) {
  json out = json::object();
  for (const auto& [name, s] : meta.sliders)
    out[name] = json{{"min", s.min}, {"max", s.max}, {"step", s.step}, {"param", "min_" + name}};
  return out;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::pair<double, double> value_range{0.0, 1.0};

  std::int64_t total() const {
    std::int64_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

inline constexpr std::size_t kHistogramBins = 10;

/// Equal-width bins over [lo, hi]; the top edge is inclusive.
inline Histogram make_histogram(const std::vector<double>& values, double lo, double hi,
                                std::size_t bins = kHistogramBins) {
  if (!(hi > lo)) hi = lo + 1.0;
  Histogram h;
  h.value_range = {lo, hi};
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i)
    h.bin_edges.push_back(i == bins ? hi : lo + width * static_cast<double>(i));
  for (double v : values) {
    auto idx = static_cast<std::size_t>(std::clamp(std::floor((v - lo) / width), 0.0, static_cast<double>(bins - 1)));
    // guard against floor rounding across an edge
    while (idx + 1 < bins && v >= h.bin_edges[idx + 1]) ++idx;
    while (idx > 0 && v < h.bin_edges[idx]) --idx;
    ++h.counts[idx];
  }
  return h;
}

struct HoverHistograms {
  Histogram desirability;
  Histogram score;
};

/// Desirability: 10 bins over [0, max(observed, 10)]. Score: 10 bins over the
/// observed [min, max]. An empty section gives zero counts over [0, 1].
inline HoverHistograms hover_histograms(const std::vector<double>& comment_desirability,
                                        const std::vector<double>& comment_scores) {
  HoverHistograms out;
  if (comment_desirability.empty() && comment_scores.empty()) {
    out.desirability = make_histogram({}, 0.0, 1.0);
    out.score = make_histogram({}, 0.0, 1.0);
    return out;
  }
  double d_max = comment_desirability.empty()
                     ? 10.0
                     : std::max(10.0, *std::max_element(comment_desirability.begin(), comment_desirability.end()));
  out.desirability = make_histogram(comment_desirability, 0.0, d_max);
  if (comment_scores.empty()) {
    out.score = make_histogram({}, 0.0, 1.0);
  } else {
    auto [mn, mx] = std::minmax_element(comment_scores.begin(), comment_scores.end());
    out.score = make_histogram(comment_scores, *mn, *mx);
  }
  return out;
}

inline HoverHistograms hover_histograms(const Corpus& corpus, std::string_view post_id,
                                        const DesirabilityMap& desirability, const ScoreDeltaMap& score_delta = {}) {
  std::vector<double> d, s;
  for (const auto* c : comment_section(corpus, post_id)) {
    d.push_back(desirability_of(desirability, c->id));
    s.push_back(static_cast<double>(effective_score(*c, score_delta)));
  }
  return hover_histograms(d, s);
}

inline json to_json(const Histogram& h) {
  return json{{"bin_edges", h.bin_edges},
              {"counts", h.counts},
              {"value_range", json::array({h.value_range.first, h.value_range.second})}};
}

}  // namespace posiqueue::queue
