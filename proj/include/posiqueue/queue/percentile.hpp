#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "posiqueue/error.hpp"

namespace posiqueue::queue {

/// Mid-rank percentile: 100 * (#{v < x} + 0.5 * #{v == x}) / n.
template <typename T>
double percentile_rank(std::span<const T> values, double x) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "percentile_rank of an empty set");
  std::size_t below = 0, equal = 0;
  for (const auto& v : values) {
    auto d = static_cast<double>(v);
    if (d < x) ++below;
    else if (d == x) ++equal;
  }
  return 100.0 * (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
         static_cast<double>(values.size());
}

template <typename T>
double percentile_rank(const std::vector<T>& values, double x) {
  return percentile_rank(std::span<const T>(values), x);
}

/// Linear-interpolation quantile (h = (n - 1) p between order statistics).
template <typename T>
double quantile_linear(std::span<const T> values, double p) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty set");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  double h = static_cast<double>(s.size() - 1) * std::clamp(p, 0.0, 1.0);
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

// ---------------------------------------------------------------------------
// Cue categories

enum class CueCategory { HighlyUndesirable, Undesirable, Neutral, Desirable, HighlyDesirable };

inline constexpr std::array kAllCues = {CueCategory::HighlyUndesirable, CueCategory::Undesirable,
                                        CueCategory::Neutral, CueCategory::Desirable,
                                        CueCategory::HighlyDesirable};

inline constexpr std::string_view to_token(CueCategory c) {
  switch (c) {
    case CueCategory::HighlyUndesirable: return "highly_undesirable";
    case CueCategory::Undesirable: return "undesirable";
    case CueCategory::Neutral: return "neutral";
    case CueCategory::Desirable: return "desirable";
    case CueCategory::HighlyDesirable: return "highly_desirable";
  }
  return "neutral";
}

inline constexpr std::string_view label(CueCategory c) {
  switch (c) {
    case CueCategory::HighlyUndesirable: return "Highly undesirable";
    case CueCategory::Undesirable: return "Undesirable";
    case CueCategory::Neutral: return "Neutral";
    case CueCategory::Desirable: return "Desirable";
    case CueCategory::HighlyDesirable: return "Highly desirable";
  }
  return "Neutral";
}

/// Theme token, resolved to a colour by the console.
inline constexpr std::string_view color_token(CueCategory c) {
  switch (c) {
    case CueCategory::HighlyUndesirable: return "cue-1";
    case CueCategory::Undesirable: return "cue-2";
    case CueCategory::Neutral: return "cue-3";
    case CueCategory::Desirable: return "cue-4";
    case CueCategory::HighlyDesirable: return "cue-5";
  }
  return "cue-3";
}

/// Bands: (80, 100] (60, 80] (40, 60] (20, 40] [0, 20].
inline CueCategory category_for_rank(double rank) {
  if (rank > 80.0) return CueCategory::HighlyDesirable;
  if (rank > 60.0) return CueCategory::Desirable;
  if (rank > 40.0) return CueCategory::Neutral;
  if (rank > 20.0) return CueCategory::Undesirable;
  return CueCategory::HighlyUndesirable;
}

template <typename T>
CueCategory cue_category(std::span<const T> kind_scores, double score) {
  return category_for_rank(percentile_rank(kind_scores, score));
}

template <typename T>
CueCategory cue_category(const std::vector<T>& kind_scores, double score) {
  return cue_category(std::span<const T>(kind_scores), score);
}

/// Sorted score pool for one kind; O(log n) ranks for repeated lookups.
class CuePool {
 public:
  CuePool() = default;

  template <typename Range>
  explicit CuePool(const Range& scores) : sorted_(std::begin(scores), std::end(scores)) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  bool empty() const { return sorted_.empty(); }
  std::size_t size() const { return sorted_.size(); }

  double rank(double x) const {
    if (sorted_.empty()) throw Error(ErrorCode::invalid_argument, "percentile_rank of an empty set");
    auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    auto hi = std::upper_bound(lo, sorted_.end(), x);
    double below = static_cast<double>(lo - sorted_.begin());
    double equal = static_cast<double>(hi - lo);
    return 100.0 * (below + 0.5 * equal) / static_cast<double>(sorted_.size());
  }

  CueCategory category(double x) const { return category_for_rank(rank(x)); }

 private:
  std::vector<double> sorted_;
};

}  // namespace posiqueue::queue
