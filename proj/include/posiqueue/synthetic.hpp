#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"

namespace posiqueue {

struct SyntheticConfig {
  int n_posts = 105;
  int n_authors = 0;  // 0: one author per post, at least 20
  double comments_mean = 4.0;
  int comments_max = 49;
  int peak_year = 2020;
  double karma_age_correlation = 0.6;
  double noise_scale = 1.0;
  double signal_strength = 0.0;
  double signal_fraction = 0.3;
  double newcomer_fraction = 0.05;
  std::int64_t window_start_utc = 1704067200;  // 2024-01-01T00:00:00Z
  int window_days = 28;
  std::string subreddit = "synthetic";
  std::uint64_t seed = 0;

  void validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, m); };
    if (n_posts < 1) bad("n_posts must be >= 1");
    if (n_authors < 0) bad("n_authors must be >= 0");
    if (comments_mean < 0.0) bad("comments_mean must be >= 0");
    if (comments_max < 0) bad("comments_max must be >= 0");
    if (!(karma_age_correlation > 0.0 && karma_age_correlation < 1.0))
      bad("karma_age_correlation must be in (0, 1)");
    if (!(noise_scale > 0.0)) bad("noise_scale must be > 0");
    if (signal_strength < 0.0) bad("signal_strength must be >= 0");
    if (signal_fraction < 0.0 || signal_fraction > 1.0) bad("signal_fraction must be in [0, 1]");
    if (newcomer_fraction < 0.0 || newcomer_fraction > 1.0) bad("newcomer_fraction must be in [0, 1]");
    if (window_days < 1) bad("window_days must be >= 1");
    if (peak_year < 2006 || peak_year > 2100) bad("peak_year out of range");
    if (window_start_utc <= year_start(peak_year + 1)) bad("window must start after the peak year");
  }

  int author_count() const { return n_authors > 0 ? n_authors : std::max(20, n_posts); }

  static std::int64_t year_start(int year) {
    using namespace std::chrono;
    return sys_days{std::chrono::year{year} / January / 1}.time_since_epoch().count() * kSecondsPerDay;
  }
};

inline SyntheticConfig synthetic_config_from_json(const json& j) {
  SyntheticConfig c;
  try {
    c.n_posts = j.value("n_posts", c.n_posts);
    c.n_authors = j.value("n_authors", c.n_authors);
    c.comments_mean = j.value("comments_mean", c.comments_mean);
    c.comments_max = j.value("comments_max", c.comments_max);
    c.peak_year = j.value("peak_year", c.peak_year);
    c.karma_age_correlation = j.value("karma_age_correlation", c.karma_age_correlation);
    c.noise_scale = j.value("noise_scale", c.noise_scale);
    c.signal_strength = j.value("signal_strength", c.signal_strength);
    c.signal_fraction = j.value("signal_fraction", c.signal_fraction);
    c.newcomer_fraction = j.value("newcomer_fraction", c.newcomer_fraction);
    c.window_start_utc = j.value("window_start_utc", c.window_start_utc);
    c.window_days = j.value("window_days", c.window_days);
    c.subreddit = j.value("subreddit", c.subreddit);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("synthetic config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace synth_detail {

// Distributions built directly on mt19937_64 output so a seed reproduces the
// same corpus on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  std::size_t index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t r;
    do r = gen_();
    while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr std::array kNeutral = {
    "about",  "game",    "today",  "post",    "question", "week",   "time",    "city",   "music",
    "book",   "project", "work",   "home",    "story",    "photo",  "recipe",  "garden", "train",
    "morning", "night",  "map",    "river",   "street",   "coffee", "window",  "paper",  "idea",
    "plan",   "update",  "result", "version", "code",     "list",   "season",  "team",   "player",
    "movie",  "song",    "guide",  "topic",   "thread",   "link",   "source",  "data",   "chart",
    "year",   "month",   "place",  "house",   "road",     "car",    "bike",    "phone",  "screen",
    "the",    "a",       "and",    "of",      "to",       "in",     "it",      "this",   "that",
    "is",     "was",     "for",    "on",      "with",     "my",     "i",       "we",     "they",
    "some",   "just",    "then",   "here",    "there",    "after",  "before",  "again",  "into",
    "over",   "under",   "while",  "old",     "new",      "first",  "last",    "other",  "same",
    "made",   "found",   "tried",  "built",   "read",     "saw",    "went",    "used",   "got"};

inline constexpr std::array kPositive = {
    "good",    "great",      "love",       "nice",     "thanks",   "happy",     "helpful",
    "awesome", "excellent",  "wonderful",  "amazing",  "beautiful", "glad",     "enjoy",
    "appreciate", "best",    "kind",       "fun",      "brilliant", "fantastic", "perfect",
    "interesting", "insightful", "welcome", "inspiring", "thoughtful"};

inline constexpr std::array kNegative = {"bad", "wrong", "boring", "annoying", "useless", "awful"};

inline std::string sentence(Rng& rng, double p_positive, double p_negative) {
  int len = 5 + static_cast<int>(rng.index(10));
  std::string s;
  for (int w = 0; w < len; ++w) {
    double u = rng.uniform();
    const char* word = u < p_positive                ? kPositive[rng.index(kPositive.size())]
                       : u < p_positive + p_negative ? kNegative[rng.index(kNegative.size())]
                                                     : kNeutral[rng.index(kNeutral.size())];
    std::string token(word);
    if (w == 0) token[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
    if (!s.empty()) s += ' ';
    s += token;
  }
  double t = rng.uniform();
  s += t < 0.2 ? '?' : t < 0.3 ? '!' : '.';
  return s;
}

inline std::string paragraph(Rng& rng, int min_sentences, int max_sentences, double p_positive,
                             double p_negative) {
  int n = min_sentences + static_cast<int>(rng.index(static_cast<std::size_t>(max_sentences - min_sentences + 1)));
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += sentence(rng, p_positive, p_negative);
  }
  return out;
}

inline std::string title(Rng& rng) {
  int len = 3 + static_cast<int>(rng.index(5));
  std::string s;
  for (int w = 0; w < len; ++w) {
    std::string token(kNeutral[rng.index(kNeutral.size())]);
    token[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
    if (!s.empty()) s += ' ';
    s += token;
  }
  return s;
}

inline std::string format_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06zu", prefix, n);
  return buf;
}

}  // namespace synth_detail

inline constexpr double kBasePositiveRate = 0.04;
inline constexpr double kBaseNegativeRate = 0.02;

/// Deterministic synthetic community. Account creation dates are a log-normal
/// offset (in days) reflected back from just after the peak year, which gives
/// a left-skewed distribution peaking inside the peak year; a small share of
/// fresh accounts supplies newcomers. Karma is log-normal and tied to
/// standardised log account age with the configured correlation. With
/// signal_strength > 0, a signal_fraction share of contributions gets bodies
/// dense in positive-lexicon words and an additive score boost.
inline Corpus generate_synthetic_corpus(const SyntheticConfig& config) {
  config.validate();
  using synth_detail::Rng;
  Rng rng(config.seed);

  const std::int64_t window_start = config.window_start_utc;
  const std::int64_t window_len = static_cast<std::int64_t>(config.window_days) * kSecondsPerDay;
  const double anchor = static_cast<double>(SyntheticConfig::year_start(config.peak_year + 1)) + 182.5 * kSecondsPerDay;
  const double earliest = static_cast<double>(SyntheticConfig::year_start(2005) + 160 * kSecondsPerDay);
  // Log-normal offset with mode at one year before the anchor (mid peak year).
  const double sigma = 0.8;
  const double mu = std::log(365.0) + sigma * sigma;

  const int n_authors = config.author_count();
  std::vector<Author> authors;
  std::vector<double> log_age;
  authors.reserve(static_cast<std::size_t>(n_authors));
  for (int i = 0; i < n_authors; ++i) {
    Author a;
    a.id = synth_detail::format_id("u", static_cast<std::size_t>(i));
    a.name = "user_" + std::to_string(i);
    double created;
    if (rng.bernoulli(config.newcomer_fraction)) {
      created = static_cast<double>(window_start) - rng.uniform(1.0, 60.0) * kSecondsPerDay;
    } else {
      double offset_days = std::exp(mu + sigma * rng.normal());
      created = std::max(earliest, anchor - offset_days * kSecondsPerDay);
    }
    a.created_utc = static_cast<std::int64_t>(created);
    authors.push_back(std::move(a));
    log_age.push_back(std::log(static_cast<double>(window_start - authors.back().created_utc) / kSecondsPerDay));
  }

  double mean = 0.0, var = 0.0;
  for (double v : log_age) mean += v;
  mean /= static_cast<double>(log_age.size());
  for (double v : log_age) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(log_age.size())) + 1e-12;
  const double rho = config.karma_age_correlation;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    double z = (log_age[i] - mean) / sd;
    double latent = rho * z + std::sqrt(1.0 - rho * rho) * config.noise_scale * rng.normal();
    authors[i].karma = std::llround(std::exp(6.0 + 0.9 * latent));
  }

  const bool planted_enabled = config.signal_strength > 0.0;
  const double planted_positive = std::min(0.6, 0.35 * config.signal_strength);
  std::vector<Contribution> contributions;
  std::size_t comment_counter = 0;

  auto body_and_score = [&](bool is_post, std::string& body, std::int64_t& score) {
    bool planted = planted_enabled && rng.bernoulli(config.signal_fraction);
    double p_pos = planted ? planted_positive : kBasePositiveRate;
    double p_neg = planted ? 0.0 : kBaseNegativeRate;
    body = is_post ? synth_detail::paragraph(rng, 2, 5, p_pos, p_neg)
                   : synth_detail::paragraph(rng, 1, 3, p_pos, p_neg);
    double base = is_post ? std::exp(1.5 + rng.normal()) - 2.0 : std::exp(0.5 + rng.normal()) - 1.0;
    if (planted) {
      double boost = is_post ? std::exp(4.0 + 0.3 * rng.normal()) : std::exp(3.0 + 0.3 * rng.normal());
      base += config.signal_strength * boost;
    }
    score = std::llround(base);
  };

  for (int p = 0; p < config.n_posts; ++p) {
    Contribution post;
    post.id = synth_detail::format_id("p", static_cast<std::size_t>(p));
    post.kind = Kind::post;
    post.subreddit = config.subreddit;
    post.title = synth_detail::title(rng);
    post.author_id = authors[rng.index(authors.size())].id;
    post.created_utc = window_start + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(window_len));
    body_and_score(true, post.body, post.score);
    contributions.push_back(post);

    int n_comments = std::min(config.comments_max, rng.poisson(config.comments_mean));
    std::vector<std::pair<std::string, std::int64_t>> thread{{post.id, post.created_utc}};
    for (int k = 0; k < n_comments; ++k) {
      Contribution c;
      c.id = synth_detail::format_id("c", comment_counter++);
      c.kind = Kind::comment;
      c.subreddit = config.subreddit;
      const auto& parent = rng.bernoulli(0.5) ? thread.front() : thread[rng.index(thread.size())];
      c.parent_id = parent.first;
      c.link_id = post.id;
      c.created_utc = parent.second + 60 + static_cast<std::int64_t>(rng.exponential(3.0 * 3600.0));
      c.author_id = authors[rng.index(authors.size())].id;
      body_and_score(false, c.body, c.score);
      thread.emplace_back(c.id, c.created_utc);
      contributions.push_back(std::move(c));
    }
  }
  return Corpus::build(std::move(authors), std::move(contributions));
}

}  // namespace posiqueue
