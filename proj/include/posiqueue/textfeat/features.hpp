#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/jsonl.hpp"
#include "posiqueue/textfeat/lexicon.hpp"
#include "posiqueue/textfeat/tokenize.hpp"

namespace posiqueue::textfeat {

struct FeatureConfig {
  std::size_t embedding_dim = 384;
  bool silent_e_rule = true;

  void validate() const {
    if (embedding_dim < 8) throw Error(ErrorCode::invalid_argument, "embedding_dim must be >= 8");
  }
};

struct FeatureVector {
  std::map<std::string, double> category_proportions;
  double sentiment = 0.0;
  double readability = 0.0;
  double interrogative_ratio = 0.0;
  double politeness = 0.0;
  double toxicity = 0.0;
  std::vector<double> embedding;

  bool operator==(const FeatureVector&) const = default;
};

// ---------------------------------------------------------------------------
// Extractors

/// 100 x (matching words / total words) per category.
inline std::map<std::string, double> category_proportions(const TokenizedText& tokens,
                                                          const LexiconSet& lex) {
  std::map<std::string, double> out;
  for (const auto& [name, cat] : lex.categories) {
    if (tokens.words.empty()) {
      out[name] = 0.0;
      continue;
    }
    std::size_t hits = 0;
    for (const auto& w : tokens.words)
      if (cat.matches(w)) ++hits;
    out[name] = 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.words.size());
  }
  return out;
}

inline bool is_negator(std::string_view w) {
  if (w == "not" || w == "no" || w == "never") return true;
  return w.size() > 3 && w.substr(w.size() - 3) == "n't";
}

inline constexpr std::size_t kNegationWindow = 3;
inline constexpr double kCompoundAlpha = 15.0;

/// Normalised lexicon valence: s / sqrt(s^2 + 15), with a sign flip for words
/// preceded by a negator within three tokens.
inline double sentiment_compound(const TokenizedText& tokens, const LexiconSet& lex) {
  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.words.size(); ++i) {
    auto it = lex.valence.find(tokens.words[i]);
    if (it == lex.valence.end()) continue;
    double v = it->second;
    std::size_t lo = i >= kNegationWindow ? i - kNegationWindow : 0;
    for (std::size_t j = lo; j < i; ++j) {
      if (is_negator(tokens.words[j])) {
        v = -v;
        break;
      }
    }
    sum += v;
  }
  if (sum == 0.0) return 0.0;
  return std::clamp(sum / std::sqrt(sum * sum + kCompoundAlpha), -1.0, 1.0);
}

/// Flesch-Kincaid grade level; 0 when there are no words or sentences.
inline double readability(const TokenizedText& tokens) {
  if (tokens.words.empty() || tokens.sentences.empty()) return 0.0;
  double words = static_cast<double>(tokens.words.size());
  double sentences = static_cast<double>(tokens.sentences.size());
  double syllables = static_cast<double>(tokens.total_syllables());
  return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

inline double interrogative_ratio(const TokenizedText& tokens) {
  if (tokens.sentences.empty()) return 0.0;
  auto q = std::count_if(tokens.sentences.begin(), tokens.sentences.end(),
                         [](const Sentence& s) { return s.is_question(); });
  return static_cast<double>(q) / static_cast<double>(tokens.sentences.size());
}

inline double interrogative_ratio(std::string_view text) { return interrogative_ratio(tokenize(text)); }

/// Matches of one strategy: greedy, longest phrase first, non-overlapping,
/// confined to sentences.
inline std::size_t count_strategy_matches(const TokenizedText& tokens, const PolitenessStrategy& s) {
  std::size_t matches = 0;
  for (const auto& sent : tokens.sentences) {
    std::size_t end = sent.first_word + sent.word_count;
    std::size_t i = sent.first_word;
    while (i < end) {
      std::size_t advance = 1;
      for (const auto& p : s.phrases) {
        if (p.sentence_start && i != sent.first_word) continue;
        if (i + p.tokens.size() > end) continue;
        if (std::equal(p.tokens.begin(), p.tokens.end(), tokens.words.begin() + static_cast<std::ptrdiff_t>(i))) {
          ++matches;
          advance = p.tokens.size();
          break;
        }
      }
      i += advance;
    }
  }
  return matches;
}

inline double politeness_score(const TokenizedText& tokens, const LexiconSet& lex) {
  if (tokens.sentences.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : lex.politeness)
    total += s.polarity * static_cast<double>(count_strategy_matches(tokens, s));
  return total / static_cast<double>(tokens.sentences.size());
}

/// Noisy-or over every toxic token occurrence.
inline double toxicity_score(const TokenizedText& tokens, const LexiconSet& lex) {
  double clean = 1.0;
  for (const auto& w : tokens.words) {
    auto it = lex.toxicity_terms.find(w);
    if (it != lex.toxicity_terms.end()) clean *= 1.0 - it->second;
  }
  return std::clamp(1.0 - clean, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Hashed embedding

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::vector<double> embed_tokens(const std::vector<std::string>& words, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  auto add = [&](std::string_view key) {
    auto h = fnv1a64(key);
    double sign = (mix64(h) >> 63) ? -1.0 : 1.0;
    v[h % dim] += sign;
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    add("u:" + words[i]);
    if (i + 1 < words.size()) add("b:" + words[i] + ' ' + words[i + 1]);
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

/// Signed feature hashing of word unigrams and bigrams, L2-normalised.
inline std::vector<double> embed(std::string_view text, const FeatureConfig& config) {
  return embed_tokens(tokenize(strip_markdown_links(text)).words, config.embedding_dim);
}

// ---------------------------------------------------------------------------
// Full vector

inline FeatureVector extract_text_features(std::string_view raw, const LexiconSet& lex,
                                           const FeatureConfig& config) {
  auto text = strip_markdown_links(raw);
  auto tokens = tokenize(text, TokenizeOptions{config.silent_e_rule});
  FeatureVector fv;
  fv.category_proportions = category_proportions(tokens, lex);
  fv.sentiment = sentiment_compound(tokens, lex);
  fv.readability = readability(tokens);
  fv.interrogative_ratio = interrogative_ratio(tokens);
  fv.politeness = politeness_score(tokens, lex);
  fv.toxicity = toxicity_score(tokens, lex);
  fv.embedding = embed_tokens(tokens.words, config.embedding_dim);
  return fv;
}

/// Text a contribution is scored on: title and body joined by a newline for
/// posts with a title, the body otherwise.
inline std::string scoring_text(const Contribution& c) {
  if (c.is_post() && c.title) return *c.title + "\n" + c.body;
  return c.body;
}

inline FeatureVector extract_features(const Contribution& c, const LexiconSet& lex,
                                      const FeatureConfig& config) {
  return extract_text_features(scoring_text(c), lex, config);
}

// ---------------------------------------------------------------------------
// Flattening

inline std::vector<std::string> feature_names(const LexiconSet& lex, std::size_t embedding_dim) {
  std::vector<std::string> names;
  for (const auto& [name, _] : lex.categories) names.push_back("cat:" + name);
  for (const char* n : {"sentiment", "readability", "interrogative_ratio", "politeness", "toxicity"})
    names.emplace_back(n);
  for (std::size_t i = 0; i < embedding_dim; ++i) names.push_back("emb:" + std::to_string(i));
  return names;
}

inline std::vector<std::string> feature_names(const FeatureVector& fv) {
  std::vector<std::string> names;
  for (const auto& [name, _] : fv.category_proportions) names.push_back("cat:" + name);
  for (const char* n : {"sentiment", "readability", "interrogative_ratio", "politeness", "toxicity"})
    names.emplace_back(n);
  for (std::size_t i = 0; i < fv.embedding.size(); ++i) names.push_back("emb:" + std::to_string(i));
  return names;
}

inline std::vector<double> flatten(const FeatureVector& fv) {
  std::vector<double> out;
  out.reserve(fv.category_proportions.size() + 5 + fv.embedding.size());
  for (const auto& [_, v] : fv.category_proportions) out.push_back(v);
  out.push_back(fv.sentiment);
  out.push_back(fv.readability);
  out.push_back(fv.interrogative_ratio);
  out.push_back(fv.politeness);
  out.push_back(fv.toxicity);
  out.insert(out.end(), fv.embedding.begin(), fv.embedding.end());
  return out;
}

// ---------------------------------------------------------------------------
// Feature cache: {"id": ..., "features": {...}} per line, id order.

using FeatureCache = std::map<std::string, FeatureVector>;

inline json to_json(const FeatureVector& fv) {
  return json{{"category_proportions", fv.category_proportions},
              {"sentiment", fv.sentiment},
              {"readability", fv.readability},
              {"interrogative_ratio", fv.interrogative_ratio},
              {"politeness", fv.politeness},
              {"toxicity", fv.toxicity},
              {"embedding", fv.embedding}};
}

inline FeatureVector feature_vector_from_json(const json& j) {
  FeatureVector fv;
  try {
    fv.category_proportions = j.at("category_proportions").get<std::map<std::string, double>>();
    fv.sentiment = j.at("sentiment").get<double>();
    fv.readability = j.at("readability").get<double>();
    fv.interrogative_ratio = j.at("interrogative_ratio").get<double>();
    fv.politeness = j.at("politeness").get<double>();
    fv.toxicity = j.at("toxicity").get<double>();
    fv.embedding = j.at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("feature record: ") + e.what());
  }
  return fv;
}

inline void write_feature_cache(const FeatureCache& cache, const std::filesystem::path& path) {
  std::vector<json> records;
  records.reserve(cache.size());
  for (const auto& [id, fv] : cache) records.push_back(json{{"id", id}, {"features", to_json(fv)}});
  jsonl::write_file(path, records);
}

inline FeatureCache read_feature_cache(const std::filesystem::path& path) {
  FeatureCache cache;
  auto in = jsonl::open_input(path);
  jsonl::for_each_record(in, [&](std::size_t line, const json& r) {
    if (!r.contains("id") || !r["id"].is_string() || !r.contains("features"))
      throw Error(ErrorCode::parse_error, "feature cache line " + std::to_string(line) + ": missing id or features");
    cache[r["id"].get<std::string>()] = feature_vector_from_json(r["features"]);
  });
  return cache;
}

/// Extracts every contribution, fanning out across `threads` workers.
inline FeatureCache extract_corpus(const Corpus& corpus, const LexiconSet& lex, const FeatureConfig& config,
                                   unsigned threads = std::thread::hardware_concurrency()) {
  config.validate();
  const auto& items = corpus.contributions();
  std::vector<FeatureVector> out(items.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(items.size() / 64 + 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < items.size(); i += threads) out[i] = extract_features(items[i], lex, config);
    });
  }
  for (auto& th : pool) th.join();
  FeatureCache cache;
  for (std::size_t i = 0; i < items.size(); ++i) cache.emplace(items[i].id, std::move(out[i]));
  return cache;
}

}  // namespace posiqueue::textfeat
