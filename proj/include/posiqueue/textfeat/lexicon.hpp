#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "posiqueue/error.hpp"
#include "posiqueue/textfeat/default_lexicons.hpp"
#include "posiqueue/textfeat/tokenize.hpp"

namespace posiqueue::textfeat {

/// One category's vocabulary: exact words plus prefix stems ("thank*").
struct CategoryLexicon {
  std::unordered_set<std::string> words;
  std::vector<std::string> stems;

  bool matches(std::string_view word) const {
    if (words.count(std::string(word))) return true;
    return std::any_of(stems.begin(), stems.end(),
                       [&](const std::string& s) { return word.substr(0, s.size()) == s; });
  }

  bool operator==(const CategoryLexicon& o) const {
    auto a = stems, b = o.stems;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return words == o.words && a == b;
  }
};

struct PolitenessPhrase {
  std::vector<std::string> tokens;
  bool sentence_start = false;

  bool operator==(const PolitenessPhrase&) const = default;
};

struct PolitenessStrategy {
  std::string name;
  int polarity = 1;
  std::vector<PolitenessPhrase> phrases;  // longest first

  bool operator==(const PolitenessStrategy&) const = default;
};

struct LexiconSet {
  std::map<std::string, CategoryLexicon> categories;
  std::unordered_map<std::string, double> valence;
  std::unordered_map<std::string, double> toxicity_terms;
  std::vector<PolitenessStrategy> politeness;

  bool operator==(const LexiconSet&) const = default;

  static LexiconSet parse(std::string_view categories_tsv, std::string_view valence_tsv,
                          std::string_view toxicity_tsv, std::string_view politeness_tsv);

  static LexiconSet builtin() {
    return parse(defaults::kCategories, defaults::kValence, defaults::kToxicity,
                 defaults::kPoliteness);
  }

  /// Reads categories.tsv, valence.tsv, toxicity.tsv, politeness.tsv; any
  /// missing file falls back to the shipped default for that lexicon.
  static LexiconSet load_directory(const std::filesystem::path& dir);
};

namespace detail {

inline std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename Fn>
void for_each_tsv_row(std::string_view text, std::string_view what, std::size_t columns, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != columns) {
      throw Error(ErrorCode::parse_error, std::string(what) + " lexicon line " + std::to_string(line_no) +
                                              ": expected " + std::to_string(columns) + " tab-separated columns");
    }
    fn(cols, line_no);
  }
}

inline double parse_real(const std::string& s, std::string_view what, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error,
                std::string(what) + " lexicon line " + std::to_string(line_no) + ": bad number \"" + s + "\"");
  }
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string lower(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

}  // namespace detail

inline LexiconSet LexiconSet::parse(std::string_view categories_tsv, std::string_view valence_tsv,
                                    std::string_view toxicity_tsv, std::string_view politeness_tsv) {
  LexiconSet lex;

  detail::for_each_tsv_row(categories_tsv, "category", 2, [&](const auto& cols, std::size_t) {
    auto& cat = lex.categories[cols[0]];
    auto word = detail::lower(cols[1]);
    if (!word.empty() && word.back() == '*') {
      word.pop_back();
      cat.stems.push_back(word);
    } else {
      cat.words.insert(word);
    }
  });

  detail::for_each_tsv_row(valence_tsv, "valence", 2, [&](const auto& cols, std::size_t n) {
    double v = detail::parse_real(cols[1], "valence", n);
    if (v < -4.0 || v > 4.0)
      throw Error(ErrorCode::parse_error, "valence lexicon line " + std::to_string(n) + ": outside [-4, 4]");
    lex.valence[detail::lower(cols[0])] = v;
  });

  detail::for_each_tsv_row(toxicity_tsv, "toxicity", 2, [&](const auto& cols, std::size_t n) {
    double w = detail::parse_real(cols[1], "toxicity", n);
    if (!(w > 0.0 && w <= 1.0))
      throw Error(ErrorCode::parse_error, "toxicity lexicon line " + std::to_string(n) + ": outside (0, 1]");
    lex.toxicity_terms[detail::lower(cols[0])] = w;
  });

  std::map<std::string, std::size_t> strategy_index;
  detail::for_each_tsv_row(politeness_tsv, "politeness", 3, [&](const auto& cols, std::size_t n) {
    double pol = detail::parse_real(cols[1], "politeness", n);
    if (pol != 1.0 && pol != -1.0)
      throw Error(ErrorCode::parse_error, "politeness lexicon line " + std::to_string(n) + ": polarity must be +1 or -1");
    auto [it, inserted] = strategy_index.emplace(cols[0], lex.politeness.size());
    if (inserted) lex.politeness.push_back(PolitenessStrategy{cols[0], static_cast<int>(pol), {}});
    auto& strategy = lex.politeness[it->second];
    if (strategy.polarity != static_cast<int>(pol))
      throw Error(ErrorCode::parse_error, "politeness lexicon line " + std::to_string(n) + ": inconsistent polarity for " + cols[0]);
    std::string phrase = cols[2];
    PolitenessPhrase p;
    if (!phrase.empty() && phrase.front() == '^') {
      p.sentence_start = true;
      phrase.erase(0, 1);
    }
    p.tokens = tokenize(phrase).words;
    if (p.tokens.empty())
      throw Error(ErrorCode::parse_error, "politeness lexicon line " + std::to_string(n) + ": empty phrase");
    strategy.phrases.push_back(std::move(p));
  });
  for (auto& s : lex.politeness) {
    std::stable_sort(s.phrases.begin(), s.phrases.end(), [](const auto& a, const auto& b) {
      return a.tokens.size() > b.tokens.size();
    });
  }
  return lex;
}

inline LexiconSet LexiconSet::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorCode::io_error, "lexicon directory not found: " + dir.string());
  auto load = [&](const char* name, const char* fallback) {
    auto p = dir / name;
    return std::filesystem::exists(p) ? detail::read_text(p) : std::string(fallback);
  };
  return parse(load("categories.tsv", defaults::kCategories), load("valence.tsv", defaults::kValence),
               load("toxicity.tsv", defaults::kToxicity), load("politeness.tsv", defaults::kPoliteness));
}

}  // namespace posiqueue::textfeat
