#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace posiqueue::textfeat {

struct Sentence {
  std::size_t first_word = 0;
  std::size_t word_count = 0;
  std::string terminator;  // run of . ! ? ; empty for an unterminated tail

  bool is_question() const { return terminator.find('?') != std::string::npos; }
  bool operator==(const Sentence&) const = default;
};

struct TokenizedText {
  std::vector<std::string> words;
  std::vector<Sentence> sentences;
  std::vector<int> syllable_counts;

  std::size_t total_syllables() const {
    std::size_t n = 0;
    for (int s : syllable_counts) n += static_cast<std::size_t>(s);
    return n;
  }
};

struct TokenizeOptions {
  bool silent_e_rule = true;
};

/// Vowel groups (a e i o u y), minus a silent trailing "e" unless the word
/// ends in "le"; never below 1.
inline int count_syllables(std::string_view word, bool silent_e_rule = true) {
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool in_group = false;
  for (char c : word) {
    bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  if (silent_e_rule && word.size() >= 1 && word.back() == 'e') {
    bool ends_le = word.size() >= 2 && word[word.size() - 2] == 'l';
    if (!ends_le) --groups;
  }
  return groups < 1 ? 1 : groups;
}

/// Replaces markdown links `[anchor](target)` with their anchor text.
inline std::string strip_markdown_links(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[') {
      auto close = text.find(']', i + 1);
      if (close != std::string_view::npos && close + 1 < text.size() && text[close + 1] == '(') {
        auto paren = text.find(')', close + 2);
        auto nested = text.find('[', i + 1);
        if (paren != std::string_view::npos && (nested == std::string_view::npos || nested > close)) {
          out.append(text.substr(i + 1, close - i - 1));
          i = paren + 1;
          continue;
        }
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

namespace detail {

enum class CharClass { word, apostrophe, terminal, closer, space, other };

// Classifies the code unit(s) at `i`; `len` receives the byte length consumed.
inline CharClass classify(std::string_view s, std::size_t i, std::size_t& len) {
  auto c = static_cast<unsigned char>(s[i]);
  len = 1;
  if (c < 0x80) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
      return CharClass::word;
    if (c == '\'') return CharClass::apostrophe;
    if (c == '.' || c == '!' || c == '?') return CharClass::terminal;
    if (c == '"' || c == ')' || c == ']' || c == '*' || c == '_') return CharClass::closer;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v')
      return CharClass::space;
    return CharClass::other;
  }
  // U+2000..U+203F general punctuation is E2 80 xx.
  if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80) {
    auto b2 = static_cast<unsigned char>(s[i + 2]);
    len = 3;
    if (b2 == 0x98 || b2 == 0x99) return CharClass::apostrophe;
    if (b2 == 0x9D) return CharClass::closer;
    if (b2 <= 0x8B) return CharClass::space;
    return CharClass::other;
  }
  return CharClass::word;  // other non-ASCII bytes stay inside words
}

}  // namespace detail

/// Splits text into case-folded words and sentences. A sentence ends at a run
/// of terminal punctuation followed (after optional closing quotes/brackets)
/// by whitespace or end of text. Segments without words are not sentences.
inline TokenizedText tokenize(std::string_view text, const TokenizeOptions& opts = {}) {
  TokenizedText out;
  std::string word;
  std::size_t sentence_first = 0;

  auto flush_word = [&] {
    // Trim apostrophes used as quotes.
    std::size_t b = 0, e = word.size();
    while (b < e && word[b] == '\'') ++b;
    while (e > b && word[e - 1] == '\'') --e;
    if (b < e) {
      std::string w = word.substr(b, e - b);
      out.syllable_counts.push_back(count_syllables(w, opts.silent_e_rule));
      out.words.push_back(std::move(w));
    }
    word.clear();
  };
  auto close_sentence = [&](std::string terminator) {
    std::size_t n = out.words.size() - sentence_first;
    if (n > 0) out.sentences.push_back(Sentence{sentence_first, n, std::move(terminator)});
    sentence_first = out.words.size();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    auto cls = detail::classify(text, i, len);
    switch (cls) {
      case detail::CharClass::word:
        for (std::size_t k = 0; k < len; ++k) {
          char c = text[i + k];
          word.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
        }
        i += len;
        break;
      case detail::CharClass::apostrophe:
        word.push_back('\'');
        i += len;
        break;
      case detail::CharClass::terminal: {
        flush_word();
        std::string run;
        while (i < text.size() && (text[i] == '.' || text[i] == '!' || text[i] == '?')) run.push_back(text[i++]);
        std::size_t j = i;
        while (j < text.size()) {
          std::size_t l2 = 1;
          auto k = detail::classify(text, j, l2);
          if (k != detail::CharClass::closer && k != detail::CharClass::apostrophe) break;
          j += l2;
        }
        std::size_t l3 = 1;
        if (j >= text.size() || detail::classify(text, j, l3) == detail::CharClass::space) {
          close_sentence(std::move(run));
          i = j;
        }
        break;
      }
      default:
        flush_word();
        i += len;
        break;
    }
  }
  flush_word();
  close_sentence("");
  return out;
}

}  // namespace posiqueue::textfeat
