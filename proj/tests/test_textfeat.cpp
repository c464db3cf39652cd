#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "posiqueue/textfeat/features.hpp"
#include "support.hpp"

using namespace posiqueue;
using namespace posiqueue::textfeat;
using namespace testsupport;

namespace {

const LexiconSet& lex() {
  static const LexiconSet l = LexiconSet::builtin();
  return l;
}

// Lexicon with only the valence table, for closed-form sentiment checks.
LexiconSet valence_only(const std::string& tsv) { return LexiconSet::parse("", tsv, "", ""); }

double sentiment(const std::string& text, const LexiconSet& l) { return sentiment_compound(tokenize(text), l); }

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "good", "bad",  "not",   "idiot", "thank you", "please", "?",  ".",  "!",   "  ", "\n",   "Hi",  "you",
      "don't", "love", "[link](http://x)", "café", "...", "I think", "stupid", "“quote”", "'", "damn", "3.5"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 30);
  std::string out;
  for (std::size_t i = len(rng); i > 0; --i) out += pieces[pick(rng)] + (pick(rng) % 3 ? " " : "");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tokenizer

TEST(Tokenize, SplitsSentencesOnTerminalPunctuation) {
  auto t = tokenize("Why? Because.");
  EXPECT_EQ(t.words, (std::vector<std::string>{"why", "because"}));
  ASSERT_EQ(t.sentences.size(), 2u);
  EXPECT_TRUE(t.sentences[0].is_question());
  EXPECT_FALSE(t.sentences[1].is_question());
}

TEST(Tokenize, EmptyText) {
  auto t = tokenize("");
  EXPECT_TRUE(t.words.empty());
  EXPECT_TRUE(t.sentences.empty());
}

TEST(Tokenize, CatSatSyllables) {
  EXPECT_EQ(tokenize("The cat sat.").syllable_counts, (std::vector<int>{1, 1, 1}));
}

TEST(Tokenize, DecimalsAndAbbreviationsStayInsideSentences) {
  auto t = tokenize("Version 3.5 is out...really? Yes!");
  EXPECT_EQ(t.sentences.size(), 2u);
  EXPECT_EQ(t.words, (std::vector<std::string>{"version", "3", "5", "is", "out", "really", "yes"}));
}

TEST(Tokenize, ApostrophesAndQuotes) {
  auto t = tokenize("\"Don't,\" she said. 'Fine.'");
  EXPECT_EQ(t.words, (std::vector<std::string>{"don't", "she", "said", "fine"}));
  EXPECT_EQ(t.sentences.size(), 2u);
  EXPECT_EQ(tokenize("It’s fine.").words, (std::vector<std::string>{"it's", "fine"}));
}

TEST(Tokenize, UnterminatedTailIsASentence) {
  auto t = tokenize("One. two three");
  ASSERT_EQ(t.sentences.size(), 2u);
  EXPECT_EQ(t.sentences[1].word_count, 2u);
  EXPECT_EQ(t.sentences[1].terminator, "");
}

TEST(Tokenize, Syllables) {
  EXPECT_EQ(count_syllables("cake"), 1);
  EXPECT_EQ(count_syllables("table"), 2);
  EXPECT_EQ(count_syllables("the"), 1);
  EXPECT_EQ(count_syllables("rhythm"), 1);  // one vowel group: y
  EXPECT_EQ(count_syllables("queue"), 1);
  EXPECT_EQ(count_syllables("xyz"), 1);
  EXPECT_EQ(count_syllables("cake", false), 2);
}

TEST(Tokenize, MarkdownLinksKeepAnchorText) {
  EXPECT_EQ(strip_markdown_links("see [the docs](http://x.y/z) now"), "see the docs now");
  EXPECT_EQ(strip_markdown_links("[a] (b) [c"), "[a] (b) [c");
}

TEST(Tokenize, InvariantsHoldOnRandomText) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto t = tokenize(random_text(rng));
    std::size_t total = 0;
    for (const auto& s : t.sentences) total += s.word_count;
    EXPECT_EQ(total, t.words.size());
    ASSERT_EQ(t.syllable_counts.size(), t.words.size());
    for (int s : t.syllable_counts) EXPECT_GE(s, 1);
  }
}

// ---------------------------------------------------------------------------
// Lexicons

TEST(Lexicon, ShippedFilesMatchCompiledDefaults) {
  EXPECT_EQ(LexiconSet::load_directory(std::string(POSIQUEUE_DATA_DIR) + "/lexicons"), LexiconSet::builtin());
}

TEST(Lexicon, ShipsEightCategories) {
  std::vector<std::string> names;
  for (const auto& [name, _] : lex().categories) names.push_back(name);
  EXPECT_EQ(names, (std::vector<std::string>{"affect", "certainty", "cognitive_processes", "function_words",
                                             "informal", "negative_emotion", "positive_emotion", "social"}));
  std::vector<std::string> strategies;
  for (const auto& s : lex().politeness) strategies.push_back(s.name);
  EXPECT_EQ(strategies.size(), 8u);
}

TEST(Lexicon, MissingFileFallsBackPerLexicon) {
  TempDir dir;
  spit(dir / "toxicity.tsv", "jerkface\t0.9\n");
  auto l = LexiconSet::load_directory(dir.path());
  EXPECT_EQ(l.toxicity_terms.size(), 1u);
  EXPECT_EQ(l.valence, lex().valence);
  EXPECT_THROW(LexiconSet::load_directory(dir / "nope"), Error);
}

TEST(Lexicon, RejectsOutOfRangeAndMalformedRows) {
  auto code = [](auto fn) { return error_code(fn); };
  EXPECT_EQ(code([] { LexiconSet::parse("", "w\t4.5\n", "", ""); }), ErrorCode::parse_error);
  EXPECT_EQ(code([] { LexiconSet::parse("", "", "w\t0\n", ""); }), ErrorCode::parse_error);
  EXPECT_EQ(code([] { LexiconSet::parse("", "", "", "s\t2\thi\n"); }), ErrorCode::parse_error);
  EXPECT_EQ(code([] { LexiconSet::parse("", "", "", "s\t1\thi\ns\t-1\tyo\n"); }), ErrorCode::parse_error);
  EXPECT_EQ(code([] { LexiconSet::parse("a b\n", "", "", ""); }), ErrorCode::parse_error);
  EXPECT_EQ(code([] { LexiconSet::parse("", "w\tx\n", "", ""); }), ErrorCode::parse_error);
}

// ---------------------------------------------------------------------------
// Extractors

TEST(CategoryProportions, ClosedForms) {
  auto all = category_proportions(tokenize("good great nice"), lex());
  EXPECT_DOUBLE_EQ(all.at("positive_emotion"), 100.0);
  EXPECT_DOUBLE_EQ(all.at("certainty"), 0.0);
  for (const auto& [_, v] : category_proportions(tokenize(""), lex())) EXPECT_EQ(v, 0.0);
  // "good" and "lovely" (stem love*) are the two affect words among eight.
  auto two = category_proportions(tokenize("good lovely chair table lamp door floor wall"), lex());
  EXPECT_DOUBLE_EQ(two.at("affect"), 25.0);
}

TEST(Sentiment, ClosedForms) {
  EXPECT_EQ(sentiment("", lex()), 0.0);
  EXPECT_EQ(sentiment("chair table", lex()), 0.0);
  EXPECT_NEAR(sentiment("wow", valence_only("wow\t3.0\n")), 3.0 / std::sqrt(24.0), 1e-9);
  EXPECT_NEAR(sentiment("good", lex()), 1.9 / std::sqrt(1.9 * 1.9 + 15.0), 1e-9);
  EXPECT_NEAR(sentiment("not good", lex()), -1.9 / std::sqrt(1.9 * 1.9 + 15.0), 1e-9);
  EXPECT_NEAR(sentiment("bad", lex()), -2.5 / std::sqrt(2.5 * 2.5 + 15.0), 1e-9);
}

TEST(Sentiment, NegationWindowIsThreeTokens) {
  auto l = valence_only("good\t2.0\n");
  double pos = 2.0 / std::sqrt(19.0);
  EXPECT_NEAR(sentiment("never a very good", l), -pos, 1e-12);
  EXPECT_NEAR(sentiment("never is a very good", l), pos, 1e-12);
  EXPECT_NEAR(sentiment("isn't good", l), -pos, 1e-12);
}

TEST(Sentiment, ClampsLargeSums) {
  std::string text;
  for (int i = 0; i < 500; ++i) text += "love ";
  double s = sentiment(text, lex());
  EXPECT_LE(s, 1.0);
  EXPECT_GT(s, 0.999);
}

TEST(Readability, ClosedForms) {
  EXPECT_NEAR(readability(tokenize("The cat sat.")), -2.62, 1e-9);
  EXPECT_EQ(readability(tokenize("")), 0.0);
  auto once = readability(tokenize("A considerable amount of work went in. It shows."));
  auto twice = readability(tokenize("A considerable amount of work went in. It shows. "
                                    "A considerable amount of work went in. It shows."));
  EXPECT_NEAR(once, twice, 1e-12);
}

TEST(Interrogative, ClosedForms) {
  EXPECT_DOUBLE_EQ(interrogative_ratio("Why? Because."), 0.5);
  EXPECT_EQ(interrogative_ratio(""), 0.0);
  EXPECT_DOUBLE_EQ(interrogative_ratio("Who? What? Where? Here."), 0.75);
  EXPECT_DOUBLE_EQ(interrogative_ratio("Really?!"), 1.0);
}

TEST(Politeness, Markers) {
  EXPECT_GT(politeness_score(tokenize("Thank you, please see above."), lex()), 0.0);
  EXPECT_DOUBLE_EQ(politeness_score(tokenize("Thank you, please see above."), lex()), 2.0);
  EXPECT_EQ(politeness_score(tokenize(""), lex()), 0.0);
  // one please (+1) and one sentence-initial "you" (-1)
  EXPECT_DOUBLE_EQ(politeness_score(tokenize("You should check please."), lex()), 0.0);
  // "you" only counts at the start of a sentence
  EXPECT_DOUBLE_EQ(politeness_score(tokenize("I told you."), lex()), 0.0);
  // "thank you" is matched once, not as "thank" plus another phrase
  EXPECT_DOUBLE_EQ(politeness_score(tokenize("Well thank you. Ok."), lex()), 0.5);
}

TEST(Toxicity, NoisyOr) {
  auto l = LexiconSet::parse("", "", "foo\t0.7\nbar\t0.5\nbaz\t0.5\n", "");
  EXPECT_EQ(toxicity_score(tokenize("hello there"), l), 0.0);
  EXPECT_NEAR(toxicity_score(tokenize("foo"), l), 0.7, 1e-12);
  EXPECT_NEAR(toxicity_score(tokenize("bar baz"), l), 0.75, 1e-12);
  EXPECT_NEAR(toxicity_score(tokenize("bar bar"), l), 0.75, 1e-12);
}

TEST(Toxicity, MonotoneInAddedTerms) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto text = random_text(rng);
    EXPECT_LE(toxicity_score(tokenize(text), lex()), toxicity_score(tokenize(text + " idiot"), lex()));
  }
}

TEST(Embedding, NormsAndDeterminism) {
  FeatureConfig cfg;
  auto zero = embed("", cfg);
  EXPECT_EQ(zero.size(), 384u);
  EXPECT_EQ(norm(zero), 0.0);
  auto a = embed("the quick brown fox", cfg);
  EXPECT_NEAR(norm(a), 1.0, 1e-9);
  EXPECT_EQ(a, embed("the quick brown fox", cfg));
  auto b = embed("the quick brown cat", cfg);
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  EXPECT_LT(dot, 1.0 - 1e-6);
  EXPECT_GT(dot, 0.0);
  EXPECT_EQ(embed("x", FeatureConfig{16}).size(), 16u);
  EXPECT_THROW(FeatureConfig{4}.validate(), Error);
}

// ---------------------------------------------------------------------------
// Whole vectors

TEST(Features, RangesHoldOnRandomText) {
  std::mt19937_64 rng(99);
  FeatureConfig cfg;
  for (int i = 0; i < 10000; ++i) {
    auto fv = extract_text_features(random_text(rng), lex(), cfg);
    for (const auto& [_, v] : fv.category_proportions) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 100.0);
    }
    ASSERT_GE(fv.sentiment, -1.0);
    ASSERT_LE(fv.sentiment, 1.0);
    ASSERT_GE(fv.interrogative_ratio, 0.0);
    ASSERT_LE(fv.interrogative_ratio, 1.0);
    ASSERT_GE(fv.toxicity, 0.0);
    ASSERT_LE(fv.toxicity, 1.0);
    double n = norm(fv.embedding);
    ASSERT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-9) << n;
  }
}

TEST(Features, RepetitionInvariance) {
  std::string text = "Great work here. Is it thoughtful? I think so!";
  auto base = extract_text_features(text, lex(), {});
  for (int k = 2; k <= 5; ++k) {
    std::string rep;
    for (int i = 0; i < k; ++i) rep += text + " ";
    auto fv = extract_text_features(rep, lex(), {});
    EXPECT_NEAR(fv.readability, base.readability, 1e-9);
    for (const auto& [name, v] : base.category_proportions) EXPECT_NEAR(fv.category_proportions.at(name), v, 1e-9);
  }
}

TEST(Features, EmptyCommentIsAllZero) {
  auto c = comment("c", "a", "p", "p", 1, 1, "");
  auto fv = extract_features(c, lex(), {});
  FeatureVector zero;
  for (const auto& [name, _] : lex().categories) zero.category_proportions[name] = 0.0;
  zero.embedding.assign(384, 0.0);
  EXPECT_EQ(fv, zero);
}

TEST(Features, PostWithoutTitleMatchesComment) {
  auto p = post("p", "a", 1, 1, "", "Same words here.");
  p.title.reset();
  auto c = comment("c", "a", "p", "p", 1, 1, "Same words here.");
  EXPECT_EQ(extract_features(p, lex(), {}), extract_features(c, lex(), {}));
  EXPECT_EQ(scoring_text(post("q", "a", 1, 1, "Head", "Body")), "Head\nBody");
}

TEST(Features, GoldenVector) {
  auto p = post("g1", "a", 1, 1, "Thanks for the great guide",
                "Please see the update. Is this helpful? I do not hate it, you idiot.");
  auto fv = extract_features(p, lex(), FeatureConfig{16});
  auto golden = json::parse(slurp(std::string(POSIQUEUE_GOLDEN_DIR) + "/feature_vector.json"));
  auto expected = feature_vector_from_json(golden);
  EXPECT_EQ(fv.category_proportions, expected.category_proportions);
  EXPECT_NEAR(fv.sentiment, expected.sentiment, 1e-12);
  EXPECT_NEAR(fv.readability, expected.readability, 1e-12);
  EXPECT_NEAR(fv.interrogative_ratio, expected.interrogative_ratio, 1e-12);
  EXPECT_NEAR(fv.politeness, expected.politeness, 1e-12);
  EXPECT_NEAR(fv.toxicity, expected.toxicity, 1e-12);
  ASSERT_EQ(fv.embedding.size(), expected.embedding.size());
  for (std::size_t i = 0; i < fv.embedding.size(); ++i) EXPECT_NEAR(fv.embedding[i], expected.embedding[i], 1e-12);
}

TEST(Features, FlattenMatchesNames) {
  auto fv = extract_text_features("Hello there.", lex(), FeatureConfig{8});
  EXPECT_EQ(flatten(fv).size(), feature_names(fv).size());
  EXPECT_EQ(feature_names(fv), feature_names(lex(), 8));
  EXPECT_EQ(feature_names(fv)[8], "sentiment");
}

TEST(FeatureCache, RoundTripAndDeterministicRewrite) {
  TempDir dir;
  auto corpus = small_corpus();
  auto cache = extract_corpus(corpus, lex(), FeatureConfig{32}, 3);
  EXPECT_EQ(cache.size(), corpus.contributions().size());
  write_feature_cache(cache, dir / "f.jsonl");
  auto back = read_feature_cache(dir / "f.jsonl");
  EXPECT_EQ(back.size(), cache.size());
  EXPECT_EQ(back.at("c3").embedding, cache.at("c3").embedding);
  write_feature_cache(extract_corpus(corpus, lex(), FeatureConfig{32}, 1), dir / "g.jsonl");
  EXPECT_EQ(slurp(dir / "f.jsonl"), slurp(dir / "g.jsonl"));
  spit(dir / "bad.jsonl", "{\"id\":\"x\"}\n");
  EXPECT_THROW(read_feature_cache(dir / "bad.jsonl"), Error);
}
