#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "oracles.hpp"
#include "posiqueue/actions/engine.hpp"
#include "support.hpp"

using namespace posiqueue;
using namespace posiqueue::actions;
using namespace testsupport;

namespace {

constexpr std::int64_t kTuesday = 1700000000;  // 2023-11-14, ISO week 46
constexpr std::int64_t kWeek46 = 1699833600;    // Monday 2023-11-13 00:00 UTC
constexpr std::int64_t kWeek = 7 * kSecondsPerDay;

Corpus seven_posts() {
  std::vector<Author> authors = {author("a", 0)};
  std::vector<Contribution> cs;
  for (int i = 1; i <= 7; ++i) cs.push_back(post("h" + std::to_string(i), "a", 100 + i));
  cs.push_back(comment("hc", "a", "h1", "h1", 200));
  return Corpus::build(authors, cs);
}

ExplainReason reason(std::string id) {
  for (const auto& r : default_reasons())
    if (r.id == id) return r;
  return {id, id, ReasonOrigin::custom};
}

}  // namespace

// ---------------------------------------------------------------------------
// Explanations

TEST(Explanation, Goldens) {
  EXPECT_EQ(build_explanation(Kind::post, {reason("creative"), reason("helpful")}, {"Supportive"}),
            "The moderators like this post because it is creative, helpful, and supportive.");
  EXPECT_EQ(build_explanation(Kind::comment, {reason("funny")}, {}),
            "The moderators like this comment because it is funny.");
  EXPECT_EQ(build_explanation(Kind::post, {reason("high_effort")}, {"  well sourced "}),
            "The moderators like this post because it is high effort and well sourced.");
}

TEST(Explanation, BlanksAndRepeatsDropped) {
  EXPECT_EQ(build_explanation(Kind::post, {reason("helpful")}, {"HELPFUL", "", "  "}),
            "The moderators like this post because it is helpful.");
  EXPECT_EQ(error_code([] { build_explanation(Kind::post, {}, {" ", ""}); }), ErrorCode::empty_reason);
}

TEST(ReasonStore, DefaultsCustomAndDuplicates) {
  ReasonStore store;
  EXPECT_EQ(store.list().size(), kDefaultReasons.size());
  auto r = store.add_custom("  Kind words ");
  EXPECT_EQ(r.id, "kind_words");
  EXPECT_EQ(r.label, "Kind words");
  EXPECT_EQ(r.origin, ReasonOrigin::custom);
  EXPECT_EQ(error_code([&] { store.add_custom("kind WORDS"); }), ErrorCode::duplicate);
  EXPECT_EQ(error_code([&] { store.add_custom("Creative"); }), ErrorCode::duplicate);
  EXPECT_EQ(error_code([&] { store.add_custom(" \t"); }), ErrorCode::empty_reason);
  EXPECT_EQ(store.add_custom("Creative!").id, "creative_2");
  EXPECT_EQ(store.find("KIND WORDS")->id, "kind_words");
  EXPECT_EQ(store.find("helpful")->label, "Helpful");
  EXPECT_FALSE(store.find("nope"));
}

TEST(ReasonStore, PersistsAcrossInstances) {
  TempDir dir;
  {
    ReasonStore store(dir / "reasons.jsonl");
    store.add_custom("Patient");
    store.add_custom("Brave");
  }
  ReasonStore again(dir / "reasons.jsonl");
  ASSERT_EQ(again.list().size(), kDefaultReasons.size() + 2);
  EXPECT_EQ(again.list()[kDefaultReasons.size()].label, "Patient");
  EXPECT_EQ(again.list().back().id, "brave");
  EXPECT_EQ(error_code([&] { again.add_custom("patient"); }), ErrorCode::duplicate);
}

// ---------------------------------------------------------------------------
// Periods

TEST(Period, WeeklyAndMonthly) {
  EXPECT_EQ(period_containing(kTuesday, PeriodKind::weekly), (Period{kWeek46, kWeek46 + kWeek}));
  EXPECT_EQ(period_containing(kWeek46, PeriodKind::weekly).start, kWeek46);
  EXPECT_EQ(period_containing(kWeek46 - 1, PeriodKind::weekly).start, kWeek46 - kWeek);
  // the epoch was a Thursday
  EXPECT_EQ(period_containing(0, PeriodKind::weekly).start, -3 * kSecondsPerDay);
  EXPECT_EQ(period_containing(kTuesday, PeriodKind::monthly), (Period{1698796800, 1701388800}));
  EXPECT_EQ(iso_date(kWeek46), "2023-11-13");
}

TEST(Period, Parsing) {
  EXPECT_EQ(parse_period("2023-W46"), std::make_pair(PeriodKind::weekly, Period{kWeek46, kWeek46 + kWeek}));
  EXPECT_EQ(parse_period("2023-11").second, (Period{1698796800, 1701388800}));
  EXPECT_EQ(iso_date(parse_period("2020-W53").second.start), "2020-12-28");
  EXPECT_EQ(iso_date(parse_period("2021-W01").second.start), "2021-01-04");
  for (const char* bad : {"2021-W53", "2023-13", "2023-00", "2023-W00", "abc", "2023-W4", "1969-01", "2023/11"})
    EXPECT_EQ(error_code([&] { parse_period(bad); }), ErrorCode::invalid_argument) << bad;
  EXPECT_EQ(parse_period_kind("month"), PeriodKind::monthly);
  EXPECT_EQ(parse_period_kind("daily"), std::nullopt);
}

// ---------------------------------------------------------------------------
// Best-of threads

TEST(BestOf, MatchesGoldenFile) {
  ActionEngine engine(small_corpus());
  engine.curate("p1", "alice", kTuesday);
  engine.curate("c3", "alice", kTuesday + 10);
  auto thread = engine.curate("p2", "bob", kTuesday + 20);
  EXPECT_EQ(render_bestof(thread), slurp(fs::path(POSIQUEUE_GOLDEN_DIR) / "bestof_two_posts_one_comment.md"));
  EXPECT_EQ(bestof_filename(thread), "bestof-2023-11-13.md");
  EXPECT_EQ(thread.comments[0].curated_at, kTuesday + 10);
}

TEST(BestOf, CurateIsIdempotentAndUncurateInverts) {
  ActionEngine engine(small_corpus());
  auto empty = engine.current_thread(kTuesday);
  auto once = engine.curate("c1", "alice", kTuesday);
  auto twice = engine.curate("c1", "bob", kTuesday + 60);
  EXPECT_EQ(once, twice);
  auto [after, warning] = engine.uncurate("c1", "alice", kTuesday + 120);
  EXPECT_FALSE(warning);
  EXPECT_EQ(after, empty);
  EXPECT_FALSE(engine.state().is_curated("c1"));

  auto [again, warned] = engine.uncurate("c1", "alice", kTuesday + 180);
  ASSERT_TRUE(warned);
  EXPECT_NE(warned->find("not curated"), std::string::npos);
  EXPECT_EQ(again, empty);
}

TEST(BestOf, EmptySectionsShowPlaceholder) {
  auto t = empty_thread(Period{kWeek46, kWeek46 + kWeek}, PeriodKind::weekly);
  EXPECT_EQ(render_bestof(t), "# Best of the week\n\n## Submissions\n\n—\n\n## Comments\n\n—\n");
  EXPECT_EQ(empty_thread(Period{}, PeriodKind::monthly).title, "Best of the month");
}

TEST(BestOf, RollsOverAtPeriodBoundary) {
  ActionEngine engine(small_corpus());
  engine.curate("p1", "alice", kWeek46 + kWeek - 1);
  auto next = engine.curate("p2", "alice", kWeek46 + kWeek);
  ASSERT_EQ(next.submissions.size(), 1u);
  EXPECT_EQ(next.submissions[0].id, "p2");
  EXPECT_EQ(engine.state().threads.size(), 2u);
  EXPECT_EQ(engine.thread_for(Period{kWeek46, kWeek46 + kWeek}).submissions[0].id, "p1");
  // uncurating in the new week leaves last week's thread alone
  auto [_, warning] = engine.uncurate("p1", "alice", kWeek46 + kWeek + 5);
  EXPECT_TRUE(warning);
  EXPECT_TRUE(engine.state().is_curated("p1"));
}

TEST(BestOf, CommentPreview) {
  EXPECT_EQ(comment_preview("  a\n\nb\tc  "), "a b c");
  std::string words;
  for (int i = 0; i < 80; ++i) words += "word ";
  auto p = comment_preview(words);
  EXPECT_LE(bestof_detail::count_code_points(p), kPreviewChars);
  EXPECT_EQ(p.substr(p.size() - 3), "…");
  EXPECT_EQ(p.substr(p.size() - 7), "word…");
  std::string accents;
  for (int i = 0; i < 300; ++i) accents += "é";
  auto q = comment_preview(accents);
  EXPECT_EQ(bestof_detail::count_code_points(q), kPreviewChars);
  EXPECT_EQ(escape_link_text("[x]\n"), "\\[x\\] ");
}

// ---------------------------------------------------------------------------
// Highlights, flair, votes, awards, replies

TEST(Highlight, CapacityAndErrors) {
  ActionEngine engine(seven_posts());
  for (int i = 1; i <= 6; ++i) engine.add_highlight("h" + std::to_string(i), "alice", i);
  EXPECT_EQ(error_code([&] { engine.add_highlight("h7", "alice", 7); }), ErrorCode::capacity);
  EXPECT_EQ(engine.state().highlights.size(), 6u);
  EXPECT_EQ(error_code([&] { engine.add_highlight("h1", "alice", 8); }), ErrorCode::duplicate);
  EXPECT_EQ(error_code([&] { engine.add_highlight("hc", "alice", 8); }), ErrorCode::wrong_kind);
  EXPECT_EQ(error_code([&] { engine.add_highlight("zz", "alice", 8); }), ErrorCode::not_found);
  auto after = engine.remove_highlight("h3", "bob", 9);
  EXPECT_EQ(after, (std::vector<std::string>{"h1", "h2", "h4", "h5", "h6"}));
  EXPECT_EQ(error_code([&] { engine.remove_highlight("h3", "bob", 10); }), ErrorCode::not_highlighted);
  engine.add_highlight("h7", "alice", 11);
  EXPECT_EQ(engine.state().highlights.back(), "h7");
  EXPECT_EQ(engine.log().size(), 8u);  // rejected actions leave no record
}

TEST(Flair, ValidationAndOverride) {
  ActionEngine engine(small_corpus());
  EXPECT_EQ(error_code([&] { engine.set_flair("p1", "Not A Flair", "alice", 1); }), ErrorCode::invalid_flair);
  EXPECT_EQ(error_code([&] { engine.set_flair("c1", "Topic Flair", "alice", 1); }), ErrorCode::wrong_kind);
  engine.set_flair("p1", "Topic Flair", "alice", 1);
  engine.set_flair("p1", "Mod Pick Flair", "bob", 2);
  EXPECT_EQ(engine.flair_of(engine.corpus().at("p1")), "Mod Pick Flair");
  EXPECT_EQ(engine.flair_of(engine.corpus().at("p2")), std::nullopt);
}

TEST(Votes, OncePerModeratorAndTarget) {
  ActionEngine engine(small_corpus());
  engine.upvote("c2", "alice", 1);
  EXPECT_EQ(error_code([&] { engine.upvote("c2", "alice", 2); }), ErrorCode::already_voted);
  engine.upvote("c2", "bob", 3);
  engine.upvote("p1", "alice", 4);
  EXPECT_EQ(engine.state().score_delta.at("c2"), 2);
  EXPECT_EQ(engine.state().score_delta.at("p1"), 1);
}

TEST(Awards, Accumulate) {
  ActionEngine engine(small_corpus());
  engine.give_award("c4", "alice", 1);
  engine.give_award("c4", "alice", 2);
  EXPECT_EQ(engine.award_count("c4"), 2);
  EXPECT_EQ(engine.award_count("p1"), 0);
  EXPECT_EQ(error_code([&] { engine.give_award("nope", "alice", 3); }), ErrorCode::not_found);
  EXPECT_EQ(error_code([&] { engine.give_award("c4", "", 3); }), ErrorCode::invalid_argument);
}

TEST(Explain, RepliesJoinTheCorpus) {
  ActionEngine engine(small_corpus());
  auto r1 = engine.post_explanation("c1", "The moderators like this comment because it is kind.", "alice", kTuesday);
  EXPECT_EQ(r1.id, "x1");
  EXPECT_EQ(r1.parent_id, "c1");
  EXPECT_EQ(r1.link_id, "p1");
  EXPECT_EQ(r1.author_id, "mod:alice");
  EXPECT_EQ(r1.kind, Kind::comment);
  ASSERT_NE(engine.corpus().find("x1"), nullptr);
  EXPECT_EQ(engine.base().find("x1"), nullptr);
  EXPECT_NE(engine.corpus().find_author("mod:alice"), nullptr);

  auto r2 = engine.post_explanation("p2", "text", "bob", kTuesday + 1);
  EXPECT_EQ(r2.id, "x2");
  EXPECT_EQ(r2.link_id, "p2");
  // a reply can itself be explained, and curated
  auto r3 = engine.post_explanation("x1", "text", "bob", kTuesday + 2);
  EXPECT_EQ(r3.link_id, "p1");
  auto t = engine.curate("x1", "bob", kTuesday + 3);
  EXPECT_EQ(t.comments.at(0).permalink, "/r/test/comments/p1/_/x1/");
  EXPECT_EQ(error_code([&] { engine.post_explanation("p1", "", "bob", kTuesday); }), ErrorCode::empty_reason);
  EXPECT_EQ(engine.log()[2].payload.at("reply_id"), "x3");
}

// ---------------------------------------------------------------------------
// Event sourcing

TEST(EventSourcing, ReplayMatchesLiveStateUnderFuzz) {
  TempDir dir;
  auto log = dir / "actions.jsonl";
  EngineOptions opts;
  opts.log_path = log;
  auto corpus = seven_posts();
  ActionEngine engine(corpus, opts);
  oracle::ActionFuzzer fuzz;
  fuzz.rng.seed(2024);
  fuzz.targets = oracle::fuzz_targets(corpus);
  fuzz.flairs = default_flairs();
  fuzz.now = kTuesday;
  for (int i = 0; i < 3000; ++i) {
    fuzz.step(engine);
    ASSERT_LE(engine.state().highlights.size(), kHighlightCapacity);
  }
  EXPECT_GT(fuzz.accepted, 500u);
  EXPECT_GT(fuzz.rejected, 100u);
  EXPECT_EQ(engine.log().size(), fuzz.accepted);
  EXPECT_EQ(read_action_log(log), engine.log());
  EXPECT_EQ(replay_log(engine.log(), engine.context()), engine.state());

  ActionEngine reopened(corpus, opts);
  EXPECT_EQ(reopened.state(), engine.state());
  EXPECT_EQ(reopened.corpus(), engine.corpus());
}

TEST(EventSourcing, RecordJsonRoundTrip) {
  ActionRecord r{42, "alice", ActionType::flair, "p1", json{{"flair", "Topic Flair"}}};
  EXPECT_EQ(action_record_from_json(to_json(r)), r);
  auto j = to_json(r);
  j.erase("payload");
  EXPECT_EQ(action_record_from_json(j).payload, json::object());
}

TEST(EventSourcing, CorruptLogs) {
  TempDir dir;
  auto code = [&](const std::string& text) {
    spit(dir / "log.jsonl", text);
    return error_code([&] { ActionEngine(small_corpus(), EngineOptions{PeriodKind::weekly, default_flairs(), dir / "log.jsonl"}); });
  };
  EXPECT_EQ(code("{not json\n"), ErrorCode::corrupt_log);
  EXPECT_EQ(code(R"({"ts":1,"moderator":"a","action":"smite","target_id":"p1"})" "\n"), ErrorCode::corrupt_log);
  EXPECT_EQ(code(R"({"ts":"1","moderator":"a","action":"award","target_id":"p1"})" "\n"), ErrorCode::corrupt_log);
  EXPECT_EQ(code(R"({"ts":1,"moderator":"a","action":"award"})" "\n"), ErrorCode::corrupt_log);
  // well-formed but not applicable
  EXPECT_EQ(code(R"({"ts":1,"moderator":"a","action":"unhighlight","target_id":"p1"})" "\n"), ErrorCode::corrupt_log);
  EXPECT_EQ(code(R"({"ts":1,"moderator":"a","action":"award","target_id":"p1"})" "\n"), std::nullopt);
  EXPECT_EQ(code(""), std::nullopt);
}

TEST(EventSourcing, FailedActionLeavesStateUntouched) {
  ActionEngine engine(small_corpus());
  engine.upvote("p1", "alice", 1);
  auto before = engine.state();
  EXPECT_TRUE(error_code([&] { engine.upvote("p1", "alice", 2); }));
  EXPECT_TRUE(error_code([&] { engine.post_explanation("zz", "t", "alice", 2); }));
  EXPECT_EQ(engine.state(), before);
  EXPECT_EQ(engine.log().size(), 1u);
}
