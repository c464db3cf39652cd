#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posiqueue/actions/bestof.hpp"
#include "posiqueue/actions/explain.hpp"
#include "posiqueue/actions/period.hpp"
#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/jsonl.hpp"

namespace posiqueue::actions {

enum class ActionType { curate, uncurate, explain, award, flair, highlight, unhighlight, upvote };

inline constexpr std::array kAllActions = {ActionType::curate, ActionType::uncurate,  ActionType::explain,
                                           ActionType::award,  ActionType::flair,     ActionType::highlight,
                                           ActionType::unhighlight, ActionType::upvote};

inline constexpr std::string_view to_token(ActionType a) {
  switch (a) {
    case ActionType::curate: return "curate";
    case ActionType::uncurate: return "uncurate";
    case ActionType::explain: return "explain";
    case ActionType::award: return "award";
    case ActionType::flair: return "flair";
    case ActionType::highlight: return "highlight";
    case ActionType::unhighlight: return "unhighlight";
    case ActionType::upvote: return "upvote";
  }
  return "curate";
}

inline std::optional<ActionType> parse_action(std::string_view s) {
  for (auto a : kAllActions)
    if (to_token(a) == s) return a;
  return std::nullopt;
}

inline constexpr std::size_t kHighlightCapacity = 6;

inline const std::vector<std::string>& default_flairs() {
  static const std::vector<std::string> flairs = {"Topic Flair", "Format Flair", "Mod Pick Flair"};
  return flairs;
}

struct ActionRecord {
  std::int64_t ts = 0;
  std::string moderator;
  ActionType action = ActionType::curate;
  std::string target_id;
  json payload = json::object();

  bool operator==(const ActionRecord&) const = default;
};

inline json to_json(const ActionRecord& r) {
  return json{{"ts", r.ts},
              {"moderator", r.moderator},
              {"action", to_token(r.action)},
              {"target_id", r.target_id},
              {"payload", r.payload}};
}

inline ActionRecord action_record_from_json(const json& j) {
  auto fail = [](const std::string& what) { return Error(ErrorCode::corrupt_log, what); };
  if (!j.is_object()) throw fail("record is not an object");
  for (const char* k : {"ts", "moderator", "action", "target_id"})
    if (!j.contains(k)) throw fail(std::string("missing field \"") + k + "\"");
  if (!j["ts"].is_number_integer()) throw fail("\"ts\" must be an integer");
  if (!j["moderator"].is_string() || !j["action"].is_string() || !j["target_id"].is_string())
    throw fail("\"moderator\", \"action\" and \"target_id\" must be strings");
  auto action = parse_action(j["action"].get<std::string>());
  if (!action) throw fail("unknown action \"" + j["action"].get<std::string>() + "\"");
  ActionRecord r{j["ts"].get<std::int64_t>(), j["moderator"].get<std::string>(), *action,
                 j["target_id"].get<std::string>(), j.value("payload", json::object())};
  if (r.payload.is_null()) r.payload = json::object();
  if (!r.payload.is_object()) throw fail("\"payload\" must be an object");
  return r;
}

/// Everything the action log determines.
struct DerivedState {
  std::map<std::int64_t, BestOfThread> threads;  // keyed by period_start
  std::vector<std::string> highlights;
  std::map<std::string, std::int64_t> awards;
  std::map<std::string, std::string> flairs;
  std::set<std::pair<std::string, std::string>> votes;  // (moderator, target)
  std::map<std::string, std::int64_t> score_delta;
  std::vector<Contribution> replies;
  std::vector<std::string> warnings;
  std::size_t applied = 0;

  bool operator==(const DerivedState&) const = default;

  const Contribution* find_reply(std::string_view id) const {
    for (const auto& r : replies)
      if (r.id == id) return &r;
    return nullptr;
  }

  bool is_highlighted(std::string_view id) const {
    return std::find(highlights.begin(), highlights.end(), id) != highlights.end();
  }

  bool is_curated(std::string_view id) const {
    return std::any_of(threads.begin(), threads.end(), [&](const auto& kv) { return kv.second.contains(id); });
  }

  std::int64_t award_count(std::string_view id) const {
    auto it = awards.find(std::string(id));
    return it == awards.end() ? 0 : it->second;
  }
};

inline json to_json(const DerivedState& s) {
  json threads = json::array(), replies = json::array(), votes = json::array();
  for (const auto& [_, t] : s.threads) threads.push_back(to_json(t));
  for (const auto& r : s.replies) replies.push_back(to_json(r));
  for (const auto& [m, t] : s.votes) votes.push_back(json{{"moderator", m}, {"target_id", t}});
  return json{{"threads", threads}, {"highlights", s.highlights}, {"awards", s.awards},
              {"flairs", s.flairs},   {"votes", votes},             {"score_delta", s.score_delta},
              {"replies", replies},   {"warnings", s.warnings},     {"applied", s.applied}};
}

inline std::string moderator_author_id(std::string_view moderator) { return "mod:" + std::string(moderator); }

/// Read-only inputs the fold needs besides the state itself.
struct FoldContext {
  const Corpus* corpus = nullptr;
  PeriodKind period = PeriodKind::weekly;
};

namespace engine_detail {

inline const Contribution* resolve(const FoldContext& ctx, const DerivedState& s, std::string_view id) {
  if (const auto* c = ctx.corpus ? ctx.corpus->find(id) : nullptr) return c;
  return s.find_reply(id);
}

inline std::string root_of(const Contribution& c) { return c.is_post() ? c.id : c.link_id.value_or(c.id); }

inline BestOfEntry make_entry(const Contribution& c, std::int64_t ts) {
  return BestOfEntry{c.id, c.is_post() ? c.title.value_or(c.body) : comment_preview(c.body), permalink(c), ts};
}

}  // namespace engine_detail

/// Applies one record. Validation happens before any mutation, so on a throw
/// the state is unchanged. Used both by the live engine and by replay.
inline void apply(DerivedState& s, const ActionRecord& r, const FoldContext& ctx) {
  using engine_detail::resolve;
  if (r.moderator.empty()) throw Error(ErrorCode::invalid_argument, "moderator must be non-empty");

  if (r.action == ActionType::uncurate) {
    auto p = period_containing(r.ts, ctx.period);
    auto it = s.threads.find(p.start);
    bool removed = false;
    if (it != s.threads.end()) {
      for (auto* section : {&it->second.submissions, &it->second.comments}) {
        auto e = std::find_if(section->begin(), section->end(), [&](const auto& x) { return x.id == r.target_id; });
        if (e != section->end()) {
          section->erase(e);
          removed = true;
        }
      }
    }
    if (!removed) s.warnings.push_back("uncurate " + r.target_id + ": not curated in the current period");
    ++s.applied;
    return;
  }

  const Contribution* target = resolve(ctx, s, r.target_id);
  if (!target) throw Error(ErrorCode::not_found, "unknown contribution " + r.target_id);

  switch (r.action) {
    case ActionType::curate: {
      auto p = period_containing(r.ts, ctx.period);
      auto it = s.threads.find(p.start);
      if (it == s.threads.end()) it = s.threads.emplace(p.start, empty_thread(p, ctx.period)).first;
      if (!it->second.contains(target->id)) {
        auto& section = target->is_post() ? it->second.submissions : it->second.comments;
        section.push_back(engine_detail::make_entry(*target, r.ts));
      }
      break;
    }
    case ActionType::explain: {
      auto text = r.payload.value("text", std::string{});
      auto reply_id = r.payload.value("reply_id", std::string{});
      if (text.empty()) throw Error(ErrorCode::empty_reason, "explanation text is empty");
      if (reply_id.empty()) throw Error(ErrorCode::invalid_argument, "explain record lacks reply_id");
      if (resolve(ctx, s, reply_id)) throw Error(ErrorCode::duplicate, "reply id " + reply_id + " already exists");
      Contribution reply;
      reply.id = reply_id;
      reply.kind = Kind::comment;
      reply.subreddit = target->subreddit;
      reply.body = text;
      reply.author_id = moderator_author_id(r.moderator);
      reply.created_utc = std::max(r.ts, target->created_utc);
      reply.score = 1;
      reply.parent_id = target->id;
      reply.link_id = engine_detail::root_of(*target);
      s.replies.push_back(std::move(reply));
      break;
    }
    case ActionType::award:
      ++s.awards[target->id];
      break;
    case ActionType::flair: {
      if (!target->is_post()) throw Error(ErrorCode::wrong_kind, "flair applies to posts only");
      auto name = r.payload.value("flair", std::string{});
      if (name.empty()) throw Error(ErrorCode::invalid_flair, "flair name is empty");
      s.flairs[target->id] = name;
      break;
    }
    case ActionType::highlight:
      if (!target->is_post()) throw Error(ErrorCode::wrong_kind, "only posts can be highlighted");
      if (s.is_highlighted(target->id)) throw Error(ErrorCode::duplicate, target->id + " is already highlighted");
      if (s.highlights.size() >= kHighlightCapacity)
        throw Error(ErrorCode::capacity, "highlight carousel already holds " + std::to_string(kHighlightCapacity));
      s.highlights.push_back(target->id);
      break;
    case ActionType::unhighlight: {
      auto it = std::find(s.highlights.begin(), s.highlights.end(), target->id);
      if (it == s.highlights.end()) throw Error(ErrorCode::not_highlighted, target->id + " is not highlighted");
      s.highlights.erase(it);
      break;
    }
    case ActionType::upvote:
      if (s.votes.count({r.moderator, target->id}))
        throw Error(ErrorCode::already_voted, r.moderator + " already upvoted " + target->id);
      s.votes.emplace(r.moderator, target->id);
      ++s.score_delta[target->id];
      break;
    case ActionType::uncurate:
      break;
  }
  ++s.applied;
}

/// Folds a whole log. A record that cannot be applied halts replay with
/// corrupt_log naming its 1-based position.
inline DerivedState replay_log(const std::vector<ActionRecord>& log, const FoldContext& ctx) {
  DerivedState s;
  for (std::size_t i = 0; i < log.size(); ++i) {
    try {
      apply(s, log[i], ctx);
    } catch (const Error& e) {
      throw Error(ErrorCode::corrupt_log, "action log record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return s;
}

inline std::vector<ActionRecord> read_action_log(const std::filesystem::path& path) {
  std::vector<ActionRecord> out;
  if (!std::filesystem::exists(path)) return out;
  auto in = jsonl::open_input(path);
  try {
    jsonl::for_each_record(in, [&](std::size_t line, const json& j) {
      try {
        out.push_back(action_record_from_json(j));
      } catch (const Error& e) {
        throw Error(ErrorCode::corrupt_log, "action log record at line " + std::to_string(line) + ": " + e.what());
      }
    });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse_error) throw Error(ErrorCode::corrupt_log, e.what());
    throw;
  }
  return out;
}

struct EngineOptions {
  PeriodKind period = PeriodKind::weekly;
  std::vector<std::string> flairs = default_flairs();
  std::optional<std::filesystem::path> log_path;  // append-only; replayed at startup when present
};

/// Single-writer owner of the action log and its derived state. Not
/// thread-safe; callers serialize mutations.
class ActionEngine {
 public:
  explicit ActionEngine(Corpus base, EngineOptions options = {})
      : base_(std::move(base)), options_(std::move(options)) {
    for (const auto& a : base_.authors())
      if (!moderator_since_ || a.created_utc < *moderator_since_) moderator_since_ = a.created_utc;
    if (options_.log_path) {
      log_ = read_action_log(*options_.log_path);
      state_ = replay_log(log_, context());
    }
    rebuild_overlay();
  }

  const Corpus& base() const { return base_; }
  /// Base corpus plus explanation replies.
  const Corpus& corpus() const { return overlay_; }
  const DerivedState& state() const { return state_; }
  const std::vector<ActionRecord>& log() const { return log_; }
  const EngineOptions& options() const { return options_; }
  FoldContext context() const { return FoldContext{&base_, options_.period}; }

  BestOfThread current_thread(std::int64_t now) const { return thread_for(period_containing(now, options_.period)); }

  BestOfThread thread_for(const Period& p) const {
    auto it = state_.threads.find(p.start);
    return it == state_.threads.end() ? empty_thread(p, options_.period) : it->second;
  }

  BestOfThread curate(std::string_view target, std::string_view moderator, std::int64_t now) {
    commit(make(ActionType::curate, target, moderator, now));
    return current_thread(now);
  }

  /// Returns the thread and, when the id was not curated, the warning.
  std::pair<BestOfThread, std::optional<std::string>> uncurate(std::string_view target, std::string_view moderator,
                                                               std::int64_t now) {
    auto before = state_.warnings.size();
    commit(make(ActionType::uncurate, target, moderator, now));
    std::optional<std::string> warning;
    if (state_.warnings.size() > before) warning = state_.warnings.back();
    return {current_thread(now), warning};
  }

  Contribution post_explanation(std::string_view target, const std::string& text, std::string_view moderator,
                                std::int64_t now, json details = json::object()) {
    auto r = make(ActionType::explain, target, moderator, now);
    r.payload = details.is_object() ? std::move(details) : json::object();
    r.payload["text"] = text;
    r.payload["reply_id"] = next_reply_id();
    commit(std::move(r));
    return state_.replies.back();
  }

  ActionRecord give_award(std::string_view target, std::string_view moderator, std::int64_t now) {
    return commit(make(ActionType::award, target, moderator, now));
  }

  ActionRecord set_flair(std::string_view target, const std::string& flair, std::string_view moderator,
                         std::int64_t now) {
    if (std::find(options_.flairs.begin(), options_.flairs.end(), flair) == options_.flairs.end())
      throw Error(ErrorCode::invalid_flair, "unknown flair \"" + flair + "\"");
    auto r = make(ActionType::flair, target, moderator, now);
    r.payload["flair"] = flair;
    return commit(std::move(r));
  }

  const std::vector<std::string>& add_highlight(std::string_view target, std::string_view moderator,
                                                std::int64_t now) {
    commit(make(ActionType::highlight, target, moderator, now));
    return state_.highlights;
  }

  const std::vector<std::string>& remove_highlight(std::string_view target, std::string_view moderator,
                                                   std::int64_t now) {
    commit(make(ActionType::unhighlight, target, moderator, now));
    return state_.highlights;
  }

  ActionRecord upvote(std::string_view target, std::string_view moderator, std::int64_t now) {
    return commit(make(ActionType::upvote, target, moderator, now));
  }

  std::int64_t award_count(std::string_view id) const { return state_.award_count(id); }

  std::optional<std::string> flair_of(const Contribution& c) const {
    auto it = state_.flairs.find(c.id);
    return it != state_.flairs.end() ? std::optional<std::string>(it->second) : c.flair;
  }

 private:
  static ActionRecord make(ActionType a, std::string_view target, std::string_view moderator, std::int64_t now) {
    return ActionRecord{now, std::string(moderator), a, std::string(target), json::object()};
  }

  std::string next_reply_id() const {
    for (std::size_t n = state_.replies.size() + 1;; ++n) {
      auto id = "x" + std::to_string(n);
      if (!overlay_.find(id)) return id;
    }
  }

  ActionRecord commit(ActionRecord r) {
    DerivedState next = state_;
    apply(next, r, context());
    if (options_.log_path) {
      std::ofstream out(*options_.log_path, std::ios::app | std::ios::binary);
      if (!out) throw Error(ErrorCode::io_error, "cannot append to " + options_.log_path->string());
      out << jsonl::dump_line(to_json(r)) << '\n';
      out.flush();
      if (!out) throw Error(ErrorCode::io_error, "append failed for " + options_.log_path->string());
    }
    state_ = std::move(next);
    log_.push_back(r);
    if (r.action == ActionType::explain) rebuild_overlay();
    return r;
  }

  void rebuild_overlay() {
    if (state_.replies.empty()) {
      overlay_ = base_;
      return;
    }
    std::set<std::string> mods;
    for (const auto& rep : state_.replies) mods.insert(rep.author_id);
    std::vector<Author> authors;
    for (const auto& id : mods) {
      if (base_.find_author(id)) continue;
      authors.push_back(Author{id, id.substr(4), 1, moderator_since_.value_or(0), json::object()});
    }
    overlay_ = base_.with_additions(std::move(authors), state_.replies);
  }

  Corpus base_;
  EngineOptions options_;
  std::optional<std::int64_t> moderator_since_;
  DerivedState state_;
  std::vector<ActionRecord> log_;
  Corpus overlay_;
};

}  // namespace posiqueue::actions
