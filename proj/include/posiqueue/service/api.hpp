#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posiqueue/actions/bestof.hpp"
#include "posiqueue/actions/engine.hpp"
#include "posiqueue/actions/explain.hpp"
#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/model/gbdt.hpp"
#include "posiqueue/queue/queue.hpp"
#include "posiqueue/service/config.hpp"
#include "posiqueue/service/snapshot.hpp"
#include "posiqueue/textfeat/features.hpp"
#include "posiqueue/textfeat/lexicon.hpp"

namespace posiqueue::service {

inline constexpr int kDefaultPageSize = 25;
inline constexpr int kMaxPageSize = 100;

struct Request {
  std::string method = "GET";
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string body;
  std::map<std::string, std::string> headers;  // lowercase names

  std::optional<std::string> param(const std::string& name) const {
    auto [lo, hi] = query.equal_range(name);
    if (lo == hi) return std::nullopt;
    return std::prev(hi)->second;
  }

  std::vector<std::string> params(const std::string& name) const {
    std::vector<std::string> out;
    auto [lo, hi] = query.equal_range(name);
    for (auto it = lo; it != hi; ++it) out.push_back(it->second);
    return out;
  }
};

struct Response {
  int status = 200;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  json json_body() const { return body.empty() ? json() : json::parse(body); }
};

using Clock = std::function<std::int64_t()>;

inline Clock system_clock() {
  return [] { return static_cast<std::int64_t>(std::time(nullptr)); };
}

struct ApiOptions {
  std::string moderator = "moderator";
  std::string auth_token;
  std::string cors_origin = "*";
  double newcomer_threshold_days = queue::kDefaultNewcomerDays;
  std::optional<std::filesystem::path> bestof_dir;
};

/// Request failure with an explicit status and machine-readable code.
struct HttpError {
  int status;
  std::string code;
  std::string detail;
};

namespace api_detail {

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_number(const std::string& name, const std::string& raw) {
  const char* begin = raw.data();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (raw.empty() || end != begin + raw.size() || errno == ERANGE || !std::isfinite(v))
    throw HttpError{400, "invalid_argument", name + " must be a finite number, got \"" + raw + "\""};
  return v;
}

inline int parse_int(const std::string& name, const std::string& raw) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size())
    throw HttpError{400, "invalid_argument", name + " must be an integer, got \"" + raw + "\""};
  return v;
}

inline int status_for(ErrorCode code, bool mutation) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::duplicate:
    case ErrorCode::capacity:
    case ErrorCode::already_voted:
    case ErrorCode::not_highlighted: return 409;
    case ErrorCode::invalid_flair:
    case ErrorCode::empty_reason:
    case ErrorCode::wrong_kind: return 422;
    case ErrorCode::invalid_argument: return mutation ? 422 : 400;
    case ErrorCode::parse_error: return 400;
    default: return 500;
  }
}

}  // namespace api_detail

/// Transport-independent HTTP+JSON front end. Reads are served from an
/// immutable snapshot; mutations serialize through one writer and publish a
/// fresh snapshot.
class Api {
 public:
  Api(actions::ActionEngine engine, Scorer scorer, actions::ReasonStore reasons, ApiOptions options = {},
      Clock clock = system_clock())
      : engine_(std::move(engine)),
        scorer_(std::move(scorer)),
        reasons_(std::move(reasons)),
        options_(std::move(options)),
        clock_(std::move(clock)) {
    publish();
  }

  static std::unique_ptr<Api> from_config(const ServiceConfig& c, Clock clock = system_clock()) {
    check_inputs(c);
    auto corpus = ingest_corpus_dir(c.corpus_dir);
    auto post_model = model::load_model(c.post_model);
    auto comment_model = model::load_model(c.comment_model);
    auto lex = c.lexicon_dir ? textfeat::LexiconSet::load_directory(*c.lexicon_dir) : textfeat::LexiconSet::builtin();
    textfeat::FeatureCache pre;
    if (c.features) pre = textfeat::read_feature_cache(*c.features);
    actions::EngineOptions eo;
    eo.period = c.bestof_period;
    eo.flairs = c.flairs;
    eo.log_path = c.action_log;
    ApiOptions ao;
    ao.moderator = c.moderator;
    ao.auth_token = c.auth_token;
    ao.cors_origin = c.cors_origin;
    ao.newcomer_threshold_days = c.newcomer_threshold_days;
    ao.bestof_dir = c.bestof_dir;
    return std::make_unique<Api>(actions::ActionEngine(std::move(corpus), std::move(eo)),
                                 Scorer(std::move(post_model), std::move(comment_model), std::move(lex), std::move(pre)),
                                 c.reasons ? actions::ReasonStore(*c.reasons) : actions::ReasonStore(), std::move(ao),
                                 std::move(clock));
  }

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return snapshot_;
  }

  Response handle(const Request& req) { return dispatch(req); }

 private:
  // -------------------------------------------------------------------------
  // Dispatch

  Response dispatch(const Request& req) {
    Response res;
    bool mutation = req.method == "POST" || req.method == "PUT";
    try {
      if (req.method == "OPTIONS") {
        res.status = 204;
      } else {
        auto segs = api_detail::split_path(req.path);
        if (segs.empty() || segs[0] != "api") throw HttpError{404, "not_found", "no route for " + req.path};
        bool health = segs.size() == 2 && segs[1] == "health";
        if (!health && !options_.auth_token.empty()) {
          auto it = req.headers.find("authorization");
          if (it == req.headers.end() || it->second != "Bearer " + options_.auth_token)
            throw HttpError{401, "unauthorized", "missing or invalid bearer token"};
        }
        res.body = route(req, segs).dump(-1, ' ', false, json::error_handler_t::replace);
      }
    } catch (const HttpError& e) {
      res = error_response(e.status, e.code, e.detail);
    } catch (const Error& e) {
      res = error_response(api_detail::status_for(e.code(), mutation), std::string(to_token(e.code())), e.what());
    } catch (const std::exception& e) {
      res = error_response(500, "internal", e.what());
    }
    res.headers.emplace_back("Content-Type", "application/json");
    res.headers.emplace_back("Access-Control-Allow-Origin", options_.cors_origin);
    res.headers.emplace_back("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.headers.emplace_back("Access-Control-Allow-Headers", "Authorization, Content-Type");
    return res;
  }

  static Response error_response(int status, const std::string& code, const std::string& detail) {
    Response r;
    r.status = status;
    r.body = json{{"error", code}, {"detail", detail}}.dump(-1, ' ', false, json::error_handler_t::replace);
    return r;
  }

  static void require_method(const Request& req, std::initializer_list<const char*> allowed) {
    for (const char* m : allowed)
      if (req.method == m) return;
    throw HttpError{405, "method_not_allowed", req.method + " is not allowed on " + req.path};
  }

  json route(const Request& req, const std::vector<std::string>& s) {
    const auto n = s.size();
    if (n == 2 && s[1] == "health") return require_method(req, {"GET"}), json{{"status", "ok"}};
    if (n == 2 && s[1] == "queue") return require_method(req, {"GET"}), get_queue(req);
    if (n == 3 && s[1] == "posts") return require_method(req, {"GET"}), get_post(s[2]);
    if (n == 4 && s[1] == "posts" && s[3] == "hover") return require_method(req, {"GET"}), post_hover(s[2]);
    if (n == 4 && s[1] == "comments" && s[3] == "hover") return require_method(req, {"GET"}), comment_hover(s[2]);
    if (n == 3 && s[1] == "filters" && s[2] == "meta") return require_method(req, {"GET"}), filters_meta();
    if (n == 3 && s[1] == "actions") return require_method(req, {"POST"}), post_action(s[2], req.body);
    if (n == 3 && s[1] == "bestof" && s[2] == "current") return require_method(req, {"GET"}), bestof_current();
    if (n == 2 && s[1] == "bestof") return require_method(req, {"GET"}), bestof_period(req);
    if (n == 2 && s[1] == "highlights") return require_method(req, {"GET"}), get_highlights();
    if (n == 3 && s[1] == "explain" && s[2] == "preview") return require_method(req, {"GET"}), explain_preview(req);
    if (n == 2 && s[1] == "config") return require_method(req, {"GET"}), get_config();
    if (n == 3 && s[1] == "config" && s[2] == "reasons") {
      require_method(req, {"GET", "PUT"});
      return req.method == "GET" ? reasons_json() : put_reasons(req.body);
    }
    throw HttpError{404, "not_found", "no route for " + req.path};
  }

  // -------------------------------------------------------------------------
  // Views

  json author_view(const Snapshot& snap, const Contribution& c) const {
    const auto& a = snap.corpus.author_of(c);
    double age_days = static_cast<double>(c.created_utc - a.created_utc) / kSecondsPerDay;
    bool newcomer = age_days < snap.newcomer_threshold_days;
    return json{{"id", a.id}, {"name", a.name}, {"karma", a.karma}, {"account_age_days", age_days},
                {"newcomer", newcomer}};
  }

  json item_view(const Snapshot& snap, const Contribution& c) const {
    auto cue = snap.cue_of(c);
    auto flair = snap.flair_of(c);
    json v{{"id", c.id},
           {"kind", to_token(c.kind)},
           {"subreddit", c.subreddit},
           {"title", c.title ? json(*c.title) : json()},
           {"body", c.body},
           {"created_utc", c.created_utc},
           {"score", snap.score_of(c)},
           {"num_reports", c.num_reports},
           {"permalink", actions::permalink(c)},
           {"desirability_score", snap.desirability_of(c)},
           {"cue", to_token(cue)},
           {"cue_label", queue::label(cue)},
           {"cue_color", queue::color_token(cue)},
           {"author", author_view(snap, c)},
           {"award_count", snap.state.award_count(c.id)},
           {"flair", flair ? json(*flair) : json()},
           {"curated", snap.state.is_curated(c.id)},
           {"highlighted", snap.state.is_highlighted(c.id)}};
    if (c.is_post()) {
      const auto& m = queue::metrics_for(snap.metrics, c.id);
      v["aggregates"] = json{{"avg_comment_desirability", m.aggregates.avg_comment_desirability},
                             {"avg_comment_score", m.aggregates.avg_comment_score},
                             {"newcomer_commenters", m.aggregates.newcomer_commenters}};
      v["comment_count"] = snap.corpus.comments_of(c.id).size();
    } else {
      v["parent_id"] = c.parent_id.value_or("");
      v["link_id"] = c.link_id.value_or("");
    }
    return v;
  }

  json comment_tree(const Snapshot& snap, const Contribution& parent) const {
    json out = json::array();
    for (const auto* child : snap.corpus.children_of(parent.id)) {
      auto v = item_view(snap, *child);
      v["replies"] = comment_tree(snap, *child);
      out.push_back(std::move(v));
    }
    return out;
  }

  // -------------------------------------------------------------------------
  // Read routes

  json get_queue(const Request& req) const {
    auto snap = snapshot();
    auto sort = queue::SortKey::newest;
    if (auto token = req.param("sort")) {
      auto k = queue::parse_sort_key(*token);
      if (!k) throw HttpError{400, "invalid_argument", "unknown sort \"" + *token + "\""};
      sort = *k;
    }
    queue::FilterSpec spec;
    json echo = json::object();
    for (auto m : queue::kAllMetrics) {
      auto name = queue::filter_token(m);
      if (auto raw = req.param(name)) {
        spec[m] = api_detail::parse_number(name, *raw);
        echo[name] = *spec[m];
      }
    }
    spec.validate();
    int page = req.param("page") ? api_detail::parse_int("page", *req.param("page")) : 1;
    int page_size = req.param("page_size") ? api_detail::parse_int("page_size", *req.param("page_size"))
                                           : kDefaultPageSize;
    if (page < 1) throw HttpError{400, "invalid_argument", "page must be >= 1"};
    if (page_size < 1 || page_size > kMaxPageSize)
      throw HttpError{400, "invalid_argument", "page_size must be within [1, " + std::to_string(kMaxPageSize) + "]"};

    auto ordered = queue::sort_queue(queue::filter_queue(snap->corpus.posts(), spec, snap->metrics), sort,
                                     snap->metrics);
    const auto total = ordered.size();
    const std::size_t pages = total == 0 ? 1 : (total + page_size - 1) / page_size;
    if (static_cast<std::size_t>(page) > pages)
      throw HttpError{422, "page_out_of_range",
                      "page " + std::to_string(page) + " is beyond the last page " + std::to_string(pages)};
    json items = json::array();
    const std::size_t first = static_cast<std::size_t>(page - 1) * page_size;
    for (std::size_t i = first; i < std::min(total, first + page_size); ++i)
      items.push_back(item_view(*snap, *ordered[i]));
    return json{{"items", items},         {"total", total},   {"page", page},
                {"page_size", page_size}, {"pages", pages},   {"sort", to_token(sort)},
                {"filters", echo}};
  }

  const Contribution& resolve_kind(const Snapshot& snap, const std::string& id, Kind want) const {
    const auto* c = snap.corpus.find(id);
    if (!c) throw HttpError{404, "not_found", "unknown contribution " + id};
    if (c->kind != want) {
      auto other = want == Kind::post ? "/api/comments/" : "/api/posts/";
      throw HttpError{404, "not_found",
                      id + " is a " + std::string(to_token(c->kind)) + "; use " + other + id +
                          (want == Kind::post && c->kind == Kind::comment ? "/hover" : "")};
    }
    return *c;
  }

  json get_post(const std::string& id) const {
    auto snap = snapshot();
    const auto* c = snap->corpus.find(id);
    if (!c) throw HttpError{404, "not_found", "unknown post " + id};
    if (!c->is_post())
      throw HttpError{404, "not_found", id + " is a comment; its post is " + c->link_id.value_or("")};
    return json{{"post", item_view(*snap, *c)}, {"comments", comment_tree(*snap, *c)}};
  }

  json post_hover(const std::string& id) const {
    auto snap = snapshot();
    const auto& c = resolve_kind(*snap, id, Kind::post);
    auto h = queue::hover_histograms(snap->corpus, c.id, snap->desirability, snap->score_delta);
    auto cue = snap->cue_of(c);
    return json{{"id", c.id},
                {"desirability_score", snap->desirability_of(c)},
                {"category", to_token(cue)},
                {"category_label", queue::label(cue)},
                {"cue_color", queue::color_token(cue)},
                {"comment_count", h.desirability.total()},
                {"desirability_histogram", queue::to_json(h.desirability)},
                {"score_histogram", queue::to_json(h.score)}};
  }

  json comment_hover(const std::string& id) const {
    auto snap = snapshot();
    const auto& c = resolve_kind(*snap, id, Kind::comment);
    auto cue = snap->cue_of(c);
    return json{{"id", c.id},
                {"desirability_score", snap->desirability_of(c)},
                {"category", to_token(cue)},
                {"category_label", queue::label(cue)},
                {"cue_color", queue::color_token(cue)}};
  }

  json filters_meta() const {
    auto snap = snapshot();
    json sorts = json::array();
    for (auto k : queue::kAllSortKeys) sorts.push_back(json{{"token", to_token(k)}, {"label", queue::menu_label(k)}});
    return json{{"sliders", queue::to_json(snap->filter_meta)}, {"sort_options", sorts}};
  }

  json thread_view(const actions::BestOfThread& t) const {
    return json{{"thread", actions::to_json(t)},
                {"rendered_markdown", actions::render_bestof(t)},
                {"filename", actions::bestof_filename(t)}};
  }

  actions::BestOfThread thread_at(const Snapshot& snap, const actions::Period& p) const {
    auto it = snap.state.threads.find(p.start);
    return it == snap.state.threads.end() ? actions::empty_thread(p, engine_.options().period) : it->second;
  }

  json bestof_current() const {
    auto snap = snapshot();
    return thread_view(thread_at(*snap, actions::period_containing(clock_(), engine_.options().period)));
  }

  json bestof_period(const Request& req) const {
    auto token = req.param("period");
    if (!token) throw HttpError{400, "invalid_argument", "period query parameter is required"};
    auto [kind, p] = actions::parse_period(*token);
    if (kind != engine_.options().period)
      throw HttpError{400, "invalid_argument",
                      "this instance keeps " + std::string(actions::to_token(engine_.options().period)) + " threads"};
    return thread_view(thread_at(*snapshot(), p));
  }

  json get_highlights() const {
    auto snap = snapshot();
    json items = json::array();
    for (const auto& id : snap->state.highlights)
      if (const auto* c = snap->corpus.find(id)) items.push_back(item_view(*snap, *c));
    return json{{"highlights", snap->state.highlights},
                {"capacity", actions::kHighlightCapacity},
                {"items", items}};
  }

  json get_config() const {
    return json{{"moderator", options_.moderator},
                {"bestof_period", actions::to_token(engine_.options().period)},
                {"flairs", engine_.options().flairs},
                {"newcomer_threshold_days", options_.newcomer_threshold_days},
                {"page_size", kDefaultPageSize},
                {"max_page_size", kMaxPageSize}};
  }

  json reasons_json() const {
    std::lock_guard lock(write_mu_);
    json list = json::array();
    for (const auto& r : reasons_.list()) list.push_back(actions::to_json(r));
    return json{{"reasons", list}};
  }

  /// Resolves reason tokens (ids or labels) against the store.
  std::vector<actions::ExplainReason> resolve_reasons(const std::vector<std::string>& tokens, bool mutation) const {
    std::vector<actions::ExplainReason> out;
    for (const auto& t : tokens) {
      auto r = reasons_.find(t);
      if (!r) throw HttpError{mutation ? 422 : 400, "invalid_argument", "unknown reason \"" + t + "\""};
      out.push_back(*r);
    }
    return out;
  }

  json explain_preview(const Request& req) const {
    Kind kind = Kind::post;
    if (auto id = req.param("target_id")) {
      auto snap = snapshot();
      const auto* c = snap->corpus.find(*id);
      if (!c) throw HttpError{404, "not_found", "unknown contribution " + *id};
      kind = c->kind;
    } else if (auto k = req.param("kind")) {
      auto parsed = parse_kind(*k);
      if (!parsed) throw HttpError{400, "invalid_argument", "kind must be post or comment"};
      kind = *parsed;
    }
    std::vector<actions::ExplainReason> selected;
    {
      std::lock_guard lock(write_mu_);
      selected = resolve_reasons(req.params("reason"), false);
    }
    auto custom = req.params("custom");
    try {
      return json{{"kind", to_token(kind)}, {"text", actions::build_explanation(kind, selected, custom)}};
    } catch (const Error& e) {
      throw HttpError{422, std::string(to_token(e.code())), e.what()};
    }
  }

  // -------------------------------------------------------------------------
  // Mutations

  static json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw HttpError{400, "parse_error", "request body must be a JSON object"};
    return j;
  }

  static std::vector<std::string> string_list(const json& payload, const char* key) {
    std::vector<std::string> out;
    if (!payload.contains(key) || payload[key].is_null()) return out;
    const auto& v = payload[key];
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw HttpError{422, "invalid_argument", std::string(key) + " must be a list of strings"};
    for (const auto& e : v) {
      if (!e.is_string()) throw HttpError{422, "invalid_argument", std::string(key) + " must be a list of strings"};
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  json post_action(const std::string& token, const std::string& raw_body) {
    auto action = actions::parse_action(token);
    if (!action) throw HttpError{404, "not_found", "unknown action \"" + token + "\""};
    auto body = parse_body(raw_body);
    if (!body.contains("target_id") || !body["target_id"].is_string() || body["target_id"].get<std::string>().empty())
      throw HttpError{422, "invalid_argument", "target_id must be a non-empty string"};
    const auto target = body["target_id"].get<std::string>();
    const json payload = body.contains("payload") && body["payload"].is_object() ? body["payload"] : body;
    const auto& mod = options_.moderator;

    std::lock_guard lock(write_mu_);
    const auto now = clock_();
    json out{{"action", token}, {"target_id", target}};
    switch (*action) {
      case actions::ActionType::curate: {
        auto t = engine_.curate(target, mod, now);
        out.update(thread_view(t));
        write_bestof(t);
        break;
      }
      case actions::ActionType::uncurate: {
        auto [t, warning] = engine_.uncurate(target, mod, now);
        out.update(thread_view(t));
        out["warning"] = warning ? json(*warning) : json();
        write_bestof(t);
        break;
      }
      case actions::ActionType::explain: {
        const auto* c = engine_.corpus().find(target);
        if (!c) throw Error(ErrorCode::not_found, "unknown contribution " + target);
        auto selected = resolve_reasons(string_list(payload, "reasons"), true);
        auto custom = string_list(payload, "custom");
        auto text = actions::build_explanation(c->kind, selected, custom);
        json details{{"reasons", json::array()}, {"custom", custom}};
        for (const auto& r : selected) details["reasons"].push_back(r.id);
        auto reply = engine_.post_explanation(target, text, mod, now, details);
        for (const auto& label : custom)
          if (!actions::explain_detail::trim(label).empty() && !reasons_.find(label)) reasons_.add_custom(label);
        out["text"] = text;
        out["reply_id"] = reply.id;
        break;
      }
      case actions::ActionType::award:
        engine_.give_award(target, mod, now);
        out["award_count"] = engine_.award_count(target);
        break;
      case actions::ActionType::flair: {
        if (!payload.contains("flair") || !payload["flair"].is_string())
          throw HttpError{422, "invalid_flair", "payload.flair must be a string"};
        engine_.set_flair(target, payload["flair"].get<std::string>(), mod, now);
        out["flair"] = payload["flair"];
        break;
      }
      case actions::ActionType::highlight:
        out["highlights"] = engine_.add_highlight(target, mod, now);
        break;
      case actions::ActionType::unhighlight:
        out["highlights"] = engine_.remove_highlight(target, mod, now);
        break;
      case actions::ActionType::upvote:
        engine_.upvote(target, mod, now);
        break;
    }
    publish();
    auto snap = snapshot();
    if (const auto* c = snap->corpus.find(target)) {
      out["score"] = snap->score_of(*c);
      out["award_count"] = snap->state.award_count(target);
      out["item"] = item_view(*snap, *c);
    }
    if (*action == actions::ActionType::explain)
      out["reply"] = item_view(*snap, snap->corpus.at(out["reply_id"].get<std::string>()));
    out["record"] = actions::to_json(engine_.log().back());
    return out;
  }

  json put_reasons(const std::string& raw_body) {
    auto body = parse_body(raw_body);
    std::vector<std::string> labels = string_list(body, "labels");
    if (body.contains("label")) {
      if (!body["label"].is_string()) throw HttpError{422, "invalid_argument", "label must be a string"};
      labels.push_back(body["label"].get<std::string>());
    }
    if (labels.empty()) throw HttpError{422, "empty_reason", "provide label or labels"};
    {
      std::lock_guard lock(write_mu_);
      for (const auto& l : labels) reasons_.add_custom(l);
    }
    return reasons_json();
  }

  void write_bestof(const actions::BestOfThread& t) const {
    if (!options_.bestof_dir) return;
    std::filesystem::create_directories(*options_.bestof_dir);
    std::ofstream out(*options_.bestof_dir / actions::bestof_filename(t), std::ios::binary | std::ios::trunc);
    out << actions::render_bestof(t);
  }

  void publish() {
    auto next = build_snapshot(engine_, scorer_, options_.newcomer_threshold_days);
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = std::move(next);
  }

  actions::ActionEngine engine_;
  Scorer scorer_;
  actions::ReasonStore reasons_;
  ApiOptions options_;
  Clock clock_;
  mutable std::recursive_mutex write_mu_;
  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace posiqueue::service
