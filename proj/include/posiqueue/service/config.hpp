#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posiqueue/actions/engine.hpp"
#include "posiqueue/actions/period.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/queue/queue.hpp"

namespace posiqueue::service {

inline constexpr const char* kConfigEnv = "POSIQUEUE_CONFIG";

struct ServiceConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path post_model;
  std::filesystem::path comment_model;
  std::optional<std::filesystem::path> features;     // precomputed cache, optional
  std::optional<std::filesystem::path> lexicon_dir;  // defaults to the built-in lexicons
  std::optional<std::filesystem::path> action_log;
  std::optional<std::filesystem::path> reasons;
  std::optional<std::filesystem::path> bestof_dir;  // rendered thread written here after curation changes
  double newcomer_threshold_days = queue::kDefaultNewcomerDays;
  actions::PeriodKind bestof_period = actions::PeriodKind::weekly;
  std::vector<std::string> flairs = actions::default_flairs();
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string moderator = "moderator";
  std::string auth_token;  // empty disables auth
  std::string cors_origin = "*";
};

namespace config_detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace config_detail

/// Parses the key-value document. Relative paths resolve against `base_dir`.
inline ServiceConfig config_from_json(const json& j, const std::filesystem::path& base_dir = ".") {
  auto bad = [](const std::string& what) { return Error(ErrorCode::invalid_argument, "config: " + what); };
  if (!j.is_object()) throw bad("expected an object");
  static const std::vector<std::string> known = {
      "corpus_dir", "post_model",  "comment_model", "features",      "lexicon_dir",
      "action_log", "reasons",     "bestof_dir",    "newcomer_threshold_days",
      "bestof_period", "flairs",   "host",          "port",          "moderator",
      "auth_token", "cors_origin"};
  for (const auto& [k, _] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw bad("unknown key \"" + k + "\"");

  auto str = [&](const char* k) -> std::optional<std::string> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    if (!j[k].is_string()) throw bad(std::string("\"") + k + "\" must be a string");
    return j[k].get<std::string>();
  };
  auto path = [&](const char* k) -> std::optional<std::filesystem::path> {
    auto s = str(k);
    if (!s) return std::nullopt;
    return config_detail::resolve(base_dir, *s);
  };

  ServiceConfig c;
  for (const char* k : {"corpus_dir", "post_model", "comment_model"})
    if (!str(k)) throw bad(std::string("missing \"") + k + "\"");
  c.corpus_dir = *path("corpus_dir");
  c.post_model = *path("post_model");
  c.comment_model = *path("comment_model");
  c.features = path("features");
  c.lexicon_dir = path("lexicon_dir");
  c.action_log = path("action_log");
  c.reasons = path("reasons");
  c.bestof_dir = path("bestof_dir");
  if (j.contains("newcomer_threshold_days")) {
    if (!j["newcomer_threshold_days"].is_number()) throw bad("\"newcomer_threshold_days\" must be a number");
    c.newcomer_threshold_days = j["newcomer_threshold_days"].get<double>();
    if (!(c.newcomer_threshold_days >= 0.0)) throw bad("\"newcomer_threshold_days\" must be >= 0");
  }
  if (auto p = str("bestof_period")) {
    auto kind = actions::parse_period_kind(*p);
    if (!kind) throw bad("\"bestof_period\" must be weekly or monthly");
    c.bestof_period = *kind;
  }
  if (j.contains("flairs")) {
    if (!j["flairs"].is_array()) throw bad("\"flairs\" must be an array of strings");
    c.flairs.clear();
    for (const auto& f : j["flairs"]) {
      if (!f.is_string() || f.get<std::string>().empty()) throw bad("\"flairs\" must be non-empty strings");
      c.flairs.push_back(f.get<std::string>());
    }
  }
  if (auto h = str("host")) c.host = *h;
  if (j.contains("port")) {
    if (!j["port"].is_number_integer()) throw bad("\"port\" must be an integer");
    c.port = j["port"].get<int>();
    if (c.port < 0 || c.port > 65535) throw bad("\"port\" out of range");
  }
  if (auto m = str("moderator")) c.moderator = *m;
  if (c.moderator.empty()) throw bad("\"moderator\" must be non-empty");
  if (auto t = str("auth_token")) c.auth_token = *t;
  if (auto o = str("cors_origin")) c.cors_origin = *o;
  return c;
}

/// Startup check: every referenced input must exist.
inline void check_inputs(const ServiceConfig& c) {
  auto need = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p))
      throw Error(ErrorCode::invalid_argument, std::string("config: ") + what + " " + p.string() + " does not exist");
  };
  need(c.corpus_dir, "corpus_dir");
  need(c.post_model, "post_model");
  need(c.comment_model, "comment_model");
  if (c.features) need(*c.features, "features");
  if (c.lexicon_dir) need(*c.lexicon_dir, "lexicon_dir");
}

/// Loads the config at `path`, or at $POSIQUEUE_CONFIG when that is set.
inline ServiceConfig load_config(std::filesystem::path path) {
  if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_argument, "config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

}  // namespace posiqueue::service
