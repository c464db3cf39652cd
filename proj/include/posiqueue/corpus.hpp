#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posiqueue/error.hpp"
#include "posiqueue/jsonl.hpp"

namespace posiqueue {

using json = nlohmann::json;

enum class Kind { post, comment };

inline constexpr std::string_view to_token(Kind k) { return k == Kind::post ? "post" : "comment"; }

inline std::optional<Kind> parse_kind(std::string_view s) {
  if (s == "post") return Kind::post;
  if (s == "comment") return Kind::comment;
  return std::nullopt;
}

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct Author {
  std::string id;
  std::string name;
  std::int64_t karma = 0;
  std::int64_t created_utc = 1;
  json extra = json::object();  // unknown fields, preserved on round-trip

  bool operator==(const Author&) const = default;
};

struct Contribution {
  std::string id;
  Kind kind = Kind::post;
  std::string subreddit;
  std::optional<std::string> title;
  std::string body;
  std::string author_id;
  std::int64_t created_utc = 1;
  std::int64_t score = 0;
  std::optional<std::string> parent_id;
  std::optional<std::string> link_id;
  std::optional<std::string> flair;
  std::int64_t num_reports = 0;
  json extra = json::object();

  bool is_post() const { return kind == Kind::post; }
  bool operator==(const Contribution&) const = default;
};

// ---------------------------------------------------------------------------
// Record encoding

namespace detail {

inline json optional_to_json(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

class FieldReader {
 public:
  FieldReader(const json& record, std::size_t line) : record_(record), line_(line) {}

  [[noreturn]] void fail(std::string_view field, std::string_view problem) const {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line_) + ", field \"" +
                                            std::string(field) + "\": " + std::string(problem));
  }

  std::string required_string(const char* field) const {
    auto it = record_.find(field);
    if (it == record_.end() || it->is_null()) fail(field, "missing");
    if (!it->is_string()) fail(field, "expected string");
    return it->get<std::string>();
  }

  std::optional<std::string> optional_string(const char* field) const {
    auto it = record_.find(field);
    if (it == record_.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(field, "expected string or null");
    return it->get<std::string>();
  }

  std::int64_t required_int(const char* field) const {
    auto it = record_.find(field);
    if (it == record_.end() || it->is_null()) fail(field, "missing");
    if (!it->is_number_integer()) fail(field, "expected integer");
    return it->get<std::int64_t>();
  }

  std::int64_t optional_int(const char* field, std::int64_t fallback) const {
    auto it = record_.find(field);
    if (it == record_.end() || it->is_null()) return fallback;
    if (!it->is_number_integer()) fail(field, "expected integer");
    return it->get<std::int64_t>();
  }

  json extras(std::initializer_list<const char*> known) const {
    json out = json::object();
    for (auto it = record_.begin(); it != record_.end(); ++it) {
      bool is_known = std::any_of(known.begin(), known.end(),
                                  [&](const char* k) { return it.key() == k; });
      if (!is_known) out[it.key()] = it.value();
    }
    return out;
  }

 private:
  const json& record_;
  std::size_t line_;
};

}  // namespace detail

inline json to_json(const Author& a) {
  json j = a.extra;
  j["id"] = a.id;
  j["name"] = a.name;
  j["karma"] = a.karma;
  j["created_utc"] = a.created_utc;
  return j;
}

inline json to_json(const Contribution& c) {
  json j = c.extra;
  j["id"] = c.id;
  j["kind"] = std::string(to_token(c.kind));
  j["subreddit"] = c.subreddit;
  j["title"] = detail::optional_to_json(c.title);
  j["body"] = c.body;
  j["author_id"] = c.author_id;
  j["created_utc"] = c.created_utc;
  j["score"] = c.score;
  j["parent_id"] = detail::optional_to_json(c.parent_id);
  j["link_id"] = detail::optional_to_json(c.link_id);
  j["flair"] = detail::optional_to_json(c.flair);
  j["num_reports"] = c.num_reports;
  return j;
}

inline Author author_from_json(const json& record, std::size_t line = 0) {
  detail::FieldReader r(record, line);
  Author a;
  a.id = r.required_string("id");
  a.name = r.optional_string("name").value_or("");
  a.karma = r.required_int("karma");
  if (a.karma < 0) r.fail("karma", "must be >= 0");
  a.created_utc = r.required_int("created_utc");
  if (a.created_utc <= 0) r.fail("created_utc", "must be > 0");
  a.extra = r.extras({"id", "name", "karma", "created_utc"});
  return a;
}

inline Contribution contribution_from_json(const json& record, std::size_t line = 0) {
  detail::FieldReader r(record, line);
  Contribution c;
  c.id = r.required_string("id");
  auto kind = parse_kind(r.required_string("kind"));
  if (!kind) r.fail("kind", "expected \"post\" or \"comment\"");
  c.kind = *kind;
  c.subreddit = r.optional_string("subreddit").value_or("");
  c.title = r.optional_string("title");
  c.body = r.optional_string("body").value_or("");
  c.author_id = r.required_string("author_id");
  c.created_utc = r.required_int("created_utc");
  if (c.created_utc <= 0) r.fail("created_utc", "must be > 0");
  c.score = r.required_int("score");
  c.parent_id = r.optional_string("parent_id");
  c.link_id = r.optional_string("link_id");
  c.flair = r.optional_string("flair");
  c.num_reports = r.optional_int("num_reports", 0);
  if (c.num_reports < 0) r.fail("num_reports", "must be >= 0");
  if (c.kind == Kind::post && (c.parent_id || c.link_id))
    r.fail(c.parent_id ? "parent_id" : "link_id", "posts must not have a parent");
  if (c.kind == Kind::comment) {
    if (!c.parent_id) r.fail("parent_id", "comments require a parent");
    if (!c.link_id) r.fail("link_id", "comments require a root post");
    if (c.title) r.fail("title", "comments have no title");
  }
  c.extra = r.extras({"id", "kind", "subreddit", "title", "body", "author_id", "created_utc",
                      "score", "parent_id", "link_id", "flair", "num_reports"});
  return c;
}

// ---------------------------------------------------------------------------
// Corpus

/// Immutable, indexed snapshot of one community. Contributions and authors are
/// held in id order so that equal inputs produce equal corpora regardless of
/// ingestion order.
class Corpus {
 public:
  Corpus() = default;

  /// Validates referential integrity and builds every index. Throws
  /// referential_integrity listing all offending ids.
  static Corpus build(std::vector<Author> authors, std::vector<Contribution> contributions) {
    Corpus c;
    c.authors_ = std::move(authors);
    c.contributions_ = std::move(contributions);
    std::sort(c.authors_.begin(), c.authors_.end(),
              [](const Author& a, const Author& b) { return a.id < b.id; });
    std::sort(c.contributions_.begin(), c.contributions_.end(),
              [](const Contribution& a, const Contribution& b) { return a.id < b.id; });
    c.index_and_validate();
    return c;
  }

  /// New snapshot with extra records appended (used for explanation replies).
  Corpus with_additions(std::vector<Author> authors, std::vector<Contribution> contributions) const {
    auto all_authors = authors_;
    all_authors.insert(all_authors.end(), std::make_move_iterator(authors.begin()),
                       std::make_move_iterator(authors.end()));
    auto all_contribs = contributions_;
    all_contribs.insert(all_contribs.end(), std::make_move_iterator(contributions.begin()),
                        std::make_move_iterator(contributions.end()));
    return build(std::move(all_authors), std::move(all_contribs));
  }

  const std::vector<Author>& authors() const { return authors_; }
  const std::vector<Contribution>& contributions() const { return contributions_; }

  const Contribution* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &contributions_[it->second];
  }

  const Author* find_author(std::string_view id) const {
    auto it = author_by_id_.find(std::string(id));
    return it == author_by_id_.end() ? nullptr : &authors_[it->second];
  }

  const Contribution& at(std::string_view id) const {
    const auto* c = find(id);
    if (!c) throw Error(ErrorCode::not_found, "unknown contribution " + std::string(id));
    return *c;
  }

  const Author& author_of(const Contribution& c) const { return authors_[author_by_id_.at(c.author_id)]; }

  /// Posts in id order.
  std::vector<const Contribution*> posts() const { return of_kind(Kind::post); }
  std::vector<const Contribution*> comments() const { return of_kind(Kind::comment); }

  std::vector<const Contribution*> of_kind(Kind kind) const {
    std::vector<const Contribution*> out;
    for (const auto& c : contributions_)
      if (c.kind == kind) out.push_back(&c);
    return out;
  }

  /// Every comment under `post_id`, created_utc ascending, ties by id.
  std::vector<const Contribution*> comments_of(std::string_view post_id) const {
    std::vector<const Contribution*> out;
    auto it = comments_by_post_.find(std::string(post_id));
    if (it == comments_by_post_.end()) return out;
    for (auto idx : it->second) out.push_back(&contributions_[idx]);
    return out;
  }

  /// Direct replies to `id`, created_utc ascending, ties by id.
  std::vector<const Contribution*> children_of(std::string_view id) const {
    std::vector<const Contribution*> out;
    auto it = children_.find(std::string(id));
    if (it == children_.end()) return out;
    for (auto idx : it->second) out.push_back(&contributions_[idx]);
    return out;
  }

  /// Depth-first thread order under a post; depth 1 = top-level comment.
  std::vector<std::pair<const Contribution*, int>> thread_of(std::string_view post_id) const {
    std::vector<std::pair<const Contribution*, int>> out;
    std::vector<std::pair<const Contribution*, int>> stack;
    auto top = children_of(post_id);
    for (auto it = top.rbegin(); it != top.rend(); ++it) stack.emplace_back(*it, 1);
    while (!stack.empty()) {
      auto [c, depth] = stack.back();
      stack.pop_back();
      out.emplace_back(c, depth);
      auto kids = children_of(c->id);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(*it, depth + 1);
    }
    return out;
  }

  std::vector<const Contribution*> by_author(std::string_view author_id) const {
    std::vector<const Contribution*> out;
    auto it = by_author_.find(std::string(author_id));
    if (it == by_author_.end()) return out;
    for (auto idx : it->second) out.push_back(&contributions_[idx]);
    return out;
  }

  std::size_t post_count() const { return n_posts_; }
  std::size_t comment_count() const { return contributions_.size() - n_posts_; }

  bool operator==(const Corpus& o) const {
    return authors_ == o.authors_ && contributions_ == o.contributions_;
  }

 private:
  void index_and_validate() {
    std::vector<std::string> problems;
    by_id_.clear();
    author_by_id_.clear();
    comments_by_post_.clear();
    children_.clear();
    by_author_.clear();
    n_posts_ = 0;

    for (std::size_t i = 0; i < authors_.size(); ++i) {
      if (!author_by_id_.emplace(authors_[i].id, i).second)
        problems.push_back("duplicate author id " + authors_[i].id);
    }
    for (std::size_t i = 0; i < contributions_.size(); ++i) {
      if (!by_id_.emplace(contributions_[i].id, i).second)
        problems.push_back("duplicate contribution id " + contributions_[i].id);
    }

    for (std::size_t i = 0; i < contributions_.size(); ++i) {
      const auto& c = contributions_[i];
      if (c.is_post()) ++n_posts_;
      auto a = author_by_id_.find(c.author_id);
      if (a == author_by_id_.end()) {
        problems.push_back("dangling author_id " + c.author_id + " on " + c.id);
      } else {
        by_author_[c.author_id].push_back(i);
        if (c.created_utc < authors_[a->second].created_utc)
          problems.push_back("contribution " + c.id + " predates its author's account");
      }
      if (c.is_post()) {
        if (c.parent_id || c.link_id) problems.push_back("post " + c.id + " has a parent");
        continue;
      }
      if (!c.parent_id || !by_id_.count(*c.parent_id)) {
        problems.push_back("dangling parent_id " + c.parent_id.value_or("null") + " on " + c.id);
        continue;
      }
      if (!c.link_id || !by_id_.count(*c.link_id)) {
        problems.push_back("dangling link_id " + c.link_id.value_or("null") + " on " + c.id);
        continue;
      }
      children_[*c.parent_id].push_back(i);
    }

    // Every comment must reach its link_id post through a finite parent chain.
    for (const auto& c : contributions_) {
      if (c.is_post() || !c.parent_id || !c.link_id) continue;
      if (!by_id_.count(*c.parent_id) || !by_id_.count(*c.link_id)) continue;
      const Contribution* cur = &c;
      std::size_t steps = 0;
      while (!cur->is_post() && steps <= contributions_.size()) {
        auto p = by_id_.find(cur->parent_id.value_or(""));
        if (p == by_id_.end()) break;
        cur = &contributions_[p->second];
        ++steps;
      }
      if (!cur->is_post()) {
        problems.push_back("parent chain of " + c.id + " does not reach a post");
      } else if (cur->id != *c.link_id) {
        problems.push_back("link_id " + *c.link_id + " of " + c.id + " is not its root post " + cur->id);
      } else {
        comments_by_post_[cur->id].push_back(by_id_.at(c.id));
      }
    }

    auto chrono = [this](std::size_t a, std::size_t b) {
      const auto& x = contributions_[a];
      const auto& y = contributions_[b];
      return x.created_utc != y.created_utc ? x.created_utc < y.created_utc : x.id < y.id;
    };
    for (auto& [_, v] : comments_by_post_) std::sort(v.begin(), v.end(), chrono);
    for (auto& [_, v] : children_) std::sort(v.begin(), v.end(), chrono);
    for (auto& [_, v] : by_author_) std::sort(v.begin(), v.end(), chrono);

    if (!problems.empty()) {
      std::string msg = "referential integrity violated:";
      for (const auto& p : problems) msg += "\n  " + p;
      throw Error(ErrorCode::referential_integrity, msg);
    }
  }

  std::vector<Author> authors_;
  std::vector<Contribution> contributions_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> author_by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> comments_by_post_;
  std::unordered_map<std::string, std::vector<std::size_t>> children_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_author_;
  std::size_t n_posts_ = 0;
};

// ---------------------------------------------------------------------------
// Files

inline constexpr const char* kContributionsFile = "contributions.jsonl";
inline constexpr const char* kAuthorsFile = "authors.jsonl";

/// Reads both record files. All malformed lines are reported together, each
/// naming its file, line, and field.
inline Corpus ingest_corpus(const std::filesystem::path& contributions_path,
                            const std::filesystem::path& authors_path) {
  std::vector<std::string> problems;
  std::vector<Author> authors;
  std::vector<Contribution> contributions;

  auto read = [&](const std::filesystem::path& path, auto&& on_record) {
    auto in = jsonl::open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      try {
        json record = json::parse(line);
        if (!record.is_object())
          throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": not an object");
        on_record(record, line_no);
      } catch (const json::parse_error&) {
        problems.push_back(path.filename().string() + ": line " + std::to_string(line_no) +
                           ": malformed JSON");
      } catch (const Error& e) {
        problems.push_back(path.filename().string() + ": " + e.what());
      }
    }
  };

  read(authors_path, [&](const json& r, std::size_t n) { authors.push_back(author_from_json(r, n)); });
  read(contributions_path,
       [&](const json& r, std::size_t n) { contributions.push_back(contribution_from_json(r, n)); });

  if (!problems.empty()) {
    std::string msg = "ingestion failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::parse_error, msg);
  }
  return Corpus::build(std::move(authors), std::move(contributions));
}

inline Corpus ingest_corpus_dir(const std::filesystem::path& dir) {
  return ingest_corpus(dir / kContributionsFile, dir / kAuthorsFile);
}

inline void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::vector<json> contribs;
  contribs.reserve(corpus.contributions().size());
  for (const auto& c : corpus.contributions()) contribs.push_back(to_json(c));
  std::vector<json> authors;
  authors.reserve(corpus.authors().size());
  for (const auto& a : corpus.authors()) authors.push_back(to_json(a));
  jsonl::write_file(dir / kContributionsFile, contribs);
  jsonl::write_file(dir / kAuthorsFile, authors);
}

/// Comments under a post, created_utc ascending.
inline std::vector<const Contribution*> comment_section(const Corpus& corpus, std::string_view post_id) {
  const auto* c = corpus.find(post_id);
  if (!c) throw Error(ErrorCode::not_found, "unknown post " + std::string(post_id));
  if (!c->is_post()) throw Error(ErrorCode::wrong_kind, std::string(post_id) + " is a comment");
  return corpus.comments_of(post_id);
}

/// Root post of any contribution (itself for posts).
inline const Contribution& root_post(const Corpus& corpus, const Contribution& c) {
  return c.is_post() ? c : corpus.at(*c.link_id);
}

}  // namespace posiqueue
