#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "posiqueue/corpus.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using posiqueue::Author;
using posiqueue::Contribution;
using posiqueue::Kind;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("posiqueue-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Code of the posiqueue::Error thrown by `fn`, or nullopt when it returns.
template <typename Fn>
std::optional<posiqueue::ErrorCode> error_code(Fn&& fn) {
  try {
    fn();
  } catch (const posiqueue::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Author author(std::string id, std::int64_t created, std::int64_t karma = 100) {
  return Author{id, "name_" + id, karma, created, posiqueue::json::object()};
}

inline Contribution post(std::string id, std::string author_id, std::int64_t created, std::int64_t score = 1,
                         std::string title = "", std::string body = "body text") {
  Contribution c;
  c.id = id;
  c.kind = Kind::post;
  c.subreddit = "test";
  c.title = title.empty() ? "Title of " + id : title;
  c.body = std::move(body);
  c.author_id = std::move(author_id);
  c.created_utc = created;
  c.score = score;
  return c;
}

inline Contribution comment(std::string id, std::string author_id, std::string parent, std::string link,
                            std::int64_t created, std::int64_t score = 1, std::string body = "a comment") {
  Contribution c;
  c.id = id;
  c.kind = Kind::comment;
  c.subreddit = "test";
  c.body = std::move(body);
  c.author_id = std::move(author_id);
  c.created_utc = created;
  c.score = score;
  c.parent_id = std::move(parent);
  c.link_id = std::move(link);
  return c;
}

/// Two posts, four comments, three authors:
///   p1 <- c1 <- c3
///   p1 <- c2
///   p2 <- c4
inline posiqueue::Corpus small_corpus() {
  std::vector<Author> authors = {author("a1", 1000, 50), author("a2", 2000, 5000), author("a3", 500000, 7)};
  std::vector<Contribution> cs = {
      post("p1", "a1", 600000, 10, "First post"),
      post("p2", "a2", 700000, 3, "Second post"),
      comment("c1", "a2", "p1", "p1", 600100, 4),
      comment("c2", "a3", "p1", "p1", 600050, 2),
      comment("c3", "a3", "c1", "p1", 600200, 9),
      comment("c4", "a1", "p2", "p2", 700100, -1),
  };
  return posiqueue::Corpus::build(authors, cs);
}

}  // namespace testsupport
