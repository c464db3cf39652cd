#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "posiqueue/actions/period.hpp"
#include "posiqueue/corpus.hpp"

namespace posiqueue::actions {

struct BestOfEntry {
  std::string id;
  std::string text;  // post title, or comment body preview
  std::string permalink;
  std::int64_t curated_at = 0;

  bool operator==(const BestOfEntry&) const = default;
};

struct BestOfThread {
  std::int64_t period_start = 0;
  std::int64_t period_end = 0;
  std::string title = "Best of the week";
  std::vector<BestOfEntry> submissions;
  std::vector<BestOfEntry> comments;

  bool contains(std::string_view id) const {
    for (const auto* section : {&submissions, &comments})
      for (const auto& e : *section)
        if (e.id == id) return true;
    return false;
  }

  bool operator==(const BestOfThread&) const = default;
};

inline std::string thread_title(PeriodKind kind) {
  return kind == PeriodKind::weekly ? "Best of the week" : "Best of the month";
}

inline BestOfThread empty_thread(const Period& p, PeriodKind kind) {
  BestOfThread t;
  t.period_start = p.start;
  t.period_end = p.end;
  t.title = thread_title(kind);
  return t;
}

inline std::string permalink(const Contribution& c) {
  if (c.is_post()) return "/r/" + c.subreddit + "/comments/" + c.id + "/";
  return "/r/" + c.subreddit + "/comments/" + c.link_id.value_or("") + "/_/" + c.id + "/";
}

inline constexpr std::size_t kPreviewChars = 200;

namespace bestof_detail {

inline bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

inline std::size_t count_code_points(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if (!is_continuation(c)) ++n;
  return n;
}

}  // namespace bestof_detail

/// Whitespace collapsed; at most 200 code points including the trailing
/// ellipsis, cut at the last word boundary when one exists.
inline std::string comment_preview(std::string_view body, std::size_t limit = kPreviewChars) {
  std::string flat;
  bool pending_space = false;
  for (char c : body) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      pending_space = !flat.empty();
      continue;
    }
    if (pending_space) flat.push_back(' ');
    pending_space = false;
    flat.push_back(c);
  }
  if (bestof_detail::count_code_points(flat) <= limit) return flat;

  // Byte offset just past the first (limit - 1) code points.
  std::size_t budget = limit - 1, i = 0, cps = 0;
  while (i < flat.size()) {
    if (!bestof_detail::is_continuation(static_cast<unsigned char>(flat[i]))) {
      if (cps == budget) break;
      ++cps;
    }
    ++i;
  }
  std::size_t cut = i;
  if (cut < flat.size() && flat[cut] != ' ') {
    auto space = flat.rfind(' ', cut);
    if (space != std::string::npos && space > 0) cut = space;
  }
  while (cut > 0 && flat[cut - 1] == ' ') --cut;
  return flat.substr(0, cut) + "…";
}

inline std::string escape_link_text(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '[' || c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c == '\n' || c == '\r' ? ' ' : c);
  }
  return out;
}

/// Markdown for a thread. Empty sections carry an em-dash placeholder.
inline std::string render_bestof(const BestOfThread& thread) {
  std::string out = "# " + thread.title + "\n";
  auto section = [&](const char* heading, const std::vector<BestOfEntry>& entries) {
    out += "\n## ";
    out += heading;
    out += "\n\n";
    if (entries.empty()) {
      out += "—\n";
      return;
    }
    for (const auto& e : entries) out += "- [" + escape_link_text(e.text) + "](" + e.permalink + ")\n";
  };
  section("Submissions", thread.submissions);
  section("Comments", thread.comments);
  return out;
}

inline std::string bestof_filename(const BestOfThread& thread) {
  return "bestof-" + iso_date(thread.period_start) + ".md";
}

inline json to_json(const BestOfEntry& e) {
  return json{{"id", e.id}, {"text", e.text}, {"permalink", e.permalink}, {"curated_at", e.curated_at}};
}

inline json to_json(const BestOfThread& t) {
  json subs = json::array(), coms = json::array();
  for (const auto& e : t.submissions) subs.push_back(to_json(e));
  for (const auto& e : t.comments) coms.push_back(to_json(e));
  return json{{"period_start", t.period_start},
              {"period_end", t.period_end},
              {"period_start_date", iso_date(t.period_start)},
              {"title", t.title},
              {"submissions", subs},
              {"comments", coms}};
}

}  // namespace posiqueue::actions
