#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/jsonl.hpp"

namespace posiqueue::actions {

enum class ReasonOrigin { default_reason, custom };

struct ExplainReason {
  std::string id;
  std::string label;
  ReasonOrigin origin = ReasonOrigin::default_reason;

  bool operator==(const ExplainReason&) const = default;
};

// Placeholder defaults; operators replace them through the reason store.
inline constexpr std::array<std::pair<const char*, const char*>, 11> kDefaultReasons = {{
    {"creative", "Creative"},
    {"helpful", "Helpful"},
    {"funny", "Funny"},
    {"informative", "Informative"},
    {"high_effort", "High effort"},
    {"well_formatted", "Well formatted"},
    {"relevant", "Relevant"},
    {"welcoming", "Welcoming"},
    {"respectful", "Respectful"},
    {"well_sourced", "Well sourced"},
    {"thoughtful", "Thoughtful"},
}};

inline std::vector<ExplainReason> default_reasons() {
  std::vector<ExplainReason> out;
  for (const auto& [id, label] : kDefaultReasons) out.push_back({id, label, ReasonOrigin::default_reason});
  return out;
}

namespace explain_detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string slug(std::string_view label) {
  std::string out;
  for (char c : ascii_lower(label)) {
    bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (alnum) out.push_back(c);
    else if (!out.empty() && out.back() != '_') out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "reason" : out;
}

}  // namespace explain_detail

/// "The moderators like this <kind> because it is a, b, and c." Selected
/// reasons come first, then custom ones, each lowercased; blanks and
/// case-insensitive repeats are dropped.
inline std::string build_explanation(Kind kind, const std::vector<ExplainReason>& selected,
                                     const std::vector<std::string>& custom) {
  std::vector<std::string> reasons;
  auto add = [&](std::string_view raw) {
    auto r = explain_detail::ascii_lower(explain_detail::trim(raw));
    if (r.empty() || std::find(reasons.begin(), reasons.end(), r) != reasons.end()) return;
    reasons.push_back(std::move(r));
  };
  for (const auto& s : selected) add(s.label);
  for (const auto& c : custom) add(c);
  if (reasons.empty()) throw Error(ErrorCode::empty_reason, "an explanation needs at least one reason");

  std::string list;
  if (reasons.size() == 1) {
    list = reasons[0];
  } else if (reasons.size() == 2) {
    list = reasons[0] + " and " + reasons[1];
  } else {
    for (std::size_t i = 0; i + 1 < reasons.size(); ++i) list += reasons[i] + ", ";
    list += "and " + reasons.back();
  }
  return "The moderators like this " + std::string(to_token(kind)) + " because it is " + list + ".";
}

inline json to_json(const ExplainReason& r) {
  return json{{"id", r.id}, {"label", r.label}, {"origin", r.origin == ReasonOrigin::custom ? "custom" : "default"}};
}

/// Default reasons followed by persisted custom reasons in insertion order.
/// When backed by a file, every change rewrites it.
class ReasonStore {
 public:
  ReasonStore() : reasons_(default_reasons()) {}

  explicit ReasonStore(std::filesystem::path path) : reasons_(default_reasons()), path_(std::move(path)) {
    if (!path_->empty() && std::filesystem::exists(*path_)) load();
  }

  const std::vector<ExplainReason>& list() const { return reasons_; }

  std::optional<ExplainReason> find(std::string_view token) const {
    auto key = explain_detail::ascii_lower(explain_detail::trim(token));
    for (const auto& r : reasons_)
      if (r.id == key || explain_detail::ascii_lower(r.label) == key) return r;
    return std::nullopt;
  }

  ExplainReason add_custom(std::string_view raw_label) {
    auto label = explain_detail::trim(raw_label);
    if (label.empty()) throw Error(ErrorCode::empty_reason, "reason label must be non-empty");
    auto key = explain_detail::ascii_lower(label);
    for (const auto& r : reasons_)
      if (explain_detail::ascii_lower(r.label) == key)
        throw Error(ErrorCode::duplicate, "reason \"" + label + "\" already exists");
    ExplainReason r{unique_id(explain_detail::slug(label)), label, ReasonOrigin::custom};
    reasons_.push_back(r);
    save();
    return r;
  }

 private:
  std::string unique_id(const std::string& base) const {
    auto taken = [&](const std::string& id) {
      return std::any_of(reasons_.begin(), reasons_.end(), [&](const auto& r) { return r.id == id; });
    };
    if (!taken(base)) return base;
    for (int k = 2;; ++k)
      if (!taken(base + "_" + std::to_string(k))) return base + "_" + std::to_string(k);
  }

  void load() {
    for (const auto& rec : jsonl::read_file(*path_)) {
      if (rec.value("origin", "") != "custom") continue;
      auto label = rec.value("label", "");
      if (label.empty()) continue;
      auto key = explain_detail::ascii_lower(label);
      bool dup = std::any_of(reasons_.begin(), reasons_.end(),
                             [&](const auto& r) { return explain_detail::ascii_lower(r.label) == key; });
      if (dup) continue;
      auto id = rec.value("id", explain_detail::slug(label));
      reasons_.push_back({unique_id(id), label, ReasonOrigin::custom});
    }
  }

  void save() const {
    if (!path_ || path_->empty()) return;
    std::vector<json> records;
    for (const auto& r : reasons_) records.push_back(to_json(r));
    auto tmp = *path_;
    tmp += ".tmp";
    jsonl::write_file(tmp, records);
    std::filesystem::rename(tmp, *path_);
  }

  std::vector<ExplainReason> reasons_;
  std::optional<std::filesystem::path> path_;
};

}  // namespace posiqueue::actions
