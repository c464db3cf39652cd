#pragma once

// Line-delimited JSON record container shared by the corpus, feature cache,
// metric cache, action log, and reason store.

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "posiqueue/error.hpp"

namespace posiqueue::jsonl {

using json = nlohmann::json;

/// Invokes `on_record(line_number, record)` for every non-blank line.
/// Lines are numbered from 1. Malformed JSON throws parse_error naming the line.
inline void for_each_record(std::istream& in,
                            const std::function<void(std::size_t, const json&)>& on_record) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse_error,
                  "line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) {
      throw Error(ErrorCode::parse_error,
                  "line " + std::to_string(line_no) + ": record is not an object");
    }
    on_record(line_no, record);
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return in;
}

inline std::vector<json> read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<json> out;
  for_each_record(in, [&](std::size_t, const json& r) { out.push_back(r); });
  return out;
}

inline std::string dump_line(const json& record) {
  // Replacement keeps invalid UTF-8 from aborting a dump mid-file.
  return record.dump(-1, ' ', false, json::error_handler_t::replace);
}

inline void write_file(const std::filesystem::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  for (const auto& r : records) out << dump_line(r) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace posiqueue::jsonl
