#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

namespace qarena::registry {

struct LoadedLog {
  std::optional<nlohmann::json> snapshot;  // state object from snapshot.json
  std::uint64_t snapshot_seq = 0;
  // Records newer than the snapshot, each with its 1-based log line number.
  std::vector<std::pair<std::size_t, nlohmann::json>> tail;
  bool dropped_torn_line = false;
};

// snapshot.json plus an append-only log.ndjson of {"seq":n,"op":...} records.
class LogStore {
 public:
  LogStore(std::filesystem::path dir, bool sync_writes);
  ~LogStore();
  LogStore(const LogStore&) = delete;
  LogStore& operator=(const LogStore&) = delete;

  // Reads snapshot and log. A torn final line (no newline, not valid JSON)
  // is cut off with a warning; any other bad line throws CorruptLog.
  LoadedLog load();

  // Stamps the next seq on the record and appends it as one line.
  void append(nlohmann::json record);

  // Writes snapshot.json atomically, then empties the log.
  void snapshot(const nlohmann::json& state);

  std::size_t records_since_snapshot() const { return since_snapshot_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  void open_log(const char* mode);

  std::filesystem::path dir_;
  bool sync_;
  std::FILE* log_ = nullptr;
  std::uint64_t next_seq_ = 1;
  std::size_t since_snapshot_ = 0;
};

// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents, bool sync);

}  // namespace qarena::registry
