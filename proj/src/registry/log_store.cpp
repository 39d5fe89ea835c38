#include "qarena/registry/log_store.hpp"

#include <fcntl.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "qarena/registry/types.hpp"

namespace qarena::registry {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void sync_fd(std::FILE* f) {
  std::fflush(f);
  ::fsync(::fileno(f));
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents, bool sync) {
  fs::path tmp = path;
  tmp += ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw RegistryError("IO_ERROR", "cannot write " + tmp.string());
  const bool ok = std::fwrite(contents.data(), 1, contents.size(), f) == contents.size();
  if (sync) sync_fd(f);
  std::fclose(f);
  if (!ok) throw RegistryError("IO_ERROR", "short write to " + tmp.string());
  fs::rename(tmp, path);
}

LogStore::LogStore(fs::path dir, bool sync_writes) : dir_(std::move(dir)), sync_(sync_writes) {
  fs::create_directories(dir_);
}

LogStore::~LogStore() {
  if (log_) std::fclose(log_);
}

void LogStore::open_log(const char* mode) {
  if (log_) std::fclose(log_);
  log_ = std::fopen((dir_ / "log.ndjson").c_str(), mode);
  if (!log_) throw RegistryError("IO_ERROR", "cannot open " + (dir_ / "log.ndjson").string());
}

LoadedLog LogStore::load() {
  LoadedLog out;
  const fs::path snap = dir_ / "snapshot.json";
  if (fs::exists(snap)) {
    json j = json::parse(read_all(snap), nullptr, false);
    if (j.is_discarded() || !j.contains("last_seq") || !j.contains("state")) {
      throw RegistryError("CORRUPT_SNAPSHOT", "snapshot.json is not a valid snapshot");
    }
    out.snapshot_seq = j["last_seq"].get<std::uint64_t>();
    out.snapshot = std::move(j["state"]);
  }
  std::uint64_t last_seq = out.snapshot_seq;

  const fs::path log = dir_ / "log.ndjson";
  std::string text = fs::exists(log) ? read_all(log) : std::string();
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool needs_newline = false;
  while (pos < text.size()) {
    ++line_no;
    const std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::string_view line(text.data() + pos, (terminated ? nl : text.size()) - pos);
    json rec = json::parse(line, nullptr, false);
    const bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
    if (!terminated && (rec.is_discarded() || blank)) {
      spdlog::warn("log.ndjson line {}: dropping torn final record ({} bytes)", line_no, line.size());
      fs::resize_file(log, pos);
      out.dropped_torn_line = true;
      break;
    }
    if (blank) {
      pos = nl + 1;
      continue;
    }
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("seq") || !rec["seq"].is_number_unsigned()) {
      throw CorruptLog(line_no, "not a log record");
    }
    const auto seq = rec["seq"].get<std::uint64_t>();
    if (seq > out.snapshot_seq) {
      if (seq <= last_seq) throw CorruptLog(line_no, "sequence number out of order");
      last_seq = seq;
      out.tail.emplace_back(line_no, std::move(rec));
    }
    if (!terminated) {
      needs_newline = true;
      break;
    }
    pos = nl + 1;
  }
  next_seq_ = last_seq + 1;
  since_snapshot_ = out.tail.size();
  open_log("ab");
  if (needs_newline) {
    std::fputc('\n', log_);
    if (sync_) sync_fd(log_);
  }
  return out;
}

void LogStore::append(json record) {
  if (!log_) open_log("ab");
  record["seq"] = next_seq_;
  std::string line = record.dump();
  line.push_back('\n');
  if (std::fwrite(line.data(), 1, line.size(), log_) != line.size()) {
    throw RegistryError("IO_ERROR", "log append failed");
  }
  if (sync_) {
    sync_fd(log_);
  } else {
    std::fflush(log_);
  }
  ++next_seq_;
  ++since_snapshot_;
}

void LogStore::snapshot(const json& state) {
  json j = {{"last_seq", next_seq_ - 1}, {"state", state}};
  write_file_atomic(dir_ / "snapshot.json", j.dump(1) + "\n", sync_);
  open_log("wb");
  since_snapshot_ = 0;
}

}  // namespace qarena::registry
