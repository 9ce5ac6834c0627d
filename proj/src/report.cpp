#include "vasc/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace vasc {

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["code_version"] = m.code_version;
  j["start_time"] = m.start_time;
  j["end_time"] = m.end_time;
  j["files"] = m.files;
  j["summary"] = m.summary;
  j["passed"] = m.passed;
  return j.dump(2);
}

void write_manifest(const std::string& path, const RunManifest& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("manifest: cannot open " + path);
  os << manifest_json(m) << '\n';
}

void ensure_directory(const std::string& path) { std::filesystem::create_directories(path); }

}  // namespace vasc
