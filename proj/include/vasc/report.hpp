#pragma once

// Run manifest written next to every command's outputs.

#include <map>
#include <string>
#include <vector>

#include "vasc/config.hpp"

namespace vasc {

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string code_version = VASC_VERSION;
  std::string start_time, end_time;  // ISO-8601 UTC
  std::vector<std::string> files;
  std::map<std::string, std::string> summary;
  bool passed = true;
};

std::string utc_now_iso8601();

/// JSON object with the manifest fields.
std::string manifest_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

/// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& path);

}  // namespace vasc
