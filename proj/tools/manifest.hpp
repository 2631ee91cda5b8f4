#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "confmetric/json_io.hpp"

namespace confmetric::cli {

std::string sha256_hex(std::string_view bytes);

/// Seconds since the epoch as ISO-8601 UTC; SOURCE_DATE_EPOCH overrides the
/// clock so reruns can be byte-identical.
std::string manifest_timestamp();

struct ManifestInput {
  std::string source;  // as given on the command line
  std::string resolved;
  std::string sha256;  // empty for built-in data
};

struct ManifestOutput {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

/// Collects artifacts of one command. Outputs are written through write()
/// so every file is hashed exactly as stored.
class RunManifest {
public:
  RunManifest(std::string command, std::vector<std::string> args, std::filesystem::path out_dir);

  void add_input(ManifestInput in) { inputs_.push_back(std::move(in)); }
  void set_config(Json config) { config_ = std::move(config); }
  void set_extra(const std::string& key, Json value) { extra_[key] = std::move(value); }

  /// Writes `content` to out_dir/name and records its hash. Throws DataError
  /// when the file cannot be written.
  void write(const std::string& name, std::string_view content);

  Json to_json() const;
  /// Writes manifest.json next to the outputs.
  void finish() const;

  const std::filesystem::path& out_dir() const { return out_dir_; }

private:
  std::string command_;
  std::vector<std::string> args_;
  std::filesystem::path out_dir_;
  std::vector<ManifestInput> inputs_;
  std::vector<ManifestOutput> outputs_;
  Json config_;
  Json extra_ = Json::object();
};

}  // namespace confmetric::cli
