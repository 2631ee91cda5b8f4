#include "manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>

#include "confmetric/error.hpp"

namespace confmetric::cli {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw SolverError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string manifest_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (*end != '\0' || v < 0) throw UsageError("SOURCE_DATE_EPOCH must be a non-negative integer");
    t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> args, std::filesystem::path out_dir)
    : command_(std::move(command)), args_(std::move(args)), out_dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw DataError("cannot create output directory '" + out_dir_.string() + "': " + ec.message());
}

void RunManifest::write(const std::string& name, std::string_view content) {
  const auto path = out_dir_ / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  outputs_.push_back({name, sha256_hex(content), content.size()});
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command_;
  j["args"] = args_;
  Json inputs = Json::array();
  for (const auto& in : inputs_) {
    Json ij{{"source", in.source}, {"resolved", in.resolved}};
    ij["sha256"] = in.sha256.empty() ? Json(nullptr) : Json(in.sha256);
    inputs.push_back(std::move(ij));
  }
  j["inputs"] = std::move(inputs);
  j["config"] = config_;
  Json outputs = Json::array();
  for (const auto& o : outputs_) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  j["outputs"] = std::move(outputs);
  for (const auto& [k, v] : extra_.items()) j[k] = v;
  j["timestamp"] = manifest_timestamp();
  return j;
}

void RunManifest::finish() const {
  const std::string text = to_json().dump(2) + "\n";
  const auto path = out_dir_ / "manifest.json";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) throw DataError("cannot write '" + path.string() + "'");
}

}  // namespace confmetric::cli
