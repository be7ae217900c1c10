#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rbl/error.hpp"

namespace rbl {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Writes `text` to `path` through a uniquely named temporary in the same directory.
inline void atomic_write(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp." + hex64((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  {
    std::ofstream out(tmp, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + tmp.string());
    out << text;
    out.close();
    require(static_cast<bool>(out), ErrorKind::io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::io, "cannot rename into " + path.string());
  }
}

/// Content-addressed JSON records under a directory.
class Cache {
 public:
  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// RBL_CACHE_DIR, else ./.rbl_cache.
  static Cache from_env() {
    const char* env = std::getenv("RBL_CACHE_DIR");
    return Cache(env && *env ? env : ".rbl_cache");
  }

  static std::string key_of(const nlohmann::json& inputs) { return hex64(fnv1a(inputs.dump())); }

  std::filesystem::path path_of(const std::string& key) const { return dir_ / (key + ".json"); }

  std::optional<nlohmann::json> lookup(const std::string& key) const {
    std::ifstream in(path_of(key));
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      nlohmann::json j = nlohmann::json::parse(ss.str());
      if (j.value("key", "") != key || !j.contains("record")) throw std::runtime_error("key mismatch");
      return j["record"];
    } catch (const std::exception& e) {
      std::cerr << "cache: ignoring corrupted record " << path_of(key) << ": " << e.what() << "\n";
      return std::nullopt;
    }
  }

  void store(const std::string& key, const nlohmann::json& record) const {
    nlohmann::json j{{"key", key}, {"record", record}};
    atomic_write(path_of(key), j.dump(1));
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace rbl
