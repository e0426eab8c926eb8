#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mesa::app {

namespace fs = std::filesystem;

/// Exclusive ownership of a run directory for the lifetime of the object,
/// through `<dir>/.lock` created with O_EXCL. Throws RunDirLocked when another
/// process holds it. The directory is created if needed.
class RunDirLock {
 public:
  explicit RunDirLock(fs::path dir);
  ~RunDirLock();
  RunDirLock(const RunDirLock&) = delete;
  RunDirLock& operator=(const RunDirLock&) = delete;

  const fs::path& dir() const noexcept { return dir_; }

 private:
  fs::path dir_;
  fs::path lock_;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

/// Writes through a temporary file and renames, so readers never see a
/// half-written artifact.
void write_file(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

/// {relative path: {bytes, sha256}} for each file, keys in the given order.
nlohmann::ordered_json checksum_manifest(const fs::path& root, const std::vector<fs::path>& files);

}  // namespace mesa::app
