#include "mesa/app/run_dir.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "mesa/error.hpp"

namespace mesa::app {

RunDirLock::RunDirLock(fs::path dir) : dir_(std::move(dir)), lock_(dir_ / ".lock") {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) raise(ErrorCode::IoError, fmt::format("cannot create run directory {}: {}", dir_.string(), ec.message()));
  const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      raise(ErrorCode::RunDirLocked,
            fmt::format("{} is in use (remove {} if no other mesa process is running)", dir_.string(), lock_.string()));
    }
    raise(ErrorCode::IoError, fmt::format("cannot create {}: {}", lock_.string(), std::strerror(errno)));
  }
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunDirLock::~RunDirLock() {
  std::error_code ec;
  fs::remove(lock_, ec);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    raise(ErrorCode::IoError, "sha256 failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) raise(ErrorCode::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::IoError, fmt::format("cannot move {} into place: {}", path.string(), ec.message()));
}

nlohmann::ordered_json checksum_manifest(const fs::path& root, const std::vector<fs::path>& files) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& f : files) {
    const auto content = read_file(f);
    out[fs::relative(f, root).generic_string()] = {{"bytes", content.size()}, {"sha256", sha256_hex(content)}};
  }
  return out;
}

}  // namespace mesa::app
