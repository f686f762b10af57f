// Shared helpers for the test suites: seeded byte generators and a
// scratch-directory guard.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "fwchain/bytes.hpp"

namespace testutil {

inline fwchain::Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  fwchain::Bytes out(n);
  std::size_t i = 0;
  while (i + 8 <= n) {
    std::uint64_t v = rng();
    for (int k = 0; k < 8; ++k) out[i++] = std::uint8_t(v >> (k * 8));
  }
  std::uint64_t v = rng();
  while (i < n) {
    out[i++] = std::uint8_t(v);
    v >>= 8;
  }
  return out;
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("fwchain_test_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
