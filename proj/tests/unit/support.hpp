#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(MKTLAB_FIXTURE_DIR) / name;
}

// Fresh directory under the system temp dir, unique per name and process.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static const auto stamp = std::random_device{}();
  auto dir = std::filesystem::temp_directory_path() / ("mktlab_" + std::to_string(stamp)) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
