#pragma once

#include "thermohand/error.hpp"
#include "thermohand/image.hpp"
#include "thermohand/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace testing_support {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("thermohand_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

inline thermohand::GrayImage random_image(thermohand::Rng& rng, int w, int h) {
  thermohand::GrayImage img(w, h);
  for (auto& v : img.data()) v = rng.uniform();
  return img;
}

template <class F>
thermohand::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const thermohand::Error& e) {
    return e.code();
  }
  return static_cast<thermohand::ErrorCode>(0);
}

} // namespace testing_support
