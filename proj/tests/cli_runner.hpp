#pragma once

// Runs the lapwm executable and captures stdout and the exit code.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "lapwm/frame.hpp"

namespace clitest {

struct Result {
  int exit_code = -1;
  std::string out;
};

inline Result run(const std::string& args) {
  const std::string cmd = std::string(LAPWM_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lapwm-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Textured QCIF 4:2:0 clip whose frames differ slightly.
inline void write_test_clip(const std::filesystem::path& path, int frames) {
  lapwm::Video v;
  v.width = 176;
  v.height = 144;
  v.header = "YUV4MPEG2 W176 H144 F30:1 Ip A1:1 C420jpeg\n";
  for (int f = 0; f < frames; ++f) {
    lapwm::VideoFrame frame;
    frame.luma = lapwm::FramePlane(176, 144);
    for (int y = 0; y < 144; ++y)
      for (int x = 0; x < 176; ++x)
        frame.luma.at(x, y) = static_cast<std::uint8_t>(
            128 + 60 * std::sin(x * 0.07 + 0.2 * f) * std::cos(y * 0.05) + 10 * std::sin(x * y * 0.01));
    frame.chroma.assign(v.chroma_bytes(), static_cast<std::uint8_t>(100 + f));
    v.frames.push_back(std::move(frame));
  }
  std::ofstream out(path, std::ios::binary);
  lapwm::write_y4m(v, out);
}

}  // namespace clitest
