#pragma once

// 8-bit luma planes and YUV4MPEG2 / raw I420 stream I/O. Chroma planes and all
// header text are carried through untouched so that write(read(s)) == s.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lapwm/errors.hpp"

namespace lapwm {

class FramePlane {
 public:
  FramePlane() = default;
  FramePlane(int width, int height, std::uint8_t fill = 0)
      : FramePlane(width, height,
                   std::vector<std::uint8_t>(checked_area(width, height), fill)) {}
  FramePlane(int width, int height, std::vector<std::uint8_t> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    if (samples_.size() != checked_area(width, height))
      throw FormatError("plane sample count does not match its dimensions");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return samples_.size(); }
  int blocks_x() const noexcept { return width_ / 4; }
  int blocks_y() const noexcept { return height_ / 4; }
  std::size_t block_count() const noexcept {
    return static_cast<std::size_t>(blocks_x()) * static_cast<std::size_t>(blocks_y());
  }

  std::uint8_t at(int x, int y) const noexcept {
    return samples_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)];
  }
  std::uint8_t& at(int x, int y) noexcept {
    return samples_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)];
  }

  const std::vector<std::uint8_t>& samples() const noexcept { return samples_; }
  std::vector<std::uint8_t>& samples() noexcept { return samples_; }

  friend bool operator==(const FramePlane&, const FramePlane&) = default;

 private:
  static std::size_t checked_area(int width, int height) {
    if (width <= 0 || height <= 0 || width % 4 != 0 || height % 4 != 0)
      throw FormatError("frame dimensions must be positive multiples of 4, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

enum class ChromaLayout { Yuv420, Mono };

struct VideoFrame {
  std::string marker = "FRAME\n";  ///< FRAME line including parameters and '\n'
  FramePlane luma;
  std::vector<std::uint8_t> chroma;  ///< Cb then Cr, byte-exact passthrough
};

struct Video {
  std::string header = "";  ///< full stream header line including '\n'
  int width = 0;
  int height = 0;
  ChromaLayout chroma = ChromaLayout::Yuv420;
  std::vector<VideoFrame> frames;

  std::size_t chroma_bytes() const noexcept {
    if (chroma == ChromaLayout::Mono) return 0;
    const std::size_t cw = (static_cast<std::size_t>(width) + 1) / 2;
    const std::size_t ch = (static_cast<std::size_t>(height) + 1) / 2;
    return 2 * cw * ch;
  }
};

namespace detail {

inline std::string read_line(std::istream& in, std::int64_t& offset, std::size_t limit,
                             std::string_view what) {
  std::string line;
  const std::int64_t start = offset;
  for (;;) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof())
      throw FormatError("unterminated " + std::string(what) + " line", start);
    ++offset;
    line.push_back(static_cast<char>(c));
    if (c == '\n') return line;
    if (line.size() > limit) throw FormatError(std::string(what) + " line too long", start);
  }
}

inline int parse_dimension(std::string_view token, std::int64_t offset) {
  int v = 0;
  if (token.empty()) throw FormatError("empty dimension tag", offset);
  for (char c : token) {
    if (c < '0' || c > '9') throw FormatError("non-numeric dimension tag", offset);
    v = v * 10 + (c - '0');
    if (v > 1 << 16) throw FormatError("dimension too large", offset);
  }
  return v;
}

inline void read_exact(std::istream& in, std::uint8_t* dst, std::size_t count,
                       std::int64_t& offset, std::string_view what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got != count)
    throw FormatError("truncated " + std::string(what) + ": expected " + std::to_string(count) +
                          " bytes, got " + std::to_string(got),
                      offset + static_cast<std::int64_t>(got));
  offset += static_cast<std::int64_t>(count);
}

inline Video read_payload(std::istream& in, Video video, std::int64_t offset, bool y4m) {
  const std::size_t luma = static_cast<std::size_t>(video.width) *
                           static_cast<std::size_t>(video.height);
  for (;;) {
    const int peek = in.peek();
    if (peek == std::char_traits<char>::eof()) break;
    VideoFrame frame;
    if (y4m) {
      const std::int64_t at = offset;
      frame.marker = read_line(in, offset, 4096, "FRAME");
      if (frame.marker.rfind("FRAME", 0) != 0 ||
          (frame.marker.size() > 6 && frame.marker[5] != ' '))
        throw FormatError("expected FRAME marker", at);
    } else {
      frame.marker.clear();
    }
    std::vector<std::uint8_t> y(luma);
    read_exact(in, y.data(), luma, offset, "luma plane");
    frame.chroma.resize(video.chroma_bytes());
    read_exact(in, frame.chroma.data(), frame.chroma.size(), offset, "chroma planes");
    frame.luma = FramePlane(video.width, video.height, std::move(y));
    video.frames.push_back(std::move(frame));
  }
  return video;
}

}  // namespace detail

/// Parses a YUV4MPEG2 stream. Accepts C420* and Cmono colour spaces (8 bit);
/// a missing C tag means 4:2:0.
inline Video read_y4m(std::istream& in) {
  std::int64_t offset = 0;
  Video video;
  video.header = detail::read_line(in, offset, 4096, "stream header");
  std::istringstream tags(video.header.substr(0, video.header.size() - 1));
  std::string magic;
  tags >> magic;
  if (magic != "YUV4MPEG2") throw FormatError("missing YUV4MPEG2 signature", 0);
  std::int64_t tag_offset = static_cast<std::int64_t>(magic.size()) + 1;
  std::string tag;
  while (tags >> tag) {
    const std::string_view value = std::string_view(tag).substr(1);
    switch (tag[0]) {
      case 'W': video.width = detail::parse_dimension(value, tag_offset); break;
      case 'H': video.height = detail::parse_dimension(value, tag_offset); break;
      case 'C':
        if (value == "420" || value == "420jpeg" || value == "420paldv" || value == "420mpeg2")
          video.chroma = ChromaLayout::Yuv420;
        else if (value == "mono")
          video.chroma = ChromaLayout::Mono;
        else
          throw FormatError("unsupported colour space C" + std::string(value), tag_offset);
        break;
      default: break;  // F, I, A, X: carried verbatim in the header line
    }
    tag_offset += static_cast<std::int64_t>(tag.size()) + 1;
  }
  if (video.width <= 0 || video.height <= 0) throw FormatError("missing W or H tag", 0);
  if (video.width % 4 != 0 || video.height % 4 != 0)
    throw FormatError("frame dimensions must be multiples of 4", 0);
  return detail::read_payload(in, std::move(video), offset, true);
}

inline void write_y4m(const Video& video, std::ostream& out) {
  out << video.header;
  for (const VideoFrame& f : video.frames) {
    out << f.marker;
    out.write(reinterpret_cast<const char*>(f.luma.samples().data()),
              static_cast<std::streamsize>(f.luma.samples().size()));
    out.write(reinterpret_cast<const char*>(f.chroma.data()),
              static_cast<std::streamsize>(f.chroma.size()));
  }
  if (!out) throw FormatError("write failed");
}

/// Headerless planar I420 input of known size. The returned Video carries a
/// synthesized Y4M header so it can be written as Y4M.
inline Video read_raw_i420(std::istream& in, int width, int height) {
  if (width <= 0 || height <= 0 || width % 4 != 0 || height % 4 != 0)
    throw FormatError("raw frame dimensions must be positive multiples of 4");
  Video video;
  video.width = width;
  video.height = height;
  video.header = "YUV4MPEG2 W" + std::to_string(width) + " H" + std::to_string(height) +
                 " F30:1 Ip A1:1 C420jpeg\n";
  video = detail::read_payload(in, std::move(video), 0, false);
  for (VideoFrame& f : video.frames) f.marker = "FRAME\n";
  return video;
}

/// Planar output without stream or frame headers.
inline void write_raw(const Video& video, std::ostream& out) {
  for (const VideoFrame& f : video.frames) {
    out.write(reinterpret_cast<const char*>(f.luma.samples().data()),
              static_cast<std::streamsize>(f.luma.samples().size()));
    out.write(reinterpret_cast<const char*>(f.chroma.data()),
              static_cast<std::streamsize>(f.chroma.size()));
  }
  if (!out) throw FormatError("write failed");
}

}  // namespace lapwm
