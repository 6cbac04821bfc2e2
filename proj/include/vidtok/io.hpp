// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

// Image and frame-directory ingest.
//
// Raw format (little endian):
//   "VIDTOKRAW1" | u32 height | u32 width | u8 channels | f32 * H*W*C
//
// Frame directory: files named by a zero-padded integer index with a .png or
// .vtraw extension, plus a `frames.meta` sidecar:
//   duration_s=<float>
//   fps_src=<float>
//   frame <index> <timestamp_s>
//   ...
// Blank lines and lines starting with '#' are ignored.

#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vidtok/diff_fp.hpp"
#include "vidtok/error.hpp"
#include "vidtok/geometry.hpp"
#include "vidtok/video.hpp"

namespace vidtok {

inline constexpr std::string_view kRawMagic = "VIDTOKRAW1";

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline std::string encode_raw(const ImageBuffer& image) {
  std::string out(kRawMagic);
  detail::put_u32(out, static_cast<std::uint32_t>(image.height()));
  detail::put_u32(out, static_cast<std::uint32_t>(image.width()));
  out.push_back(static_cast<char>(image.channels()));
  for (float v : image.data()) {
    detail::put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

inline ImageBuffer decode_raw(std::string_view bytes) {
  const std::size_t header = kRawMagic.size() + 9;
  if (bytes.size() < header || bytes.substr(0, kRawMagic.size()) != kRawMagic) {
    throw FormatError("not a VIDTOKRAW1 image");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + kRawMagic.size();
  const std::uint32_t h = detail::get_u32(p);
  const std::uint32_t w = detail::get_u32(p + 4);
  const std::uint8_t c = p[8];
  const std::size_t n = static_cast<std::size_t>(h) * w * c;
  if (bytes.size() != header + 4 * n) {
    throw FormatError("raw image payload is " + std::to_string(bytes.size() - header) +
                      " bytes, expected " + std::to_string(4 * n));
  }
  std::vector<float> data(n);
  const auto* body = p + 9;
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = std::bit_cast<float>(detail::get_u32(body + 4 * i));
  }
  return {h, w, c, std::move(data)};
}

inline ImageBuffer read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&img, path.c_str()) == 0) {
    throw FormatError("cannot read PNG " + path.string() + ": " + img.message);
  }
  // Alpha is dropped; color images become RGB, everything else gray.
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr) == 0) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  std::vector<float> data(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) data[i] = static_cast<float>(buf[i]) / 255.0F;
  return {img.height, img.width, channels, std::move(data)};
}

// 8-bit PNG; intensities are rounded to the nearest of 256 levels.
inline void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buf(image.data().size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = static_cast<png_byte>(std::lround(image.data()[i] * 255.0F));
  }
  if (png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr) == 0) {
    throw InputError("cannot write PNG " + path.string() + ": " + img.message);
  }
}

inline ImageBuffer read_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") {
    return read_png(path);
  }
  if (ext == ".vtraw") {
    return decode_raw(detail::read_file(path));
  }
  throw FormatError("unsupported image extension '" + ext + "' (" + path.string() + ")");
}

inline void write_image(const std::filesystem::path& path, const ImageBuffer& image) {
  if (path.extension() == ".vtraw") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    const std::string bytes = encode_raw(image);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  } else {
    write_png(path, image);
  }
}

struct FrameMeta {
  double duration_s = 0.0;
  double fps_src = 0.0;
  std::map<std::size_t, double> frames;  // index -> timestamp
};

inline FrameMeta parse_frame_meta(std::string_view text) {
  FrameMeta meta;
  bool have_duration = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("frames.meta line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      if (line.starts_with("duration_s=")) {
        meta.duration_s = std::stod(line.substr(11));
        have_duration = true;
      } else if (line.starts_with("fps_src=")) {
        meta.fps_src = std::stod(line.substr(8));
      } else if (line.starts_with("frame ")) {
        std::istringstream ls(line.substr(6));
        std::size_t idx = 0;
        double ts = 0.0;
        std::string extra;
        if (!(ls >> idx >> ts) || (ls >> extra)) fail("expected 'frame <index> <timestamp_s>'");
        if (!meta.frames.emplace(idx, ts).second) fail("duplicate frame index");
      } else {
        fail("unrecognized line '" + line + "'");
      }
    } catch (const std::invalid_argument&) {
      fail("bad number");
    } catch (const std::out_of_range&) {
      fail("number out of range");
    }
  }
  if (!have_duration || !(meta.duration_s > 0.0)) throw ParseError("frames.meta needs duration_s > 0");
  if (meta.frames.empty()) throw ParseError("frames.meta lists no frames");
  double prev = -1.0;
  for (const auto& [idx, ts] : meta.frames) {
    if (!(ts > prev) || ts < 0.0) throw ParseError("frame timestamps must increase with index");
    prev = ts;
  }
  return meta;
}

inline std::string format_frame_meta(const FrameMeta& meta) {
  std::ostringstream out;
  out.precision(17);
  out << "duration_s=" << meta.duration_s << "\n";
  out << "fps_src=" << meta.fps_src << "\n";
  for (const auto& [idx, ts] : meta.frames) out << "frame " << idx << " " << ts << "\n";
  return out.str();
}

// Numbered image files in `dir`, keyed by index.
inline std::map<std::size_t, std::filesystem::path> list_frame_files(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("frame directory not found: " + dir.string());
  }
  std::map<std::size_t, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".png" && ext != ".vtraw") continue;
    const auto stem = entry.path().stem().string();
    if (stem.empty() || stem.find_first_not_of("0123456789") != std::string::npos) continue;
    const auto idx = static_cast<std::size_t>(std::stoull(stem));
    if (!out.emplace(idx, entry.path()).second) {
      throw InputError("two frame files share index " + std::to_string(idx));
    }
  }
  return out;
}

struct LoadedFrames {
  FrameMeta meta;
  std::vector<std::size_t> indices;  // source frame index per loaded frame
  FrameSequence sequence;
};

// Picks, for each sampled timestamp, the listed frame nearest in time (ties
// to the earlier frame), drops repeats and loads those images.
inline LoadedFrames load_frame_directory(const std::filesystem::path& dir,
                                         const SamplingPolicy& policy) {
  const auto files = list_frame_files(dir);
  FrameMeta meta = parse_frame_meta(detail::read_file(dir / "frames.meta"));
  for (const auto& [idx, ts] : meta.frames) {
    if (files.count(idx) == 0) {
      throw InputError("frames.meta lists frame " + std::to_string(idx) + " with no image file");
    }
  }
  std::vector<std::pair<double, std::size_t>> listed;
  for (const auto& [idx, ts] : meta.frames) listed.emplace_back(ts, idx);

  std::vector<std::size_t> chosen;
  for (double t : sample_timestamps(meta.duration_s, policy)) {
    auto it = std::lower_bound(listed.begin(), listed.end(), std::pair(t, std::size_t{0}));
    std::size_t pos = static_cast<std::size_t>(it - listed.begin());
    if (pos == listed.size() ||
        (pos > 0 && t - listed[pos - 1].first <= listed[pos].first - t)) {
      pos = pos == 0 ? 0 : pos - 1;
    }
    if (chosen.empty() || chosen.back() != pos) chosen.push_back(pos);
  }

  std::vector<ImageBuffer> images;
  std::vector<double> stamps;
  std::vector<std::size_t> indices;
  for (std::size_t pos : chosen) {
    images.push_back(read_image(files.at(listed[pos].second)));
    stamps.push_back(listed[pos].first);
    indices.push_back(listed[pos].second);
  }
  return {std::move(meta), std::move(indices), FrameSequence(std::move(images), std::move(stamps))};
}

// Snaps every frame to multiples of `block` (no token cap) and resamples.
inline FrameSequence snap_frames(const FrameSequence& seq, std::size_t patch_size,
                                 std::size_t merge_factor, std::size_t max_frame_tokens) {
  const Resolution target =
      smart_resize(seq.resolution(), patch_size, merge_factor, max_frame_tokens);
  if (target == seq.resolution()) return seq;
  std::vector<ImageBuffer> frames;
  frames.reserve(seq.size());
  for (const auto& f : seq.frames()) frames.push_back(bilinear_resize(f, target));
  return {std::move(frames), {seq.timestamps().begin(), seq.timestamps().end()}};
}

}  // namespace vidtok
