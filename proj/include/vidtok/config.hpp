// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "vidtok/curation.hpp"
#include "vidtok/error.hpp"
#include "vidtok/video.hpp"

namespace vidtok {

// Pipeline settings. Serialized as flat `key=value` lines; '#' starts a
// comment line.
struct Config {
  std::size_t patch_size = 14;
  std::size_t merge_factor = 2;
  double prune_threshold = 0.1;
  std::string distance = "mean";  // mean | sum
  double fps = 1.0;
  std::size_t max_frames = 180;
  std::size_t max_total_tokens = 16384;
  std::size_t max_vision_tokens = 10240;
  std::string encoder = "identity";  // identity | randproj
  std::size_t feature_dim = 64;
  std::uint64_t seed = 0;

  VideoTokenizerConfig tokenizer() const {
    VideoTokenizerConfig t;
    t.patch_size = patch_size;
    t.merge_factor = merge_factor;
    t.threshold = prune_threshold;
    if (distance == "mean") {
      t.distance = DistanceMode::kMeanAbsolute;
    } else if (distance == "sum") {
      t.distance = DistanceMode::kSumAbsolute;
    } else {
      throw ConfigError("distance must be 'mean' or 'sum', got '" + distance + "'");
    }
    t.budget = {max_total_tokens, max_vision_tokens};
    t.sampling = {fps, max_frames};
    return t;
  }

  void validate() const {
    tokenizer().validate();
    if (encoder != "identity" && encoder != "randproj") {
      throw ConfigError("encoder must be 'identity' or 'randproj', got '" + encoder + "'");
    }
    if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  }
};

namespace detail {

inline std::string shortest_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

}  // namespace detail

inline std::string format_config(const Config& c) {
  std::ostringstream out;
  out << "patch_size=" << c.patch_size << "\n"
      << "merge_factor=" << c.merge_factor << "\n"
      << "prune_threshold=" << detail::shortest_double(c.prune_threshold) << "\n"
      << "distance=" << c.distance << "\n"
      << "fps=" << detail::shortest_double(c.fps) << "\n"
      << "max_frames=" << c.max_frames << "\n"
      << "max_total_tokens=" << c.max_total_tokens << "\n"
      << "max_vision_tokens=" << c.max_vision_tokens << "\n"
      << "encoder=" << c.encoder << "\n"
      << "feature_dim=" << c.feature_dim << "\n"
      << "seed=" << c.seed << "\n";
  return out.str();
}

// Applies the keys present in `text` on top of `base`.
inline Config parse_config(std::string_view text, Config base = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    const std::string ctx = "config key '" + key + "'";
    if (key == "patch_size") {
      base.patch_size = detail::parse_count(value, ctx);
    } else if (key == "merge_factor") {
      base.merge_factor = detail::parse_count(value, ctx);
    } else if (key == "prune_threshold") {
      base.prune_threshold = detail::parse_double(value, ctx);
    } else if (key == "distance") {
      base.distance = value;
    } else if (key == "fps") {
      base.fps = detail::parse_double(value, ctx);
    } else if (key == "max_frames") {
      base.max_frames = detail::parse_count(value, ctx);
    } else if (key == "max_total_tokens") {
      base.max_total_tokens = detail::parse_count(value, ctx);
    } else if (key == "max_vision_tokens") {
      base.max_vision_tokens = detail::parse_count(value, ctx);
    } else if (key == "encoder") {
      base.encoder = value;
    } else if (key == "feature_dim") {
      base.feature_dim = detail::parse_count(value, ctx);
    } else if (key == "seed") {
      base.seed = detail::parse_count(value, ctx);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

inline EncoderPlug make_encoder(const Config& c, std::size_t channels) {
  if (c.encoder == "identity") return identity_encoder(c.patch_size, channels);
  if (c.encoder == "randproj") {
    return random_projection_encoder(c.patch_size, channels, c.feature_dim, c.seed);
  }
  throw ConfigError("unknown encoder '" + c.encoder + "'");
}

}  // namespace vidtok
