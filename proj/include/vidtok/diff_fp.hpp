// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vidtok/error.hpp"
#include "vidtok/geometry.hpp"
#include "vidtok/rope.hpp"

namespace vidtok {

// Ordered frames of one shape with strictly increasing timestamps (seconds).
class FrameSequence {
 public:
  FrameSequence(std::vector<ImageBuffer> frames, std::vector<double> timestamps)
      : frames_(std::move(frames)), timestamps_(std::move(timestamps)) {
    if (frames_.empty()) {
      throw InputError("frame sequence must contain at least one frame");
    }
    if (frames_.size() != timestamps_.size()) {
      throw DimensionMismatch("frame count " + std::to_string(frames_.size()) +
                              " does not match timestamp count " +
                              std::to_string(timestamps_.size()));
    }
    for (std::size_t t = 1; t < frames_.size(); ++t) {
      if (frames_[t].resolution() != frames_[0].resolution() ||
          frames_[t].channels() != frames_[0].channels()) {
        throw DimensionMismatch("frame " + std::to_string(t) + " differs in shape from frame 0");
      }
      if (!(timestamps_[t] > timestamps_[t - 1])) {
        throw InputError("frame timestamps must be strictly increasing (frame " +
                         std::to_string(t) + ")");
      }
    }
  }

  std::size_t size() const noexcept { return frames_.size(); }
  const ImageBuffer& frame(std::size_t t) const { return frames_.at(t); }
  double timestamp(std::size_t t) const { return timestamps_.at(t); }
  std::span<const ImageBuffer> frames() const noexcept { return frames_; }
  std::span<const double> timestamps() const noexcept { return timestamps_; }
  Resolution resolution() const noexcept { return frames_[0].resolution(); }

 private:
  std::vector<ImageBuffer> frames_;
  std::vector<double> timestamps_;
};

enum class DistanceMode {
  kMeanAbsolute,  // 1-norm divided by element count
  kSumAbsolute,   // raw 1-norm
};

struct PruneConfig {
  double threshold = 0.1;
  std::size_t region_size = 28;
  DistanceMode mode = DistanceMode::kMeanAbsolute;

  void validate() const {
    if (!(threshold >= 0.0) || std::isinf(threshold)) {
      throw ConfigError("prune threshold must be finite and >= 0");
    }
    if (region_size < 1) {
      throw ConfigError("prune region_size must be >= 1");
    }
  }
};

template <typename T>
double patch_distance(std::span<const T> a, std::span<const T> b,
                      DistanceMode mode = DistanceMode::kMeanAbsolute) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("patch lengths differ: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
  if (a.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  }
  return mode == DistanceMode::kMeanAbsolute ? sum / static_cast<double>(a.size()) : sum;
}

inline double patch_distance(std::span<const float> a, std::span<const float> b,
                             DistanceMode mode = DistanceMode::kMeanAbsolute) {
  return patch_distance<float>(a, b, mode);
}

class PruneMask {
 public:
  PruneMask(std::size_t frames, std::size_t rows, std::size_t cols)
      : frames_(frames), rows_(rows), cols_(cols), keep_(frames * rows * cols, 1) {}

  std::size_t frames() const noexcept { return frames_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return keep_.size(); }

  bool keep(std::size_t t, std::size_t r, std::size_t c) const {
    return keep_[index(t, r, c)] != 0;
  }
  void set(std::size_t t, std::size_t r, std::size_t c, bool value) {
    keep_[index(t, r, c)] = value ? 1 : 0;
  }
  std::size_t kept_in_frame(std::size_t t) const {
    std::size_t n = 0;
    for (std::size_t i = t * rows_ * cols_; i < (t + 1) * rows_ * cols_; ++i) {
      n += keep_[i];
    }
    return n;
  }

  friend bool operator==(const PruneMask&, const PruneMask&) = default;

 private:
  std::size_t index(std::size_t t, std::size_t r, std::size_t c) const {
    if (t >= frames_ || r >= rows_ || c >= cols_) {
      throw DimensionMismatch("mask index out of range");
    }
    return (t * rows_ + r) * cols_ + c;
  }

  std::size_t frames_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> keep_;
};

namespace detail {

// Distance between the same region_size x region_size block in two frames,
// read directly from the raw rasters in row-major order.
inline double region_distance(const ImageBuffer& a, const ImageBuffer& b, std::size_t r,
                              std::size_t c, std::size_t region, DistanceMode mode) {
  const std::size_t ch = a.channels();
  const auto pa = a.data();
  const auto pb = b.data();
  double sum = 0.0;
  for (std::size_t y = r * region; y < (r + 1) * region; ++y) {
    const std::size_t base = (y * a.width() + c * region) * ch;
    for (std::size_t i = 0; i < region * ch; ++i) {
      sum += std::abs(static_cast<double>(pa[base + i]) - static_cast<double>(pb[base + i]));
    }
  }
  if (mode == DistanceMode::kMeanAbsolute) {
    sum /= static_cast<double>(region * region * ch);
  }
  return sum;
}

}  // namespace detail

// Token (t, r, c) is dropped iff its region differs from the same region of
// frame t-1 by strictly less than the threshold. Frame 0 is always kept.
inline PruneMask compute_prune_mask(const FrameSequence& seq, const PruneConfig& cfg) {
  cfg.validate();
  const Resolution res = seq.resolution();
  if (res.height % cfg.region_size != 0 || res.width % cfg.region_size != 0) {
    throw DimensionMismatch("frame " + std::to_string(res.height) + "x" +
                            std::to_string(res.width) + " is not a multiple of region size " +
                            std::to_string(cfg.region_size));
  }
  const std::size_t rows = res.height / cfg.region_size;
  const std::size_t cols = res.width / cfg.region_size;
  PruneMask mask(seq.size(), rows, cols);
  for (std::size_t t = 1; t < seq.size(); ++t) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double d = detail::region_distance(seq.frame(t), seq.frame(t - 1), r, c,
                                                 cfg.region_size, cfg.mode);
        mask.set(t, r, c, !(d < cfg.threshold));
      }
    }
  }
  return mask;
}

struct VisionToken {
  std::size_t frame = 0;
  PositionIndex position;
  double timestamp = 0.0;
  std::vector<double> feature;

  friend bool operator==(const VisionToken&, const VisionToken&) = default;
};

inline std::vector<VisionToken> apply_mask(std::span<const FeatureGrid> grids,
                                           const PruneMask& mask,
                                           std::span<const double> timestamps) {
  if (grids.size() != mask.frames()) {
    throw DimensionMismatch("mask covers " + std::to_string(mask.frames()) + " frames but " +
                            std::to_string(grids.size()) + " grids were given");
  }
  if (timestamps.size() != grids.size()) {
    throw DimensionMismatch("timestamp count does not match frame count");
  }
  std::vector<VisionToken> out;
  for (std::size_t t = 0; t < grids.size(); ++t) {
    const auto& g = grids[t];
    if (g.rows() != mask.rows() || g.cols() != mask.cols()) {
      throw DimensionMismatch("grid " + std::to_string(t) + " is " + std::to_string(g.rows()) +
                              "x" + std::to_string(g.cols()) + ", mask is " +
                              std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()));
    }
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) {
        if (mask.keep(t, r, c)) {
          const auto cell = g.cell(r, c);
          out.push_back({t, {r, c}, timestamps[t], {cell.begin(), cell.end()}});
        }
      }
    }
  }
  return out;
}

struct CompressionStats {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  double ratio = 0.0;
};

inline CompressionStats compression_stats(const PruneMask& mask) {
  CompressionStats s;
  for (std::size_t t = 0; t < mask.frames(); ++t) {
    s.kept += mask.kept_in_frame(t);
  }
  s.dropped = mask.size() - s.kept;
  s.ratio = mask.size() == 0 ? 0.0
                             : static_cast<double>(s.dropped) / static_cast<double>(mask.size());
  return s;
}

}  // namespace vidtok
