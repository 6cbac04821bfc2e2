// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vidtok/error.hpp"

namespace vidtok {

struct Resolution {
  std::size_t height = 1;
  std::size_t width = 1;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// H x W x C raster of intensities in [0, 1], row-major with interleaved
// channels. Channels are 1 (gray) or 3 (RGB).
class ImageBuffer {
 public:
  ImageBuffer(std::size_t height, std::size_t width, std::size_t channels,
              std::vector<float> data)
      : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (height_ < 1 || width_ < 1) {
      throw DimensionMismatch("image must be at least 1x1");
    }
    if (channels_ != 1 && channels_ != 3) {
      throw DimensionMismatch("image channels must be 1 or 3, got " + std::to_string(channels_));
    }
    if (data_.size() != height_ * width_ * channels_) {
      throw DimensionMismatch("image data length " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(height_) + "x" +
                              std::to_string(width_) + "x" + std::to_string(channels_));
    }
    for (float v : data_) {
      if (!(v >= 0.0F && v <= 1.0F)) {
        throw InputError("image intensity outside [0,1]: " + std::to_string(v));
      }
    }
  }

  static ImageBuffer filled(std::size_t height, std::size_t width, std::size_t channels,
                            float value) {
    return {height, width, channels, std::vector<float>(height * width * channels, value)};
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  Resolution resolution() const noexcept { return {height_, width_}; }
  std::span<const float> data() const noexcept { return data_; }

  float at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return data_[(y * width_ + x) * channels_ + c];
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::vector<float> data_;
};

// rows x cols lattice of equally sized cells. A cell is either a flattened
// pixel patch (patch_size > 0, layout py, px, channel) or a feature vector
// (patch_size == 0).
template <typename T>
class BasicPatchGrid {
 public:
  using value_type = T;

  BasicPatchGrid(std::size_t rows, std::size_t cols, std::size_t cell_size, std::vector<T> data,
                 std::size_t patch_size = 0, std::size_t channels = 0)
      : rows_(rows),
        cols_(cols),
        cell_size_(cell_size),
        patch_size_(patch_size),
        channels_(channels),
        data_(std::move(data)) {
    if (rows_ * cols_ < 1) {
      throw DimensionMismatch("patch grid must have at least one cell");
    }
    if (cell_size_ < 1) {
      throw DimensionMismatch("patch grid cells must be non-empty");
    }
    if (data_.size() != rows_ * cols_ * cell_size_) {
      throw DimensionMismatch("patch grid data length does not match rows*cols*cell_size");
    }
    if (patch_size_ > 0 && patch_size_ * patch_size_ * channels_ != cell_size_) {
      throw DimensionMismatch("pixel cell size must equal patch_size^2 * channels");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  std::size_t cell_size() const noexcept { return cell_size_; }
  std::size_t patch_size() const noexcept { return patch_size_; }
  std::size_t channels() const noexcept { return channels_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<const T> cell(std::size_t r, std::size_t c) const {
    return std::span<const T>(data_).subspan((r * cols_ + c) * cell_size_, cell_size_);
  }

  friend bool operator==(const BasicPatchGrid&, const BasicPatchGrid&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t cell_size_;
  std::size_t patch_size_;
  std::size_t channels_;
  std::vector<T> data_;
};

using PatchGrid = BasicPatchGrid<float>;
using FeatureGrid = BasicPatchGrid<double>;

struct TokenBudget {
  std::size_t max_total_tokens = 16384;
  std::size_t max_vision_tokens = 10240;

  void validate() const {
    if (max_total_tokens == 0 || max_vision_tokens == 0) {
      throw ConfigError("token budgets must be positive");
    }
    if (max_vision_tokens > max_total_tokens) {
      throw ConfigError("max_vision_tokens (" + std::to_string(max_vision_tokens) +
                        ") exceeds max_total_tokens (" + std::to_string(max_total_tokens) + ")");
    }
  }
};

// Snaps a resolution down to multiples of patch_size * merge_factor so the
// post-merge token grid fits max_vision_tokens. Dimensions smaller than one
// block are clamped up to exactly one block. When the snapped grid is over
// budget, both sides are scaled by sqrt(budget / tokens) and re-snapped.
inline Resolution smart_resize(Resolution input, std::size_t patch_size, std::size_t merge_factor,
                               std::size_t max_vision_tokens) {
  if (patch_size < 1 || merge_factor < 1 || max_vision_tokens < 1) {
    throw ConfigError("smart_resize requires patch_size, merge_factor, max_vision_tokens >= 1");
  }
  if (input.height < 1 || input.width < 1) {
    throw DimensionMismatch("resolution must be at least 1x1");
  }
  const std::size_t block = patch_size * merge_factor;
  std::size_t rows = std::max<std::size_t>(1, input.height / block);
  std::size_t cols = std::max<std::size_t>(1, input.width / block);

  if (rows * cols > max_vision_tokens) {
    const double h = static_cast<double>(input.height);
    const double w = static_cast<double>(input.width);
    const double scale =
        std::sqrt(static_cast<double>(max_vision_tokens) * static_cast<double>(block * block) /
                  (h * w));
    rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(h * scale / block)));
    cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(w * scale / block)));
    // The clamp to one block can push a very thin image back over budget;
    // trim the long side.
    if (rows * cols > max_vision_tokens) {
      if (rows <= cols) {
        cols = std::max<std::size_t>(1, max_vision_tokens / rows);
      } else {
        rows = std::max<std::size_t>(1, max_vision_tokens / cols);
      }
    }
  }
  return {rows * block, cols * block};
}

inline PatchGrid patchify(const ImageBuffer& image, std::size_t patch_size) {
  if (patch_size < 1) {
    throw ConfigError("patch_size must be >= 1");
  }
  if (image.height() % patch_size != 0) {
    throw DimensionMismatch("height " + std::to_string(image.height()) +
                            " is not a multiple of patch size " + std::to_string(patch_size));
  }
  if (image.width() % patch_size != 0) {
    throw DimensionMismatch("width " + std::to_string(image.width()) +
                            " is not a multiple of patch size " + std::to_string(patch_size));
  }
  const std::size_t rows = image.height() / patch_size;
  const std::size_t cols = image.width() / patch_size;
  const std::size_t ch = image.channels();
  const std::size_t row_len = patch_size * ch;
  std::vector<float> out;
  out.reserve(image.data().size());
  const auto px = image.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t py = 0; py < patch_size; ++py) {
        const std::size_t y = r * patch_size + py;
        const auto begin = px.begin() + static_cast<std::ptrdiff_t>((y * image.width() + c * patch_size) * ch);
        out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(row_len));
      }
    }
  }
  return PatchGrid(rows, cols, patch_size * patch_size * ch, std::move(out), patch_size, ch);
}

inline ImageBuffer unpatchify(const PatchGrid& grid) {
  const std::size_t p = grid.patch_size();
  const std::size_t ch = grid.channels();
  if (p == 0) {
    throw DimensionMismatch("unpatchify requires a pixel grid, got feature vectors");
  }
  const std::size_t height = grid.rows() * p;
  const std::size_t width = grid.cols() * p;
  std::vector<float> out(height * width * ch);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const auto cell = grid.cell(r, c);
      for (std::size_t py = 0; py < p; ++py) {
        const std::size_t y = r * p + py;
        std::copy_n(cell.begin() + static_cast<std::ptrdiff_t>(py * p * ch), p * ch,
                    out.begin() + static_cast<std::ptrdiff_t>((y * width + c * p) * ch));
      }
    }
  }
  return {height, width, ch, std::move(out)};
}

namespace detail {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Half-pixel-center source coordinate for each destination index.
inline std::vector<Tap> bilinear_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min(lo + 1, in - 1);
    taps[i] = {lo, hi, src - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace detail

inline ImageBuffer bilinear_resize(const ImageBuffer& image, Resolution target) {
  if (target.height < 1 || target.width < 1) {
    throw DimensionMismatch("resize target must be at least 1x1");
  }
  const auto ys = detail::bilinear_taps(image.height(), target.height);
  const auto xs = detail::bilinear_taps(image.width(), target.width);
  const std::size_t ch = image.channels();
  std::vector<float> out(target.height * target.width * ch);
  std::size_t k = 0;
  for (const auto& ty : ys) {
    for (const auto& tx : xs) {
      for (std::size_t c = 0; c < ch; ++c) {
        // a + w * (b - a) keeps constant regions exact.
        const double a = image.at(ty.lo, tx.lo, c);
        const double b = image.at(ty.lo, tx.hi, c);
        const double d = image.at(ty.hi, tx.lo, c);
        const double e = image.at(ty.hi, tx.hi, c);
        const double top = a + tx.frac * (b - a);
        const double bottom = d + tx.frac * (e - d);
        const double v = top + ty.frac * (bottom - top);
        out[k++] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return {target.height, target.width, ch, std::move(out)};
}

// Resizes only when needed; identical resolutions return a copy untouched.
inline ImageBuffer fit_to(const ImageBuffer& image, Resolution target) {
  if (image.resolution() == target) {
    return image;
  }
  return bilinear_resize(image, target);
}

}  // namespace vidtok
