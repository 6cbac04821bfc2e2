// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vidtok/error.hpp"

namespace vidtok {

struct PositionIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const PositionIndex&, const PositionIndex&) = default;
};

inline std::vector<PositionIndex> position_indices(std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1) {
    throw DimensionMismatch("position grid must be at least 1x1");
  }
  std::vector<PositionIndex> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.push_back({r, c});
    }
  }
  return out;
}

struct RopeConfig {
  std::size_t head_dim = 64;
  double base = 10000.0;

  void validate() const {
    if (head_dim == 0 || head_dim % 4 != 0) {
      throw ConfigError("rope head_dim must be a positive multiple of 4, got " +
                        std::to_string(head_dim));
    }
    if (!(base > 1.0)) {
      throw ConfigError("rope base must be > 1");
    }
  }
};

// Two-dimensional rotary embedding.
// The first head_dim/2 channels are rotated by the row coordinate and the
// remaining head_dim/2 by the column coordinate. Inside each half, channel
// pairs (2k, 2k+1) turn by angle pos * theta_k with
// theta_k = base^(-2k / (head_dim/2)). Angles are evaluated in double.
class Rope2D {
 public:
  explicit Rope2D(RopeConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const std::size_t half = cfg_.head_dim / 2;
    inv_freq_.resize(half / 2);
    for (std::size_t k = 0; k < inv_freq_.size(); ++k) {
      inv_freq_[k] = std::pow(cfg_.base, -2.0 * static_cast<double>(k) / static_cast<double>(half));
    }
  }

  const RopeConfig& config() const noexcept { return cfg_; }
  std::span<const double> frequencies() const noexcept { return inv_freq_; }

  std::vector<double> rotate(std::span<const double> v, PositionIndex p) const {
    if (v.size() != cfg_.head_dim) {
      throw DimensionMismatch("rope input has length " + std::to_string(v.size()) +
                              ", expected head_dim " + std::to_string(cfg_.head_dim));
    }
    std::vector<double> out(v.begin(), v.end());
    const std::size_t half = cfg_.head_dim / 2;
    rotate_half(std::span<double>(out).first(half), static_cast<double>(p.row));
    rotate_half(std::span<double>(out).subspan(half), static_cast<double>(p.col));
    return out;
  }

 private:
  void rotate_half(std::span<double> x, double pos) const {
    if (pos == 0.0) {
      return;
    }
    for (std::size_t k = 0; k < inv_freq_.size(); ++k) {
      const double angle = pos * inv_freq_[k];
      const double cs = std::cos(angle);
      const double sn = std::sin(angle);
      const double a = x[2 * k];
      const double b = x[2 * k + 1];
      x[2 * k] = a * cs - b * sn;
      x[2 * k + 1] = a * sn + b * cs;
    }
  }

  RopeConfig cfg_;
  std::vector<double> inv_freq_;
};

inline std::vector<double> rope_rotate(std::span<const double> v, PositionIndex p,
                                       const RopeConfig& cfg) {
  return Rope2D(cfg).rotate(v, p);
}

// <rotate(u, p), rotate(v, q)>; depends only on p - q.
inline double relative_inner_product_check(std::span<const double> u, std::span<const double> v,
                                           PositionIndex p, PositionIndex q,
                                           const RopeConfig& cfg) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("inner product operands differ in length");
  }
  const Rope2D rope(cfg);
  const auto ru = rope.rotate(u, p);
  const auto rv = rope.rotate(v, q);
  double dot = 0.0;
  for (std::size_t i = 0; i < ru.size(); ++i) {
    dot += ru[i] * rv[i];
  }
  return dot;
}

}  // namespace vidtok
