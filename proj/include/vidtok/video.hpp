// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vidtok/diff_fp.hpp"
#include "vidtok/error.hpp"
#include "vidtok/geometry.hpp"

namespace vidtok {

struct SamplingPolicy {
  double fps = 1.0;
  std::size_t max_frames = 180;

  void validate() const {
    if (!(fps > 0.0) || std::isinf(fps)) {
      throw ConfigError("sampling fps must be finite and > 0");
    }
    if (max_frames < 1) {
      throw ConfigError("max_frames must be >= 1");
    }
  }
};

// m indices spread evenly over [0, n-1], first and last included, rounded
// half up. Strictly increasing whenever m <= n.
inline std::vector<std::size_t> uniform_indices(std::size_t n, std::size_t m) {
  if (m == 0 || n == 0) {
    return {};
  }
  if (m >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  if (m == 1) {
    return {0};
  }
  std::vector<std::size_t> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = (2 * (n - 1) * j + (m - 1)) / (2 * (m - 1));
  }
  return out;
}

inline std::vector<double> sample_timestamps(double duration, const SamplingPolicy& policy) {
  policy.validate();
  if (!(duration > 0.0) || std::isinf(duration)) {
    throw InputError("video duration must be finite and > 0");
  }
  std::vector<double> ts;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / policy.fps;
    if (!(t < duration)) break;
    ts.push_back(t);
  }
  if (ts.size() <= policy.max_frames) {
    return ts;
  }
  std::vector<double> out;
  out.reserve(policy.max_frames);
  for (std::size_t i : uniform_indices(ts.size(), policy.max_frames)) {
    out.push_back(ts[i]);
  }
  return out;
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; mt19937_64 output is fixed
// by the standard, so this is reproducible across toolchains.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Stand-in for the vision encoder: maps a pixel grid to a feature grid with
// the same rows x cols. Plugs are probed for that contract at creation.
class EncoderPlug {
 public:
  using Fn = std::function<FeatureGrid(const PatchGrid&)>;

  static EncoderPlug create(std::string name, Fn fn, std::size_t probe_patch_size,
                            std::size_t probe_channels) {
    EncoderPlug plug(std::move(name), std::move(fn));
    plug.probe(probe_patch_size, probe_channels);
    return plug;
  }

  const std::string& name() const noexcept { return name_; }

  FeatureGrid operator()(const PatchGrid& grid) const {
    FeatureGrid out = fn_(grid);
    if (out.rows() != grid.rows() || out.cols() != grid.cols()) {
      throw EncoderShapeError("encoder '" + name_ + "' mapped " + std::to_string(grid.rows()) +
                              "x" + std::to_string(grid.cols()) + " to " +
                              std::to_string(out.rows()) + "x" + std::to_string(out.cols()));
    }
    return out;
  }

 private:
  EncoderPlug(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  void probe(std::size_t patch_size, std::size_t channels) const {
    if (!fn_) {
      throw EncoderShapeError("encoder '" + name_ + "' has no function");
    }
    std::mt19937_64 rng(0x5eed);
    const std::size_t rows = 2;
    const std::size_t cols = 3;
    const std::size_t cell = patch_size * patch_size * channels;
    std::vector<float> px(rows * cols * cell);
    for (auto& v : px) v = static_cast<float>(detail::unit_uniform(rng));
    const PatchGrid grid(rows, cols, cell, std::move(px), patch_size, channels);
    const FeatureGrid first = (*this)(grid);
    const FeatureGrid second = fn_(grid);
    if (!(first == second)) {
      throw EncoderShapeError("encoder '" + name_ + "' is not deterministic on the probe grid");
    }
  }

  std::string name_;
  Fn fn_;
};

// Flattened patch pixels as the feature vector.
inline EncoderPlug identity_encoder(std::size_t patch_size, std::size_t channels) {
  return EncoderPlug::create(
      "identity",
      [](const PatchGrid& g) {
        return FeatureGrid(g.rows(), g.cols(), g.cell_size(),
                           std::vector<double>(g.data().begin(), g.data().end()));
      },
      patch_size, channels);
}

// Seeded dense projection W x with W entries uniform in
// [-sqrt(3/in), sqrt(3/in)] (unit-variance rows scaled by fan-in).
inline EncoderPlug random_projection_encoder(std::size_t patch_size, std::size_t channels,
                                             std::size_t out_dim, std::uint64_t seed) {
  if (out_dim < 1) {
    throw ConfigError("projection output dimension must be >= 1");
  }
  const std::size_t in_dim = patch_size * patch_size * channels;
  std::vector<double> weights(in_dim * out_dim);
  std::mt19937_64 rng(seed);
  const double scale = std::sqrt(3.0 / static_cast<double>(in_dim));
  for (auto& w : weights) w = (2.0 * detail::unit_uniform(rng) - 1.0) * scale;
  return EncoderPlug::create(
      "randproj",
      [weights = std::move(weights), in_dim, out_dim](const PatchGrid& g) {
        if (g.cell_size() != in_dim) {
          throw DimensionMismatch("randproj expects cells of " + std::to_string(in_dim) +
                                  " values, got " + std::to_string(g.cell_size()));
        }
        std::vector<double> out(g.size() * out_dim);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const auto cell = g.data().subspan(i * in_dim, in_dim);
          for (std::size_t o = 0; o < out_dim; ++o) {
            double acc = 0.0;
            for (std::size_t k = 0; k < in_dim; ++k) acc += weights[o * in_dim + k] * cell[k];
            out[i * out_dim + o] = acc;
          }
        }
        return FeatureGrid(g.rows(), g.cols(), out_dim, std::move(out));
      },
      patch_size, channels);
}

// Spatial token merge: each factor x factor block of feature vectors becomes
// its mean, which for factor 2 is the bilinear sample at the block center.
inline FeatureGrid downsample_tokens(const FeatureGrid& grid, std::size_t factor = 2) {
  if (factor < 1) {
    throw ConfigError("downsample factor must be >= 1");
  }
  if (grid.rows() % factor != 0 || grid.cols() % factor != 0) {
    throw DimensionMismatch("grid " + std::to_string(grid.rows()) + "x" +
                            std::to_string(grid.cols()) + " is not divisible by factor " +
                            std::to_string(factor));
  }
  if (factor == 1) {
    return grid;
  }
  const std::size_t rows = grid.rows() / factor;
  const std::size_t cols = grid.cols() / factor;
  const std::size_t d = grid.cell_size();
  std::vector<double> out(rows * cols * d);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double* dst = out.data() + (r * cols + c) * d;
      std::size_t n = 0;
      for (std::size_t dr = 0; dr < factor; ++dr) {
        for (std::size_t dc = 0; dc < factor; ++dc) {
          const auto src = grid.cell(r * factor + dr, c * factor + dc);
          ++n;
          // Running mean is exact on constant blocks.
          for (std::size_t k = 0; k < d; ++k) {
            dst[k] += (src[k] - dst[k]) / static_cast<double>(n);
          }
        }
      }
    }
  }
  return FeatureGrid(rows, cols, d, std::move(out));
}

struct TextToken {
  std::string text;

  friend bool operator==(const TextToken&, const TextToken&) = default;
};

using TokenElement = std::variant<VisionToken, TextToken>;

class TokenSequence {
 public:
  TokenSequence() = default;
  explicit TokenSequence(std::vector<TokenElement> elements) : elements_(std::move(elements)) {
    for (const auto& e : elements_) {
      if (std::holds_alternative<VisionToken>(e)) ++vision_;
    }
  }

  void push_back(TokenElement e) {
    if (std::holds_alternative<VisionToken>(e)) ++vision_;
    elements_.push_back(std::move(e));
  }

  const std::vector<TokenElement>& elements() const noexcept { return elements_; }
  std::size_t vision_count() const noexcept { return vision_; }
  std::size_t text_count() const noexcept { return elements_.size() - vision_; }
  std::size_t total_count() const noexcept { return elements_.size(); }

  struct FrameSummary {
    std::size_t frame = 0;
    double timestamp = 0.0;
    std::size_t tokens = 0;
  };

  // Frames that contribute at least one vision token, in sequence order.
  std::vector<FrameSummary> frames() const {
    std::vector<FrameSummary> out;
    for (const auto& e : elements_) {
      if (const auto* v = std::get_if<VisionToken>(&e)) {
        if (out.empty() || out.back().frame != v->frame) {
          out.push_back({v->frame, v->timestamp, 0});
        }
        ++out.back().tokens;
      }
    }
    return out;
  }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<TokenElement> elements_;
  std::size_t vision_ = 0;
};

// Drops whole frames, chosen by uniform_indices, until the vision tokens fit
// the budget and the frame count fits policy.max_frames. Text is untouched.
inline TokenSequence enforce_budget(const TokenSequence& seq, const TokenBudget& budget,
                                    const SamplingPolicy& policy = {}) {
  budget.validate();
  policy.validate();
  const auto frames = seq.frames();
  const std::size_t n = frames.size();

  std::size_t m = std::min(n, policy.max_frames);
  std::vector<std::size_t> chosen;
  for (; m >= 1; --m) {
    chosen = uniform_indices(n, m);
    std::size_t vision = 0;
    for (std::size_t i : chosen) vision += frames[i].tokens;
    if (vision <= budget.max_vision_tokens) break;
  }
  if (n > 0 && m == 0) {
    throw BudgetError("vision budget unsatisfiable even with a single frame",
                      frames[0].tokens, frames[0].tokens + seq.text_count(),
                      budget.max_vision_tokens, budget.max_total_tokens);
  }

  TokenSequence out;
  if (m == n) {
    out = seq;
  } else {
    std::map<std::size_t, bool> keep;
    for (std::size_t i = 0; i < n; ++i) keep[frames[i].frame] = false;
    for (std::size_t i : chosen) keep[frames[i].frame] = true;
    for (const auto& e : seq.elements()) {
      if (const auto* v = std::get_if<VisionToken>(&e); v != nullptr && !keep[v->frame]) {
        continue;
      }
      out.push_back(e);
    }
  }
  if (out.total_count() > budget.max_total_tokens) {
    throw BudgetError("total token budget exceeded", out.vision_count(), out.total_count(),
                      budget.max_vision_tokens, budget.max_total_tokens);
  }
  return out;
}

struct VideoTokenizerConfig {
  std::size_t patch_size = 14;
  std::size_t merge_factor = 2;
  double threshold = 0.1;
  DistanceMode distance = DistanceMode::kMeanAbsolute;
  TokenBudget budget;
  SamplingPolicy sampling;

  std::size_t region_size() const noexcept { return patch_size * merge_factor; }

  void validate() const {
    if (patch_size < 1 || merge_factor < 1) {
      throw ConfigError("patch_size and merge_factor must be >= 1");
    }
    PruneConfig{threshold, region_size(), distance}.validate();
    budget.validate();
    sampling.validate();
  }
};

// patchify -> encode -> merge per frame, prune mask on raw pixels at the
// post-merge footprint, then budget enforcement. Text, if any, follows the
// vision tokens.
inline TokenSequence tokenize_video(const FrameSequence& seq, const EncoderPlug& encoder,
                                    const VideoTokenizerConfig& cfg,
                                    const std::vector<std::string>& trailing_text = {}) {
  cfg.validate();
  const PruneConfig prune{cfg.threshold, cfg.region_size(), cfg.distance};
  const PruneMask mask = compute_prune_mask(seq, prune);

  std::vector<FeatureGrid> merged;
  merged.reserve(seq.size());
  for (const auto& frame : seq.frames()) {
    merged.push_back(downsample_tokens(encoder(patchify(frame, cfg.patch_size)), cfg.merge_factor));
  }
  TokenSequence tokens;
  for (auto& tok : apply_mask(merged, mask, seq.timestamps())) {
    tokens.push_back(std::move(tok));
  }
  for (const auto& text : trailing_text) {
    tokens.push_back(TextToken{text});
  }
  return enforce_budget(tokens, cfg.budget, cfg.sampling);
}

}  // namespace vidtok
