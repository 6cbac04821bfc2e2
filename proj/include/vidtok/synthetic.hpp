// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded generators for synthetic frames, event lists and curation batches.
// Used by `vidtok synth`, `vidtok selfcheck` and the test suites.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vidtok/curation.hpp"
#include "vidtok/diff_fp.hpp"
#include "vidtok/geometry.hpp"
#include "vidtok/sequence_format.hpp"
#include "vidtok/video.hpp"

namespace vidtok::synth {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return detail::unit_uniform(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// levels == 0 draws continuous intensities; otherwise values are k/(levels-1).
inline float draw_intensity(Rng& rng, std::size_t levels) {
  if (levels == 0) return static_cast<float>(rng.uniform());
  if (levels == 1) return 0.0F;
  return static_cast<float>(rng.below(levels)) / static_cast<float>(levels - 1);
}

inline ImageBuffer random_image(Rng& rng, std::size_t height, std::size_t width,
                                std::size_t channels, std::size_t levels = 0) {
  std::vector<float> data(height * width * channels);
  for (auto& v : data) v = draw_intensity(rng, levels);
  return {height, width, channels, std::move(data)};
}

// Horizontal ramp in [0,1] per channel.
inline ImageBuffer ramp_image(std::size_t height, std::size_t width, std::size_t channels) {
  std::vector<float> data(height * width * channels);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        data[(y * width + x) * channels + c] =
            static_cast<float>(static_cast<double>(x + y + c) /
                               static_cast<double>(width + height + channels));
      }
    }
  }
  return {height, width, channels, std::move(data)};
}

inline FrameSequence static_sequence(const ImageBuffer& frame, std::size_t count, double fps = 1.0) {
  std::vector<ImageBuffer> frames(count, frame);
  std::vector<double> ts(count);
  for (std::size_t i = 0; i < count; ++i) ts[i] = static_cast<double>(i) / fps;
  return {std::move(frames), std::move(ts)};
}

// Frame 0 is random. Each later region either repeats the previous frame,
// gets redrawn, or has a fraction of its pixels redrawn, so region distances
// land on both sides of typical thresholds.
inline FrameSequence random_sequence(Rng& rng, std::size_t frames, std::size_t region_rows,
                                     std::size_t region_cols, std::size_t region_size,
                                     std::size_t channels, std::size_t levels = 0) {
  const std::size_t h = region_rows * region_size;
  const std::size_t w = region_cols * region_size;
  std::vector<ImageBuffer> out;
  out.push_back(random_image(rng, h, w, channels, levels));
  for (std::size_t t = 1; t < frames; ++t) {
    std::vector<float> data(out.back().data().begin(), out.back().data().end());
    for (std::size_t r = 0; r < region_rows; ++r) {
      for (std::size_t c = 0; c < region_cols; ++c) {
        const double mode = rng.uniform();
        if (mode < 0.35) continue;
        const double redraw = mode < 0.7 ? 1.0 : rng.uniform(0.0, 0.5);
        for (std::size_t y = r * region_size; y < (r + 1) * region_size; ++y) {
          for (std::size_t x = c * region_size; x < (c + 1) * region_size; ++x) {
            for (std::size_t k = 0; k < channels; ++k) {
              if (rng.coin(redraw)) data[(y * w + x) * channels + k] = draw_intensity(rng, levels);
            }
          }
        }
      }
    }
    out.emplace_back(h, w, channels, std::move(data));
  }
  std::vector<double> ts(frames);
  for (std::size_t i = 0; i < frames; ++i) ts[i] = static_cast<double>(i);
  return {std::move(out), std::move(ts)};
}

inline std::string random_word(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 8) {
  static constexpr std::string_view kChars = "abcdefghijklmnopqrstuvwxyz ,.?!\n:;'";
  std::string s;
  const std::size_t len = rng.between(min_len, max_len);
  for (std::size_t i = 0; i < len; ++i) s += kChars[rng.below(kChars.size())];
  return s;
}

inline double random_stamp(Rng& rng, double lo) {
  // Multiples of 0.5 survive the one-decimal rendering exactly.
  return lo + 0.5 * static_cast<double>(rng.below(6));
}

// Canonical image-sequence items: no two adjacent text items.
inline std::vector<RenderItem> random_image_items(Rng& rng) {
  std::vector<RenderItem> items;
  const std::size_t n = rng.between(1, 6);
  bool last_text = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!last_text && rng.coin(0.4)) {
      items.emplace_back(TextSpan{random_word(rng)});
      last_text = true;
    } else {
      items.emplace_back(ImageTokens{rng.between(1, 4096)});
      last_text = false;
    }
  }
  return items;
}

struct RandomVideo {
  std::vector<FrameTokens> frames;
  std::optional<std::string> text;
};

inline RandomVideo random_video_items(Rng& rng) {
  RandomVideo v;
  double t = static_cast<double>(rng.below(3));
  const std::size_t n = rng.between(1, 8);
  for (std::size_t i = 0; i < n; ++i) {
    v.frames.push_back({rng.between(1, 1024), t});
    t = random_stamp(rng, t + 0.5);
  }
  if (rng.coin()) v.text = random_word(rng, 0, 12);
  return v;
}

// Canonical streaming events: no adjacent text items, answers without
// newlines, non-decreasing frame stamps.
inline std::vector<RenderItem> random_streaming_items(Rng& rng) {
  std::vector<RenderItem> items;
  const std::size_t n = rng.below(9);
  double t = 0.0;
  bool last_text = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = rng.uniform();
    if (pick < 0.5) {
      t = random_stamp(rng, t);
      items.emplace_back(FrameTokens{rng.between(1, 256), t});
      last_text = false;
    } else if (pick < 0.75 && !last_text) {
      items.emplace_back(TextSpan{random_word(rng)});
      last_text = true;
    } else {
      std::string answer = random_word(rng, 0, 8);
      std::erase(answer, '\n');
      items.emplace_back(AnswerSpan{answer});
      last_text = false;
    }
  }
  return items;
}

inline Batch random_batch(Rng& rng, std::size_t n, std::size_t feature_dim) {
  Batch batch;
  for (std::size_t i = 0; i < n; ++i) {
    CurationSample s;
    s.id = "s" + std::to_string(i);
    s.resolution = {rng.between(1, 2000), rng.between(1, 2000)};
    s.caption = random_word(rng, 3, 20);
    if (feature_dim > 0 && rng.coin(0.9)) {
      std::vector<double> f(feature_dim);
      for (auto& x : f) x = rng.uniform(-1.0, 1.0);
      s.feature = std::move(f);
    }
    if (rng.coin(0.9)) s.scores["aesthetic"] = rng.uniform();
    if (rng.coin(0.9)) s.scores["sim"] = rng.uniform();
    batch.push_back(std::move(s));
  }
  return batch;
}

// Two tight clouds far apart: points [0, n) near the origin, [n, 2n) near
// (offset, ..., offset).
inline std::vector<std::vector<double>> two_clouds(Rng& rng, std::size_t n, std::size_t dim,
                                                   double offset = 100.0, double spread = 1.0) {
  std::vector<std::vector<double>> out;
  for (std::size_t cloud = 0; cloud < 2; ++cloud) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(dim);
      for (auto& x : p) x = static_cast<double>(cloud) * offset + rng.uniform(-spread, spread);
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline std::vector<TextBox> random_boxes(Rng& rng, std::size_t n) {
  std::vector<TextBox> boxes;
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.uniform(0.0, 0.8);
    const double y1 = rng.uniform(0.0, 0.8);
    std::string text = "T" + std::to_string(i) + random_word(rng, 1, 6);
    std::erase(text, '\n');
    boxes.push_back({text, {x1, y1, x1 + rng.uniform(0.0, 0.2), y1 + rng.uniform(0.0, 0.2)}});
  }
  return boxes;
}

}  // namespace vidtok::synth
