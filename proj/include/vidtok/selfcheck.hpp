// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vidtok/curation.hpp"
#include "vidtok/diff_fp.hpp"
#include "vidtok/geometry.hpp"
#include "vidtok/ocr.hpp"
#include "vidtok/rope.hpp"
#include "vidtok/sequence_format.hpp"
#include "vidtok/synthetic.hpp"
#include "vidtok/video.hpp"

namespace vidtok {

struct CheckResult {
  std::string name;
  std::size_t passed = 0;
  std::size_t total = 0;

  bool ok() const noexcept { return passed == total; }
};

namespace detail {

inline CheckResult run_trials(const std::string& name, std::size_t trials,
                              const std::function<bool(std::size_t)>& trial) {
  CheckResult r{name, 0, trials};
  for (std::size_t i = 0; i < trials; ++i) {
    bool ok = false;
    try {
      ok = trial(i);
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok) ++r.passed;
  }
  return r;
}

}  // namespace detail

// Invariant suites on synthetic data; a lighter sibling of the test suites.
inline std::vector<CheckResult> run_selfcheck(std::uint64_t seed) {
  synth::Rng rng(seed);
  std::vector<CheckResult> out;

  out.push_back(detail::run_trials("smart_resize budget and idempotence", 200, [&](std::size_t) {
    const Resolution in{rng.between(1, 5000), rng.between(1, 5000)};
    const std::size_t patch = rng.between(1, 16);
    const std::size_t merge = rng.between(1, 3);
    const std::size_t budget = rng.between(1, 12000);
    const Resolution r = smart_resize(in, patch, merge, budget);
    const std::size_t block = patch * merge;
    return r.height % block == 0 && r.width % block == 0 &&
           (r.height / block) * (r.width / block) <= budget &&
           smart_resize(r, patch, merge, budget) == r;
  }));

  out.push_back(detail::run_trials("patchify round trip", 20, [&](std::size_t) {
    const std::size_t p = rng.between(1, 8);
    const auto img = synth::random_image(rng, p * rng.between(1, 5), p * rng.between(1, 5),
                                         rng.coin() ? 1 : 3);
    return unpatchify(patchify(img, p)) == img;
  }));

  out.push_back(detail::run_trials("bilinear stays in [0,1]", 20, [&](std::size_t) {
    const auto img = synth::random_image(rng, rng.between(1, 40), rng.between(1, 40), 3, 2);
    const auto res = bilinear_resize(img, {rng.between(1, 60), rng.between(1, 60)});
    for (float v : res.data()) {
      if (v < 0.0F || v > 1.0F) return false;
    }
    return true;
  }));

  out.push_back(detail::run_trials("rope isometry", 200, [&](std::size_t) {
    const RopeConfig cfg{4 * rng.between(1, 16), 10000.0};
    std::vector<double> v(cfg.head_dim);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const auto r = rope_rotate(v, {rng.below(500), rng.below(500)}, cfg);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      a += v[i] * v[i];
      b += r[i] * r[i];
    }
    return std::abs(std::sqrt(b) - std::sqrt(a)) <= 1e-9 * std::sqrt(a);
  }));

  out.push_back(detail::run_trials("rope translation invariance", 200, [&](std::size_t) {
    const RopeConfig cfg{4 * rng.between(1, 16), 10000.0};
    std::vector<double> u(cfg.head_dim);
    std::vector<double> v(cfg.head_dim);
    for (auto& x : u) x = rng.uniform(-1.0, 1.0);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const PositionIndex p{rng.below(100), rng.below(100)};
    const PositionIndex q{rng.below(100), rng.below(100)};
    const std::size_t dr = rng.below(100);
    const std::size_t dc = rng.below(100);
    const double base = relative_inner_product_check(u, v, p, q, cfg);
    const double moved =
        relative_inner_product_check(u, v, {p.row + dr, p.col + dc}, {q.row + dr, q.col + dc}, cfg);
    return std::abs(base - moved) <= 1e-6;
  }));

  out.push_back(detail::run_trials("static-video law", 10, [&](std::size_t i) {
    const std::size_t frames = 2 + i;
    const auto seq = synth::static_sequence(synth::random_image(rng, 8, 8, 1), frames);
    const auto stats = compression_stats(compute_prune_mask(seq, {0.1, 4}));
    return stats.ratio == static_cast<double>(frames - 1) / static_cast<double>(frames);
  }));

  out.push_back(detail::run_trials("threshold monotonicity and frame 0", 50, [&](std::size_t) {
    const auto seq = synth::random_sequence(rng, 3, 4, 4, 2, 1, 5);
    const double t1 = rng.uniform(0.0, 0.6);
    const double t2 = t1 + rng.uniform(0.0, 0.4);
    const auto m1 = compute_prune_mask(seq, {t1, 2});
    const auto m2 = compute_prune_mask(seq, {t2, 2});
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
          if (t == 0 && (!m1.keep(t, r, c) || !m2.keep(t, r, c))) return false;
          if (!m1.keep(t, r, c) && m2.keep(t, r, c)) return false;
        }
      }
    }
    return true;
  }));

  out.push_back(detail::run_trials("budget safety", 50, [&](std::size_t) {
    VideoTokenizerConfig cfg;
    cfg.patch_size = rng.between(1, 3);
    cfg.merge_factor = rng.between(1, 2);
    cfg.budget = {rng.between(40, 200), rng.between(1, 40)};
    const std::size_t region = cfg.region_size();
    const auto seq = synth::random_sequence(rng, rng.between(1, 12), rng.between(1, 4),
                                            rng.between(1, 4), region, 1, 4);
    try {
      const auto tokens = tokenize_video(seq, identity_encoder(cfg.patch_size, 1), cfg);
      return tokens.vision_count() <= cfg.budget.max_vision_tokens &&
             tokens.total_count() <= cfg.budget.max_total_tokens;
    } catch (const BudgetError& e) {
      return e.vision_tokens > cfg.budget.max_vision_tokens;
    }
  }));

  out.push_back(detail::run_trials("sequence round trips", 300, [&](std::size_t i) {
    switch (i % 3) {
      case 0: {
        const auto items = synth::random_image_items(rng);
        return parse_image_sequence(render_image_sequence(items).text) == items;
      }
      case 1: {
        const auto v = synth::random_video_items(rng);
        const auto parsed = parse_video_sequence(render_video_sequence(v.frames, v.text).text);
        return parsed.frames == v.frames && parsed.trailing_text == v.text;
      }
      default: {
        const auto items = synth::random_streaming_items(rng);
        return parse_streaming_sequence(render_streaming_sequence(items).text) == items;
      }
    }
  }));

  out.push_back(detail::run_trials("interval round trip", 100, [&](std::size_t) {
    const double a = rng.uniform(0.0, 600.0);
    const double b = a + rng.uniform(0.0, 600.0);
    const auto [pa, pb] = parse_time_interval(format_time_interval(a, b));
    return std::abs(pa - a) <= 0.05 + 1e-9 && std::abs(pb - b) <= 0.05 + 1e-9;
  }));

  out.push_back(detail::run_trials("curation partitions", 20, [&](std::size_t) {
    const auto batch = synth::random_batch(rng, rng.between(1, 60), 4);
    const auto stages = parse_stages("aspect,score:aesthetic:0.3,score:sim:0.2,cluster:3:2");
    const auto p = run_curation(batch, stages, rng.next());
    if (p.kept.size() + p.removed.size() != batch.size()) return false;
    std::set<std::string> ids;
    for (const auto& s : p.kept) ids.insert(s.id);
    for (const auto& s : p.removed) ids.insert(s.id);
    return ids.size() == batch.size();
  }));

  out.push_back(detail::run_trials("OCR caption round trip", 50, [&](std::size_t) {
    const auto boxes = synth::random_boxes(rng, rng.between(0, 6));
    const auto parsed = parse_ocr_caption(compose_ocr_caption("A caption", boxes));
    if (parsed.caption != "A caption" || parsed.boxes.size() != boxes.size()) return false;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (parsed.boxes[i].text != boxes[i].text) return false;
      for (std::size_t k = 0; k < 4; ++k) {
        if (std::abs(parsed.boxes[i].box[k] - boxes[i].box[k]) > 5e-4) return false;
      }
    }
    return true;
  }));

  return out;
}

}  // namespace vidtok
