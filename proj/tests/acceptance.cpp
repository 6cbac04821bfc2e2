// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "vidtok/cli.hpp"
#include "vidtok/synthetic.hpp"
#include "vidtok/vidtok.hpp"

namespace {

using namespace vidtok;

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0 && secs > time_limit_s) {
    o.ok = false;
    o.detail += " (over time limit)";
  }
  if (!o.ok) ++failures;
  std::printf("[%s] %2d %s: %s (%.3f s)\n", o.ok ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Outcome static_law() {
  for (std::size_t t : {2U, 5U, 180U}) {
    synth::Rng rng(t);
    const auto seq = synth::static_sequence(synth::random_image(rng, 56, 84, 3), t);
    const auto s = compression_stats(compute_prune_mask(seq, {0.1, 28}));
    if (s.ratio != static_cast<double>(t - 1) / static_cast<double>(t)) {
      return {false, "T=" + std::to_string(t) + " ratio " + std::to_string(s.ratio)};
    }
  }
  return {true, "ratio == (T-1)/T for T in {2,5,180}"};
}

Outcome oracle_equivalence() {
  synth::Rng rng(1001);
  std::size_t mismatches = 0;
  const std::size_t n = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t region = rng.between(1, 4);
    const auto seq = synth::random_sequence(rng, 3, 4, 4, region, rng.coin() ? 1 : 3,
                                            rng.coin() ? 0 : 5);
    const double thr = rng.uniform(0.0, 0.5);
    if (!oracle::mask_equals(compute_prune_mask(seq, {thr, region}),
                             oracle::brute_force_mask(seq, region, thr))) {
      ++mismatches;
    }
  }
  return {mismatches == 0,
          std::to_string(n) + " sequences, " + std::to_string(mismatches) + " mismatches"};
}

Outcome monotonicity() {
  synth::Rng rng(1002);
  std::size_t violations = 0;
  std::size_t pairs = 0;
  for (int i = 0; i < 200; ++i) {
    const auto seq = synth::random_sequence(rng, 3, 4, 4, 2, 1, 5);
    std::vector<double> ts(6);
    for (auto& t : ts) t = rng.uniform(0.0, 0.8);
    std::sort(ts.begin(), ts.end());
    std::vector<PruneMask> masks;
    for (double t : ts) masks.push_back(compute_prune_mask(seq, {t, 2}));
    for (std::size_t a = 0; a < masks.size(); ++a) {
      for (std::size_t b = a; b < masks.size(); ++b) {
        ++pairs;
        for (std::size_t t = 0; t < 3; ++t) {
          for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
              if (!masks[a].keep(t, r, c) && masks[b].keep(t, r, c)) ++violations;
            }
          }
        }
      }
    }
  }
  return {violations == 0, std::to_string(pairs) + " threshold pairs, " +
                               std::to_string(violations) + " violations"};
}

Outcome rope_properties() {
  synth::Rng rng(1003);
  double worst_norm = 0.0;
  double worst_inner = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const RopeConfig cfg{4 * rng.between(1, 32), 10000.0};
    std::vector<double> u(cfg.head_dim);
    std::vector<double> v(cfg.head_dim);
    for (auto& x : u) x = rng.uniform(-1.0, 1.0);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const PositionIndex p{rng.below(1000), rng.below(1000)};
    const PositionIndex q{rng.below(1000), rng.below(1000)};
    const auto ru = rope_rotate(u, p, cfg);
    worst_norm = std::max(worst_norm, std::abs(norm(ru) - norm(u)) / norm(u));
    const std::size_t dr = rng.below(1000);
    const std::size_t dc = rng.below(1000);
    const double a = relative_inner_product_check(u, v, p, q, cfg);
    const double b =
        relative_inner_product_check(u, v, {p.row + dr, p.col + dc}, {q.row + dr, q.col + dc}, cfg);
    worst_inner = std::max(worst_inner, std::abs(a - b));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max rel norm err %.2e, max inner diff %.2e", worst_norm,
                worst_inner);
  return {worst_norm <= 1e-9 && worst_inner <= 1e-6, buf};
}

Outcome downsample_contract() {
  synth::Rng rng(1004);
  for (int i = 0; i < 50; ++i) {
    const std::size_t rows = 2 * rng.between(1, 8);
    const std::size_t cols = 2 * rng.between(1, 8);
    const std::size_t d = rng.between(1, 6);
    const double value = rng.uniform(-10.0, 10.0);
    const auto out = downsample_tokens(FeatureGrid(rows, cols, d, std::vector<double>(rows * cols * d, value)));
    for (double x : out.data()) {
      if (x != value) return {false, "constant grid not preserved"};
    }
  }
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-5.0, 5.0);
    const double b = rng.uniform(-5.0, 5.0);
    const double c0 = rng.uniform(-5.0, 5.0);
    std::vector<std::vector<double>> ramp(4, std::vector<double>(4));
    std::vector<double> flat;
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        ramp[r][c] = a * static_cast<double>(r) + b * static_cast<double>(c) + c0;
        flat.push_back(ramp[r][c]);
      }
    }
    const auto expected = oracle::block_means(ramp, 2);
    const auto got = downsample_tokens(FeatureGrid(4, 4, 1, flat));
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        worst = std::max(worst, std::abs(got.cell(r, c)[0] - expected[r][c]));
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "constants exact, max ramp err %.2e", worst);
  return {worst <= 1e-12, buf};
}

Outcome budget_safety() {
  synth::Rng rng(1005);
  std::size_t emitted = 0;
  std::size_t refused = 0;
  for (int i = 0; i < 500; ++i) {
    VideoTokenizerConfig cfg;
    cfg.patch_size = rng.between(1, 3);
    cfg.merge_factor = rng.between(1, 2);
    cfg.budget = {rng.between(30, 160), rng.between(1, 30)};
    cfg.sampling.max_frames = rng.between(1, 16);
    cfg.threshold = rng.uniform(0.0, 0.3);
    const auto seq = synth::random_sequence(rng, rng.between(1, 16), rng.between(1, 4),
                                            rng.between(1, 4), cfg.region_size(),
                                            rng.coin() ? 1 : 3, 4);
    std::vector<std::string> text(rng.below(3), "t");
    try {
      const auto out = tokenize_video(seq, identity_encoder(cfg.patch_size, seq.frame(0).channels()),
                                      cfg, text);
      if (out.vision_count() > cfg.budget.max_vision_tokens ||
          out.total_count() > cfg.budget.max_total_tokens) {
        return {false, "run " + std::to_string(i) + " violated the budget"};
      }
      ++emitted;
    } catch (const BudgetError& e) {
      if (e.vision_tokens <= cfg.budget.max_vision_tokens &&
          e.total_tokens <= cfg.budget.max_total_tokens) {
        return {false, "BudgetError raised on a satisfiable case"};
      }
      ++refused;
    }
  }
  // Unsatisfiable: one frame exceeds the vision budget.
  TokenSequence big;
  for (std::size_t i = 0; i < 5; ++i) big.push_back(VisionToken{0, {0, i}, 0.0, {0.0}});
  bool raised = false;
  try {
    (void)enforce_budget(big, {10, 4});
  } catch (const BudgetError&) {
    raised = true;
  }
  if (!raised) return {false, "unsatisfiable case did not raise BudgetError"};
  // The CLI maps the error to exit status 2.
  const auto dir = std::filesystem::temp_directory_path() / "vidtok_acceptance_budget";
  std::filesystem::remove_all(dir);
  std::ostringstream sink;
  cli::run({"synth", "--out", dir.string(), "--frames", "1", "--height", "56", "--width", "56"},
           sink, sink);
  const int code = cli::run({"tokenize", "--frames", dir.string(), "--budget-vision", "2",
                             "--budget-total", "10"},
                            sink, sink);
  std::filesystem::remove_all(dir);
  if (code != 2) return {false, "CLI exit status " + std::to_string(code) + " for unsatisfiable budget"};
  return {true, "500 runs: " + std::to_string(emitted) + " within budget, " +
                    std::to_string(refused) + " refused with BudgetError; CLI exit 2"};
}

Outcome sampling() {
  const auto long_clip = sample_timestamps(200.0, {1.0, 180});
  if (long_clip.size() != 180) return {false, "200 s clip gave " + std::to_string(long_clip.size())};
  for (std::size_t i = 1; i < long_clip.size(); ++i) {
    if (!(long_clip[i] > long_clip[i - 1])) return {false, "timestamps not increasing"};
  }
  const auto short_clip = sample_timestamps(5.0, {1.0, 180});
  if (short_clip != std::vector<double>{0, 1, 2, 3, 4}) return {false, "5 s clip mismatch"};
  return {true, "200 s -> 180 increasing stamps; 5 s -> [0..4]"};
}

Outcome golden_sequences() {
  std::ifstream in(VIDTOK_FIXTURE_DIR "/golden_sequences.jsonl");
  if (!in) return {false, "fixture file missing"};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    std::vector<RenderItem> events;
    for (const auto& e : j.at("events")) events.push_back(event_from_json(e));
    const std::string kind = j.at("kind");
    const auto k = kind == "image" ? SequenceKind::kImage
                   : kind == "video" ? SequenceKind::kVideo
                                     : SequenceKind::kStreaming;
    if (render_events(k, events).text != j.at("expected").get<std::string>()) {
      return {false, "fixture " + j.at("name").get<std::string>() + " differs"};
    }
    ++n;
  }
  synth::Rng rng(1008);
  for (int i = 0; i < 500; ++i) {
    switch (i % 3) {
      case 0: {
        const auto items = synth::random_image_items(rng);
        if (parse_image_sequence(render_image_sequence(items).text) != items) {
          return {false, "image round trip failed"};
        }
        break;
      }
      case 1: {
        const auto v = synth::random_video_items(rng);
        const auto p = parse_video_sequence(render_video_sequence(v.frames, v.text).text);
        if (p.frames != v.frames || p.trailing_text != v.text) {
          return {false, "video round trip failed"};
        }
        break;
      }
      default: {
        const auto items = synth::random_streaming_items(rng);
        if (parse_streaming_sequence(render_streaming_sequence(items).text) != items) {
          return {false, "streaming round trip failed"};
        }
      }
    }
  }
  return {n > 0, std::to_string(n) + " fixtures byte-exact; 500 round trips"};
}

Outcome intervals() {
  if (format_time_interval(1.0, 2.0) != "1.0-2.0 s") return {false, "(1,2) rendering"};
  synth::Rng rng(1009);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0.0, 3600.0);
    const double b = a + rng.uniform(0.0, 600.0);
    const auto [pa, pb] = parse_time_interval(format_time_interval(a, b));
    worst = std::max({worst, std::abs(pa - a), std::abs(pb - b)});
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "\"1.0-2.0 s\"; max round-trip err %.3f s", worst);
  return {worst <= 0.05 + 1e-9, buf};
}

Outcome curation() {
  synth::Rng rng(1010);
  const auto stages = parse_stages("aspect,score:aesthetic:0.4,score:sim:0.3,cluster:4:2");
  auto disjoint_cover = [](const Batch& in, const Partition& p) {
    std::set<std::string> kept;
    std::set<std::string> removed;
    for (const auto& s : p.kept) kept.insert(s.id);
    for (const auto& s : p.removed) removed.insert(s.id);
    if (kept.size() != p.kept.size() || removed.size() != p.removed.size()) return false;
    if (p.kept.size() + p.removed.size() != in.size()) return false;
    for (const auto& s : in) {
      if ((kept.count(s.id) != 0) == (removed.count(s.id) != 0)) return false;
    }
    return true;
  };
  for (int i = 0; i < 100; ++i) {
    const auto batch = synth::random_batch(rng, rng.between(1, 80), 4);
    Batch current = batch;
    for (const auto& st : stages) {
      Partition p;
      if (st.kind == CurationStage::Kind::kAspect) {
        p = filter_aspect_ratio(current, st.min_ratio, st.max_ratio);
      } else if (st.kind == CurationStage::Kind::kScore) {
        p = filter_by_score(current, stored_score(st.score_name), st.score_name, st.threshold);
      } else {
        p = filter_by_cluster(current, st.clusters, st.per_cluster, 7);
      }
      if (!disjoint_cover(current, p)) return {false, "stage " + st.label() + " broke partition"};
      current = p.kept;
    }
    if (!disjoint_cover(batch, run_curation(batch, stages, 7))) {
      return {false, "pipeline broke partition"};
    }
  }
  const auto clouds = synth::two_clouds(rng, 25, 8);
  const auto first = cluster_select(clouds, 2, 1, 42);
  if (first.size() != 2 || first[0] >= 25 || first[1] < 25) {
    return {false, "two clouds not represented once each"};
  }
  for (int i = 0; i < 10; ++i) {
    if (cluster_select(clouds, 2, 1, 42) != first) return {false, "rerun differs"};
  }
  return {true, "100 batches partitioned exactly; one pick per cloud, stable over 10 reruns"};
}

Outcome ocr() {
  synth::Rng rng(1011);
  CurationSample s;
  s.id = "ocr";
  s.resolution = {720, 1280};
  s.boxes = synth::random_boxes(rng, 10);
  const auto parsed = parse_ocr_caption(compose_ocr_caption("A street sign", s.boxes));
  if (parsed.caption != "A street sign" || parsed.boxes.size() != 10) {
    return {false, "caption did not parse back"};
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    if (parsed.boxes[i].text != s.boxes[i].text) return {false, "box text mismatch"};
    for (std::size_t k = 0; k < 4; ++k) {
      worst = std::max(worst, std::abs(parsed.boxes[i].box[k] - s.boxes[i].box[k]));
    }
  }
  if (worst > 5e-4) return {false, "box error too large"};
  CurationSample other;
  other.id = "other";
  other.resolution = {720, 1280};
  other.boxes = synth::random_boxes(rng, 10);
  other.boxes[3].text = "ELSEWHERE";
  std::size_t records = 0;
  for (int task = 1; task <= 5; ++task) {
    const auto rec =
        generate_ocr_instruction(s, static_cast<OcrTask>(task), 100 + task, &other);
    if (rec.prompt.empty() || rec.answer.empty()) return {false, "empty record"};
    bool ok = false;
    switch (static_cast<OcrTask>(task)) {
      case OcrTask::kTextExistence:
        ok = rec.answer == "Yes" || rec.answer == "No";
        break;
      case OcrTask::kTextLocalization:
        ok = parse_text_boxes("t" + rec.answer).size() == 1;
        break;
      case OcrTask::kTextRecognition:
        ok = std::any_of(s.boxes.begin(), s.boxes.end(),
                         [&](const TextBox& b) { return b.text == rec.answer; });
        break;
      case OcrTask::kTextComparison:
        ok = rec.answer == "Image 1" || rec.answer == "Image 2";
        break;
      case OcrTask::kComprehensiveText:
        ok = parse_text_boxes(rec.answer).size() == 10;
        break;
    }
    if (!ok) return {false, "task " + task_name(static_cast<OcrTask>(task)) + " malformed"};
    ++records;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max box err %.1e; %zu/5 tasks well formed", worst, records);
  return {true, buf};
}

}  // namespace

int main() {
  criterion(1, "static-video compression law", 5.0, static_law);
  criterion(2, "pruner matches brute-force oracle", 30.0, oracle_equivalence);
  criterion(3, "threshold monotonicity", 0.0, monotonicity);
  criterion(4, "2D rotary isometry and translation invariance", 0.0, rope_properties);
  criterion(5, "token downsampling contract", 0.0, downsample_contract);
  criterion(6, "budget safety", 0.0, budget_safety);
  criterion(7, "frame sampling policy", 0.0, sampling);
  criterion(8, "sequence golden fixtures and round trips", 0.0, golden_sequences);
  criterion(9, "grounding interval format", 0.0, intervals);
  criterion(10, "curation partitions and cluster selection", 0.0, curation);
  criterion(11, "OCR caption and instruction records", 0.0, ocr);
  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
