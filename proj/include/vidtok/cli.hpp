// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vidtok/config.hpp"
#include "vidtok/curation.hpp"
#include "vidtok/diff_fp.hpp"
#include "vidtok/error.hpp"
#include "vidtok/io.hpp"
#include "vidtok/records.hpp"
#include "vidtok/selfcheck.hpp"
#include "vidtok/sequence_format.hpp"
#include "vidtok/synthetic.hpp"
#include "vidtok/version.hpp"
#include "vidtok/video.hpp"

namespace vidtok::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kContractError = 2,
};

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline std::string read_text(const std::string& path) {
  return vidtok::detail::read_file(path);
}

// "-" or empty means the provided default stream.
inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

// Flags shared by commands that read a frame directory.
struct FrameFlags {
  std::string frames_dir;
  std::string config_path;
  std::optional<std::size_t> patch;
  std::optional<std::size_t> merge;
  std::optional<double> threshold;
  std::optional<std::string> distance;
  std::optional<double> fps;
  std::optional<std::size_t> max_frames;
  std::size_t max_frame_tokens = 0;

  void add_to(CLI::App* app) {
    app->add_option("--frames", frames_dir, "Frame directory (numbered images + frames.meta)")
        ->required();
    app->add_option("--config", config_path, "key=value config file applied before flags");
    app->add_option("--patch", patch, "Patch size in pixels (default 14)");
    app->add_option("--merge", merge, "Spatial merge factor after encoding (default 2)");
    app->add_option("--threshold", threshold, "Prune threshold on mean abs difference (default 0.1)");
    app->add_option("--distance", distance, "Region distance: mean | sum (default mean)");
    app->add_option("--fps", fps, "Sampling rate in frames per second (default 1)");
    app->add_option("--max-frames", max_frames, "Frame cap after sampling (default 180)");
    app->add_option("--max-frame-tokens", max_frame_tokens,
                    "Downscale frames to at most this many tokens each (0 = snap only)");
  }

  Config resolve(Config c) const {
    if (!config_path.empty()) c = parse_config(read_text(config_path), c);
    if (patch) c.patch_size = *patch;
    if (merge) c.merge_factor = *merge;
    if (threshold) c.prune_threshold = *threshold;
    if (distance) c.distance = *distance;
    if (fps) c.fps = *fps;
    if (max_frames) c.max_frames = *max_frames;
    return c;
  }

  FrameSequence load(const Config& c, std::vector<std::size_t>* source_indices = nullptr) const {
    auto loaded = load_frame_directory(frames_dir, {c.fps, c.max_frames});
    if (source_indices != nullptr) *source_indices = loaded.indices;
    const std::size_t cap =
        max_frame_tokens == 0 ? std::numeric_limits<std::size_t>::max() : max_frame_tokens;
    return snap_frames(loaded.sequence, c.patch_size, c.merge_factor, cap);
  }
};

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vidtok: video tokenization, frame pruning, sequence formats and data curation",
               "vidtok"};
  app.set_version_flag("--version", std::string("vidtok ") + kVersion);
  app.require_subcommand(1);

  // tokenize
  detail::FrameFlags tok_flags;
  std::optional<std::size_t> budget_vision;
  std::optional<std::size_t> budget_total;
  std::optional<std::string> encoder;
  std::optional<std::uint64_t> tok_seed;
  std::optional<std::size_t> feature_dim;
  std::string prompt;
  std::string tok_out;
  bool with_features = false;
  auto* tokenize = app.add_subcommand("tokenize", "Tokenize a frame directory into a vision sequence");
  tok_flags.add_to(tokenize);
  tokenize->add_option("--budget-vision", budget_vision, "Vision token budget (default 10240)");
  tokenize->add_option("--budget-total", budget_total, "Total token budget (default 16384)");
  tokenize->add_option("--encoder", encoder, "Encoder plug: identity | randproj (default identity)");
  tokenize->add_option("--seed", tok_seed, "Seed for the randproj encoder (default 0)");
  tokenize->add_option("--feature-dim", feature_dim, "randproj output dimension (default 64)");
  tokenize->add_option("--prompt", prompt, "Text appended after the frames (one text token)");
  tokenize->add_flag("--with-features", with_features, "Include feature vectors in the output");
  tokenize->add_option("--out", tok_out, "Output file (JSON lines; default stdout)");

  // prune-stats
  detail::FrameFlags ps_flags;
  std::string ps_out;
  auto* prune_stats =
      app.add_subcommand("prune-stats", "Per-frame kept/dropped token counts from the frame pruner");
  ps_flags.add_to(prune_stats);
  prune_stats->add_option("--out", ps_out, "Output file (tab-separated; default stdout)");

  // render-sequence
  std::string format = "image";
  std::string events_in;
  std::string render_out;
  std::string spans_out;
  auto* render = app.add_subcommand("render-sequence", "Render an event list as a sequence string");
  render->add_option("--format", format, "image | video | streaming")
      ->check(CLI::IsMember({"image", "video", "streaming"}))
      ->required();
  render->add_option("--in", events_in, "Events file (JSON lines)")->required();
  render->add_option("--out", render_out, "Output file (default stdout)");
  render->add_option("--spans", spans_out, "Write the placeholder span table (offset<TAB>count)");

  // curate
  std::string manifest;
  std::string stages = "aspect";
  std::uint64_t curate_seed = 0;
  std::string kept_out;
  std::string rejects_out;
  auto* curate = app.add_subcommand("curate", "Run the image curation filter chain on a manifest");
  curate->add_option("--manifest", manifest, "Input manifest (JSON lines)")->required();
  curate->add_option("--stages", stages,
                     "Comma list: aspect[:min:max], score:<name>:<threshold>, cluster:<k>:<per>");
  curate->add_option("--seed", curate_seed, "Clustering seed (default 0)");
  curate->add_option("--out", kept_out, "Kept manifest (default stdout)");
  curate->add_option("--rejects", rejects_out, "Removed manifest, annotated with the rejecting stage");

  // selfcheck
  std::uint64_t check_seed = 0;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant suites on synthetic data");
  selfcheck->add_option("--seed", check_seed, "Seed for the synthetic data (default 0)");

  // synth
  std::string synth_dir;
  std::size_t synth_frames = 3;
  std::size_t synth_height = 56;
  std::size_t synth_width = 56;
  std::size_t synth_channels = 3;
  std::size_t synth_region = 28;
  std::string synth_motion = "static";
  std::string synth_ext = "png";
  double synth_fps = 1.0;
  std::uint64_t synth_seed = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic frame directory");
  synth_cmd->add_option("--out", synth_dir, "Directory to create")->required();
  synth_cmd->add_option("--frames", synth_frames, "Number of frames (default 3)");
  synth_cmd->add_option("--height", synth_height, "Frame height (default 56)");
  synth_cmd->add_option("--width", synth_width, "Frame width (default 56)");
  synth_cmd->add_option("--channels", synth_channels, "1 or 3 (default 3)");
  synth_cmd->add_option("--region", synth_region,
                        "Change granularity in pixels for --motion random (default 28)");
  synth_cmd->add_option("--motion", synth_motion, "static | random")
      ->check(CLI::IsMember({"static", "random"}));
  synth_cmd->add_option("--format", synth_ext, "png | vtraw")->check(CLI::IsMember({"png", "vtraw"}));
  synth_cmd->add_option("--fps-src", synth_fps, "Source frame rate written to frames.meta (default 1)");
  synth_cmd->add_option("--seed", synth_seed, "Pixel seed (default 0)");

  // config
  std::string config_in;
  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration");
  config_cmd->add_option("--config", config_in, "Config file to load over the defaults");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kInputError;
  }

  try {
    if (tokenize->parsed()) {
      Config c = tok_flags.resolve({});
      if (budget_vision) c.max_vision_tokens = *budget_vision;
      if (budget_total) c.max_total_tokens = *budget_total;
      if (encoder) c.encoder = *encoder;
      if (tok_seed) c.seed = *tok_seed;
      if (feature_dim) c.feature_dim = *feature_dim;
      c.validate();
      const FrameSequence frames = tok_flags.load(c);
      const EncoderPlug plug = make_encoder(c, frames.frame(0).channels());
      std::vector<std::string> text;
      if (!prompt.empty()) text.push_back(prompt);
      const TokenSequence seq = tokenize_video(frames, plug, c.tokenizer(), text);
      detail::write_text(tok_out, format_token_sequence(seq, with_features), out);
      err << "frames=" << seq.frames().size() << " vision=" << seq.vision_count()
          << " total=" << seq.total_count() << "\n";
    } else if (prune_stats->parsed()) {
      Config c = ps_flags.resolve({});
      c.validate();
      std::vector<std::size_t> source;
      const FrameSequence frames = ps_flags.load(c, &source);
      const auto tcfg = c.tokenizer();
      const PruneMask mask =
          compute_prune_mask(frames, {tcfg.threshold, tcfg.region_size(), tcfg.distance});
      std::string report;
      const std::size_t per_frame = mask.rows() * mask.cols();
      for (std::size_t t = 0; t < mask.frames(); ++t) {
        const std::size_t kept = mask.kept_in_frame(t);
        report += std::to_string(source[t]) + "\t" + detail::shortest(frames.timestamp(t)) + "\t" +
                  std::to_string(kept) + "\t" + std::to_string(per_frame - kept) + "\n";
      }
      const auto stats = compression_stats(mask);
      report += "# kept=" + std::to_string(stats.kept) + " dropped=" +
                std::to_string(stats.dropped) + " ratio=" + detail::shortest(stats.ratio) + "\n";
      detail::write_text(ps_out, report, out);
    } else if (render->parsed()) {
      const auto events = parse_events(detail::read_text(events_in), events_in);
      const SequenceKind kind = format == "image"   ? SequenceKind::kImage
                                : format == "video" ? SequenceKind::kVideo
                                                    : SequenceKind::kStreaming;
      const RenderedSequence seq = render_events(kind, events);
      detail::write_text(render_out, seq.text, out);
      if (!spans_out.empty()) {
        std::string table;
        for (const auto& s : seq.spans) {
          table += std::to_string(s.offset) + "\t" + std::to_string(s.count) + "\n";
        }
        detail::write_text(spans_out, table, out);
      }
    } else if (curate->parsed()) {
      const auto base = std::filesystem::path(manifest).parent_path();
      const Batch batch = parse_manifest(detail::read_text(manifest),
                                         base.empty() ? std::filesystem::path(".") : base, manifest);
      const Partition p = run_curation(batch, parse_stages(stages), curate_seed);
      detail::write_text(kept_out, format_manifest(p.kept), out);
      if (!rejects_out.empty()) detail::write_text(rejects_out, format_manifest(p.removed), out);
      err << "kept=" << p.kept.size() << " removed=" << p.removed.size() << "\n";
    } else if (selfcheck->parsed()) {
      bool all = true;
      std::size_t passed = 0;
      std::size_t total = 0;
      for (const auto& r : run_selfcheck(check_seed)) {
        out << (r.ok() ? "PASS " : "FAIL ") << r.name << ": " << r.passed << "/" << r.total << "\n";
        all = all && r.ok();
        passed += r.passed;
        total += r.total;
      }
      out << "selfcheck: " << passed << "/" << total << " trials passed\n";
      return all ? kOk : kContractError;
    } else if (synth_cmd->parsed()) {
      if (synth_frames < 1) throw InputError("--frames must be >= 1");
      if (!(synth_fps > 0.0)) throw InputError("--fps-src must be > 0");
      synth::Rng rng(synth_seed);
      std::vector<ImageBuffer> images;
      if (synth_motion == "static") {
        const auto img = synth::random_image(rng, synth_height, synth_width, synth_channels, 256);
        images.assign(synth_frames, img);
      } else {
        if (synth_region < 1 || synth_height % synth_region != 0 || synth_width % synth_region != 0) {
          throw InputError("--height and --width must be multiples of --region");
        }
        const auto seq = synth::random_sequence(rng, synth_frames, synth_height / synth_region,
                                                synth_width / synth_region, synth_region,
                                                synth_channels, 256);
        images.assign(seq.frames().begin(), seq.frames().end());
      }
      std::filesystem::create_directories(synth_dir);
      FrameMeta meta;
      meta.fps_src = synth_fps;
      meta.duration_s = static_cast<double>(synth_frames) / synth_fps;
      for (std::size_t i = 0; i < images.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.%s", i, synth_ext.c_str());
        write_image(std::filesystem::path(synth_dir) / name, images[i]);
        meta.frames[i] = static_cast<double>(i) / synth_fps;
      }
      detail::write_text((std::filesystem::path(synth_dir) / "frames.meta").string(),
                         format_frame_meta(meta), out);
    } else if (config_cmd->parsed()) {
      Config c;
      if (!config_in.empty()) c = parse_config(detail::read_text(config_in));
      c.validate();
      out << format_config(c);
    }
  } catch (const ContractError& e) {
    err << "vidtok: " << e.what() << "\n";
    return kContractError;
  } catch (const std::exception& e) {
    err << "vidtok: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace vidtok::cli
