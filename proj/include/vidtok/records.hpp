// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

// Line-delimited JSON records used by the CLI: render events, curation
// manifests, and tokenized sequences. One object per line; blank lines are
// skipped.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "vidtok/curation.hpp"
#include "vidtok/error.hpp"
#include "vidtok/sequence_format.hpp"
#include "vidtok/video.hpp"

namespace vidtok {

namespace detail {

template <typename Fn>
void for_each_json_line(std::string_view text, const std::string& source, Fn&& fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source + " line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw ParseError(source + " line " + std::to_string(lineno) + ": expected an object");
    }
    try {
      fn(j);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source + " line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InputError& e) {
      throw ParseError(source + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace detail

// {"kind":"image","count":N} | {"kind":"frame","count":N,"timestamp":S}
// {"kind":"text","text":"..."} | {"kind":"answer","text":"..."}
inline RenderItem event_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "image") return ImageTokens{j.at("count").get<std::size_t>()};
  if (kind == "frame") {
    return FrameTokens{j.at("count").get<std::size_t>(), j.at("timestamp").get<double>()};
  }
  if (kind == "text") return TextSpan{j.at("text").get<std::string>()};
  if (kind == "answer") return AnswerSpan{j.at("text").get<std::string>()};
  throw InputError("unknown event kind '" + kind + "'");
}

inline nlohmann::json event_to_json(const RenderItem& item) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ImageTokens>) {
          return {{"kind", "image"}, {"count", v.count}};
        } else if constexpr (std::is_same_v<T, FrameTokens>) {
          return {{"kind", "frame"}, {"count", v.count}, {"timestamp", v.timestamp}};
        } else if constexpr (std::is_same_v<T, TextSpan>) {
          return {{"kind", "text"}, {"text", v.text}};
        } else {
          return {{"kind", "answer"}, {"text", v.text}};
        }
      },
      item);
}

inline std::vector<RenderItem> parse_events(std::string_view text,
                                            const std::string& source = "events") {
  std::vector<RenderItem> out;
  detail::for_each_json_line(text, source, [&](const nlohmann::json& j) {
    out.push_back(event_from_json(j));
  });
  return out;
}

enum class SequenceKind { kImage, kVideo, kStreaming };

// Dispatches a flat event list to the matching renderer. For video, a single
// trailing text event becomes the text after the frames.
inline RenderedSequence render_events(SequenceKind kind, const std::vector<RenderItem>& events) {
  switch (kind) {
    case SequenceKind::kImage:
      return render_image_sequence(events);
    case SequenceKind::kStreaming:
      return render_streaming_sequence(events);
    case SequenceKind::kVideo: {
      std::vector<FrameTokens> frames;
      std::optional<std::string> trailing;
      for (std::size_t i = 0; i < events.size(); ++i) {
        if (const auto* f = std::get_if<FrameTokens>(&events[i]); f != nullptr && !trailing) {
          frames.push_back(*f);
        } else if (const auto* t = std::get_if<TextSpan>(&events[i]);
                   t != nullptr && i + 1 == events.size()) {
          trailing = t->text;
        } else {
          throw FormatError("video sequences are frames followed by at most one text event");
        }
      }
      return render_video_sequence(frames, trailing);
    }
  }
  throw FormatError("unknown sequence kind");
}

inline CurationSample sample_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir) {
  CurationSample s;
  s.id = j.at("id").get<std::string>();
  s.resolution = {j.at("height").get<std::size_t>(), j.at("width").get<std::size_t>()};
  if (s.resolution.height < 1 || s.resolution.width < 1) {
    throw InputError("sample '" + s.id + "' has an empty resolution");
  }
  if (j.contains("caption")) s.caption = j.at("caption").get<std::string>();
  if (j.contains("feature")) {
    s.feature = j.at("feature").get<std::vector<double>>();
  } else if (j.contains("feature_file")) {
    const auto path = base_dir / j.at("feature_file").get<std::string>();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open feature file " + path.string());
    std::vector<double> f;
    double v = 0.0;
    while (in >> v) f.push_back(v);
    if (!in.eof()) throw InputError("bad number in feature file " + path.string());
    s.feature = std::move(f);
  }
  if (j.contains("scores")) s.scores = j.at("scores").get<std::map<std::string, double>>();
  if (j.contains("boxes")) {
    for (const auto& b : j.at("boxes")) {
      TextBox tb{b.at("text").get<std::string>(), b.at("box").get<std::array<double, 4>>()};
      tb.validate();
      s.boxes.push_back(std::move(tb));
    }
  }
  if (j.contains("notes")) s.notes = j.at("notes").get<std::vector<std::string>>();
  return s;
}

inline nlohmann::json sample_to_json(const CurationSample& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["width"] = s.resolution.width;
  j["height"] = s.resolution.height;
  if (s.caption) j["caption"] = *s.caption;
  if (s.feature) j["feature"] = *s.feature;
  if (!s.scores.empty()) j["scores"] = s.scores;
  if (!s.boxes.empty()) {
    auto& arr = j["boxes"] = nlohmann::json::array();
    for (const auto& b : s.boxes) arr.push_back({{"text", b.text}, {"box", b.box}});
  }
  if (!s.notes.empty()) j["notes"] = s.notes;
  return j;
}

inline Batch parse_manifest(std::string_view text, const std::filesystem::path& base_dir = ".",
                            const std::string& source = "manifest") {
  Batch out;
  detail::for_each_json_line(text, source, [&](const nlohmann::json& j) {
    out.push_back(sample_from_json(j, base_dir));
  });
  return out;
}

inline std::string format_manifest(const Batch& batch) {
  std::string out;
  for (const auto& s : batch) {
    out += sample_to_json(s).dump();
    out += "\n";
  }
  return out;
}

// First line: summary with counts, per-frame table and the rendered video
// string. Then one record per element in sequence order.
inline std::string format_token_sequence(const TokenSequence& seq, bool with_features = false) {
  nlohmann::json summary;
  summary["kind"] = "summary";
  summary["vision_tokens"] = seq.vision_count();
  summary["text_tokens"] = seq.text_count();
  summary["total_tokens"] = seq.total_count();
  auto& frames = summary["frames"] = nlohmann::json::array();
  std::vector<FrameTokens> rendered;
  for (const auto& f : seq.frames()) {
    frames.push_back({{"frame", f.frame}, {"timestamp", f.timestamp}, {"tokens", f.tokens}});
    rendered.push_back({f.tokens, f.timestamp});
  }
  std::string text;
  for (const auto& e : seq.elements()) {
    if (const auto* t = std::get_if<TextToken>(&e)) text += t->text;
  }
  if (!rendered.empty()) {
    summary["sequence"] =
        render_video_sequence(rendered, text.empty() ? std::nullopt : std::optional(text)).text;
  }
  std::string out = summary.dump() + "\n";
  for (const auto& e : seq.elements()) {
    nlohmann::json j;
    if (const auto* v = std::get_if<VisionToken>(&e)) {
      j = {{"kind", "vision"},
           {"frame", v->frame},
           {"row", v->position.row},
           {"col", v->position.col},
           {"timestamp", v->timestamp}};
      if (with_features) j["feature"] = v->feature;
    } else {
      j = {{"kind", "text"}, {"text", std::get<TextToken>(e).text}};
    }
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace vidtok
