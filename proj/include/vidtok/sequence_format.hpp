// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

// Text realization of image, video and streaming token sequences.
//
// Vision tokens are rendered as placeholder spans `<|vis:N|>`. Grammar:
//
//   image     := item ( item )*          image items are followed by "\n"
//                                        whenever anything follows them
//   video     := frame ( "," frame )* [ "\n" text ]
//   frame     := "Time: " stamp "s" "<|vis:" N "|>"
//   streaming := ( frame | text | "GPT: " answer )*
//                an answer directly followed by text is closed with "\n"
//
// Integral stamps render without decimals ("Time: 3s"), others with one
// decimal ("Time: 3.5s").

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vidtok/error.hpp"

namespace vidtok {

struct ImageTokens {
  std::size_t count = 1;
  friend bool operator==(const ImageTokens&, const ImageTokens&) = default;
};

struct FrameTokens {
  std::size_t count = 1;
  double timestamp = 0.0;
  friend bool operator==(const FrameTokens&, const FrameTokens&) = default;
};

struct TextSpan {
  std::string text;
  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct AnswerSpan {
  std::string text;
  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

using RenderItem = std::variant<ImageTokens, FrameTokens, TextSpan, AnswerSpan>;

struct VisionSpan {
  std::size_t offset = 0;
  std::size_t count = 0;
  friend bool operator==(const VisionSpan&, const VisionSpan&) = default;
};

struct RenderedSequence {
  std::string text;
  std::vector<VisionSpan> spans;

  std::size_t vision_tokens() const noexcept {
    std::size_t n = 0;
    for (const auto& s : spans) n += s.count;
    return n;
  }

  friend bool operator==(const RenderedSequence&, const RenderedSequence&) = default;
};

inline constexpr std::string_view kPlaceholderOpen = "<|vis:";
inline constexpr std::string_view kPlaceholderClose = "|>";
inline constexpr std::string_view kTimePrefix = "Time: ";
inline constexpr std::string_view kAnswerPrefix = "GPT: ";

inline std::string format_timestamp(double seconds) {
  if (!(seconds >= 0.0) || std::isinf(seconds)) {
    throw FormatError("timestamps must be finite and >= 0");
  }
  char buf[64];
  if (seconds == std::floor(seconds) && seconds < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", seconds);
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", seconds);
  }
  return buf;
}

namespace detail {

class SequenceWriter {
 public:
  void text(std::string_view s) { out_.text.append(s); }

  void placeholder(std::size_t count) {
    if (count < 1) {
      throw FormatError("vision token count must be >= 1");
    }
    out_.spans.push_back({out_.text.size(), count});
    out_.text.append(kPlaceholderOpen);
    out_.text.append(std::to_string(count));
    out_.text.append(kPlaceholderClose);
  }

  void frame(const FrameTokens& f) {
    text(kTimePrefix);
    text(format_timestamp(f.timestamp));
    text("s");
    placeholder(f.count);
  }

  RenderedSequence finish() && { return std::move(out_); }

 private:
  RenderedSequence out_;
};

inline void forbid(std::string_view text, std::string_view marker, const char* what) {
  if (text.find(marker) != std::string_view::npos) {
    throw FormatError(std::string(what) + " must not contain \"" + std::string(marker) + "\"");
  }
}

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  bool done() const noexcept { return pos_ >= s_.size(); }
  std::size_t pos() const noexcept { return pos_; }
  std::string_view rest() const noexcept { return s_.substr(pos_); }

  bool consume(std::string_view lit) {
    if (s_.substr(pos_).starts_with(lit)) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view lit) {
    if (!consume(lit)) {
      throw ParseError("expected \"" + std::string(lit) + "\" at offset " + std::to_string(pos_));
    }
  }

  std::optional<std::size_t> placeholder_at(std::size_t at, std::size_t* end) const {
    std::string_view s = s_.substr(at);
    if (!s.starts_with(kPlaceholderOpen)) return std::nullopt;
    std::size_t i = kPlaceholderOpen.size();
    std::size_t n = 0;
    const std::size_t digits_begin = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      n = n * 10 + static_cast<std::size_t>(s[i] - '0');
      ++i;
    }
    if (i == digits_begin || !s.substr(i).starts_with(kPlaceholderClose) || n < 1) {
      return std::nullopt;
    }
    *end = at + i + kPlaceholderClose.size();
    return n;
  }

  std::size_t placeholder() {
    std::size_t end = 0;
    auto n = placeholder_at(pos_, &end);
    if (!n) throw ParseError("malformed vision placeholder at offset " + std::to_string(pos_));
    pos_ = end;
    return *n;
  }

  // "Time: <stamp>s<|vis:N|>" starting at `at`.
  std::optional<FrameTokens> frame_at(std::size_t at, std::size_t* end) const {
    std::string_view s = s_.substr(at);
    if (!s.starts_with(kTimePrefix)) return std::nullopt;
    std::size_t i = kTimePrefix.size();
    const std::size_t num_begin = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == num_begin) return std::nullopt;
    if (i < s.size() && s[i] == '.') {
      const std::size_t frac_begin = ++i;
      while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
      if (i == frac_begin) return std::nullopt;
    }
    const std::string number(s.substr(num_begin, i - num_begin));
    if (i >= s.size() || s[i] != 's') return std::nullopt;
    ++i;
    std::size_t ph_end = 0;
    auto count = placeholder_at(at + i, &ph_end);
    if (!count) return std::nullopt;
    *end = ph_end;
    return FrameTokens{*count, std::stod(number)};
  }

  FrameTokens frame() {
    std::size_t end = 0;
    auto f = frame_at(pos_, &end);
    if (!f) throw ParseError("malformed frame at offset " + std::to_string(pos_));
    pos_ = end;
    return *f;
  }

  // Earliest offset >= pos where `pred(offset)` holds, or size().
  template <typename Pred>
  std::size_t find_first(Pred pred) const {
    for (std::size_t i = pos_; i < s_.size(); ++i) {
      if (pred(i)) return i;
    }
    return s_.size();
  }

  std::string take_until(std::size_t end) {
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end;
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RenderedSequence render_image_sequence(const std::vector<RenderItem>& items) {
  if (items.empty()) {
    throw FormatError("image sequence needs at least one item");
  }
  detail::SequenceWriter w;
  bool after_image = false;
  for (const auto& item : items) {
    if (after_image) {
      w.text("\n");
    }
    if (const auto* img = std::get_if<ImageTokens>(&item)) {
      w.placeholder(img->count);
      after_image = true;
    } else if (const auto* txt = std::get_if<TextSpan>(&item)) {
      if (txt->text.empty()) throw FormatError("text items must be non-empty");
      detail::forbid(txt->text, kPlaceholderOpen, "text");
      w.text(txt->text);
      after_image = false;
    } else {
      throw FormatError("image sequences accept only image and text items");
    }
  }
  return std::move(w).finish();
}

inline std::vector<RenderItem> parse_image_sequence(std::string_view text) {
  detail::Scanner sc(text);
  std::vector<RenderItem> out;
  if (sc.done()) throw ParseError("empty image sequence");
  while (!sc.done()) {
    std::size_t end = 0;
    if (sc.placeholder_at(sc.pos(), &end)) {
      out.push_back(ImageTokens{sc.placeholder()});
      if (!sc.done()) sc.expect("\n");
      if (sc.done() && text.ends_with("\n")) throw ParseError("dangling separator");
    } else {
      const std::size_t stop =
          sc.find_first([&](std::size_t i) { return text.substr(i).starts_with(kPlaceholderOpen); });
      out.push_back(TextSpan{sc.take_until(stop)});
    }
  }
  return out;
}

inline RenderedSequence render_video_sequence(const std::vector<FrameTokens>& frames,
                                              const std::optional<std::string>& trailing_text = {}) {
  if (frames.empty()) {
    throw FormatError("video sequence needs at least one frame");
  }
  detail::SequenceWriter w;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0) {
      if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
        throw FormatError("frame timestamps must be strictly increasing (frame " +
                          std::to_string(i) + ")");
      }
      w.text(",");
    }
    w.frame(frames[i]);
  }
  if (trailing_text) {
    w.text("\n");
    w.text(*trailing_text);
  }
  return std::move(w).finish();
}

struct VideoSequence {
  std::vector<FrameTokens> frames;
  std::optional<std::string> trailing_text;
  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;
};

inline VideoSequence parse_video_sequence(std::string_view text) {
  detail::Scanner sc(text);
  VideoSequence out;
  out.frames.push_back(sc.frame());
  while (sc.consume(",")) {
    out.frames.push_back(sc.frame());
  }
  if (sc.consume("\n")) {
    out.trailing_text = std::string(sc.rest());
  } else if (!sc.done()) {
    throw ParseError("unexpected content after frame at offset " + std::to_string(sc.pos()));
  }
  return out;
}

inline RenderedSequence render_streaming_sequence(const std::vector<RenderItem>& events) {
  detail::SequenceWriter w;
  std::optional<double> last_ts;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    if (const auto* f = std::get_if<FrameTokens>(&ev)) {
      if (last_ts && f->timestamp < *last_ts) {
        throw FormatError("streaming frame timestamps must be non-decreasing (event " +
                          std::to_string(i) + ")");
      }
      last_ts = f->timestamp;
      w.frame(*f);
    } else if (const auto* t = std::get_if<TextSpan>(&ev)) {
      if (t->text.empty()) throw FormatError("text events must be non-empty");
      detail::forbid(t->text, kPlaceholderOpen, "text");
      detail::forbid(t->text, kAnswerPrefix, "text");
      w.text(t->text);
    } else if (const auto* a = std::get_if<AnswerSpan>(&ev)) {
      detail::forbid(a->text, kPlaceholderOpen, "answer");
      detail::forbid(a->text, kAnswerPrefix, "answer");
      detail::forbid(a->text, "\n", "answer");
      w.text(kAnswerPrefix);
      w.text(a->text);
      if (i + 1 < events.size() && std::holds_alternative<TextSpan>(events[i + 1])) {
        w.text("\n");
      }
    } else {
      throw FormatError("streaming sequences accept only frame, text and answer items");
    }
  }
  return std::move(w).finish();
}

inline std::vector<RenderItem> parse_streaming_sequence(std::string_view text) {
  detail::Scanner sc(text);
  std::vector<RenderItem> out;
  auto is_frame = [&](std::size_t i) {
    std::size_t end = 0;
    return sc.frame_at(i, &end).has_value();
  };
  auto is_marker = [&](std::size_t i) {
    return is_frame(i) || text.substr(i).starts_with(kAnswerPrefix);
  };
  while (!sc.done()) {
    if (is_frame(sc.pos())) {
      out.push_back(sc.frame());
    } else if (sc.consume(kAnswerPrefix)) {
      const std::size_t stop =
          sc.find_first([&](std::size_t i) { return text[i] == '\n' || is_marker(i); });
      out.push_back(AnswerSpan{sc.take_until(stop)});
      if (sc.consume("\n") && (sc.done() || is_marker(sc.pos()))) {
        throw ParseError("answer separator must be followed by text");
      }
    } else {
      out.push_back(TextSpan{sc.take_until(sc.find_first(is_marker))});
    }
  }
  return out;
}

// Grounding interval, one decimal: "1.0-2.0 s".
inline std::string format_time_interval(double start, double end) {
  if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0) {
    throw FormatError("interval bounds must be finite and >= 0");
  }
  if (start > end) {
    throw FormatError("interval start exceeds end");
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.1f-%.1f s", start, end);
  return buf;
}

inline std::pair<double, double> parse_time_interval(std::string_view text) {
  double start = 0.0;
  double end = 0.0;
  int consumed = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%lf-%lf s%n", &start, &end, &consumed) != 2 ||
      static_cast<std::size_t>(consumed) != s.size() || !s.ends_with(" s")) {
    throw ParseError("not a time interval: \"" + s + "\"");
  }
  return {start, end};
}

}  // namespace vidtok
