// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vidtok/curation.hpp"
#include "vidtok/error.hpp"

namespace vidtok {

inline constexpr std::string_view kOcrCaptionJoin = ". The texts in this image are ";
inline constexpr std::string_view kBoxOpen = "<box>";
inline constexpr std::string_view kBoxClose = "</box>";

// "<box>[x1, y1, x2, y2]</box>" with three decimals.
inline std::string format_box(const std::array<double, 4>& b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "<box>[%.3f, %.3f, %.3f, %.3f]</box>", b[0], b[1], b[2], b[3]);
  return buf;
}

namespace detail {

inline std::string render_text_boxes(const std::vector<TextBox>& boxes,
                                     const std::vector<std::size_t>& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& tb = boxes[order[i]];
    if (i > 0) out += ", ";
    out += tb.text;
    out += format_box(tb.box);
  }
  return out;
}

inline void check_box_text(const TextBox& tb) {
  tb.validate();
  if (tb.text.empty()) throw FormatError("box text must be non-empty");
  if (tb.text.find(kBoxOpen) != std::string::npos) {
    throw FormatError("box text must not contain \"<box>\"");
  }
}

}  // namespace detail

inline std::string compose_ocr_caption(const std::string& caption,
                                       const std::vector<TextBox>& boxes) {
  if (caption.empty()) {
    throw FormatError("OCR caption requires a non-empty base caption");
  }
  if (caption.find(kOcrCaptionJoin) != std::string::npos) {
    throw FormatError("base caption must not contain the text-list marker");
  }
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  for (const auto& b : boxes) detail::check_box_text(b);
  return caption + std::string(kOcrCaptionJoin) + detail::render_text_boxes(boxes, order);
}

// Parses "t<box>[a, b, c, d]</box>, t2<box>[...]</box>" lists.
inline std::vector<TextBox> parse_text_boxes(std::string_view s) {
  std::vector<TextBox> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t open = s.find(kBoxOpen, pos);
    if (open == std::string_view::npos) throw ParseError("expected <box> in text list");
    TextBox tb;
    tb.text = std::string(s.substr(pos, open - pos));
    const std::size_t close = s.find(kBoxClose, open);
    if (close == std::string_view::npos) throw ParseError("unterminated <box>");
    const std::string inner(s.substr(open + kBoxOpen.size(), close - open - kBoxOpen.size()));
    int used = 0;
    if (std::sscanf(inner.c_str(), "[%lf, %lf, %lf, %lf]%n", &tb.box[0], &tb.box[1], &tb.box[2],
                    &tb.box[3], &used) != 4 ||
        static_cast<std::size_t>(used) != inner.size()) {
      throw ParseError("malformed box \"" + inner + "\"");
    }
    out.push_back(std::move(tb));
    pos = close + kBoxClose.size();
    if (pos < s.size()) {
      if (s.substr(pos, 2) != ", ") throw ParseError("expected \", \" between boxes");
      pos += 2;
      if (pos == s.size()) throw ParseError("dangling separator after box list");
    }
  }
  return out;
}

struct OcrCaption {
  std::string caption;
  std::vector<TextBox> boxes;
};

inline OcrCaption parse_ocr_caption(std::string_view s) {
  const std::size_t at = s.find(kOcrCaptionJoin);
  if (at == std::string_view::npos || at == 0) {
    throw ParseError("not an OCR caption");
  }
  return {std::string(s.substr(0, at)), parse_text_boxes(s.substr(at + kOcrCaptionJoin.size()))};
}

// Row bands by top edge (a box joins the current band while its y1 is within
// `band` of the band's first y1), then left to right inside a band.
inline std::vector<std::size_t> reading_order(const std::vector<TextBox>& boxes,
                                              double band = 0.02) {
  std::vector<std::size_t> idx(boxes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(boxes[a].box[1], boxes[a].box[0]) < std::pair(boxes[b].box[1], boxes[b].box[0]);
  });
  std::vector<std::size_t> out;
  out.reserve(idx.size());
  std::size_t start = 0;
  while (start < idx.size()) {
    const double top = boxes[idx[start]].box[1];
    std::size_t end = start;
    while (end < idx.size() && boxes[idx[end]].box[1] - top <= band) ++end;
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return boxes[a].box[0] < boxes[b].box[0]; });
    out.insert(out.end(), idx.begin() + static_cast<std::ptrdiff_t>(start),
               idx.begin() + static_cast<std::ptrdiff_t>(end));
    start = end;
  }
  return out;
}

enum class OcrTask {
  kTextExistence = 1,
  kTextLocalization = 2,
  kTextRecognition = 3,
  kTextComparison = 4,
  kComprehensiveText = 5,
};

inline std::string task_name(OcrTask task) {
  switch (task) {
    case OcrTask::kTextExistence:
      return "text_existence";
    case OcrTask::kTextLocalization:
      return "text_localization";
    case OcrTask::kTextRecognition:
      return "text_recognition";
    case OcrTask::kTextComparison:
      return "text_comparison";
    case OcrTask::kComprehensiveText:
      return "comprehensive_text";
  }
  return "unknown";
}

struct InstructionRecord {
  OcrTask task = OcrTask::kTextExistence;
  std::string prompt;
  std::string answer;
};

namespace detail {

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline std::string quote(const std::string& s) { return "\"" + s + "\""; }

inline void require_boxes(const CurationSample& s, OcrTask task) {
  if (s.boxes.empty()) {
    throw InputError("task " + task_name(task) + " needs at least one text box on sample '" +
                     s.id + "'");
  }
  for (const auto& b : s.boxes) check_box_text(b);
}

}  // namespace detail

// One instruction record for the given sub-task. Task 4 compares `sample`
// (Image 1) against `other` (Image 2). Deterministic for a fixed seed.
inline InstructionRecord generate_ocr_instruction(const CurationSample& sample, OcrTask task,
                                                  std::uint64_t seed,
                                                  const CurationSample* other = nullptr) {
  std::mt19937_64 rng(seed);
  InstructionRecord rec;
  rec.task = task;
  switch (task) {
    case OcrTask::kTextExistence: {
      detail::require_boxes(sample, task);
      std::set<std::string> present;
      for (const auto& b : sample.boxes) present.insert(b.text);
      std::string query;
      if (rng() & 1U) {
        query = sample.boxes[detail::pick(rng, sample.boxes.size())].text;
      } else {
        static constexpr std::string_view kLetters = "ABCDEFGHJKLMNPQRSTUVWXYZ";
        do {
          query.clear();
          const std::size_t len = 4 + detail::pick(rng, 5);
          for (std::size_t i = 0; i < len; ++i) query += kLetters[detail::pick(rng, kLetters.size())];
        } while (present.count(query) != 0);
      }
      rec.prompt = "Does the text " + detail::quote(query) +
                   " appear in the image? Answer Yes or No.";
      rec.answer = present.count(query) != 0 ? "Yes" : "No";
      break;
    }
    case OcrTask::kTextLocalization: {
      detail::require_boxes(sample, task);
      const auto& b = sample.boxes[detail::pick(rng, sample.boxes.size())];
      rec.prompt = "Locate the text " + detail::quote(b.text) +
                   " in the image and output its bounding box.";
      rec.answer = format_box(b.box);
      break;
    }
    case OcrTask::kTextRecognition: {
      detail::require_boxes(sample, task);
      const auto& b = sample.boxes[detail::pick(rng, sample.boxes.size())];
      rec.prompt = "Recognize the text within the bounding box " + format_box(b.box) + ".";
      rec.answer = b.text;
      break;
    }
    case OcrTask::kTextComparison: {
      if (other == nullptr) {
        throw InputError("task " + task_name(task) + " needs a second sample");
      }
      detail::require_boxes(sample, task);
      detail::require_boxes(*other, task);
      std::set<std::string> first;
      std::set<std::string> second;
      for (const auto& b : sample.boxes) first.insert(b.text);
      for (const auto& b : other->boxes) second.insert(b.text);
      std::vector<std::pair<std::string, int>> unique;
      for (const auto& t : first) {
        if (second.count(t) == 0) unique.emplace_back(t, 1);
      }
      for (const auto& t : second) {
        if (first.count(t) == 0) unique.emplace_back(t, 2);
      }
      if (unique.empty()) {
        throw InputError("task " + task_name(task) + " found no text unique to one image");
      }
      const auto& [text, image] = unique[detail::pick(rng, unique.size())];
      rec.prompt = "Given two images, in which image does the text " + detail::quote(text) +
                   " appear? Answer Image 1 or Image 2.";
      rec.answer = "Image " + std::to_string(image);
      break;
    }
    case OcrTask::kComprehensiveText: {
      detail::require_boxes(sample, task);
      rec.prompt = "Detect and recognize all text in the image.";
      rec.answer = detail::render_text_boxes(sample.boxes, reading_order(sample.boxes));
      break;
    }
    default:
      throw InputError("unknown OCR task");
  }
  return rec;
}

}  // namespace vidtok
