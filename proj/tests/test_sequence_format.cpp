// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "vidtok/records.hpp"
#include "vidtok/sequence_format.hpp"
#include "vidtok/synthetic.hpp"

namespace vidtok {
namespace {

SequenceKind kind_of(const std::string& s) {
  if (s == "image") return SequenceKind::kImage;
  if (s == "video") return SequenceKind::kVideo;
  return SequenceKind::kStreaming;
}

TEST(Golden, FixturesRenderByteExactly) {
  std::ifstream in(VIDTOK_FIXTURE_DIR "/golden_sequences.jsonl");
  ASSERT_TRUE(in);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    std::vector<RenderItem> events;
    for (const auto& e : j.at("events")) events.push_back(event_from_json(e));
    const auto rendered = render_events(kind_of(j.at("kind")), events);
    EXPECT_EQ(rendered.text, j.at("expected").get<std::string>()) << j.at("name");
    ++n;
  }
  EXPECT_GE(n, 8U);
}

TEST(ImageFormat, Examples) {
  EXPECT_EQ(render_image_sequence({ImageTokens{4}}).text, "<|vis:4|>");
  const auto r =
      render_image_sequence({ImageTokens{4}, ImageTokens{9}, TextSpan{"Describe both."}});
  EXPECT_EQ(r.text, "<|vis:4|>\n<|vis:9|>\nDescribe both.");
  ASSERT_EQ(r.spans.size(), 2U);
  EXPECT_EQ(r.spans[0], (VisionSpan{0, 4}));
  EXPECT_EQ(r.spans[1], (VisionSpan{10, 9}));
}

TEST(ImageFormat, Errors) {
  EXPECT_THROW((void)render_image_sequence({}), FormatError);
  EXPECT_THROW((void)render_image_sequence({TextSpan{"a <|vis:3|>"}}), FormatError);
  EXPECT_THROW((void)render_image_sequence({FrameTokens{1, 0.0}}), FormatError);
  EXPECT_THROW((void)parse_image_sequence("<|vis:4|>x"), ParseError);
  EXPECT_THROW((void)parse_image_sequence("<|vis:4|>\n"), ParseError);
  EXPECT_THROW((void)parse_image_sequence(""), ParseError);
}

TEST(VideoFormat, Examples) {
  EXPECT_EQ(render_video_sequence({{2, 0.0}}).text, "Time: 0s<|vis:2|>");
  EXPECT_EQ(render_video_sequence({{2, 0.0}, {2, 1.0}}, "What happens?").text,
            "Time: 0s<|vis:2|>,Time: 1s<|vis:2|>\nWhat happens?");
  EXPECT_EQ(render_video_sequence({{1, 3.5}}).text, "Time: 3.5s<|vis:1|>");
}

TEST(VideoFormat, TimestampRendering) {
  EXPECT_EQ(format_timestamp(0.0), "0");
  EXPECT_EQ(format_timestamp(3.0), "3");
  EXPECT_EQ(format_timestamp(3.5), "3.5");
  EXPECT_EQ(format_timestamp(179.0), "179");
  EXPECT_EQ(format_timestamp(0.25), "0.2");
}

TEST(VideoFormat, Errors) {
  EXPECT_THROW((void)render_video_sequence({}), FormatError);
  EXPECT_THROW((void)render_video_sequence({{1, 1.0}, {1, 1.0}}), FormatError);
  EXPECT_THROW((void)parse_video_sequence("Time: 0s<|vis:2|>, Time: 1s<|vis:2|>"), ParseError);
  EXPECT_THROW((void)parse_video_sequence("Time: xs<|vis:2|>"), ParseError);
  EXPECT_THROW((void)parse_video_sequence("Time: 0s<|vis:2|>junk"), ParseError);
}

TEST(StreamingFormat, Examples) {
  EXPECT_EQ(render_streaming_sequence({FrameTokens{7, 0.0}, AnswerSpan{"hello"}}).text,
            "Time: 0s<|vis:7|>GPT: hello");
  const std::vector<RenderItem> ev{FrameTokens{1, 0.0}, AnswerSpan{"ok"}, TextSpan{"next"}};
  const auto r = render_streaming_sequence(ev);
  EXPECT_EQ(r.text, "Time: 0s<|vis:1|>GPT: ok\nnext");
  EXPECT_EQ(parse_streaming_sequence(r.text), ev);
}

TEST(StreamingFormat, Errors) {
  EXPECT_THROW((void)render_streaming_sequence({AnswerSpan{"a\nb"}}), FormatError);
  EXPECT_THROW((void)render_streaming_sequence({TextSpan{"say GPT: hi"}}), FormatError);
  EXPECT_THROW((void)render_streaming_sequence({FrameTokens{1, 2.0}, FrameTokens{1, 1.0}}),
               FormatError);
  EXPECT_THROW((void)render_streaming_sequence({ImageTokens{1}}), FormatError);
}

TEST(RoundTrip, RandomEventLists) {
  synth::Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto img = synth::random_image_items(rng);
    ASSERT_EQ(parse_image_sequence(render_image_sequence(img).text), img);
    const auto v = synth::random_video_items(rng);
    const auto parsed = parse_video_sequence(render_video_sequence(v.frames, v.text).text);
    ASSERT_EQ(parsed.frames, v.frames);
    ASSERT_EQ(parsed.trailing_text, v.text);
    const auto st = synth::random_streaming_items(rng);
    ASSERT_EQ(parse_streaming_sequence(render_streaming_sequence(st).text), st);
  }
}

TEST(RoundTrip, SpansPointAtPlaceholders) {
  synth::Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    const auto items = synth::random_streaming_items(rng);
    const auto r = render_streaming_sequence(items);
    for (const auto& s : r.spans) {
      const std::string expect = "<|vis:" + std::to_string(s.count) + "|>";
      ASSERT_EQ(r.text.substr(s.offset, expect.size()), expect);
    }
  }
}

TEST(Interval, Examples) {
  EXPECT_EQ(format_time_interval(1.0, 2.0), "1.0-2.0 s");
  EXPECT_EQ(format_time_interval(0.0, 12.34), "0.0-12.3 s");
  const auto [a, b] = parse_time_interval("3.5-10.0 s");
  EXPECT_EQ(a, 3.5);
  EXPECT_EQ(b, 10.0);
  EXPECT_THROW((void)format_time_interval(2.0, 1.0), FormatError);
  EXPECT_THROW((void)format_time_interval(-1.0, 1.0), FormatError);
  EXPECT_THROW((void)parse_time_interval("1.0-2.0"), ParseError);
  EXPECT_THROW((void)parse_time_interval("1.0 - 2.0 s"), ParseError);
}

TEST(Interval, RoundTrip) {
  synth::Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0.0, 1000.0);
    const double b = a + rng.uniform(0.0, 100.0);
    const auto [pa, pb] = parse_time_interval(format_time_interval(a, b));
    ASSERT_LE(std::abs(pa - a), 0.05 + 1e-9);
    ASSERT_LE(std::abs(pb - b), 0.05 + 1e-9);
  }
}

}  // namespace
}  // namespace vidtok
