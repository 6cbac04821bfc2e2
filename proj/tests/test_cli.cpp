// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vidtok/cli.hpp"

namespace vidtok {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("vidtok_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, VersionAndHelp) {
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "vidtok 1.0.0\n");
  const auto h = run({"tokenize", "--help"});
  EXPECT_EQ(h.code, 0);
  for (const char* flag : {"--frames", "--config", "--patch", "--merge", "--threshold",
                           "--distance", "--fps", "--max-frames", "--max-frame-tokens",
                           "--budget-vision", "--budget-total", "--encoder", "--seed",
                           "--feature-dim", "--prompt", "--with-features", "--out"}) {
    EXPECT_NE(h.out.find(flag), std::string::npos) << flag;
  }
  const auto top = run({"--help"});
  for (const char* sub :
       {"tokenize", "prune-stats", "render-sequence", "curate", "selfcheck", "synth", "config"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
  }
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"tokenize"}).code, 1);
  EXPECT_EQ(run({"render-sequence", "--format", "tape", "--in", "x"}).code, 1);
  const auto missing = run({"tokenize", "--frames", path("nope")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("not found"), std::string::npos);
}

TEST_F(CliTest, PruneStatsOnStaticClip) {
  ASSERT_EQ(run({"synth", "--out", path("s"), "--frames", "3"}).code, 0);
  const auto r = run({"prune-stats", "--frames", path("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "0\t0\t4\t0\n"
            "1\t1\t0\t4\n"
            "2\t2\t0\t4\n"
            "# kept=4 dropped=8 ratio=0.6666666666666666\n");
}

TEST_F(CliTest, DemoClipMatchesStaticLaw) {
  const auto r = run({"prune-stats", "--frames", VIDTOK_DEMO_DIR "/static3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ratio=0.6666666666666666"), std::string::npos);
}

TEST_F(CliTest, TokenizeIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(run({"synth", "--out", path("r"), "--frames", "4", "--motion", "random", "--seed",
                 "3", "--format", "vtraw"})
                .code,
            0);
  const std::vector<std::string> args{"tokenize", "--frames", path("r"),    "--encoder",
                                      "randproj", "--seed",   "5",          "--feature-dim",
                                      "8",        "--prompt", "What moved?", "--with-features"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto summary = nlohmann::json::parse(a.out.substr(0, a.out.find('\n')));
  EXPECT_EQ(summary.at("text_tokens"), 1);
  EXPECT_NE(summary.at("sequence").get<std::string>().find("\nWhat moved?"), std::string::npos);
}

TEST_F(CliTest, OverBudgetExitsTwo) {
  ASSERT_EQ(run({"synth", "--out", path("big"), "--frames", "2", "--height", "112", "--width",
                 "112", "--channels", "1"})
                .code,
            0);
  // 112x112 at patch 14, merge 2 is 16 tokens per frame.
  const auto r = run({"tokenize", "--frames", path("big"), "--budget-vision", "8",
                      "--budget-total", "16"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
  const auto capped = run({"tokenize", "--frames", path("big"), "--budget-vision", "8",
                           "--budget-total", "16", "--max-frame-tokens", "4"});
  EXPECT_EQ(capped.code, 0) << capped.err;
}

TEST_F(CliTest, RenderSequence) {
  write("ev.jsonl",
        "{\"kind\":\"frame\",\"count\":2,\"timestamp\":0}\n"
        "{\"kind\":\"frame\",\"count\":2,\"timestamp\":1}\n"
        "{\"kind\":\"text\",\"text\":\"What happens?\"}\n");
  const auto r = run({"render-sequence", "--format", "video", "--in", path("ev.jsonl"), "--spans",
                      path("spans.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "Time: 0s<|vis:2|>,Time: 1s<|vis:2|>\nWhat happens?");
  EXPECT_EQ(read("spans.tsv"), "8\t2\n26\t2\n");
  EXPECT_EQ(run({"render-sequence", "--format", "image", "--in", path("ev.jsonl")}).code, 1);
}

TEST_F(CliTest, CurateWritesPartitions) {
  write("m.jsonl",
        "{\"id\":\"a\",\"width\":100,\"height\":100,\"scores\":{\"q\":0.9}}\n"
        "{\"id\":\"b\",\"width\":1000,\"height\":100,\"scores\":{\"q\":0.9}}\n"
        "{\"id\":\"c\",\"width\":100,\"height\":100,\"scores\":{\"q\":0.1}}\n");
  const auto r = run({"curate", "--manifest", path("m.jsonl"), "--stages", "aspect,score:q:0.5",
                      "--out", path("kept.jsonl"), "--rejects", path("rej.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read("kept.jsonl").find("\"id\":\"a\""), std::string::npos);
  const auto rej = read("rej.jsonl");
  EXPECT_NE(rej.find("rejected_by=aspect"), std::string::npos);
  EXPECT_NE(rej.find("rejected_by=score:q"), std::string::npos);
  EXPECT_EQ(run({"curate", "--manifest", path("m.jsonl"), "--stages", "nope"}).code, 1);
}

TEST_F(CliTest, ConfigAndSelfcheck) {
  write("c.cfg", "patch_size=7\nencoder=randproj\n");
  const auto c = run({"config", "--config", path("c.cfg")});
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("patch_size=7\n"), std::string::npos);
  EXPECT_EQ(run({"config", "--config", path("missing.cfg")}).code, 1);
  const auto s = run({"selfcheck", "--seed", "4"});
  EXPECT_EQ(s.code, 0) << s.out;
}

}  // namespace
}  // namespace vidtok
