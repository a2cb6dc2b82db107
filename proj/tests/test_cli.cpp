/*
 * Copyright 2026 The evdet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "json.hpp"

namespace evdet {
namespace {

namespace fs = std::filesystem;
const std::string kFixtures = EVDET_FIXTURES_DIR;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "evdet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliResult result;
  result.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("evdet-cli-" + std::to_string(std::random_device{}()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name), std::ios::binary) << content;
  }

  // Synthesizes easy-1 into stream.jsonl and truth.txt.
  void synth_easy_one() const {
    const auto r = cli({"synth", kFixtures + "/easy-1.json", "--out", path("stream.jsonl"),
                        "--truth-out", path("truth.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesStreamAndTruth) {
  synth_easy_one();
  EXPECT_EQ(count_lines(slurp(path("stream.jsonl"))), 550u);
  const std::string truth = slurp(path("truth.txt"));
  EXPECT_EQ(count_lines(truth), 1u);
  EXPECT_EQ(truth.rfind("aceh-quake ", 0), 0u);
}

TEST_F(CliTest, SynthIsDeterministicAndSeedable) {
  synth_easy_one();
  const std::string first = slurp(path("stream.jsonl"));
  synth_easy_one();
  EXPECT_EQ(slurp(path("stream.jsonl")), first);
  const auto r = cli({"synth", kFixtures + "/easy-1.json", "--seed", "2", "--out",
                      path("other.jsonl"), "--truth-out", path("other.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(slurp(path("other.jsonl")), first);
}

TEST_F(CliTest, SynthRejectsInvalidSpec) {
  write("bad.json", R"({"background":{"rate":-1.0,"duration_s":10}})");
  const auto r = cli({"synth", path("bad.json"), "--out", path("s.jsonl"), "--truth-out",
                      path("t.txt")});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("background.rate"), std::string::npos) << r.err;
}

TEST_F(CliTest, DetectRecordsDefaultsInManifest) {
  synth_easy_one();
  const auto r = cli({"detect", path("stream.jsonl"), "--events-out", path("events.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(path("events.jsonl.manifest.json")));
  const auto& config = manifest.at("config");
  EXPECT_EQ(config.at("cluster_limit"), 100);
  EXPECT_EQ(config.at("tweet_limit"), 1000);
  EXPECT_EQ(config.at("distance_threshold"), 0.8);
  EXPECT_EQ(config.at("diversity_threshold"), 5.0);
  EXPECT_EQ(config.at("default_timeout"), 3600.0);
  EXPECT_EQ(config.at("timeout_multiplier"), 1.0);
  EXPECT_EQ(config.at("compressor").at("level"), 9);
  EXPECT_EQ(manifest.at("counters").at("tweets_processed"), 550);
  EXPECT_EQ(manifest.at("reader").at("rejected"), 0);
  EXPECT_TRUE(manifest.contains("start_time"));
  EXPECT_TRUE(manifest.contains("wall_seconds"));
}

TEST_F(CliTest, DetectFlagsOverrideDefaults) {
  synth_easy_one();
  const auto r = cli({"detect", path("stream.jsonl"), "--events-out", path("events.jsonl"),
                      "--manifest-out", path("m.json"), "--diversity-threshold", "6.3",
                      "--timeout-multiplier", "10", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(path("m.json")));
  EXPECT_EQ(manifest.at("config").at("diversity_threshold"), 6.3);
  EXPECT_EQ(manifest.at("config").at("timeout_multiplier"), 10.0);
  EXPECT_EQ(manifest.at("seed"), 7);
}

TEST_F(CliTest, DetectRejectsBadConfig) {
  write("empty.jsonl", "");
  const auto r = cli({"detect", path("empty.jsonl"), "--events-out", path("e.jsonl"),
                      "--distance-threshold", "0"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_NE(r.err.find("distance_threshold"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"detect", path("empty.jsonl"), "--compressor", "lz-fast"}).code, cli::kUsage);
}

TEST_F(CliTest, DetectOnEmptyInput) {
  write("empty.jsonl", "");
  const auto r = cli({"detect", path("empty.jsonl"), "--events-out", path("e.jsonl")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("e.jsonl")), "");
  EXPECT_NE(r.out.find("tweets 0 events 0"), std::string::npos) << r.out;
}

TEST_F(CliTest, DetectReportsRejectedLines) {
  write("mixed.jsonl",
        "{\"id\":\"1\",\"user\":\"a\",\"ts\":10,\"text\":\"hello world\"}\n"
        "{\"id\":\"2\",\"ts\":11,\"text\":\"no user\"}\n"
        "{\"id\":\"3\",\"user\":\"a\",\"ts\":5,\"text\":\"late arrival\"}\n"
        "{\"id\":\"4\",\"user\":\"b\",\"ts\":12,\"text\":\"hello again\"}\n");
  const auto r = cli({"detect", path("mixed.jsonl"), "--events-out", path("e.jsonl")});
  EXPECT_EQ(r.code, cli::kRejectedLines);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(path("e.jsonl.manifest.json")));
  EXPECT_EQ(manifest.at("counters").at("tweets_processed"), 2);
  EXPECT_EQ(manifest.at("reader").at("out_of_order"), 1);
  EXPECT_EQ(manifest.at("errors").size(), 2u);
}

TEST_F(CliTest, MissingInputIsAUsageError) {
  EXPECT_EQ(cli({"detect", path("absent.jsonl")}).code, cli::kUsage);
  EXPECT_EQ(cli({"bench", path("absent.txt")}).code, cli::kUsage);
  EXPECT_EQ(cli({}).code, cli::kUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, cli::kUsage);
}

TEST_F(CliTest, EndToEndDetectAndEvaluate) {
  synth_easy_one();
  const auto d = cli({"detect", path("stream.jsonl"), "--events-out", path("events.jsonl"),
                      "--timeout-multiplier", "10"});
  ASSERT_EQ(d.code, 0) << d.err;
  const auto e = cli({"eval", path("events.jsonl"), path("truth.txt"), "--manifest",
                      path("events.jsonl.manifest.json"), "--json-out", path("report.json")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("f1 1"), std::string::npos) << e.out;
  const auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_EQ(report.at("f1"), 1.0);
  EXPECT_FALSE(report.at("tweets_per_minute").is_null());
}

TEST_F(CliTest, EvalScoresHandWrittenFiles) {
  write("events.jsonl",
        "{\"type\":\"closed\",\"event_id\":1,\"members\":[\"1\",\"2\",\"3\"]}\n");
  write("truth.txt", "a 0 10 1,2,3\nb 0 10 7,8,9\n");
  const auto r = cli({"eval", path("events.jsonl"), path("truth.txt"), "--json-out",
                      path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(report.at("precision"), 1.0);
  EXPECT_EQ(report.at("recall"), 0.5);
  EXPECT_DOUBLE_EQ(report.at("f1").get<double>(), 2.0 / 3.0);
}

TEST_F(CliTest, EvalWarnsOnDisjointIds) {
  write("events.jsonl",
        "{\"type\":\"closed\",\"event_id\":1,\"members\":[\"x1\",\"x2\"]}\n");
  write("truth.txt", "a 0 10 1,2,3\n");
  const auto r = cli({"eval", path("events.jsonl"), path("truth.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("share no member ids"), std::string::npos) << r.err;
}

TEST_F(CliTest, BenchCompressorRows) {
  synth_easy_one();
  const auto r = cli({"bench", path("stream.jsonl"), "--algorithm", "deflate-raw", "--algorithm",
                      "gzip"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 3u) << r.out;
  EXPECT_EQ(r.out.rfind("algorithm level mean_ratio texts_per_sec", 0), 0u);
}

TEST_F(CliTest, BenchEngineRow) {
  synth_easy_one();
  const auto r = cli({"bench", path("stream.jsonl"), "--engine"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("processing_rate_per_min"), std::string::npos);
  EXPECT_NE(r.out.find("\n550 "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("within_bound true"), std::string::npos);
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string tool = EVDET_TOOL_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(tool + " --help"), 0);
  EXPECT_EQ(status(tool + " detect " + path("absent.jsonl")), 1);
  write("bad.jsonl", "nonsense\n");
  EXPECT_EQ(status(tool + " detect " + path("bad.jsonl") + " --events-out " + path("e.jsonl")), 3);
}

}  // namespace
}  // namespace evdet
