//
// Copyright 2026 The WASP Synthesis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "wasp/trace_io.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "test_util.h"

namespace wasp {
namespace {

using ::wasp::testing::Harness;
using ::wasp::testing::SimParams;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

IterationRecord Sample() {
  IterationRecord r;
  r.iteration = 3;
  r.generators = {{"a", 0.25, 0.3, 31, 120}, {"b", 1.0 / 3, 0.7, 69, 280}};
  r.dataset_size = 400;
  r.frechet = 0.1 + 0.2;
  r.voted = true;
  r.sigma = 9.689619;
  r.weight_fallback = true;
  r.near_ids = {{1, 5}, {}};
  r.far_ids = {{7}, {9, 2}};
  r.rng_checkpoint = 0xfedcba9876543210ULL;
  r.prompt_style = PromptStyle::kNonContrastive;
  r.template_hash = 1;
  r.prompt_digest = 0xffffffffffffffffULL;
  r.attempts = 2;
  return r;
}

TEST(TraceJsonTest, RecordRoundTripIsExact) {
  const IterationRecord r = Sample();
  auto back = IterationRecordFromJson(
      nlohmann::json::parse(IterationRecordToJson(r).dump()));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, r);
}

TEST(TraceJsonTest, MalformedRecords) {
  nlohmann::json j = IterationRecordToJson(Sample());
  j.erase("sigma");
  EXPECT_FALSE(IterationRecordFromJson(j).ok());
  j = IterationRecordToJson(Sample());
  j["template_hash"] = "xyz";
  EXPECT_FALSE(IterationRecordFromJson(j).ok());
  j = IterationRecordToJson(Sample());
  j["prompt_style"] = "shouty";
  EXPECT_FALSE(IterationRecordFromJson(j).ok());
}

TEST(TraceJsonTest, HeaderCarriesInfiniteEpsilonAsString) {
  TraceHeader h;
  h.infinite_epsilon = true;
  h.epsilon = HUGE_VAL;
  h.privacy.per_round_epsilon = HUGE_VAL;
  const nlohmann::json j = TraceHeaderToJson(h);
  EXPECT_EQ(j["epsilon"], "inf");
  EXPECT_EQ(j["per_round_epsilon"], "inf");
  EXPECT_EQ(j["format"], "wasp-trace");
  // Must serialize as valid JSON.
  EXPECT_NO_THROW(nlohmann::json::parse(j.dump()));
}

TEST(TraceFileTest, WriterAndReaderAgree) {
  Harness h;
  ASSERT_TRUE(h.Init(SimParams()).ok());
  RunResult result;
  const std::string path = ::testing::TempDir() + "/trace_rt.jsonl";
  {
    auto privacy = VerifyComposition(h.config.privacy);
    ASSERT_TRUE(privacy.ok());
    auto w = TraceWriter::Open(path, MakeTraceHeader(h.config, *privacy));
    ASSERT_TRUE(w.ok()) << w.status();
    RunOptions options;
    options.on_iteration = [&](const IterationRecord& r) {
      ASSERT_TRUE(w->Append(r).ok());
    };
    ASSERT_TRUE(h.Run(&result, options).ok());
  }
  auto trace = ReadTrace(path);
  ASSERT_TRUE(trace.ok()) << trace.status();
  EXPECT_EQ(trace->records, result.trace);
  EXPECT_EQ(trace->header["task"], "imdb");
  EXPECT_EQ(trace->header["generators"],
            nlohmann::json({"matched", "offset"}));
  EXPECT_EQ(trace->header["releases"], 4);
  EXPECT_EQ(trace->header["embedder"], "simulation:0:8");

  auto md = RenderReport(*trace, "markdown");
  ASSERT_TRUE(md.ok());
  EXPECT_NE(md->find("| iteration | dataset_size |"), std::string::npos);
  EXPECT_NE(md->find("w[matched]"), std::string::npos);
  EXPECT_NE(md->find("| sigma_local |"), std::string::npos);
  auto csv = RenderReport(*trace, "csv");
  ASSERT_TRUE(csv.ok());
  EXPECT_EQ(csv->substr(0, csv->find('\n')),
            "iteration,dataset_size,sigma,frechet,w[matched],N[matched],"
            "w[offset],N[offset]");
  EXPECT_EQ(std::count(csv->begin(), csv->end(), '\n'), 6);
  EXPECT_EQ(RenderReport(*trace, "html").status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(TraceFileTest, ReadErrors) {
  EXPECT_EQ(ReadTrace("/nonexistent/trace.jsonl").status().code(),
            absl::StatusCode::kNotFound);
  const std::string dir = ::testing::TempDir();
  {
    std::ofstream(dir + "/empty_trace.jsonl");
  }
  EXPECT_FALSE(ReadTrace(dir + "/empty_trace.jsonl").ok());
  {
    std::ofstream out(dir + "/headless_trace.jsonl");
    out << IterationRecordToJson(Sample()).dump() << "\n";
  }
  EXPECT_FALSE(ReadTrace(dir + "/headless_trace.jsonl").ok());
  {
    std::ofstream out(dir + "/broken_trace.jsonl");
    out << TraceHeaderToJson(TraceHeader()).dump() << "\n{not json\n";
  }
  auto broken = ReadTrace(dir + "/broken_trace.jsonl");
  ASSERT_FALSE(broken.ok());
  EXPECT_NE(broken.status().message().find(":2:"), std::string::npos);
}

TEST(CsvTest, MetricsAndHistograms) {
  const std::string dir = ::testing::TempDir();
  ASSERT_TRUE(WriteMetricsCsv(dir + "/metrics.csv", {Sample()}).ok());
  EXPECT_EQ(Slurp(dir + "/metrics.csv"),
            "iteration,generator,raw_w,w,N_k,owned\n"
            "3,a,0.25,0.29999999999999999,31,120\n"
            "3,b,0.33333333333333331,0.69999999999999996,69,280\n");
  VoteHistograms h;
  h.nearest = {1.5, 0.0};
  h.furthest = {0.25, -3.0};
  ASSERT_TRUE(WriteHistogramCsv(dir + "/hist.csv", h).ok());
  EXPECT_EQ(Slurp(dir + "/hist.csv"),
            "index,nearest,furthest\n0,1.5,0.25\n1,0,-3\n");
  EXPECT_FALSE(WriteMetricsCsv("/nonexistent/dir/m.csv", {}).ok());
}

}  // namespace
}  // namespace wasp
