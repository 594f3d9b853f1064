// Copyright 2026 The CLUE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clue/config.h"

#include <gtest/gtest.h>

#include <map>

#include "clue/error.h"
#include "clue/http_backends.h"
#include "test_support.h"

namespace clue {
namespace {

EnvLookup FakeEnv(std::map<std::string, std::string> vars) {
  return [vars](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kIo;
}

TEST(RunConfig, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.generation.n, 5);
  EXPECT_DOUBLE_EQ(c.generation.temperature, 1.0);
  EXPECT_DOUBLE_EQ(c.consolidation_threshold, 0.99);
  EXPECT_EQ(c.RenderPrompt("Who is the founder of Apple?"),
            "Answer the question in one single sentence with details: Who is the founder of Apple?");
}

TEST(RunConfig, ValidationFailuresAreConfigErrors) {
  RunConfig c;
  c.theta_l = 0.9;
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
  c = RunConfig{};
  c.epsilon = 0.1;
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
  c = RunConfig{};
  c.nli.batch_size = 65;
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
  c = RunConfig{};
  c.prompt_template = "no slot";
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
}

TEST(RunConfig, JsonRoundTripAndRedaction) {
  RunConfig c;
  c.generation.api_key = "secret";
  c.seed = 12;
  EXPECT_EQ(ToJson(c)["generation"]["api_key"], "<redacted>");
  const RunConfig back = MergeConfig(RunConfig{}, ToJson(c, false));
  EXPECT_EQ(ToJson(back, false), ToJson(c, false));
}

TEST(MergeConfig, UnknownKeysAndWrongTypesRejected) {
  EXPECT_EQ(KindOf([] { MergeConfig({}, Json{{"generation", {{"bogus", 1}}}}); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { MergeConfig({}, Json{{"seed", "x"}}); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { MergeConfig({}, Json{{"workers", -1}}); }), ErrorKind::kConfig);
  const RunConfig c = MergeConfig({}, Json{{"detection", {{"theta_h", 1}}}});
  EXPECT_DOUBLE_EQ(c.theta_h, 1.0);
}

TEST(LoadConfig, EnvOverridesFile) {
  const auto dir = testing::TempDir("config");
  WriteFileAtomic(dir / "c.json",
                  R"({"generation": {"n": 7, "base_url": "http://file"}, "seed": 3})");
  const RunConfig c = LoadConfig((dir / "c.json").string(),
                                 FakeEnv({{"CLUE_GENERATION_BASE_URL", "http://env"},
                                          {"CLUE_CACHE_ENABLED", "true"}}));
  EXPECT_EQ(c.generation.n, 7);
  EXPECT_EQ(c.generation.base_url, "http://env");
  EXPECT_TRUE(c.cache.enabled);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(EnvVarFor("nli.base_url"), "CLUE_NLI_BASE_URL");
}

TEST(LoadConfig, BadEnvAndFileAreConfigErrors) {
  EXPECT_EQ(KindOf([] { LoadConfig(std::nullopt, FakeEnv({{"CLUE_GENERATION_N", "five"}})); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadConfig(std::string("/nonexistent/c.json"), FakeEnv({})); }),
            ErrorKind::kConfig);
  const auto dir = testing::TempDir("badcfg");
  WriteFileAtomic(dir / "c.json", "{oops");
  EXPECT_EQ(KindOf([&] { LoadConfig((dir / "c.json").string(), FakeEnv({})); }),
            ErrorKind::kConfig);
}

TEST(MakeBackends, MockAndHttpSelection) {
  RunConfig c;
  Backends b = MakeBackends(c);
  EXPECT_EQ(b.generator->id(), "mock-generator/v1");
  EXPECT_EQ(b.scorer->id(), "mock-nli/v1");
  c.nli.base_url = "http://127.0.0.1:9";
  c.generation.base_url = "http://127.0.0.1:9";
  b = MakeBackends(c);
  EXPECT_EQ(b.scorer->id(), "http-nli:http://127.0.0.1:9");
  EXPECT_EQ(b.generator->id(), "http:http://127.0.0.1:9");
}

}  // namespace
}  // namespace clue
