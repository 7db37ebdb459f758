// Copyright 2026 The cnlg Authors
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

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "cnlg/backends.h"
#include "cnlg/error.h"
#include "cnlg/service.h"
#include "fixtures.h"
#include "httplib.h"

namespace cnlg {
namespace {

std::unique_ptr<TableBackend> ToyTable() {
  const std::vector<std::string> words = {"won", "the", "game", "and", "smiled", "cried", "again"};
  std::map<std::string, std::map<std::string, double>> t;
  t["<s>"] = {{"won", 0.5}, {"cried", 0.3}, {"smiled", 0.2}};
  t["won"] = {{"the", 0.8}, {"again", 0.2}};
  t["the"] = {{"game", 1.0}};
  t["game"] = {{"and", 0.6}, {"</s>", 0.4}};
  t["and"] = {{"smiled", 0.5}, {"cried", 0.5}};
  t["smiled"] = {{"again", 0.3}, {"</s>", 0.7}};
  t["cried"] = {{"again", 0.4}, {"</s>", 0.6}};
  t["again"] = {{"</s>", 1.0}};
  return std::make_unique<TableBackend>(words, t);
}

void SaveToy(const std::filesystem::path& dir, std::optional<Config> config) {
  CheckpointInfo info;
  info.id = dir.filename().string();
  info.kind = std::string(TableBackend::kKind);
  info.architecture = "toy";
  info.config = config;
  info.trained_at = "2026-01-01T00:00:00Z";
  SaveCheckpoint(*ToyTable(), info, dir);
}

Judges SmallJudges() {
  CorpusSplit split;
  split.classifier_train = testing::RandomRecords(300, 1);
  split.classifier_eval = testing::RandomRecords(60, 2);
  return TrainJudges(split, ClassifierParams{});
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir();
    SaveToy(*dir_ / "ckpt" / "toy-ea", Config::kEA);
    SaveToy(*dir_ / "ckpt" / "toy-e", Config::kE);
    SmallJudges().Save(*dir_ / "judges");
    ServiceConfig c;
    c.checkpoint_dir = *dir_ / "ckpt";
    c.judge_dir = *dir_ / "judges";
    service_ = new Service(c);
    server_ = new httplib::Server();
    service_->Attach(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = new std::thread([] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  static void TearDownTestSuite() {
    server_->stop();
    thread_->join();
    delete thread_;
    delete server_;
    delete service_;
    delete dir_;
  }

  static httplib::Result Post(const Json& body) {
    httplib::Client client("127.0.0.1", port_);
    return client.Post("/generate", body.dump(), "application/json");
  }

  static Json GoldenRequest() {
    return Json::parse(R"({
      "schema_version": 1,
      "config": "EA",
      "emotion": "joy",
      "appraisals": {"responsibility": true},
      "trigger": "I  won",
      "checkpoint": "toy-ea",
      "params": {"beam_size": 5, "num_return": 3, "top_p": 0.9, "temperature": 0.7,
                 "max_new_tokens": 8},
      "seed": 42,
      "judge": false
    })");
  }

  static testing::TempDir* dir_;
  static Service* service_;
  static httplib::Server* server_;
  static std::thread* thread_;
  static int port_;
};

testing::TempDir* ServiceTest::dir_ = nullptr;
Service* ServiceTest::service_ = nullptr;
httplib::Server* ServiceTest::server_ = nullptr;
std::thread* ServiceTest::thread_ = nullptr;
int ServiceTest::port_ = 0;

// Recorded once against the toy table; CNLG_WRITE_GOLDEN=1 rewrites it.
TEST_F(ServiceTest, GoldenResponse) {
  auto res = Post(GoldenRequest());
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
  Json body = Json::parse(res->body);
  ASSERT_TRUE(body.contains("latency_ms"));
  EXPECT_GE(body["latency_ms"].get<double>(), 0.0);
  body.erase("latency_ms");
  const auto path = testing::TestDataDir() / "service_golden.json";
  if (std::getenv("CNLG_WRITE_GOLDEN")) {
    WriteFileAtomic(path, body.dump(2) + "\n");
    GTEST_SKIP() << "golden response rewritten";
  }
  const Json want = Json::parse(ReadFile(path));
  EXPECT_EQ(body, want) << body.dump(2);
  EXPECT_EQ(body["prompt"],
            "generate joy NoATTE responsibility NoCONT NoCIRC NoPLEA NoEFFORT NoCERT: I won");
}

TEST_F(ServiceTest, SameSeedIsByteIdentical) {
  Json req = GoldenRequest();
  req["judge"] = true;
  req["seed"] = 7;
  const auto a = Post(req);
  const auto b = Post(req);
  ASSERT_TRUE(a && b);
  Json ja = Json::parse(a->body), jb = Json::parse(b->body);
  EXPECT_EQ(ja["candidates"].dump(), jb["candidates"].dump());
  ASSERT_FALSE(ja["candidates"].empty());
  EXPECT_LE(ja["candidates"].size(), 3u);
  for (const auto& c : ja["candidates"]) {
    EXPECT_TRUE(c.contains("judged_emotion"));
    EXPECT_TRUE(c.contains("judged_appraisals"));
  }
}

TEST_F(ServiceTest, ServerSeedIsEchoedAndReproduces) {
  Json req = GoldenRequest();
  req.erase("seed");
  const auto first = Post(req);
  ASSERT_TRUE(first);
  const Json j = Json::parse(first->body);
  ASSERT_TRUE(j["request"]["seed"].is_number_unsigned());
  req["seed"] = j["request"]["seed"];
  const Json again = Json::parse(Post(req)->body);
  EXPECT_EQ(again["candidates"], j["candidates"]);
}

TEST_F(ServiceTest, NoJudgeFieldsWhenJudgeDisabled) {
  const Json j = Json::parse(Post(GoldenRequest())->body);
  for (const auto& c : j["candidates"]) EXPECT_FALSE(c.contains("judged_emotion"));
}

TEST_F(ServiceTest, BadRequestsAre400) {
  std::vector<Json> bad;
  Json unknown = GoldenRequest();
  unknown["colour"] = "red";
  bad.push_back(unknown);
  Json unknown_param = GoldenRequest();
  unknown_param["params"]["top_k"] = 3;
  bad.push_back(unknown_param);
  Json e_with_appraisals = GoldenRequest();
  e_with_appraisals["config"] = "E";
  e_with_appraisals["checkpoint"] = "toy-e";
  bad.push_back(e_with_appraisals);
  Json no_emotion = GoldenRequest();
  no_emotion.erase("emotion");
  bad.push_back(no_emotion);
  Json empty_trigger = GoldenRequest();
  empty_trigger["trigger"] = "   ";
  bad.push_back(empty_trigger);
  Json bad_appraisal = GoldenRequest();
  bad_appraisal["appraisals"]["luck"] = true;
  bad.push_back(bad_appraisal);
  Json bad_params = GoldenRequest();
  bad_params["params"]["num_return"] = 9;
  bad.push_back(bad_params);
  Json bad_version = GoldenRequest();
  bad_version["schema_version"] = 2;
  bad.push_back(bad_version);
  Json mismatch = GoldenRequest();
  mismatch["checkpoint"] = "toy-e";
  bad.push_back(mismatch);
  for (const auto& req : bad) {
    const auto res = Post(req);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400) << req.dump();
    EXPECT_TRUE(Json::parse(res->body).contains("error"));
  }
  httplib::Client client("127.0.0.1", port_);
  EXPECT_EQ(client.Post("/generate", "{not json", "application/json")->status, 400);
}

TEST_F(ServiceTest, UnknownCheckpointIs404) {
  Json req = GoldenRequest();
  req["checkpoint"] = "missing";
  EXPECT_EQ(Post(req)->status, 404);
  req["checkpoint"] = "../ckpt";
  EXPECT_EQ(Post(req)->status, 404);
}

TEST_F(ServiceTest, CheckpointsAndHealth) {
  httplib::Client client("127.0.0.1", port_);
  const auto res = client.Get("/checkpoints");
  ASSERT_TRUE(res);
  const Json list = Json::parse(res->body);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0]["id"], "toy-e");
  EXPECT_EQ(list[0]["config"], "E");
  EXPECT_EQ(list[1]["config"], "EA");
  EXPECT_EQ(list[1]["architecture"], "toy");
  EXPECT_FALSE(res->has_header("X-Warning"));
  const Json health = Json::parse(client.Get("/health")->body);
  EXPECT_EQ(health["status"], "ok");
  EXPECT_TRUE(health["judges"].get<bool>());
}

TEST(ServiceStore, EmptyAndCorruptManifests) {
  testing::TempDir dir;
  ServiceConfig c;
  c.checkpoint_dir = dir / "none";
  EXPECT_EQ(Service(c).Checkpoints().body, Json::array());

  SaveToy(dir / "ok", Config::kE);
  std::filesystem::create_directories(dir / "broken");
  WriteFileAtomic(dir / "broken" / "manifest.json", "{\"id\": ");
  c.checkpoint_dir = dir.path();
  const HttpReply r = Service(c).Checkpoints();
  ASSERT_EQ(r.body.size(), 1u);
  EXPECT_EQ(r.body[0]["id"], "ok");
  ASSERT_TRUE(r.headers.count("X-Warning"));
  EXPECT_NE(r.headers.at("X-Warning").find("broken"), std::string::npos);
}

TEST(ServiceStore, ConcurrentAcquireSharesOneLoad) {
  testing::TempDir dir;
  SaveToy(dir / "toy", std::nullopt);
  CheckpointStore store(dir.path());
  std::vector<std::thread> threads;
  std::atomic<int> ready{0}, loading{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      const auto h = store.Acquire("toy");
      if (h.status == CheckpointStore::Status::kReady) ++ready;
      if (h.status == CheckpointStore::Status::kLoading) ++loading;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ready + loading, 8);
  EXPECT_GE(ready.load(), 1);
  EXPECT_EQ(store.loaded(), 1u);
  EXPECT_EQ(store.Acquire("toy").status, CheckpointStore::Status::kReady);
}

TEST(ServiceConfigEnv, ParsesBind) {
  setenv("CNLG_BIND", "0.0.0.0:9123", 1);
  setenv("CNLG_CHECKPOINT_DIR", "/tmp/ck", 1);
  const ServiceConfig c = ServiceConfig::FromEnv();
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9123);
  EXPECT_EQ(c.checkpoint_dir, "/tmp/ck");
  setenv("CNLG_BIND", "host:notaport", 1);
  EXPECT_THROW(ServiceConfig::FromEnv(), UsageError);
  unsetenv("CNLG_BIND");
  unsetenv("CNLG_CHECKPOINT_DIR");
}

}  // namespace
}  // namespace cnlg
