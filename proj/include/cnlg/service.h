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

#ifndef CNLG_SERVICE_H_
#define CNLG_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cnlg/evaluators.h"
#include "cnlg/generator.h"
#include "cnlg/io.h"

namespace httplib {
class Server;
}

namespace cnlg {

inline constexpr int kServiceSchemaVersion = 1;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path checkpoint_dir = "checkpoints";
  std::optional<std::filesystem::path> judge_dir;
  // Static playground assets, mounted at / when set.
  std::optional<std::filesystem::path> ui_dir;

  // CNLG_BIND ("host:port"), CNLG_CHECKPOINT_DIR, CNLG_JUDGE_DIR, CNLG_UI_DIR.
  static ServiceConfig FromEnv();
};

struct HttpReply {
  int status = 200;
  Json body;
  std::map<std::string, std::string> headers;
};

// Checkpoints under one directory, one subdirectory each, keyed by the
// subdirectory name. Loaded lazily and kept read-only.
class CheckpointStore {
 public:
  explicit CheckpointStore(std::filesystem::path root) : root_(std::move(root)) {}

  struct Listing {
    std::vector<CheckpointInfo> entries;
    std::vector<std::string> ids;
    std::vector<std::string> warnings;
  };
  Listing List() const;

  enum class Status { kReady, kNotFound, kLoading };
  struct Handle {
    Status status = Status::kNotFound;
    std::shared_ptr<const LoadedCheckpoint> checkpoint;
  };
  // A second caller for a checkpoint that is still loading gets kLoading
  // instead of waiting. Load failures propagate.
  Handle Acquire(const std::string& id);

  std::size_t loaded() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const LoadedCheckpoint>> cache_;
  std::set<std::string> loading_;
};

class Service {
 public:
  explicit Service(ServiceConfig config);

  HttpReply Generate(std::string_view body);
  HttpReply Checkpoints() const;
  HttpReply Health() const;

  // Registers the endpoints on an existing server.
  void Attach(httplib::Server& server);
  // Blocks until the server stops. Returns false when binding fails.
  bool Listen();

  const ServiceConfig& config() const { return config_; }

 private:
  ServiceConfig config_;
  mutable CheckpointStore store_;
  std::unique_ptr<Judges> judges_;
};

}  // namespace cnlg

#endif  // CNLG_SERVICE_H_
