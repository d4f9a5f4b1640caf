// Copyright 2026 The Orchard Authors. All Rights Reserved.
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
#include "orchard/external_detector.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "orchard/errors.hpp"

extern char** environ;

namespace orchard {

using nlohmann::json;

std::string encode_request(const TileTask& task) {
  json j = {{"id", task.request_id},
            {"image", task.image_path.string()},
            {"tile",
             {{"x", task.tile.x},
              {"y", task.tile.y},
              {"w", task.tile.w},
              {"h", task.tile.h}}}};
  return j.dump();
}

namespace {

double number_field(const json& obj, const char* key, const std::string& id) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ProtocolError(id, std::string("detection field '") + key +
                                "' missing or not a number");
  }
  return it->get<double>();
}

}  // namespace

WireResponse decode_response(const std::string& line, TileId tile) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("?", "response is not a JSON object");
  }
  auto id_it = j.find("id");
  if (id_it == j.end() || !id_it->is_string()) {
    throw ProtocolError("?", "response lacks a string id");
  }
  WireResponse out;
  out.id = id_it->get<std::string>();
  if (auto err = j.find("error"); err != j.end()) {
    throw ProtocolError(out.id, "detector reported: " + err->dump());
  }
  auto dets = j.find("detections");
  if (dets == j.end() || !dets->is_array()) {
    throw ProtocolError(out.id, "response lacks a detections array");
  }
  for (const json& d : *dets) {
    if (!d.is_object()) throw ProtocolError(out.id, "detection is not an object");
    const double x = number_field(d, "x", out.id);
    const double y = number_field(d, "y", out.id);
    const double w = number_field(d, "w", out.id);
    const double h = number_field(d, "h", out.id);
    const double score = number_field(d, "score", out.id);
    if (!(score >= 0.0 && score <= 1.0)) {
      throw ProtocolError(out.id, "score outside [0, 1]");
    }
    try {
      out.detections.emplace_back(BoundingBox(x, y, w, h), score,
                                  TileLocal{tile});
    } catch (const InvalidArgument& e) {
      throw ProtocolError(out.id, e.what());
    }
  }
  return out;
}

class ExternalDetector::Impl {
 public:
  explicit Impl(ExternalSpec spec) : spec_(std::move(spec)) {
    // Writes to a dead child must fail with EPIPE instead of killing us.
    ::signal(SIGPIPE, SIG_IGN);
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
      throw ProcessExit("spawn", std::strerror(errno));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      throw ProcessExit("spawn", std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::vector<char*> argv;
    for (std::string& a : spec_.argv) argv.push_back(a.data());
    argv.push_back(nullptr);
    const int rc = ::posix_spawnp(&pid_, argv[0], &actions, nullptr,
                                  argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      throw ProcessExit("spawn", "cannot start '" + spec_.argv[0] +
                                     "': " + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    reader_ = std::thread([this] { read_loop(); });
  }

  ~Impl() {
    {
      std::lock_guard<std::mutex> lock(write_mu_);
      if (to_child_ >= 0) ::close(to_child_);
      to_child_ = -1;
    }
    // Give the child a moment to exit on stdin EOF, then force it.
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 200 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    stop_ = true;
    reader_.join();
    ::close(from_child_);
  }

  std::vector<Detection> detect(const TileTask& task) {
    auto slot = std::make_shared<Pending>();
    slot->tile = task.tile.id;
    std::future<std::vector<Detection>> result = slot->promise.get_future();
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (exited_) throw ProcessExit(task.request_id, "detector process exited");
      if (!pending_.emplace(task.request_id, slot).second) {
        throw InvalidArgument("duplicate in-flight request id " +
                              task.request_id);
      }
    }
    const std::string line = encode_request(task) + "\n";
    if (!write_all(line)) {
      forget(task.request_id);
      throw ProcessExit(task.request_id, "cannot write to detector process");
    }
    if (result.wait_for(spec_.timeout) == std::future_status::timeout) {
      if (forget(task.request_id)) {
        throw ExternalTimeout(task.request_id, "no response within " +
                                                   std::to_string(spec_.timeout.count()) +
                                                   " ms");
      }
      // The response raced the deadline and is already fulfilled.
    }
    return result.get();
  }

 private:
  struct Pending {
    std::promise<std::vector<Detection>> promise;
    TileId tile = 0;
  };

  bool write_all(const std::string& line) {
    std::lock_guard<std::mutex> lock(write_mu_);
    if (to_child_ < 0) return false;
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
      const ssize_t n = ::write(to_child_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    return true;
  }

  // Removes the pending slot; false when it was already completed.
  bool forget(const std::string& id) {
    std::lock_guard<std::mutex> lock(mu_);
    return pending_.erase(id) > 0;
  }

  std::shared_ptr<Pending> take(const std::string& id) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = pending_.find(id);
    if (it == pending_.end()) return nullptr;
    auto slot = it->second;
    pending_.erase(it);
    return slot;
  }

  void handle_line(const std::string& line) {
    if (line.empty()) return;
    json probe = json::parse(line, nullptr, /*allow_exceptions=*/false);
    const bool has_id = !probe.is_discarded() && probe.is_object() &&
                        probe.contains("id") && probe["id"].is_string();
    if (!has_id) {
      // Nothing to attribute the line to: every in-flight request is
      // affected since the stream can no longer be trusted.
      spdlog::error("detector emitted an unattributable line: {}", line);
      std::map<std::string, std::shared_ptr<Pending>> victims;
      {
        std::lock_guard<std::mutex> lock(mu_);
        victims.swap(pending_);
      }
      for (auto& [id, slot] : victims) {
        slot->promise.set_exception(std::make_exception_ptr(
            ProtocolError(id, "malformed line from detector process")));
      }
      return;
    }
    const std::string id = probe["id"].get<std::string>();
    auto slot = take(id);
    if (!slot) {
      spdlog::warn("detector response for unknown or expired id {}", id);
      return;
    }
    try {
      slot->promise.set_value(decode_response(line, slot->tile).detections);
    } catch (const ProtocolError& e) {
      slot->promise.set_exception(
          std::make_exception_ptr(ProtocolError(id, e.what())));
    }
  }

  void read_loop() {
    std::string buffer;
    char chunk[4096];
    while (true) {
      pollfd pfd{from_child_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, 50);
      if (ready == 0) {
        if (stop_) break;
        continue;
      }
      if (ready < 0) {
        if (errno == EINTR) continue;
        break;
      }
      const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos;
           start = nl + 1) {
        handle_line(buffer.substr(start, nl - start));
      }
      buffer.erase(0, start);
    }
    std::map<std::string, std::shared_ptr<Pending>> orphans;
    {
      std::lock_guard<std::mutex> lock(mu_);
      exited_ = true;
      orphans.swap(pending_);
    }
    for (auto& [id, slot] : orphans) {
      slot->promise.set_exception(std::make_exception_ptr(
          ProcessExit(id, "detector process closed its output")));
    }
  }

  ExternalSpec spec_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::mutex write_mu_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Pending>> pending_;
  bool exited_ = false;
  std::atomic<bool> stop_{false};
  std::thread reader_;
};

ExternalDetector::ExternalDetector(ExternalSpec spec)
    : impl_(std::make_unique<Impl>(std::move(spec))) {}

ExternalDetector::~ExternalDetector() = default;

std::vector<Detection> ExternalDetector::detect(const TileTask& task) {
  return impl_->detect(task);
}

}  // namespace orchard
