// Copyright 2026 The Conner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "conner/backend/backend.hpp"

namespace httplib {
class Server;
}

namespace conner::backend {

// Exposes any Backend over protocol v1. Used by `conner serve-mock` and by
// tests that need a loopback endpoint.
class BackendServer {
 public:
  explicit BackendServer(BackendPtr backend);
  ~BackendServer();

  BackendServer(const BackendServer&) = delete;
  BackendServer& operator=(const BackendServer&) = delete;

  // Binds and returns the port; port 0 picks a free one. Throws
  // BackendUnavailable when the port cannot be bound.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void start();  // listen() on a background thread
  void stop();

  std::size_t request_count() const noexcept;

 private:
  struct State;
  std::unique_ptr<State> state_;
  std::thread thread_;
};

}  // namespace conner::backend
