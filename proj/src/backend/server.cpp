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

#include "conner/backend/server.hpp"

#include <atomic>
#include <fmt/format.h>
#include <httplib.h>

#include "conner/core/error.hpp"

namespace conner::backend {

struct BackendServer::State {
  BackendPtr backend;
  httplib::Server http;
  std::atomic<std::size_t> requests{0};
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_header(kProtocolHeader, std::to_string(kProtocolVersion));
  res.set_content(body.dump(), "application/json");
}

bool proto_ok(const httplib::Request& req, httplib::Response& res) {
  if (!req.has_header(kProtocolHeader)) return true;
  if (req.get_header_value(kProtocolHeader) == std::to_string(kProtocolVersion)) {
    return true;
  }
  reply(res, 400, {{"error", "unsupported protocol version"}});
  return false;
}

}  // namespace

BackendServer::BackendServer(BackendPtr backend) : state_(std::make_unique<State>()) {
  state_->backend = std::move(backend);
  State* s = state_.get();

  s->http.Get("/v1/health", [s](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, encode(s->backend->health()));
  });

  for (Endpoint ep : kAllEndpoints) {
    const std::string name(to_string(ep));
    s->http.Post("/v1/" + name, [s, ep](const httplib::Request& req,
                                        httplib::Response& res) {
      s->requests.fetch_add(1);
      if (!proto_ok(req, res)) return;
      try {
        const json body = json::parse(req.body);
        validate_request(ep, body);
        reply(res, 200, s->backend->call(ep, body));
      } catch (const json::parse_error& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const InvalidArgument& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
      }
    });
    s->http.Post("/v1/batch/" + name, [s, ep](const httplib::Request& req,
                                              httplib::Response& res) {
      s->requests.fetch_add(1);
      if (!proto_ok(req, res)) return;
      try {
        const json body = json::parse(req.body);
        if (!body.is_object() || !body.contains("requests") ||
            !body["requests"].is_array()) {
          throw InvalidArgument("batch body needs a 'requests' array");
        }
        std::vector<json> requests(body["requests"].begin(), body["requests"].end());
        for (const auto& r : requests) validate_request(ep, r);
        reply(res, 200, {{"responses", s->backend->call_batch(ep, requests)}});
      } catch (const json::parse_error& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const InvalidArgument& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
      }
    });
  }
}

BackendServer::~BackendServer() { stop(); }

int BackendServer::bind(const std::string& host, int port) {
  // httplib's default also sets SO_REUSEPORT, which lets a second server
  // share a busy port.
  state_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  int bound = -1;
  if (port == 0) {
    bound = state_->http.bind_to_any_port(host);
  } else if (state_->http.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) {
    throw BackendUnavailable(fmt::format("cannot bind {}:{}", host, port));
  }
  return bound;
}

void BackendServer::listen() { state_->http.listen_after_bind(); }

void BackendServer::start() {
  thread_ = std::thread([this] { listen(); });
  state_->http.wait_until_ready();
}

void BackendServer::stop() {
  state_->http.stop();
  if (thread_.joinable()) thread_.join();
}

std::size_t BackendServer::request_count() const noexcept {
  return state_->requests.load();
}

}  // namespace conner::backend
