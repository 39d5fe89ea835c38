#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "qarena/gateway/service.hpp"

namespace qarena::gateway {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  int threads = 2;
  std::chrono::milliseconds tick_interval{100};
  std::size_t max_body_bytes = 1 << 20;
};

// HTTP/1.1 and WebSocket front end over Boost.Beast.
class Server {
 public:
  Server(Service& service, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the worker threads; returns once listening.
  void start();
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qarena::gateway
