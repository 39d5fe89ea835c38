#include "qarena/gateway/server.hpp"

#include <spdlog/spdlog.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>
#include <thread>

namespace qarena::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class WsSession : public WsSink, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Service& service) : ws_(std::move(socket)), service_(service) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    target_ = std::string(req.target());
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(std::string text) override {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      if (self->closing_) return;
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void close(int code, std::string reason) override {
    asio::post(ws_.get_executor(), [self = shared_from_this(), code, reason = std::move(reason)] {
      if (self->closing_) return;
      self->closing_ = true;
      self->close_reason_.code = static_cast<std::uint16_t>(code);
      self->close_reason_.reason = reason;
      if (self->queue_.empty()) self->do_close();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    conn_ = service_.ws_open(target_, shared_from_this());
    if (conn_) read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      service_.ws_close(conn_);
      return;
    }
    if (!ws_.got_text()) {
      buffer_.consume(buffer_.size());
      service_.ws_close(conn_);
      close(kCloseProtocol, "text frames only");
      return;
    }
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    service_.ws_message(conn_, text);
    if (!closing_) read_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      service_.ws_close(conn_);
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) {
      write_next();
    } else if (closing_) {
      do_close();
    }
  }

  void do_close() {
    ws_.async_close(close_reason_, [self = shared_from_this()](beast::error_code) { self->service_.ws_close(self->conn_); });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Service& service_;
  beast::flat_buffer buffer_;
  std::string target_;
  std::shared_ptr<WsConnection> conn_;
  std::deque<std::string> queue_;
  bool closing_ = false;
  websocket::close_reason close_reason_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Service& service, std::size_t max_body)
      : stream_(std::move(socket)), service_(service), max_body_(max_body) {}

  void run() { read_next(); }

 private:
  void read_next() {
    parser_.emplace();
    parser_->body_limit(max_body_);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    http::request<http::string_body> req = parser_->release();
    if (websocket::is_upgrade(req)) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), service_)->run(std::move(req));
      return;
    }
    HttpRequest in;
    in.method = std::string(req.method_string());
    in.target = std::string(req.target());
    for (const auto& f : req) {
      std::string name(f.name_string());
      for (char& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      in.headers[name] = std::string(f.value());
    }
    in.body = std::move(req.body());
    HttpResponse out = service_.handle(in);

    auto res = std::make_shared<http::response<http::string_body>>(static_cast<http::status>(out.status),
                                                                   req.version());
    res->set(http::field::server, "qarena");
    res->set(http::field::content_type, "application/json");
    res->keep_alive(req.keep_alive());
    res->body() = out.body.dump();
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code wec, std::size_t) {
      if (wec) return;
      if (!res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read_next();
    });
  }

  beast::tcp_stream stream_;
  Service& service_;
  std::size_t max_body_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

}  // namespace

struct Server::Impl {
  Impl(Service& s, ServerOptions o)
      : service(s), options(std::move(o)), acceptor(asio::make_strand(ioc)), ticker(ioc) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        if (!acceptor.is_open()) return;
      } else {
        std::make_shared<HttpSession>(std::move(socket), service, options.max_body_bytes)->run();
      }
      accept();
    });
  }

  void schedule_tick() {
    ticker.expires_after(options.tick_interval);
    ticker.async_wait([this](beast::error_code ec) {
      if (ec) return;
      try {
        service.tick();
      } catch (const std::exception& e) {
        spdlog::error("tick failed: {}", e.what());
      }
      schedule_tick();
    });
  }

  Service& service;
  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  asio::steady_timer ticker;
  std::vector<std::thread> threads;
  unsigned short bound_port = 0;
  std::mutex stop_mu;
  std::condition_variable stop_cv;
  bool stopped = false;
};

Server::Server(Service& service, ServerOptions options) : impl_(std::make_unique<Impl>(service, std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  Impl& i = *impl_;
  tcp::endpoint ep(asio::ip::make_address(i.options.address), i.options.port);
  i.acceptor.open(ep.protocol());
  i.acceptor.set_option(asio::socket_base::reuse_address(true));
  i.acceptor.bind(ep);
  i.acceptor.listen(asio::socket_base::max_listen_connections);
  i.bound_port = i.acceptor.local_endpoint().port();
  i.accept();
  i.schedule_tick();
  for (int t = 0; t < std::max(1, i.options.threads); ++t) {
    i.threads.emplace_back([&i] { i.ioc.run(); });
  }
  spdlog::info("listening on {}:{}", i.options.address, i.bound_port);
}

void Server::stop() {
  Impl& i = *impl_;
  {
    std::lock_guard lock(i.stop_mu);
    if (i.stopped) return;
    i.stopped = true;
  }
  i.ioc.stop();
  for (auto& t : i.threads) {
    if (t.joinable()) t.join();
  }
  i.stop_cv.notify_all();
}

void Server::wait() {
  std::unique_lock lock(impl_->stop_mu);
  impl_->stop_cv.wait(lock, [this] { return impl_->stopped; });
}

unsigned short Server::port() const { return impl_->bound_port; }

}  // namespace qarena::gateway
