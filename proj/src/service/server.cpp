#include <sys/socket.h>

#include <atomic>
#include <fstream>
#include <iostream>
#include <iterator>
#include <list>
#include <set>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "activecanvas/error.hpp"
#include "activecanvas/service.hpp"

namespace activecanvas::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

Response text_response(const Request& req, http::status status, std::string body,
                       const std::string& content_type) {
  Response res{status, req.version()};
  res.set(http::field::server, "activecanvas");
  res.set(http::field::content_type, content_type);
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_response(const Request& req, const nlohmann::ordered_json& body) {
  return text_response(req, http::status::ok, body.dump(), "application/json");
}

Response not_found(const Request& req, const std::string& what) {
  nlohmann::ordered_json j;
  j["code"] = "NOT_FOUND";
  j["detail"] = what;
  return text_response(req, http::status::not_found, j.dump(), "application/json");
}

std::vector<std::string> split_path(std::string_view target) {
  if (const auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < target.size()) {
    const auto next = target.find('/', pos);
    const auto end = next == std::string_view::npos ? target.size() : next;
    if (end > pos) parts.emplace_back(target.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

std::string_view target_of(const Request& req) {
  const auto t = req.target();
  return {t.data(), t.size()};
}

std::optional<std::string> read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

struct Server::Impl {
  Impl(WorkspaceStore& s, ServerOptions o) : store(s), options(std::move(o)) {}

  WorkspaceStore& store;
  ServerOptions options;
  asio::io_context io;
  std::optional<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::atomic<bool> stopping{false};
  std::atomic<std::uint64_t> next_session{1};

  std::mutex conn_mutex;
  std::multiset<int> open_fds;
  std::list<std::thread> workers;

  void accept_loop();
  void serve(tcp::socket socket);
  Response handle_http(const Request& req);
  Response serve_thumb(const Request& req, const std::string& dataset, const std::string& item);
  void run_websocket(tcp::socket socket, Request req, const std::string& dataset);
};

Server::Server(WorkspaceStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  auto& im = *impl_;
  const auto address = asio::ip::make_address(im.options.address);
  im.acceptor.emplace(im.io);
  tcp::endpoint endpoint{address, im.options.port};
  im.acceptor->open(endpoint.protocol());
  im.acceptor->set_option(asio::socket_base::reuse_address(true));
  im.acceptor->bind(endpoint);
  im.acceptor->listen();
  const auto port = im.acceptor->local_endpoint().port();
  im.accept_thread = std::thread([&im] { im.accept_loop(); });
  return port;
}

void Server::stop() {
  auto& im = *impl_;
  if (im.stopping.exchange(true)) return;
  if (im.acceptor) {
    // shutdown() wakes a blocked accept() on Linux.
    ::shutdown(im.acceptor->native_handle(), SHUT_RDWR);
  }
  if (im.accept_thread.joinable()) im.accept_thread.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(im.conn_mutex);
    for (int fd : im.open_fds) ::shutdown(fd, SHUT_RDWR);
    workers.swap(im.workers);
  }
  for (auto& t : workers) t.join();
  if (im.acceptor) {
    beast::error_code ec;
    im.acceptor->close(ec);
  }
}

void Server::Impl::accept_loop() {
  while (!stopping) {
    tcp::socket socket(io);
    beast::error_code ec;
    acceptor->accept(socket, ec);
    if (stopping) break;
    if (ec) continue;
    std::lock_guard lock(conn_mutex);
    const int fd = socket.native_handle();
    open_fds.insert(fd);
    workers.emplace_back([this, fd, s = std::move(socket)]() mutable {
      serve(std::move(s));
      std::lock_guard done(conn_mutex);
      open_fds.erase(open_fds.find(fd));
    });
  }
}

void Server::Impl::serve(tcp::socket socket) {
  beast::flat_buffer buffer;
  try {
    for (;;) {
      Request req;
      beast::error_code ec;
      http::read(socket, buffer, req, ec);
      if (ec) return;
      const auto parts = split_path(target_of(req));
      if (websocket::is_upgrade(req)) {
        if (parts.size() == 2 && parts[0] == "ws") {
          run_websocket(std::move(socket), std::move(req), parts[1]);
        } else {
          http::write(socket, not_found(req, "no websocket endpoint at this path"), ec);
        }
        return;
      }
      auto res = handle_http(req);
      http::write(socket, res, ec);
      if (ec || !res.keep_alive()) break;
    }
    beast::error_code ignored;
    socket.shutdown(tcp::socket::shutdown_send, ignored);
  } catch (const std::exception& e) {
    std::cerr << "connection error: " << e.what() << "\n";
  }
}

Response Server::Impl::handle_http(const Request& req) {
  if (req.method() != http::verb::get) {
    return text_response(req, http::status::method_not_allowed, "", "text/plain");
  }
  const auto parts = split_path(target_of(req));
  if (parts.size() == 2 && parts[0] == "api" && parts[1] == "datasets") {
    return json_response(req, nlohmann::ordered_json(store.ids()));
  }
  if (parts.size() == 3 && parts[0] == "api" && parts[1] == "dataset") {
    if (!store.contains(parts[2])) return not_found(req, "unknown dataset '" + parts[2] + "'");
    return json_response(req, dataset_summary(store.snapshot(parts[2])));
  }
  if (parts.size() == 3 && parts[0] == "thumbs") return serve_thumb(req, parts[1], parts[2]);
  if (parts.size() == 2 && parts[0] == "thumbs") {
    for (const auto& id : store.ids()) {
      const auto ws = store.snapshot(id);
      for (const auto& item : ws.manifest()) {
        if (item.id == parts[1]) return serve_thumb(req, id, parts[1]);
      }
    }
    return not_found(req, "unknown item '" + parts[1] + "'");
  }
  return not_found(req, "no route for " + std::string(target_of(req)));
}

Response Server::Impl::serve_thumb(const Request& req, const std::string& dataset,
                                   const std::string& item) {
  if (!store.contains(dataset)) return not_found(req, "unknown dataset '" + dataset + "'");
  const auto ws = store.snapshot(dataset);
  std::size_t row = 0;
  try {
    row = ws.index_of(item);
  } catch (const Error&) {
    return not_found(req, "unknown item '" + item + "'");
  }
  std::filesystem::path file = ws.manifest()[row].thumb;
  if (file.is_relative()) file = ws.asset_root() / file;
  auto bytes = read_file(file);
  if (!bytes) return not_found(req, "thumbnail missing for '" + item + "'");
  return text_response(req, http::status::ok, std::move(*bytes), content_type_for(file));
}

void Server::Impl::run_websocket(tcp::socket socket, Request req, const std::string& dataset) {
  websocket::stream<tcp::socket> ws(std::move(socket));
  ws.accept(req);
  ws.text(true);
  SessionHandler handler(store, options.config, dataset,
                         "session-" + std::to_string(next_session.fetch_add(1)));
  for (const auto& frame : handler.on_open()) ws.write(asio::buffer(frame));
  beast::flat_buffer buffer;
  while (!handler.closed()) {
    beast::error_code ec;
    ws.read(buffer, ec);
    if (ec) return;
    const auto text = beast::buffers_to_string(buffer.data());
    buffer.consume(buffer.size());
    for (const auto& frame : handler.on_frame(text)) ws.write(asio::buffer(frame));
  }
  beast::error_code ignored;
  ws.close(websocket::close_code::normal, ignored);
}

}  // namespace activecanvas::service
