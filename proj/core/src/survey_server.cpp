#include "agsynth/survey_server.hpp"

#include <httplib.h>

#include "agsynth/error.hpp"

namespace agsynth {
namespace {

using nlohmann::json;

constexpr const char* kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>Survey</title></head>\n"
    "<body><p>The survey API is running. No UI assets are configured.</p></body></html>\n";

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(),
                  "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  int status = 500;
  switch (e.code()) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownItem: status = 404; break;
    case ErrorCode::kScoreOutOfRange: status = 400; break;
    case ErrorCode::kDuplicateRating: status = 409; break;
    default: break;
  }
  // Internal failures may mention server paths, which must not reach raters.
  std::string message = status == 500 ? "internal error" : std::string(e.what());
  send_error(res, status, status == 500 ? "InternalError" : to_string(e.code()), message);
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    json j = json::parse(req.body);
    if (j.is_object()) return j;
  } catch (const json::exception&) {
  }
  send_error(res, 400, "BadRequest", "request body must be a JSON object");
  return std::nullopt;
}

}  // namespace

struct SurveyServer::Impl {
  SurveyService& service;
  SurveyServerOptions options;
  httplib::Server server;
  bool bound = false;

  Impl(SurveyService& s, SurveyServerOptions o) : service(s), options(std::move(o)) {}
};

SurveyServer::SurveyServer(SurveyService& service, SurveyServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& svr = impl_->server;
  Impl* impl = impl_.get();
  svr.set_payload_max_length(64 * 1024);
  // Without SO_REUSEPORT a second server on the same port fails to bind.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
  });

  svr.Post("/api/sessions", [impl](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    auto label = body->find("rater_label");
    if (label == body->end() || !label->is_string() || label->get<std::string>().empty()) {
      send_error(res, 400, "BadRequest", "rater_label must be a non-empty string");
      return;
    }
    try {
      Session s = impl->service.create_session(label->get<std::string>());
      send_json(res, {{"session_id", s.session_id}, {"total", s.order.size()}}, 201);
    } catch (const Error& e) {
      send_error(res, e);
    }
  });

  svr.Get(R"(/api/sessions/([^/]+)/next)",
          [impl](const httplib::Request& req, httplib::Response& res) {
            try {
              send_json(res, impl->service.next_item(req.matches[1].str()));
            } catch (const Error& e) {
              send_error(res, e);
            }
          });

  svr.Get(R"(/api/images/([^/]+))", [impl](const httplib::Request& req, httplib::Response& res) {
    try {
      auto img = impl->service.image(req.matches[1].str());
      res.set_header("Cache-Control", "no-store");
      res.set_content(std::string(img.bytes.begin(), img.bytes.end()), img.content_type);
    } catch (const Error& e) {
      send_error(res, e);
    }
  });

  svr.Post("/api/ratings", [impl](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    auto sid = body->find("session_id");
    auto iid = body->find("item_id");
    auto score = body->find("score");
    if (sid == body->end() || !sid->is_string() || iid == body->end() || !iid->is_string() ||
        score == body->end() || !score->is_number()) {
      send_error(res, 400, "BadRequest", "expected session_id, item_id, and numeric score");
      return;
    }
    try {
      // Non-integral and out-of-int scores are range errors, not type errors.
      const double raw = score->get<double>();
      int value = (raw == static_cast<double>(static_cast<long long>(raw)) && raw >= -1e9 &&
                   raw <= 1e9)
                      ? static_cast<int>(raw)
                      : 0;
      RatingRecord r = impl->service.submit_rating(sid->get<std::string>(),
                                                   iid->get<std::string>(), value);
      send_json(res, {{"ok", true}, {"session_id", r.session_id}, {"item_id", r.item_id}}, 201);
    } catch (const Error& e) {
      send_error(res, e);
    }
  });

  svr.Get("/api/results", [impl](const httplib::Request&, httplib::Response& res) {
    if (!impl->options.admin) {
      send_error(res, 403, "Forbidden", "results are disabled; start the server with --admin");
      return;
    }
    try {
      send_json(res, to_json(impl->service.results()));
    } catch (const Error& e) {
      send_error(res, e);
    }
  });

  std::error_code ec;
  const auto& dir = impl_->options.static_dir;
  if (!dir.empty() && std::filesystem::is_directory(dir, ec)) {
    svr.set_mount_point("/", dir.string());
  } else {
    svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
    });
  }
}

SurveyServer::~SurveyServer() { stop(); }

int SurveyServer::bind() {
  auto& o = impl_->options;
  int port = o.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(o.host);
    if (port < 0) throw Error(ErrorCode::kIo, "cannot bind " + o.host);
  } else if (!impl_->server.bind_to_port(o.host, port)) {
    throw Error(ErrorCode::kIo,
                "cannot bind " + o.host + ":" + std::to_string(port) + " (port in use?)");
  }
  impl_->bound = true;
  return port;
}

void SurveyServer::serve() {
  if (!impl_->bound) throw Error(ErrorCode::kIo, "server is not bound");
  impl_->server.listen_after_bind();
}

void SurveyServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool SurveyServer::running() const { return impl_->server.is_running(); }

void SurveyServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace agsynth
