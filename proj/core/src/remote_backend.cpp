#include "agsynth/remote_backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#include "agsynth/error.hpp"
#include "agsynth/hash.hpp"
#include "agsynth/image_io.hpp"
#include "json_fields.hpp"

namespace agsynth {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::kInvalidConfig, "backend.base_url must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto at = text.find(secret); at != std::string::npos; at = text.find(secret, at))
    text.replace(at, secret.size(), "[redacted]");
  return text;
}

std::string server_message(const httplib::Result& res) {
  try {
    auto j = nlohmann::json::parse(res->body);
    if (j.contains("error")) {
      const auto& e = j["error"];
      if (e.is_object() && e.contains("message")) return e["message"].get<std::string>();
      if (e.is_string()) return e.get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return res->body.substr(0, 200);
}

std::vector<RgbImage> parse_images(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kBackendUnavailable, "backend response is not JSON");
  }
  if (!j.contains("data") || !j["data"].is_array())
    throw Error(ErrorCode::kBackendUnavailable, "backend response has no data array");
  std::vector<RgbImage> out;
  for (const auto& item : j["data"]) {
    if (!item.contains("b64_json") || !item["b64_json"].is_string())
      throw Error(ErrorCode::kBackendUnavailable, "backend response item lacks b64_json");
    try {
      out.push_back(decode_image(base64_decode(item["b64_json"].get<std::string>()),
                                 "backend response"));
    } catch (const Error& e) {
      throw Error(ErrorCode::kBackendUnavailable, e.what());
    }
  }
  return out;
}

std::string size_label(int side) { return std::to_string(side) + "x" + std::to_string(side); }

}  // namespace

void BackendConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidConfig, m); };
  if (base_url.empty()) fail("backend.base_url must not be empty");
  split_url(base_url);
  if (api_key_env.empty()) fail("backend.api_key_env must not be empty");
  if (max_retries < 0) fail("backend.max_retries must be >= 0");
  if (!(requests_per_minute >= 1.0)) fail("backend.requests_per_minute must be >= 1");
  if (!(timeout_seconds > 0)) fail("backend.timeout_seconds must be positive");
  if (max_concurrent < 1) fail("backend.max_concurrent must be >= 1");
}

BackendConfig backend_config_from_json(const nlohmann::json& j, const std::string& where) {
  BackendConfig c;
  detail::FieldReader r(j, where);
  r.get("base_url", c.base_url);
  r.get("api_key_env", c.api_key_env);
  r.get("model", c.model);
  r.get("timeout_seconds", c.timeout_seconds);
  r.get("max_retries", c.max_retries);
  r.get("requests_per_minute", c.requests_per_minute);
  r.get("max_concurrent", c.max_concurrent);
  r.finish();
  c.validate();
  return c;
}

nlohmann::json to_json(const BackendConfig& c) {
  nlohmann::json j{{"base_url", c.base_url},
                   {"api_key_env", c.api_key_env},
                   {"timeout_seconds", c.timeout_seconds},
                   {"max_retries", c.max_retries},
                   {"requests_per_minute", c.requests_per_minute},
                   {"max_concurrent", c.max_concurrent}};
  if (!c.model.empty()) j["model"] = c.model;
  return j;
}

RemoteBackend::RemoteBackend(BackendConfig cfg, std::shared_ptr<RateLimiter> limiter, Sleep sleep)
    : cfg_(std::move(cfg)), limiter_(std::move(limiter)), sleep_(std::move(sleep)) {
  cfg_.validate();
  if (!limiter_) limiter_ = std::make_shared<RateLimiter>(cfg_.requests_per_minute);
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string RemoteBackend::id() const {
  return "remote:" + cfg_.base_url + (cfg_.model.empty() ? "" : "#" + cfg_.model);
}

std::vector<RgbImage> RemoteBackend::generate(const GenerationJob& job) {
  job.validate();
  const char* env = std::getenv(cfg_.api_key_env.c_str());
  const std::string key = env ? env : "";
  if (key.empty())
    throw Error(ErrorCode::kAuth, "environment variable " + cfg_.api_key_env + " is not set");

  const Endpoint ep = split_url(cfg_.base_url);
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg_.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const httplib::Headers headers{{"Authorization", "Bearer " + key}};

  auto send = [&]() -> httplib::Result {
    if (job.kind == JobKind::kTextToImage) {
      nlohmann::json body{{"prompt", job.prompt},
                          {"n", job.count},
                          {"size", size_label(job.size)},
                          {"response_format", "b64_json"}};
      if (!cfg_.model.empty()) body["model"] = cfg_.model;
      return client.Post(ep.prefix + "/images/generations", headers, body.dump(),
                         "application/json");
    }
    httplib::MultipartFormDataItems items{
        {"image", std::string(job.source_image.begin(), job.source_image.end()), "image.png",
         "image/png"},
        {"n", std::to_string(job.count), "", ""},
        {"size", size_label(job.size), "", ""},
        {"response_format", "b64_json", "", ""},
    };
    if (!cfg_.model.empty()) items.push_back({"model", cfg_.model, "", ""});
    return client.Post(ep.prefix + "/images/variations", headers, items);
  };

  bool last_was_rate_limit = false;
  std::string last_failure;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) sleep_(kBackoffBase * (1 << (attempt - 1)));
    limiter_->acquire();
    ++requests_;
    httplib::Result res = send();
    if (!res) {
      last_was_rate_limit = false;
      last_failure = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 200) return parse_images(res->body);
    const std::string message = redact(server_message(res), key);
    if (status == 401 || status == 403)
      throw Error(ErrorCode::kAuth, "backend rejected credentials (HTTP " +
                                        std::to_string(status) + "): " + message);
    if (status == 429 || status == 408 || status >= 500) {
      last_was_rate_limit = status == 429;
      last_failure = "HTTP " + std::to_string(status) + ": " + message;
      continue;
    }
    throw Error(ErrorCode::kInvalidJob,
                "backend refused job (HTTP " + std::to_string(status) + "): " + message);
  }
  const std::string summary = "giving up after " + std::to_string(cfg_.max_retries + 1) +
                              " attempts; last failure " + redact(last_failure, key);
  throw Error(last_was_rate_limit ? ErrorCode::kRateLimited : ErrorCode::kBackendUnavailable,
              summary);
}

}  // namespace agsynth
