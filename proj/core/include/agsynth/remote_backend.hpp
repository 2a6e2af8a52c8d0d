#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "agsynth/generation.hpp"
#include "agsynth/rate_limiter.hpp"

namespace agsynth {

/// Connection settings for an images API compatible with
///   POST {base_url}/images/generations   JSON {prompt, n, size, response_format}
///   POST {base_url}/images/variations    multipart {image, n, size, response_format}
/// whose responses carry {"data": [{"b64_json": ...}, ...]}.
///
/// The API key is read from the environment variable named by api_key_env
/// at request time. It is never stored in configuration or serialized.
struct BackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "GENERATOR_API_KEY";
  std::string model;  // sent only when non-empty
  double timeout_seconds = 120.0;
  int max_retries = 3;
  double requests_per_minute = 5.0;
  int max_concurrent = 2;

  void validate() const;
  friend bool operator==(const BackendConfig&, const BackendConfig&) = default;
};

BackendConfig backend_config_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const BackendConfig& cfg);

class RemoteBackend final : public ImageBackend {
 public:
  using Sleep = std::function<void(std::chrono::milliseconds)>;

  /// First backoff delay; each further retry doubles it.
  static constexpr std::chrono::milliseconds kBackoffBase{1000};

  /// `limiter` may be shared between backends; one is created from the
  /// config when null. `sleep` replaces std::this_thread::sleep_for for
  /// retry backoff.
  explicit RemoteBackend(BackendConfig cfg, std::shared_ptr<RateLimiter> limiter = nullptr,
                         Sleep sleep = {});

  std::string id() const override;
  std::vector<RgbImage> generate(const GenerationJob& job) override;

  /// HTTP requests issued so far (including retried attempts).
  int requests_sent() const noexcept { return requests_.load(); }

 private:
  BackendConfig cfg_;
  std::shared_ptr<RateLimiter> limiter_;
  Sleep sleep_;
  std::atomic<int> requests_{0};
};

}  // namespace agsynth
