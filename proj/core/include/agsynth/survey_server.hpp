#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "agsynth/survey.hpp"

namespace agsynth {

struct SurveyServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir;  // survey UI assets served at /
  bool admin = false;                // enables GET /api/results
};

/// HTTP front end for SurveyService:
///
///   POST /api/sessions             {"rater_label"}             -> session
///   GET  /api/sessions/{id}/next                                -> blinded item
///   GET  /api/images/{item_id}                                  -> PNG/JPEG
///   POST /api/ratings              {"session_id","item_id","score"}
///   GET  /api/results                                           (admin only)
///
/// Errors are {"error": {"code", "message"}} with status 400 (bad request,
/// score out of range), 403 (results disabled), 404 (unknown session or
/// item), or 409 (duplicate rating).
class SurveyServer {
 public:
  SurveyServer(SurveyService& service, SurveyServerOptions options);
  ~SurveyServer();
  SurveyServer(const SurveyServer&) = delete;
  SurveyServer& operator=(const SurveyServer&) = delete;

  /// Binds the listening socket and returns the bound port. Throws IoError
  /// when the address is unavailable.
  int bind();
  /// Serves until stop(). Requires bind().
  void serve();
  void stop();
  bool running() const;
  /// Blocks until serve() is accepting connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agsynth
