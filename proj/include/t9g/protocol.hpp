#pragma once

// Study-client protocol served by `t9g serve`.
//
// The browser client sends raw pointer events in millimetres and user
// actions; the server owns all decoding and answers each message with the
// resulting notifications. Messages are JSON objects with a "type":
//
//   client -> server
//     session-start  {participant, participant_index?, variant?, plan?}
//     pointer-event  {session, phase: down|move|up, x, y, t}
//     commit         {session, word, t}
//     delete         {session, t}
//     phrase-advance {session, t}
//     session-end    {session, t}
//
//   server -> client (returned as {"messages": [...]})
//     session-started, phrase, block-start, block-end, emission-notify,
//     candidates-update, commit, rejected, delete, warning, phrase-end,
//     plan-complete, session-end, error
//
// docs/protocol.md has the field-by-field description.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "t9g/predictor.hpp"
#include "t9g/session.hpp"

namespace t9g {

class StudyServer {
 public:
  StudyServer(const Lexicon& lexicon, LogHeader defaults,
              std::vector<std::string> phrase_set);

  /// Handles one client message and returns {"messages": [...]}. Protocol
  /// and decoding failures come back as a single "error" message; the
  /// second member of the pair is false in that case.
  std::pair<nlohmann::json, bool> handle(const nlohmann::json& message);

  /// Canonical `.t9log` text of a session, if it exists.
  std::optional<std::string> log_text(const std::string& session_id) const;

  nlohmann::json layout() const;

 private:
  struct Live;

  nlohmann::json start(const nlohmann::json& message);
  nlohmann::json dispatch(Live& live, const nlohmann::json& message);
  std::shared_ptr<Live> find(const std::string& id) const;

  const Lexicon* lexicon_;
  LogHeader defaults_;
  std::vector<std::string> phrase_set_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP front end. POST /api/message carries protocol messages;
/// GET /api/session/<id>/log downloads a log; GET /api/layout returns the
/// geometry document.
class HttpService {
 public:
  explicit HttpService(StudyServer& server);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Error{io}.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Binds and blocks serving HTTP on host:port.
void serve_http(StudyServer& server, const std::string& host, int port);

}  // namespace t9g
