#include "t9g/protocol.hpp"

#include <httplib.h>

#include "t9g/error.hpp"

namespace t9g {

using nlohmann::json;

struct StudyServer::Live {
  std::mutex mu;
  std::string id;
  std::unique_ptr<SessionEngine> engine;
  std::vector<PlannedPhrase> plan;
  std::size_t next = 0;
  std::optional<std::pair<Variant, int>> block;
  std::string key1_letters;
  bool ended = false;
};

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::invalid_config, what);
}

std::string key1_mirror(const SessionEngine& engine) {
  if (engine.variant() != Variant::enhanced_key1) return "";
  const auto& buf = engine.composer().buffer();
  return buf.empty() ? "" : std::string(letters_of(buf.back()));
}

}  // namespace

StudyServer::StudyServer(const Lexicon& lexicon, LogHeader defaults,
                         std::vector<std::string> phrase_set)
    : lexicon_(&lexicon),
      defaults_(std::move(defaults)),
      phrase_set_(std::move(phrase_set)) {}

json StudyServer::layout() const { return to_json(defaults_.geometry); }

std::shared_ptr<StudyServer::Live> StudyServer::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::optional<std::string> StudyServer::log_text(const std::string& id) const {
  const auto live = find(id);
  if (!live) return std::nullopt;
  std::lock_guard lock(live->mu);
  return serialize(live->engine->log());
}

std::pair<json, bool> StudyServer::handle(const json& message) {
  try {
    if (!message.is_object() || !message.contains("type")) {
      bad("message needs a type");
    }
    const auto type = message.at("type").get<std::string>();
    if (type == "session-start") return {start(message), true};
    const auto live = find(message.at("session").get<std::string>());
    if (!live) bad("unknown session");
    std::lock_guard lock(live->mu);
    return {dispatch(*live, message), true};
  } catch (const Error& e) {
    return {json{{"messages",
                  json::array({{{"type", "error"},
                                {"code", to_string(e.code())},
                                {"message", e.what()}}})}},
            false};
  } catch (const json::exception& e) {
    return {json{{"messages", json::array({{{"type", "error"},
                                            {"code", "bad-message"},
                                            {"message", e.what()}}})}},
            false};
  }
}

json StudyServer::start(const json& message) {
  StudyPlan plan =
      study_plan_from_json(message.contains("plan") ? message.at("plan") : json::object());
  plan.participant_id = message.value("participant", plan.participant_id);
  plan.participant_index =
      message.value("participant_index", plan.participant_index);
  if (message.contains("variant")) {
    plan.variants = {variant_from_string(message.at("variant").get<std::string>())};
  }
  auto live = std::make_shared<Live>();
  live->plan = expand_plan(plan, phrase_set_);
  LogHeader header = defaults_;
  header.participant = plan.participant_id;
  header.device = message.value("device", std::string("browser"));
  live->engine = std::make_unique<SessionEngine>(header, *lexicon_);
  {
    std::lock_guard lock(mu_);
    live->id = "s" + std::to_string(next_id_++);
    sessions_[live->id] = live;
  }
  json variants = json::array();
  for (Variant v : plan.variant_order()) variants.push_back(to_string(v));
  return {{"messages",
           json::array({{{"type", "session-started"},
                         {"session", live->id},
                         {"geometry", to_json(header.geometry)},
                         {"variants", variants},
                         {"blocks_per_variant", plan.blocks_per_variant},
                         {"phrases_per_block", plan.phrases_per_block},
                         {"practice_duration_s", plan.practice_duration_s},
                         {"candidates_k", header.candidates.k}}})}};
}

json StudyServer::dispatch(Live& live, const json& message) {
  if (live.ended) bad("session already ended");
  SessionEngine& engine = *live.engine;
  const auto type = message.at("type").get<std::string>();
  const double t = message.at("t").get<double>();
  const std::size_t before = engine.log().events.size();
  json out = json::array();

  if (type == "pointer-event") {
    const auto phase = message.at("phase").get<std::string>();
    TouchPhase p = TouchPhase::move;
    if (phase == "down") {
      p = TouchPhase::down;
    } else if (phase == "up") {
      p = TouchPhase::up;
    } else if (phase != "move") {
      bad("pointer phase must be down, move or up");
    }
    engine.touch(p, message.at("x").get<double>(), message.at("y").get<double>(), t);
  } else if (type == "commit") {
    engine.commit(message.at("word").get<std::string>(), t);
  } else if (type == "delete") {
    engine.delete_keystroke(t);
  } else if (type == "phrase-advance" || type == "session-end") {
    if (engine.in_phrase()) engine.phrase_end(t);
    const bool more = type == "phrase-advance" && live.next < live.plan.size();
    if (more) {
      const auto& pp = live.plan[live.next++];
      if (live.block != std::pair{pp.variant, pp.block}) {
        if (live.block) engine.block_end(t, live.block->second, live.block->first);
        engine.block_start(t, pp.block, pp.variant);
        live.block = std::pair{pp.variant, pp.block};
      }
      engine.phrase_start(t, pp.block, pp.index, pp.variant, pp.phrase);
    } else if (live.block) {
      engine.block_end(t, live.block->second, live.block->first);
      live.block.reset();
    }
    if (type == "session-end") live.ended = true;
  } else {
    bad("unknown message type '" + type + "'");
  }

  const auto& events = engine.log().events;
  for (std::size_t i = before; i < events.size(); ++i) {
    const Event& e = events[i];
    if (const auto* em = std::get_if<event::Emission>(&e)) {
      if (engine.variant() == Variant::enhanced_key1 && em->digit != 1) {
        live.key1_letters = std::string(letters_of(em->digit));
      }
      json m = {{"type", "emission-notify"}, {"digit", em->digit},
                {"cause", to_string(em->cause)}, {"t", em->t}};
      if (engine.variant() == Variant::enhanced_key1) {
        m["key1_letters"] = live.key1_letters;
      }
      out.push_back(std::move(m));
    } else if (const auto* c = std::get_if<event::Candidates>(&e)) {
      out.push_back({{"type", "candidates-update"}, {"words", c->words}});
    } else if (const auto* c = std::get_if<event::Commit>(&e)) {
      live.key1_letters = key1_mirror(engine);
      out.push_back({{"type", "commit"},
                     {"word", c->word},
                     {"transcription", engine.composer().transcription()},
                     {"key1_letters", live.key1_letters}});
    } else if (const auto* r = std::get_if<event::Rejected>(&e)) {
      out.push_back({{"type", "rejected"}, {"word", r->word}});
    } else if (const auto* d = std::get_if<event::Delete>(&e)) {
      live.key1_letters = key1_mirror(engine);
      out.push_back({{"type", "delete"},
                     {"noop", d->noop},
                     {"key1_letters", live.key1_letters}});
    } else if (const auto* w = std::get_if<event::Warning>(&e)) {
      out.push_back({{"type", "warning"}, {"code", w->code}});
    } else if (const auto* ps = std::get_if<event::PhraseStart>(&e)) {
      live.key1_letters.clear();
      out.push_back({{"type", "phrase"},
                     {"target", ps->phrase},
                     {"block", ps->block},
                     {"index", ps->index},
                     {"variant", to_string(ps->variant)}});
    } else if (std::holds_alternative<event::PhraseEnd>(e)) {
      out.push_back({{"type", "phrase-end"},
                     {"transcription", engine.composer().transcription()}});
    } else if (const auto* bs = std::get_if<event::BlockStart>(&e)) {
      out.push_back({{"type", "block-start"},
                     {"block", bs->block},
                     {"variant", to_string(bs->variant)}});
    } else if (const auto* be = std::get_if<event::BlockEnd>(&e)) {
      out.push_back({{"type", "block-end"},
                     {"block", be->block},
                     {"variant", to_string(be->variant)}});
    }
  }
  if (type == "phrase-advance" && !engine.in_phrase()) {
    out.push_back({{"type", "plan-complete"}});
  }
  if (type == "session-end") {
    out.push_back({{"type", "session-end"}, {"log_handle", live.id}});
  }
  return {{"messages", out}};
}

struct HttpService::Impl {
  httplib::Server http;
};

namespace {

std::string error_body(const std::string& code, const std::string& what) {
  return json{{"messages", json::array({{{"type", "error"},
                                         {"code", code},
                                         {"message", what}}})}}
      .dump();
}

}  // namespace

HttpService::HttpService(StudyServer& server) : impl_(std::make_unique<Impl>()) {
  auto& http = impl_->http;
  http.Post("/api/message", [&server](const httplib::Request& req, httplib::Response& res) {
    json msg;
    try {
      msg = json::parse(req.body);
    } catch (const json::exception& e) {
      res.status = 400;
      res.set_content(error_body("bad-message", e.what()), "application/json");
      return;
    }
    const auto [reply, ok] = server.handle(msg);
    res.status = ok ? 200 : 400;
    res.set_content(reply.dump(), "application/json");
  });
  http.Get(R"(/api/session/([A-Za-z0-9]+)/log)",
           [&server](const httplib::Request& req, httplib::Response& res) {
             const auto text = server.log_text(req.matches[1]);
             if (!text) {
               res.status = 404;
               res.set_content(error_body("unknown-session", "no such session"),
                               "application/json");
               return;
             }
             res.set_content(*text, "application/x-ndjson");
           });
  http.Get("/api/layout", [&server](const httplib::Request&, httplib::Response& res) {
    res.set_content(server.layout().dump(), "application/json");
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  auto& http = impl_->http;
  const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpService::run() { impl_->http.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->http.stop();
}

void serve_http(StudyServer& server, const std::string& host, int port) {
  HttpService service(server);
  service.bind(host, port);
  service.run();
}

}  // namespace t9g
