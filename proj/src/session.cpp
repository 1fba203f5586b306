#include "t9g/session.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "t9g/error.hpp"
#include "t9g/random.hpp"

namespace t9g {

namespace {

using nlohmann::json;

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

std::string_view to_string(TouchPhase p) {
  switch (p) {
    case TouchPhase::down: return "touch-down";
    case TouchPhase::move: return "touch-move";
    case TouchPhase::up: return "touch-up";
  }
  return "touch-move";
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::malformed_log, what);
}

std::string describe(const Event& e) { return to_json(e).dump(); }

}  // namespace

double time_of(const Event& e) {
  return std::visit([](const auto& ev) { return ev.t; }, e);
}

bool is_input(const Event& e) {
  return !std::holds_alternative<event::Emission>(e) &&
         !std::holds_alternative<event::Warning>(e) &&
         !std::holds_alternative<event::Candidates>(e);
}

json to_json(const LogHeader& h) {
  return {{"type", "header"},
          {"schema", h.schema},
          {"geometry", to_json(h.geometry)},
          {"decoder", to_json(h.decoder)},
          {"candidates",
           {{"k", h.candidates.k},
            {"prefix_completions", h.candidates.prefix_completions}}},
          {"lexicon_hash", h.lexicon_hash},
          {"participant", h.participant},
          {"device", h.device}};
}

LogHeader header_from_json(const json& j) {
  try {
    if (j.at("type") != "header") malformed("first line is not a header");
    LogHeader h;
    h.schema = j.at("schema").get<int>();
    if (h.schema != kLogSchemaVersion) {
      malformed("unsupported log schema " + std::to_string(h.schema));
    }
    h.geometry = geometry_from_json(j.at("geometry"));
    h.decoder = decoder_config_from_json(j.at("decoder"));
    h.candidates.k = j.at("candidates").at("k").get<std::size_t>();
    h.candidates.prefix_completions =
        j.at("candidates").at("prefix_completions").get<bool>();
    h.lexicon_hash = j.at("lexicon_hash").get<std::string>();
    h.participant = j.at("participant").get<std::string>();
    h.device = j.at("device").get<std::string>();
    return h;
  } catch (const json::exception& e) {
    malformed(std::string("bad header: ") + e.what());
  }
}

json to_json(const Event& e) {
  return std::visit(
      overloaded{
          [](const event::BlockStart& v) -> json {
            return {{"type", "block-start"}, {"t", v.t}, {"block", v.block},
                    {"variant", to_string(v.variant)}};
          },
          [](const event::BlockEnd& v) -> json {
            return {{"type", "block-end"}, {"t", v.t}, {"block", v.block},
                    {"variant", to_string(v.variant)}};
          },
          [](const event::PhraseStart& v) -> json {
            return {{"type", "phrase-start"}, {"t", v.t},
                    {"block", v.block},       {"index", v.index},
                    {"variant", to_string(v.variant)},
                    {"phrase", v.phrase}};
          },
          [](const event::PhraseEnd& v) -> json {
            return {{"type", "phrase-end"}, {"t", v.t}};
          },
          [](const event::Touch& v) -> json {
            return {{"type", to_string(v.phase)}, {"t", v.t}, {"x", v.x},
                    {"y", v.y}};
          },
          [](const event::Emission& v) -> json {
            return {{"type", "emission"}, {"t", v.t}, {"digit", v.digit},
                    {"cause", to_string(v.cause)}};
          },
          [](const event::Warning& v) -> json {
            return {{"type", "warning"}, {"t", v.t}, {"code", v.code}};
          },
          [](const event::Candidates& v) -> json {
            return {{"type", "candidates"}, {"t", v.t}, {"words", v.words}};
          },
          [](const event::Commit& v) -> json {
            return {{"type", "commit"}, {"t", v.t}, {"word", v.word}};
          },
          [](const event::Rejected& v) -> json {
            return {{"type", "rejected"}, {"t", v.t}, {"word", v.word}};
          },
          [](const event::Delete& v) -> json {
            return {{"type", "delete"}, {"t", v.t}, {"noop", v.noop}};
          },
          [](const event::Skip& v) -> json {
            return {{"type", "skip"}, {"t", v.t}, {"phrase", v.phrase},
                    {"reason", v.reason}};
          },
      },
      e);
}

Event event_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    const double t = j.at("t").get<double>();
    if (type == "block-start" || type == "block-end") {
      const int block = j.at("block").get<int>();
      const Variant v = variant_from_string(j.at("variant").get<std::string>());
      if (type == "block-start") return event::BlockStart{t, block, v};
      return event::BlockEnd{t, block, v};
    }
    if (type == "phrase-start") {
      return event::PhraseStart{
          t, j.at("block").get<int>(), j.at("index").get<int>(),
          variant_from_string(j.at("variant").get<std::string>()),
          j.at("phrase").get<std::string>()};
    }
    if (type == "phrase-end") return event::PhraseEnd{t};
    if (type == "touch-down" || type == "touch-move" || type == "touch-up") {
      const TouchPhase phase = type == "touch-down" ? TouchPhase::down
                               : type == "touch-up" ? TouchPhase::up
                                                    : TouchPhase::move;
      return event::Touch{t, phase, j.at("x").get<double>(),
                          j.at("y").get<double>()};
    }
    if (type == "emission") {
      return event::Emission{t, j.at("digit").get<int>(),
                             cause_from_string(j.at("cause").get<std::string>())};
    }
    if (type == "warning") return event::Warning{t, j.at("code").get<std::string>()};
    if (type == "candidates") {
      return event::Candidates{t, j.at("words").get<std::vector<std::string>>()};
    }
    if (type == "commit") return event::Commit{t, j.at("word").get<std::string>()};
    if (type == "rejected") {
      return event::Rejected{t, j.at("word").get<std::string>()};
    }
    if (type == "delete") return event::Delete{t, j.at("noop").get<bool>()};
    if (type == "skip") {
      return event::Skip{t, j.at("phrase").get<std::string>(),
                         j.at("reason").get<std::string>()};
    }
    malformed("unknown event type '" + type + "'");
  } catch (const json::exception& e) {
    malformed(std::string("bad event: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::malformed_log) throw;
    malformed(e.what());
  }
}

std::string serialize(const SessionLog& log) {
  std::string out = to_json(log.header).dump();
  out += '\n';
  for (const auto& e : log.events) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

SessionLog parse_log(std::string_view text) {
  SessionLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      malformed("line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (!have_header) {
        log.header = header_from_json(j);
        have_header = true;
      } else {
        log.events.push_back(event_from_json(j));
      }
    } catch (const Error& e) {
      malformed("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) malformed("log has no header line");
  return log;
}

SessionLog read_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read log: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_log(ss.str());
}

void write_log(const std::string& path, const SessionLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write log: " + path);
  out << serialize(log);
  if (!out) throw Error(ErrorCode::io, "write failed: " + path);
}

// --- engine ----------------------------------------------------------------

SessionEngine::SessionEngine(LogHeader header, const Lexicon& lexicon)
    : lexicon_(&lexicon),
      decoder_(header.geometry, header.decoder),
      composer_(lexicon, header.candidates) {
  header.lexicon_hash = lexicon.hash();
  variant_ = header.decoder.variant;
  log_.header = std::move(header);
}

void SessionEngine::stamp(double t) {
  if (started_ && t < last_t_) {
    throw Error(ErrorCode::malformed_trace,
                "event time went backwards (" + std::to_string(t) + " < " +
                    std::to_string(last_t_) + ")");
  }
  started_ = true;
  last_t_ = t;
}

void SessionEngine::set_variant(Variant v) {
  if (decoder_.in_trace()) malformed("variant change during a trace");
  variant_ = v;
  DecoderConfig cfg = log_.header.decoder;
  cfg.variant = v;
  decoder_ = Decoder(log_.header.geometry, cfg);
}

void SessionEngine::sync_word_tail() {
  const auto& buf = composer_.buffer();
  decoder_.set_word_tail(buf.empty() ? std::nullopt
                                     : std::optional<Digit>(buf.back()));
}

void SessionEngine::block_start(double t, int block, Variant variant) {
  stamp(t);
  if (in_phrase_) malformed("block-start inside a phrase");
  set_variant(variant);
  push(event::BlockStart{t, block, variant});
}

void SessionEngine::block_end(double t, int block, Variant variant) {
  stamp(t);
  if (in_phrase_) malformed("block-end inside a phrase");
  push(event::BlockEnd{t, block, variant});
}

void SessionEngine::phrase_start(double t, int block, int index,
                                 Variant variant, std::string phrase) {
  stamp(t);
  if (in_phrase_) malformed("phrase-start inside a phrase");
  set_variant(variant);
  composer_.reset();
  in_phrase_ = true;
  current_ = PhraseResult{};
  current_.variant = variant;
  current_.block = block;
  current_.index = index;
  current_.target = phrase;
  first_touch_.reset();
  last_commit_.reset();
  push(event::PhraseStart{t, block, index, variant, std::move(phrase)});
}

void SessionEngine::phrase_end(double t) {
  stamp(t);
  if (!in_phrase_) malformed("phrase-end without phrase-start");
  if (decoder_.in_trace()) malformed("phrase-end during a trace");
  in_phrase_ = false;
  const auto& words = composer_.committed_words();
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  current_.transcribed = std::move(text);
  current_.word_selections = words.size();
  current_.deletes = composer_.delete_count();
  current_.entered_codes = composer_.committed_codes();
  if (first_touch_ && last_commit_ && *last_commit_ > *first_touch_) {
    current_.duration_min = (*last_commit_ - *first_touch_) / 60000.0;
  }
  results_.push_back(current_);
  push(event::PhraseEnd{t});
}

void SessionEngine::touch(TouchPhase phase, double x, double y, double t) {
  stamp(t);
  push(event::Touch{t, phase, x, y});
  if (phase == TouchPhase::down) {
    ++current_.gestures;
    if (!first_touch_) first_touch_ = t;
  }
  const FeedResult r = decoder_.feed({phase, {x, y, t}});
  if (r.key1_without_predecessor) {
    push(event::Warning{t, "key1-without-predecessor"});
  }
  for (const auto& e : r.emissions) {
    composer_.enter(e.digit);
    sync_word_tail();
    push(event::Emission{e.t, e.digit, e.cause});
    push(event::Candidates{e.t, words_of(composer_.shown())});
  }
}

bool SessionEngine::commit(const std::string& word, double t) {
  stamp(t);
  if (decoder_.in_trace()) malformed("commit during a trace");
  try {
    composer_.commit(word);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::invalid_selection) throw;
    push(event::Rejected{t, word});
    return false;
  }
  decoder_.begin_word();
  last_commit_ = t;
  push(event::Commit{t, word});
  push(event::Candidates{t, {}});
  return true;
}

bool SessionEngine::delete_keystroke(double t) {
  stamp(t);
  if (decoder_.in_trace()) malformed("delete during a trace");
  const bool removed = composer_.delete_keystroke();
  sync_word_tail();
  push(event::Delete{t, !removed});
  if (removed) push(event::Candidates{t, words_of(composer_.shown())});
  return removed;
}

void SessionEngine::skip(double t, std::string phrase, std::string reason) {
  stamp(t);
  if (in_phrase_) malformed("skip inside a phrase");
  push(event::Skip{t, std::move(phrase), std::move(reason)});
}

void SessionEngine::apply(const Event& input) {
  std::visit(
      overloaded{
          [&](const event::BlockStart& v) { block_start(v.t, v.block, v.variant); },
          [&](const event::BlockEnd& v) { block_end(v.t, v.block, v.variant); },
          [&](const event::PhraseStart& v) {
            phrase_start(v.t, v.block, v.index, v.variant, v.phrase);
          },
          [&](const event::PhraseEnd& v) { phrase_end(v.t); },
          [&](const event::Touch& v) { touch(v.phase, v.x, v.y, v.t); },
          [&](const event::Commit& v) { commit(v.word, v.t); },
          [&](const event::Rejected& v) { commit(v.word, v.t); },
          [&](const event::Delete& v) { delete_keystroke(v.t); },
          [&](const event::Skip& v) { skip(v.t, v.phrase, v.reason); },
          [&](const auto&) { malformed("derived event fed as input"); },
      },
      input);
}

std::vector<PhraseResult> replay(const SessionLog& log, const Lexicon& lexicon) {
  if (log.header.lexicon_hash != lexicon.hash()) {
    throw Error(ErrorCode::replay_mismatch,
                "lexicon hash " + lexicon.hash() + " differs from the log's " +
                    log.header.lexicon_hash);
  }
  SessionEngine engine(log.header, lexicon);
  const auto& recomputed = engine.log().events;
  const auto mismatch = [&](std::size_t i) {
    const std::string recorded =
        i < log.events.size() ? describe(log.events[i]) : "<end of log>";
    const std::string expected =
        i < recomputed.size() ? describe(recomputed[i]) : "<nothing>";
    // Line numbers count the header as line 1.
    throw Error(ErrorCode::replay_mismatch,
                "event " + std::to_string(i) + " (line " +
                    std::to_string(i + 2) + "): recorded " + recorded +
                    ", recomputed " + expected);
  };
  std::size_t checked = 0;
  for (const auto& e : log.events) {
    if (!is_input(e)) continue;
    engine.apply(e);
    for (; checked < recomputed.size(); ++checked) {
      if (checked >= log.events.size() || !(recomputed[checked] == log.events[checked])) {
        mismatch(checked);
      }
    }
  }
  if (recomputed.size() != log.events.size()) mismatch(recomputed.size());
  return engine.results();
}

// --- plans -----------------------------------------------------------------

std::vector<std::string> read_phrase_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read phrase set: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

std::vector<std::string> sample_phrases(std::span<const std::string> phrases,
                                        std::size_t n, std::uint64_t seed) {
  if (n > phrases.size()) {
    throw Error(ErrorCode::insufficient_phrases,
                "asked for " + std::to_string(n) + " phrases from a set of " +
                    std::to_string(phrases.size()));
  }
  std::vector<std::size_t> idx(phrases.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first n slots are a uniform draw.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(phrases[idx[i]]);
  return out;
}

std::array<Variant, 3> counterbalance(const std::array<Variant, 3>& variants,
                                      std::size_t participant_index) {
  const std::size_t shift = participant_index % 3;
  std::array<Variant, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = variants[(i + shift) % 3];
  return out;
}

std::vector<Variant> StudyPlan::variant_order() const {
  if (!variants.empty()) return variants;
  const auto order = counterbalance(kAllVariants, participant_index);
  return {order.begin(), order.end()};
}

StudyPlan study_plan_from_json(const json& j, const std::string& base_dir) {
  StudyPlan p;
  try {
    p.participant_id = j.value("participant_id", p.participant_id);
    p.participant_index = j.value("participant_index", p.participant_index);
    if (j.contains("variants")) {
      for (const auto& v : j.at("variants")) {
        p.variants.push_back(variant_from_string(v.get<std::string>()));
      }
    }
    p.blocks_per_variant = j.value("blocks_per_variant", p.blocks_per_variant);
    p.phrases_per_block = j.value("phrases_per_block", p.phrases_per_block);
    p.phrase_set = j.value("phrase_set", p.phrase_set);
    p.practice_duration_s = j.value("practice_duration_s", p.practice_duration_s);
    p.seed = j.value("seed", p.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("bad plan: ") + e.what());
  }
  if (p.blocks_per_variant < 1 || p.phrases_per_block < 1) {
    throw Error(ErrorCode::invalid_config,
                "plan needs at least one block and one phrase per block");
  }
  if (!p.phrase_set.empty() && !base_dir.empty() &&
      std::filesystem::path(p.phrase_set).is_relative()) {
    p.phrase_set = (std::filesystem::path(base_dir) / p.phrase_set).string();
  }
  return p;
}

json to_json(const StudyPlan& p) {
  json variants = json::array();
  for (Variant v : p.variants) variants.push_back(to_string(v));
  return {{"participant_id", p.participant_id},
          {"participant_index", p.participant_index},
          {"variants", variants},
          {"blocks_per_variant", p.blocks_per_variant},
          {"phrases_per_block", p.phrases_per_block},
          {"phrase_set", p.phrase_set},
          {"practice_duration_s", p.practice_duration_s},
          {"seed", p.seed}};
}

std::vector<PlannedPhrase> expand_plan(const StudyPlan& plan,
                                       std::span<const std::string> phrases) {
  std::vector<PlannedPhrase> out;
  const auto per_variant = static_cast<std::size_t>(plan.blocks_per_variant) *
                           static_cast<std::size_t>(plan.phrases_per_block);
  for (Variant v : plan.variant_order()) {
    const auto sub_seed =
        mix_seed(plan.seed ^ (static_cast<std::uint64_t>(v) + 1) * 0x100000001b3ULL);
    const auto picked = sample_phrases(phrases, per_variant, sub_seed);
    for (int b = 0; b < plan.blocks_per_variant; ++b) {
      for (int i = 0; i < plan.phrases_per_block; ++i) {
        out.push_back({v, b + 1, i,
                       picked[static_cast<std::size_t>(b * plan.phrases_per_block + i)]});
      }
    }
  }
  return out;
}

}  // namespace t9g
