#pragma once

// Transcription sessions: study plans, the `.t9log` event log, the live
// session engine and deterministic replay.
//
// A `.t9log` file is line-delimited JSON. The first line is the header;
// every following line is one event with a "type" and a time "t" in ms.
// Events are either inputs (touches, commit attempts, deletes, phrase and
// block boundaries, skips) or derived from inputs by the engine
// (emissions, candidate lists, warnings). Replay re-feeds the inputs and
// checks the engine regenerates the whole log. docs/t9log.md lists the
// fields.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "t9g/decoder.hpp"
#include "t9g/layout.hpp"
#include "t9g/metrics.hpp"
#include "t9g/predictor.hpp"

namespace t9g {

inline constexpr int kLogSchemaVersion = 1;

struct LogHeader {
  int schema = kLogSchemaVersion;
  KeyboardGeometry geometry;
  DecoderConfig decoder;  // variant unused; each phrase names its own
  CandidateOptions candidates;
  std::string lexicon_hash;
  std::string participant;
  std::string device;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

namespace event {

struct BlockStart {
  double t = 0.0;
  int block = 1;
  Variant variant = Variant::conventional;
  friend bool operator==(const BlockStart&, const BlockStart&) = default;
};
struct BlockEnd {
  double t = 0.0;
  int block = 1;
  Variant variant = Variant::conventional;
  friend bool operator==(const BlockEnd&, const BlockEnd&) = default;
};
struct PhraseStart {
  double t = 0.0;
  int block = 1;
  int index = 0;
  Variant variant = Variant::conventional;
  std::string phrase;
  friend bool operator==(const PhraseStart&, const PhraseStart&) = default;
};
struct PhraseEnd {
  double t = 0.0;
  friend bool operator==(const PhraseEnd&, const PhraseEnd&) = default;
};
struct Touch {
  double t = 0.0;
  TouchPhase phase = TouchPhase::move;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Touch&, const Touch&) = default;
};
struct Emission {
  double t = 0.0;
  Digit digit = 0;
  Cause cause = Cause::initial_contact;
  friend bool operator==(const Emission&, const Emission&) = default;
};
struct Warning {
  double t = 0.0;
  std::string code;
  friend bool operator==(const Warning&, const Warning&) = default;
};
struct Candidates {
  double t = 0.0;
  std::vector<std::string> words;
  friend bool operator==(const Candidates&, const Candidates&) = default;
};
struct Commit {
  double t = 0.0;
  std::string word;
  friend bool operator==(const Commit&, const Commit&) = default;
};
/// A commit attempt that did not name a shown candidate.
struct Rejected {
  double t = 0.0;
  std::string word;
  friend bool operator==(const Rejected&, const Rejected&) = default;
};
struct Delete {
  double t = 0.0;
  bool noop = false;
  friend bool operator==(const Delete&, const Delete&) = default;
};
/// A planned phrase that could not be run (e.g. a word outside the lexicon).
struct Skip {
  double t = 0.0;
  std::string phrase;
  std::string reason;
  friend bool operator==(const Skip&, const Skip&) = default;
};

}  // namespace event

using Event =
    std::variant<event::BlockStart, event::BlockEnd, event::PhraseStart,
                 event::PhraseEnd, event::Touch, event::Emission,
                 event::Warning, event::Candidates, event::Commit,
                 event::Rejected, event::Delete, event::Skip>;

double time_of(const Event& e);
/// Inputs drive the engine; everything else is derived from them.
bool is_input(const Event& e);

struct SessionLog {
  LogHeader header;
  std::vector<Event> events;

  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

nlohmann::json to_json(const LogHeader& h);
LogHeader header_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);

/// Canonical text form: one compact JSON object per line, keys sorted.
std::string serialize(const SessionLog& log);
/// Throws Error{malformed_log} naming the offending line.
SessionLog parse_log(std::string_view text);
SessionLog read_log(const std::string& path);
void write_log(const std::string& path, const SessionLog& log);

/// Drives one session: decoder + composer, appending every input and the
/// events it produces to the log. Single writer.
class SessionEngine {
 public:
  /// The header's lexicon_hash is set from `lexicon`.
  SessionEngine(LogHeader header, const Lexicon& lexicon);

  void block_start(double t, int block, Variant variant);
  void block_end(double t, int block, Variant variant);
  void phrase_start(double t, int block, int index, Variant variant,
                    std::string phrase);
  void phrase_end(double t);
  void touch(TouchPhase phase, double x, double y, double t);
  /// Returns false (and logs a rejection) when the word is not shown.
  bool commit(const std::string& word, double t);
  /// Returns false for a no-op delete on an empty buffer.
  bool delete_keystroke(double t);
  void skip(double t, std::string phrase, std::string reason);

  /// Dispatches an input event. Derived events throw Error{malformed_log}.
  void apply(const Event& input);

  const SessionLog& log() const { return log_; }
  const std::vector<PhraseResult>& results() const { return results_; }
  const Composer& composer() const { return composer_; }
  const Decoder& decoder() const { return decoder_; }
  Variant variant() const { return variant_; }
  bool in_phrase() const { return in_phrase_; }

 private:
  void stamp(double t);
  void set_variant(Variant v);
  void sync_word_tail();
  void push(Event e) { log_.events.push_back(std::move(e)); }

  const Lexicon* lexicon_;
  SessionLog log_;
  Variant variant_ = Variant::conventional;
  Decoder decoder_;
  Composer composer_;
  double last_t_ = 0.0;
  bool started_ = false;

  bool in_phrase_ = false;
  PhraseResult current_;
  std::optional<double> first_touch_;
  std::optional<double> last_commit_;
  std::vector<PhraseResult> results_;
};

/// Re-runs the engine over the log's inputs. Throws Error{replay_mismatch}
/// naming the first event that differs from the recomputation (or a header
/// lexicon hash that differs from `lexicon`).
std::vector<PhraseResult> replay(const SessionLog& log, const Lexicon& lexicon);

// --- study plans ---------------------------------------------------------

/// One lowercase phrase per line; blank lines skipped.
std::vector<std::string> read_phrase_set(const std::string& path);

/// n phrases drawn uniformly without replacement, deterministic in seed.
/// Throws Error{insufficient_phrases} when n exceeds the set.
std::vector<std::string> sample_phrases(std::span<const std::string> phrases,
                                        std::size_t n, std::uint64_t seed);

/// Row participant_index mod 3 of the Latin square whose rows are the
/// successive left rotations of `variants`.
std::array<Variant, 3> counterbalance(const std::array<Variant, 3>& variants,
                                      std::size_t participant_index);

struct StudyPlan {
  std::string participant_id = "p00";
  std::size_t participant_index = 0;
  /// Explicit order; empty means counterbalance(kAllVariants, index).
  std::vector<Variant> variants;
  int blocks_per_variant = 4;
  int phrases_per_block = 5;
  std::string phrase_set;
  double practice_duration_s = 180.0;
  std::uint64_t seed = 1;

  std::vector<Variant> variant_order() const;
};

/// Relative phrase_set paths resolve against base_dir.
StudyPlan study_plan_from_json(const nlohmann::json& j,
                               const std::string& base_dir = "");
nlohmann::json to_json(const StudyPlan& plan);

struct PlannedPhrase {
  Variant variant = Variant::conventional;
  int block = 1;
  int index = 0;
  std::string phrase;
};

/// Phrases for every variant, block and slot. Each variant samples its own
/// blocks x phrases_per_block phrases without replacement.
std::vector<PlannedPhrase> expand_plan(const StudyPlan& plan,
                                       std::span<const std::string> phrases);

}  // namespace t9g
