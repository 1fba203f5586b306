#pragma once

// Streaming touch decoder for the three T9 gesture variants.
//
// A key is registered when a sample lands in its core (the key rectangle
// shrunk about its centre by DecoderConfig::entry_core_fraction). The key
// stays current until the core of a different key is reached, so a stroke
// that only clips the edge of a neighbouring key emits nothing for it.
// Dwell and wiggle detection use the full rectangle of the current key.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "t9g/layout.hpp"

namespace t9g {

enum class Variant { conventional, enhanced_key1, wiggle };

inline constexpr std::array<Variant, 3> kAllVariants = {
    Variant::conventional, Variant::enhanced_key1, Variant::wiggle};

enum class Cause {
  initial_contact,
  key_entry,
  dwell_repeat,
  lift_retap,
  wiggle_repeat,
  key1_duplicate,
};

std::string_view to_string(Variant v);
std::string_view to_string(Cause c);
/// Accepts "conventional", "enhanced-key-1", "wiggle" and the single-letter
/// aliases A, B, C.
Variant variant_from_string(std::string_view s);
Cause cause_from_string(std::string_view s);

struct TouchSample {
  double x = 0.0;  // mm
  double y = 0.0;  // mm
  double t = 0.0;  // ms

  Point point() const { return {x, y}; }
  friend bool operator==(const TouchSample&, const TouchSample&) = default;
};

/// One touch-down ... touch-up stroke; the first sample is the touch-down
/// point and the last the lift point.
using GestureTrace = std::vector<TouchSample>;

struct KeystrokeEmission {
  Digit digit = 0;
  Cause cause = Cause::initial_contact;
  double t = 0.0;

  friend bool operator==(const KeystrokeEmission&,
                         const KeystrokeEmission&) = default;
};

enum class Axis { x, y };

struct DecoderConfig {
  Variant variant = Variant::conventional;
  double dwell_repeat_ms = 500.0;
  bool dwell_repeat = true;
  int direction_change_threshold = 3;
  double jitter_epsilon = 0.5;
  double entry_core_fraction = 0.6;

  /// Throws Error{invalid_config}.
  void validate() const;

  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

/// Variant is not serialized; it travels with each phrase in a session log.
nlohmann::json to_json(const DecoderConfig& c);
DecoderConfig decoder_config_from_json(const nlohmann::json& j,
                                       DecoderConfig base = {});

enum class TouchPhase { down, move, up };

struct TouchEvent {
  TouchPhase phase = TouchPhase::move;
  TouchSample sample;
};

struct FeedResult {
  std::vector<KeystrokeEmission> emissions;
  /// Key 1 was entered under enhanced-key-1 with nothing to duplicate.
  bool key1_without_predecessor = false;
};

/// Per-session decoder state. Not shareable mid-trace.
///
/// The decoder remembers the last digit of the word being composed so key 1
/// (enhanced-key-1) and lift-retap know what they repeat. Callers that edit
/// the word outside the decoder (deletes, commits) resync it with
/// set_word_tail() or begin_word().
class Decoder {
 public:
  Decoder(KeyboardGeometry geometry, DecoderConfig config);

  /// Throws Error{malformed_trace} when time runs backwards or the
  /// down/move/up order is broken.
  FeedResult feed(const TouchEvent& event);

  void begin_word();
  void set_word_tail(std::optional<Digit> tail) { word_tail_ = tail; }
  std::optional<Digit> word_tail() const { return word_tail_; }

  bool in_trace() const { return in_trace_; }
  std::optional<Digit> current_key() const { return current_key_; }
  const DecoderConfig& config() const { return config_; }
  const KeyboardGeometry& geometry() const { return geometry_; }

 private:
  void process(const TouchSample& s, FeedResult& out);
  void enter_key(Digit key, Point at, double t, FeedResult& out);
  void emit(Digit digit, Cause cause, double t, FeedResult& out);
  void track_wiggle(Point p, double t, FeedResult& out);
  void reset_in_key_state();

  KeyboardGeometry geometry_;
  DecoderConfig config_;

  bool in_trace_ = false;
  bool registered_in_trace_ = false;
  double last_t_ = 0.0;
  std::optional<Digit> current_key_;
  std::optional<Digit> word_tail_;

  std::optional<double> dwell_anchor_;
  std::optional<Point> prev_in_key_;
  std::array<int, 2> last_sign_{0, 0};
  std::array<int, 2> flips_{0, 0};
};

/// Batch fold of Decoder::feed over one trace, starting a fresh word.
std::vector<KeystrokeEmission> decode_trace(const GestureTrace& trace,
                                            const KeyboardGeometry& geometry,
                                            const DecoderConfig& config);

/// Decodes several traces that make up one word attempt.
std::vector<KeystrokeEmission> decode_word(std::span<const GestureTrace> traces,
                                           const KeyboardGeometry& geometry,
                                           const DecoderConfig& config);

/// Replaces every key-1 duplicate with the digit before it. Throws
/// Error{normalization} when a key-1 entry has no predecessor.
KeySequence normalize_sequence(std::span<const Digit> raw);
KeySequence normalize_sequence(std::span<const KeystrokeEmission> emissions);

}  // namespace t9g
