#pragma once

// Synthetic gesture traces and whole synthetic sessions.
//
// Canonical traces are piecewise-linear strokes through the centres of the
// target keys. A leg that would cross the entry core of an unrelated key is
// bent through a point on the key grid lines so that only intended keys are
// registered. Repeated letters are produced the way each variant expects:
// a lift and retap (or a dwell hold) on the conventional keyboard, a detour
// through key 1 on enhanced-key-1, and an in-key zigzag on the wiggle
// keyboard.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "t9g/decoder.hpp"
#include "t9g/layout.hpp"
#include "t9g/predictor.hpp"
#include "t9g/random.hpp"
#include "t9g/session.hpp"

namespace t9g {

enum class RepeatEmulation { lift_retap, dwell };

struct SimParams {
  double sampling_rate_hz = 60.0;
  double speed_mm_s = 60.0;
  double noise_sigma_mm = 0.0;
  double wiggle_amplitude_mm = 2.0;
  Axis wiggle_axis = Axis::x;
  RepeatEmulation dwell_emulation = RepeatEmulation::lift_retap;
  std::uint64_t seed = 1;
  /// Per-block stroke speed, overriding speed_mm_s when non-empty.
  std::vector<double> block_speeds_mm_s;

  double lift_gap_ms = 200.0;
  double select_delay_ms = 400.0;
  double word_gap_ms = 300.0;
  double think_ms = 500.0;
  double phrase_gap_ms = 1000.0;

  double step_mm() const { return speed_mm_s / sampling_rate_hz; }
  double sample_period_ms() const { return 1000.0 / sampling_rate_hz; }

  /// Throws Error{invalid_config}.
  void validate(const KeyboardGeometry& geometry,
                const DecoderConfig& decoder) const;
};

SimParams sim_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimParams& p);

/// Key-centre waypoints of a path from `from` to `to` that avoids the entry
/// cores of every other key. Endpoints included.
std::vector<Point> route(Digit from, Digit to, const KeyboardGeometry& geometry,
                         double core_fraction);

/// Traces for one word, first sample at t0. Noise is drawn from `noise` when
/// noise_sigma_mm > 0. Throws Error{invalid_word} for unencodable words.
std::vector<GestureTrace> synthesize_traces(std::string_view word,
                                            Variant variant,
                                            const KeyboardGeometry& geometry,
                                            const SimParams& params,
                                            const DecoderConfig& decoder,
                                            Rng* noise = nullptr,
                                            double t0 = 0.0);

/// Number of traces an error-free entry of `code` takes: 1 + adjacent
/// repeats on the conventional keyboard with lift-retap, otherwise 1.
std::size_t expected_gesture_count(std::span<const Digit> code, Variant variant,
                                   RepeatEmulation emulation);

struct NoiseTrial {
  std::size_t words = 0;
  /// Words whose normalized decode equals their code.
  std::size_t exact = 0;
  /// Repeats the word asks for (adjacent equal digits).
  std::size_t intended_repeats = 0;
  /// Wiggle repeats beyond / short of the intended ones, summed per word.
  std::size_t spurious_wiggles = 0;
  std::size_t missed_wiggles = 0;

  double accuracy() const {
    return words == 0 ? 0.0 : static_cast<double>(exact) / words;
  }
};

/// Synthesizes and decodes every word once under `variant`, drawing noise
/// from a generator seeded with params.seed.
NoiseTrial noise_trial(std::span<const std::string> words, Variant variant,
                       const KeyboardGeometry& geometry,
                       const SimParams& params, const DecoderConfig& decoder);

/// Feeds one trace into an engine as touch-down / touch-move / touch-up.
void feed_trace(SessionEngine& engine, const GestureTrace& trace);

/// Full log of an error-free synthetic participant following the plan.
/// Phrases with a word that is missing from the lexicon, or that does not
/// appear among the shown candidates for its complete code, are logged as
/// skips.
SessionLog simulate_session(const StudyPlan& plan, const SimParams& params,
                            std::span<const std::string> phrase_set,
                            const Lexicon& lexicon, LogHeader header);

}  // namespace t9g
