#pragma once

// Text-entry measures computed from replayed phrases: WPM, KSPC, WER over
// minimum word distance, the keystroke-level error taxonomy and deletes per
// word, plus per-block / per-variant aggregation.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "t9g/decoder.hpp"
#include "t9g/layout.hpp"

namespace t9g {

/// One transcribed phrase as recovered from a session log.
struct PhraseResult {
  Variant variant = Variant::conventional;
  int block = 1;
  int index = 0;  // position within the block
  std::string target;
  /// Committed words joined by single spaces, without the trailing
  /// auto-space.
  std::string transcribed;
  /// First touch-down to final commit, in minutes. Zero when the phrase has
  /// no commit.
  double duration_min = 0.0;
  std::size_t gestures = 0;
  std::size_t word_selections = 0;
  std::size_t deletes = 0;
  /// Normalized code in the buffer at each commit, in commit order.
  std::vector<KeySequence> entered_codes;

  friend bool operator==(const PhraseResult&, const PhraseResult&) = default;
};

nlohmann::json to_json(const PhraseResult& r);

struct ErrorCounts {
  std::size_t insertions = 0;
  std::size_t omissions = 0;
  std::size_t substitutions = 0;

  std::size_t total() const { return insertions + omissions + substitutions; }
  ErrorCounts& operator+=(const ErrorCounts& o) {
    insertions += o.insertions;
    omissions += o.omissions;
    substitutions += o.substitutions;
    return *this;
  }
  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

/// (|S| - 1) / T / 5 with |S| counted in characters, spaces included.
/// Throws Error{invalid_duration} for T <= 0 and Error{undefined_rate} for
/// an empty transcription.
double wpm(std::size_t transcribed_chars, double minutes);
double wpm(std::string_view transcribed, double minutes);

/// (gestures + selections + deletes) / characters of the transcription.
/// Throws Error{undefined_kspc} when nothing was transcribed.
double kspc(const PhraseResult& r);

std::vector<std::string> split_words(std::string_view text);

/// Word-level Levenshtein distance with unit costs.
std::size_t mwd(std::span<const std::string> transcribed,
                std::span<const std::string> target);

/// MWD / target word count * 100. Throws Error{invalid_target} when the
/// target has no words.
double wer(std::string_view transcribed, std::string_view target);

bool is_subsequence(std::span<const Digit> entered,
                    std::span<const Digit> target);

/// Keystroke-level insertions, omissions and substitutions of an entered
/// code against the target code. An in-order subsequence of the target is
/// error-free. Otherwise the counts come from a minimum-cost unit-edit
/// alignment; among equal-cost alignments the one with the most
/// substitutions wins, which fixes all three counts. Throws
/// Error{unnormalized_sequence} for digits outside 2-9.
ErrorCounts classify_errors(std::span<const Digit> entered,
                            std::span<const Digit> target);

/// Error counts for every committed word of a phrase against the word at
/// the same position of the target phrase (an empty code past its end).
ErrorCounts phrase_errors(const PhraseResult& r);

/// Total delete invocations / total committed words. Throws
/// Error{undefined_rate} when no word was committed.
double deletes_per_word(std::span<const PhraseResult> results);

/// Mean WPM per block for each variant. Blocks with no timed phrase are
/// absent from the map.
std::map<Variant, std::map<int, double>> learnability(
    std::span<const PhraseResult> results);

struct PhraseMetrics {
  Variant variant = Variant::conventional;
  int block = 1;
  int index = 0;
  std::optional<double> wpm;
  std::optional<double> kspc;
  std::optional<double> wer;
  ErrorCounts errors;
  std::size_t words = 0;
  std::size_t deletes = 0;
  std::optional<double> deletes_per_word;
};

struct Aggregate {
  std::size_t phrases = 0;
  std::size_t words = 0;
  std::size_t deletes = 0;
  std::optional<double> wpm;   // mean of per-phrase values
  std::optional<double> kspc;  // mean of per-phrase values
  std::optional<double> wer;   // mean of per-phrase values
  ErrorCounts errors;          // totals
  std::optional<double> deletes_per_word;  // total deletes / total words
};

struct MetricsReport {
  std::vector<PhraseMetrics> phrases;
  std::map<Variant, Aggregate> per_variant;
  std::map<std::pair<Variant, int>, Aggregate> per_block;
  std::map<Variant, std::map<int, double>> learnability;
};

PhraseMetrics phrase_metrics(const PhraseResult& r);
Aggregate aggregate(std::span<const PhraseMetrics> rows);
MetricsReport build_report(std::span<const PhraseResult> results);

nlohmann::json to_json(const MetricsReport& report);

/// One row per phrase: variant,block,wpm,kspc,wer,ins,om,sub,deletes_per_word.
std::string to_csv(const MetricsReport& report);

}  // namespace t9g
