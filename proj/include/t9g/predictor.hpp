#pragma once

// Unigram candidate generation for ambiguous key codes and the per-session
// word composer.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "t9g/layout.hpp"

namespace t9g {

struct LexiconEntry {
  std::string word;
  std::uint64_t count = 0;

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

struct LexiconLoadReport {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
};

/// Word -> frequency table with a code index. Immutable after construction.
class Lexicon {
 public:
  Lexicon() = default;

  /// Words are lowercased; a word outside a-z throws Error{invalid_word}.
  /// Repeated words keep the first count.
  explicit Lexicon(std::vector<LexiconEntry> entries);

  /// Reads `word<TAB>count` lines. Lines that fail validation are skipped
  /// and counted in the report. Throws Error{io} if the file can't be read.
  static Lexicon load(const std::string& path,
                      LexiconLoadReport* report = nullptr);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::string_view word) const;
  std::optional<std::uint64_t> frequency(std::string_view word) const;

  /// Sorted by word.
  const std::vector<LexiconEntry>& entries() const { return entries_; }

  /// Entries whose code is exactly `code`, best first.
  std::vector<const LexiconEntry*> exact(std::span<const Digit> code) const;

  /// Entries whose code strictly extends `code`, best first.
  std::vector<const LexiconEntry*> completions(
      std::span<const Digit> code,
      std::size_t limit = std::numeric_limits<std::size_t>::max()) const;

  /// FNV-1a over the canonical `word\tcount\n` listing, as 16 hex digits.
  std::string hash() const;

 private:
  std::vector<LexiconEntry> entries_;
  // Code string -> entry indices, ranked.
  std::map<std::string, std::vector<std::size_t>, std::less<>> index_;
};

/// Frequency-descending, ties broken lexicographically.
bool ranks_before(const LexiconEntry& a, const LexiconEntry& b);

enum class Origin { exact_code, prefix_completion };

std::string_view to_string(Origin o);

struct Candidate {
  std::string word;
  Origin origin = Origin::exact_code;
  std::uint64_t count = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

using CandidateList = std::vector<Candidate>;

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

struct CandidateOptions {
  std::size_t k = 5;
  bool prefix_completions = true;

  friend bool operator==(const CandidateOptions&,
                         const CandidateOptions&) = default;
};

/// Top-k words for a code: exact matches first, then words whose code
/// strictly extends it. Throws Error{empty_code} for an empty code and
/// Error{invalid_word} for a digit outside 2-9.
CandidateList candidates(std::span<const Digit> code, const Lexicon& lexicon,
                         const CandidateOptions& options = {});

std::vector<std::string> words_of(const CandidateList& list);

/// Composes one phrase: a buffer of uncommitted keystrokes plus the immutable
/// committed text. Single writer.
class Composer {
 public:
  Composer(const Lexicon& lexicon, CandidateOptions options);

  /// Appends a decoded digit. Digit 1 duplicates the last buffered digit;
  /// with an empty buffer that throws Error{normalization}.
  void enter(Digit digit);

  /// Removes the last uncommitted keystroke. Returns false (a no-op) on an
  /// empty buffer; committed words are never touched. Every call is counted.
  bool delete_keystroke();

  /// Throws Error{invalid_selection} if `word` is not in the shown list.
  void commit(std::string_view word);

  /// Clears buffer, text and counters for a new phrase.
  void reset();

  const KeySequence& buffer() const { return buffer_; }
  const CandidateList& shown() const { return shown_; }
  const std::string& transcription() const { return text_; }
  const std::vector<std::string>& committed_words() const { return words_; }
  /// Buffer contents at each commit.
  const std::vector<KeySequence>& committed_codes() const { return codes_; }
  std::size_t delete_count() const { return deletes_; }
  const CandidateOptions& options() const { return options_; }

 private:
  void refresh();

  const Lexicon* lexicon_;
  CandidateOptions options_;
  KeySequence buffer_;
  CandidateList shown_;
  std::string text_;
  std::vector<std::string> words_;
  std::vector<KeySequence> codes_;
  std::size_t deletes_ = 0;
};

}  // namespace t9g
