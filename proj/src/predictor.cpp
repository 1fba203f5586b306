#include "t9g/predictor.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "t9g/error.hpp"

namespace t9g {

namespace {

bool valid_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return c >= 'a' && c <= 'z';
  });
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string code_key(std::span<const Digit> code) {
  for (Digit d : code) {
    if (d < 2 || d > 9) {
      throw Error(ErrorCode::invalid_word,
                  "candidate code digits must be 2-9, got " +
                      std::to_string(d));
    }
  }
  return to_string(code);
}

}  // namespace

bool ranks_before(const LexiconEntry& a, const LexiconEntry& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.word < b.word;
}

std::string_view to_string(Origin o) {
  return o == Origin::exact_code ? "exact-code" : "prefix-completion";
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) {
  std::unordered_set<std::string> seen;
  for (auto& e : entries) {
    e.word = lowercase(e.word);
    if (!valid_word(e.word)) {
      throw Error(ErrorCode::invalid_word,
                  "invalid lexicon word '" + e.word + "'");
    }
    if (seen.insert(e.word).second) entries_.push_back(std::move(e));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.word < b.word; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    index_[to_string(code_of(entries_[i].word))].push_back(i);
  }
  for (auto& [code, ids] : index_) {
    std::sort(ids.begin(), ids.end(), [this](std::size_t a, std::size_t b) {
      return ranks_before(entries_[a], entries_[b]);
    });
  }
}

Lexicon Lexicon::load(const std::string& path, LexiconLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read lexicon: " + path);
  std::vector<LexiconEntry> entries;
  std::unordered_set<std::string> seen;
  LexiconLoadReport r;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      ++r.skipped;
      continue;
    }
    std::string word = lowercase(std::string_view(line).substr(0, tab));
    const std::string_view num = std::string_view(line).substr(tab + 1);
    std::uint64_t count = 0;
    const auto [ptr, ec] =
        std::from_chars(num.data(), num.data() + num.size(), count);
    if (!valid_word(word) || num.empty() || ec != std::errc{} ||
        ptr != num.data() + num.size() || !seen.insert(word).second) {
      ++r.skipped;
      continue;
    }
    entries.push_back({std::move(word), count});
    ++r.loaded;
  }
  if (report) *report = r;
  return Lexicon(std::move(entries));
}

bool Lexicon::contains(std::string_view word) const {
  return frequency(word).has_value();
}

std::optional<std::uint64_t> Lexicon::frequency(std::string_view word) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), word,
      [](const LexiconEntry& e, std::string_view w) { return e.word < w; });
  if (it == entries_.end() || it->word != word) return std::nullopt;
  return it->count;
}

std::vector<const LexiconEntry*> Lexicon::exact(
    std::span<const Digit> code) const {
  std::vector<const LexiconEntry*> out;
  const auto it = index_.find(code_key(code));
  if (it == index_.end()) return out;
  for (std::size_t i : it->second) out.push_back(&entries_[i]);
  return out;
}

std::vector<const LexiconEntry*> Lexicon::completions(
    std::span<const Digit> code, std::size_t limit) const {
  const std::string key = code_key(code);
  std::vector<const LexiconEntry*> out;
  for (auto it = index_.upper_bound(key);
       it != index_.end() && it->first.starts_with(key); ++it) {
    for (std::size_t i : it->second) out.push_back(&entries_[i]);
  }
  const auto by_rank = [](const LexiconEntry* a, const LexiconEntry* b) {
    return ranks_before(*a, *b);
  };
  if (limit < out.size()) {
    std::partial_sort(out.begin(), out.begin() + static_cast<long>(limit),
                      out.end(), by_rank);
    out.resize(limit);
  } else {
    std::sort(out.begin(), out.end(), by_rank);
  }
  return out;
}

std::string Lexicon::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : entries_) {
    mix(e.word);
    mix("\t");
    mix(std::to_string(e.count));
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CandidateList candidates(std::span<const Digit> code, const Lexicon& lexicon,
                         const CandidateOptions& options) {
  if (code.empty()) {
    throw Error(ErrorCode::empty_code, "candidate lookup with an empty code");
  }
  if (options.k == 0) {
    throw Error(ErrorCode::invalid_config, "candidate count k must be >= 1");
  }
  CandidateList out;
  for (const auto* e : lexicon.exact(code)) {
    if (out.size() == options.k) return out;
    out.push_back({e->word, Origin::exact_code, e->count});
  }
  if (!options.prefix_completions || out.size() == options.k) return out;
  for (const auto* e : lexicon.completions(code, options.k - out.size())) {
    out.push_back({e->word, Origin::prefix_completion, e->count});
  }
  return out;
}

std::vector<std::string> words_of(const CandidateList& list) {
  std::vector<std::string> out;
  out.reserve(list.size());
  for (const auto& c : list) out.push_back(c.word);
  return out;
}

Composer::Composer(const Lexicon& lexicon, CandidateOptions options)
    : lexicon_(&lexicon), options_(options) {
  if (options_.k == 0) {
    throw Error(ErrorCode::invalid_config, "candidate count k must be >= 1");
  }
}

void Composer::enter(Digit digit) {
  if (digit == 1) {
    if (buffer_.empty()) {
      throw Error(ErrorCode::normalization,
                  "key-1 entry with no preceding key");
    }
    buffer_.push_back(buffer_.back());
  } else if (digit >= 2 && digit <= 9) {
    buffer_.push_back(digit);
  } else {
    throw Error(ErrorCode::invalid_word,
                "keystroke digit out of range: " + std::to_string(digit));
  }
  refresh();
}

bool Composer::delete_keystroke() {
  ++deletes_;
  if (buffer_.empty()) return false;
  buffer_.pop_back();
  refresh();
  return true;
}

void Composer::commit(std::string_view word) {
  const auto it = std::find_if(shown_.begin(), shown_.end(),
                               [&](const Candidate& c) { return c.word == word; });
  if (it == shown_.end()) {
    throw Error(ErrorCode::invalid_selection,
                "'" + std::string(word) + "' is not in the candidate list");
  }
  text_ += it->word;
  text_ += ' ';
  words_.push_back(it->word);
  codes_.push_back(buffer_);
  buffer_.clear();
  shown_.clear();
}

void Composer::reset() {
  buffer_.clear();
  shown_.clear();
  text_.clear();
  words_.clear();
  codes_.clear();
  deletes_ = 0;
}

void Composer::refresh() {
  shown_ = buffer_.empty() ? CandidateList{}
                           : candidates(buffer_, *lexicon_, options_);
}

}  // namespace t9g
