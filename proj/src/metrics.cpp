#include "t9g/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "t9g/error.hpp"

namespace t9g {

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::optional<double> mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

nlohmann::json to_json(const ErrorCounts& e) {
  return {{"insertions", e.insertions},
          {"omissions", e.omissions},
          {"substitutions", e.substitutions}};
}

nlohmann::json to_json(const Aggregate& a) {
  nlohmann::json j = {{"phrases", a.phrases},
                      {"words", a.words},
                      {"deletes", a.deletes},
                      {"wpm", opt(a.wpm)},
                      {"kspc", opt(a.kspc)},
                      {"wer", opt(a.wer)},
                      {"errors", to_json(a.errors)},
                      {"deletes_per_word", opt(a.deletes_per_word)}};
  const auto per_word = [&](std::size_t n) {
    return a.words ? nlohmann::json(static_cast<double>(n) /
                                    static_cast<double>(a.words))
                   : nlohmann::json(nullptr);
  };
  j["errors_per_word"] = {{"insertions", per_word(a.errors.insertions)},
                          {"omissions", per_word(a.errors.omissions)},
                          {"substitutions", per_word(a.errors.substitutions)}};
  return j;
}

}  // namespace

nlohmann::json to_json(const PhraseResult& r) {
  nlohmann::json codes = nlohmann::json::array();
  for (const auto& c : r.entered_codes) codes.push_back(to_string(c));
  return {{"variant", to_string(r.variant)},
          {"block", r.block},
          {"index", r.index},
          {"target", r.target},
          {"transcribed", r.transcribed},
          {"duration_min", r.duration_min},
          {"gestures", r.gestures},
          {"word_selections", r.word_selections},
          {"deletes", r.deletes},
          {"entered_codes", codes}};
}

double wpm(std::size_t transcribed_chars, double minutes) {
  if (!(minutes > 0.0)) {
    throw Error(ErrorCode::invalid_duration, "WPM needs a positive duration");
  }
  if (transcribed_chars == 0) {
    throw Error(ErrorCode::undefined_rate, "WPM of an empty transcription");
  }
  return static_cast<double>(transcribed_chars - 1) / minutes / 5.0;
}

double wpm(std::string_view transcribed, double minutes) {
  return wpm(transcribed.size(), minutes);
}

double kspc(const PhraseResult& r) {
  if (r.transcribed.empty()) {
    throw Error(ErrorCode::undefined_kspc, "KSPC of an empty transcription");
  }
  return static_cast<double>(r.gestures + r.word_selections + r.deletes) /
         static_cast<double>(r.transcribed.size());
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::size_t mwd(std::span<const std::string> transcribed,
                std::span<const std::string> target) {
  std::vector<std::size_t> prev(target.size() + 1), cur(target.size() + 1);
  for (std::size_t j = 0; j <= target.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= transcribed.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= target.size(); ++j) {
      const std::size_t sub =
          prev[j - 1] + (transcribed[i - 1] == target[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[target.size()];
}

double wer(std::string_view transcribed, std::string_view target) {
  const auto p = split_words(target);
  if (p.empty()) {
    throw Error(ErrorCode::invalid_target, "WER needs a non-empty target");
  }
  const auto s = split_words(transcribed);
  return static_cast<double>(mwd(s, p)) / static_cast<double>(p.size()) *
         100.0;
}

bool is_subsequence(std::span<const Digit> entered,
                    std::span<const Digit> target) {
  std::size_t j = 0;
  for (Digit d : entered) {
    while (j < target.size() && target[j] != d) ++j;
    if (j == target.size()) return false;
    ++j;
  }
  return true;
}

ErrorCounts classify_errors(std::span<const Digit> entered,
                            std::span<const Digit> target) {
  for (Digit d : entered) {
    if (d < 2 || d > 9) {
      throw Error(ErrorCode::unnormalized_sequence,
                  "entered code must be normalized to digits 2-9");
    }
  }
  if (is_subsequence(entered, target)) return {};

  // Each cell holds (edits, insertions + omissions), minimised
  // lexicographically. Given the cell coordinates that pair fixes all three
  // counts, so no backtrace is needed.
  struct Cost {
    std::size_t edits;
    std::size_t indels;
    bool operator<(const Cost& o) const {
      return edits != o.edits ? edits < o.edits : indels < o.indels;
    }
  };
  const std::size_t n = entered.size();
  const std::size_t m = target.size();
  std::vector<std::vector<Cost>> dp(n + 1, std::vector<Cost>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) dp[i][0] = {i, i};
  for (std::size_t j = 0; j <= m; ++j) dp[0][j] = {j, j};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = entered[i - 1] == target[j - 1];
      Cost best{dp[i - 1][j - 1].edits + (same ? 0 : 1),
                dp[i - 1][j - 1].indels};
      best = std::min(best, Cost{dp[i - 1][j].edits + 1, dp[i - 1][j].indels + 1});
      best = std::min(best, Cost{dp[i][j - 1].edits + 1, dp[i][j - 1].indels + 1});
      dp[i][j] = best;
    }
  }
  const Cost c = dp[n][m];
  // insertions - omissions = n - m
  const auto diff = static_cast<long long>(n) - static_cast<long long>(m);
  ErrorCounts e;
  e.insertions = static_cast<std::size_t>(
      (static_cast<long long>(c.indels) + diff) / 2);
  e.omissions = c.indels - e.insertions;
  e.substitutions = c.edits - c.indels;
  return e;
}

ErrorCounts phrase_errors(const PhraseResult& r) {
  const auto target_words = split_words(r.target);
  ErrorCounts total;
  for (std::size_t i = 0; i < r.entered_codes.size(); ++i) {
    const KeySequence target =
        i < target_words.size() ? code_of(target_words[i]) : KeySequence{};
    total += classify_errors(r.entered_codes[i], target);
  }
  return total;
}

double deletes_per_word(std::span<const PhraseResult> results) {
  std::size_t deletes = 0;
  std::size_t words = 0;
  for (const auto& r : results) {
    deletes += r.deletes;
    words += r.word_selections;
  }
  if (words == 0) {
    throw Error(ErrorCode::undefined_rate,
                "deletes per word needs at least one committed word");
  }
  return static_cast<double>(deletes) / static_cast<double>(words);
}

std::map<Variant, std::map<int, double>> learnability(
    std::span<const PhraseResult> results) {
  std::map<Variant, std::map<int, std::vector<double>>> samples;
  for (const auto& r : results) {
    if (r.transcribed.empty() || !(r.duration_min > 0.0)) continue;
    samples[r.variant][r.block].push_back(wpm(r.transcribed, r.duration_min));
  }
  std::map<Variant, std::map<int, double>> out;
  for (const auto& [variant, blocks] : samples) {
    for (const auto& [block, xs] : blocks) out[variant][block] = *mean(xs);
  }
  return out;
}

PhraseMetrics phrase_metrics(const PhraseResult& r) {
  PhraseMetrics m;
  m.variant = r.variant;
  m.block = r.block;
  m.index = r.index;
  if (!r.transcribed.empty() && r.duration_min > 0.0) {
    m.wpm = wpm(r.transcribed, r.duration_min);
  }
  if (!r.transcribed.empty()) m.kspc = kspc(r);
  if (!split_words(r.target).empty()) m.wer = wer(r.transcribed, r.target);
  m.errors = phrase_errors(r);
  m.words = r.word_selections;
  m.deletes = r.deletes;
  if (m.words > 0) {
    m.deletes_per_word =
        static_cast<double>(m.deletes) / static_cast<double>(m.words);
  }
  return m;
}

Aggregate aggregate(std::span<const PhraseMetrics> rows) {
  Aggregate a;
  std::vector<double> wpms, kspcs, wers;
  for (const auto& r : rows) {
    ++a.phrases;
    a.words += r.words;
    a.deletes += r.deletes;
    a.errors += r.errors;
    if (r.wpm) wpms.push_back(*r.wpm);
    if (r.kspc) kspcs.push_back(*r.kspc);
    if (r.wer) wers.push_back(*r.wer);
  }
  a.wpm = mean(wpms);
  a.kspc = mean(kspcs);
  a.wer = mean(wers);
  if (a.words > 0) {
    a.deletes_per_word =
        static_cast<double>(a.deletes) / static_cast<double>(a.words);
  }
  return a;
}

MetricsReport build_report(std::span<const PhraseResult> results) {
  MetricsReport report;
  std::map<Variant, std::vector<PhraseMetrics>> by_variant;
  std::map<std::pair<Variant, int>, std::vector<PhraseMetrics>> by_block;
  for (const auto& r : results) {
    auto m = phrase_metrics(r);
    by_variant[m.variant].push_back(m);
    by_block[{m.variant, m.block}].push_back(m);
    report.phrases.push_back(std::move(m));
  }
  for (const auto& [v, rows] : by_variant) report.per_variant[v] = aggregate(rows);
  for (const auto& [k, rows] : by_block) report.per_block[k] = aggregate(rows);
  report.learnability = learnability(results);
  return report;
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json phrases = nlohmann::json::array();
  for (const auto& m : report.phrases) {
    phrases.push_back({{"variant", to_string(m.variant)},
                       {"block", m.block},
                       {"index", m.index},
                       {"wpm", opt(m.wpm)},
                       {"kspc", opt(m.kspc)},
                       {"wer", opt(m.wer)},
                       {"errors", to_json(m.errors)},
                       {"words", m.words},
                       {"deletes", m.deletes},
                       {"deletes_per_word", opt(m.deletes_per_word)}});
  }
  nlohmann::json variants = nlohmann::json::object();
  for (const auto& [v, a] : report.per_variant) {
    variants[std::string(to_string(v))] = to_json(a);
  }
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& [key, a] : report.per_block) {
    auto j = to_json(a);
    j["variant"] = to_string(key.first);
    j["block"] = key.second;
    blocks.push_back(std::move(j));
  }
  nlohmann::json learn = nlohmann::json::object();
  for (const auto& [v, series] : report.learnability) {
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [block, value] : series) s[std::to_string(block)] = value;
    learn[std::string(to_string(v))] = s;
  }
  return {{"phrases", phrases},
          {"per_variant", variants},
          {"per_block", blocks},
          {"learnability", learn}};
}

std::string to_csv(const MetricsReport& report) {
  std::string out = "variant,block,wpm,kspc,wer,ins,om,sub,deletes_per_word\n";
  for (const auto& m : report.phrases) {
    out += std::string(to_string(m.variant)) + ',' + std::to_string(m.block) +
           ',' + csv_number(m.wpm) + ',' + csv_number(m.kspc) + ',' +
           csv_number(m.wer) + ',' + std::to_string(m.errors.insertions) +
           ',' + std::to_string(m.errors.omissions) + ',' +
           std::to_string(m.errors.substitutions) + ',' +
           csv_number(m.deletes_per_word) + '\n';
  }
  return out;
}

}  // namespace t9g
