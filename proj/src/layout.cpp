#include "t9g/layout.hpp"

#include <cctype>
#include <fstream>

#include "t9g/error.hpp"

namespace t9g {

namespace {

constexpr std::array<std::string_view, 10> kLetters = {
    "", "", "abc", "def", "ghi", "jkl", "mno", "pqrs", "tuv", "wxyz"};

void check_digit(Digit d) {
  if (d < 1 || d > 9) {
    throw Error(ErrorCode::invalid_word,
                "key digit out of range: " + std::to_string(d));
  }
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_word: return "invalid-word";
    case ErrorCode::undefined_fraction: return "undefined-fraction";
    case ErrorCode::malformed_trace: return "malformed-trace";
    case ErrorCode::normalization: return "normalization";
    case ErrorCode::empty_code: return "empty-code";
    case ErrorCode::invalid_selection: return "invalid-selection";
    case ErrorCode::invalid_duration: return "invalid-duration";
    case ErrorCode::undefined_kspc: return "undefined-kspc";
    case ErrorCode::invalid_target: return "invalid-target";
    case ErrorCode::unnormalized_sequence: return "unnormalized-sequence";
    case ErrorCode::undefined_rate: return "undefined-rate";
    case ErrorCode::insufficient_phrases: return "insufficient-phrases";
    case ErrorCode::replay_mismatch: return "replay-mismatch";
    case ErrorCode::malformed_log: return "malformed-log";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

KeyboardGeometry::KeyboardGeometry(double width_mm, double height_mm,
                                   double gap_mm)
    : width_(width_mm), height_(height_mm), gap_(gap_mm) {
  if (!(width_mm > 0.0) || !(height_mm > 0.0) || !(gap_mm >= 0.0) ||
      key_width() <= 0.0 || key_height() <= 0.0) {
    throw Error(ErrorCode::invalid_config, "invalid keyboard geometry");
  }
}

Rect KeyboardGeometry::key_rect(Digit d) const {
  check_digit(d);
  const int row = (d - 1) / kCols;
  const int col = (d - 1) % kCols;
  const double kw = key_width();
  const double kh = key_height();
  const double left = col * (kw + gap_);
  const double top = row * (kh + gap_);
  return {left, top, left + kw, top + kh};
}

Rect KeyboardGeometry::key_core(Digit d, double fraction) const {
  const Rect r = key_rect(d);
  const Point c = r.center();
  const double hw = r.width() * fraction / 2.0;
  const double hh = r.height() * fraction / 2.0;
  return {c.x - hw, c.y - hh, c.x + hw, c.y + hh};
}

std::optional<Digit> KeyboardGeometry::key_at(Point p) const {
  for (Digit d = 1; d <= 9; ++d) {
    if (key_rect(d).contains(p)) return d;
  }
  return std::nullopt;
}

std::optional<Digit> KeyboardGeometry::core_key_at(Point p,
                                                   double fraction) const {
  for (Digit d = 1; d <= 9; ++d) {
    if (key_core(d, fraction).contains(p)) return d;
  }
  return std::nullopt;
}

std::string_view letters_of(Digit d) {
  check_digit(d);
  return kLetters[static_cast<std::size_t>(d)];
}

std::optional<Digit> digit_of(char letter) {
  for (Digit d = 2; d <= 9; ++d) {
    if (kLetters[static_cast<std::size_t>(d)].find(letter) !=
        std::string_view::npos) {
      return d;
    }
  }
  return std::nullopt;
}

KeySequence code_of(std::string_view word) {
  KeySequence code;
  code.reserve(word.size());
  for (char c : word) {
    const auto lower =
        static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto d = (lower >= 'a' && lower <= 'z') ? digit_of(lower)
                                                  : std::optional<Digit>{};
    if (!d) {
      throw Error(ErrorCode::invalid_word,
                  "invalid word '" + std::string(word) + "'");
    }
    code.push_back(*d);
  }
  return code;
}

bool has_adjacent_repeat(std::span<const Digit> code) {
  return adjacent_repeat_count(code) > 0;
}

std::size_t adjacent_repeat_count(std::span<const Digit> code) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < code.size(); ++i) {
    if (code[i] == code[i - 1]) ++n;
  }
  return n;
}

std::string to_string(std::span<const Digit> code) {
  std::string s;
  s.reserve(code.size());
  for (Digit d : code) s.push_back(static_cast<char>('0' + d));
  return s;
}

KeySequence parse_code(std::string_view digits) {
  KeySequence code;
  for (char c : digits) {
    if (c < '1' || c > '9') {
      throw Error(ErrorCode::invalid_word,
                  "invalid key code '" + std::string(digits) + "'");
    }
    code.push_back(c - '0');
  }
  return code;
}

SameKeyStats consecutive_same_key_stats(std::span<const std::string> words) {
  if (words.empty()) {
    throw Error(ErrorCode::undefined_fraction,
                "same-key fraction is undefined for an empty word list");
  }
  SameKeyStats s;
  s.total = words.size();
  for (const auto& w : words) {
    if (has_adjacent_repeat(code_of(w))) ++s.affected;
  }
  s.fraction = static_cast<double>(s.affected) / static_cast<double>(s.total);
  return s;
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read word list: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w;
    for (char c : line) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        w.push_back(
            static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

nlohmann::json to_json(const KeyboardGeometry& g) {
  nlohmann::json letters = nlohmann::json::object();
  for (Digit d = 1; d <= 9; ++d) {
    letters[std::to_string(d)] = std::string(letters_of(d));
  }
  return {{"width_mm", g.width()},
          {"height_mm", g.height()},
          {"gap_mm", g.gap()},
          {"rows", kRows},
          {"cols", kCols},
          {"letters", letters}};
}

KeyboardGeometry geometry_from_json(const nlohmann::json& j) {
  try {
    if (j.value("rows", kRows) != kRows || j.value("cols", kCols) != kCols) {
      throw Error(ErrorCode::invalid_config, "only 3x3 layouts are supported");
    }
    if (j.contains("letters")) {
      for (Digit d = 1; d <= 9; ++d) {
        if (j.at("letters").at(std::to_string(d)).get<std::string>() !=
            letters_of(d)) {
          throw Error(ErrorCode::invalid_config,
                      "letter map differs from the standard T9 map");
        }
      }
    }
    return KeyboardGeometry(j.value("width_mm", kDefaultWidthMm),
                            j.value("height_mm", kDefaultHeightMm),
                            j.value("gap_mm", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config,
                std::string("bad geometry document: ") + e.what());
  }
}

}  // namespace t9g
