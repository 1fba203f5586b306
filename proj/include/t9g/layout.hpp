#pragma once

// Physical 3x3 keyboard geometry, the digit/letter map and word encoding.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace t9g {

/// A key digit, 1 through 9. Key 1 carries no letters.
using Digit = int;

/// Digit string a word maps to under the letter map.
using KeySequence = std::vector<Digit>;

/// Position on the keyboard surface in millimetres; origin at the top-left
/// corner, y grows downwards.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Rect {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  Point center() const { return {(left + right) / 2.0, (top + bottom) / 2.0}; }
  /// Closed containment: points on an edge are inside.
  bool contains(Point p) const {
    return p.x >= left && p.x <= right && p.y >= top && p.y <= bottom;
  }
};

inline constexpr double kDefaultWidthMm = 34.8;
inline constexpr double kDefaultHeightMm = 28.6;
inline constexpr int kRows = 3;
inline constexpr int kCols = 3;

/// Three rows by three columns of keys, digits 1..9 row-major. An optional
/// gap separates neighbouring keys; with zero gap the key rectangles tile the
/// whole keyboard.
class KeyboardGeometry {
 public:
  KeyboardGeometry() = default;
  KeyboardGeometry(double width_mm, double height_mm, double gap_mm = 0.0);

  double width() const { return width_; }
  double height() const { return height_; }
  double gap() const { return gap_; }
  double key_width() const { return (width_ - 2.0 * gap_) / kCols; }
  double key_height() const { return (height_ - 2.0 * gap_) / kRows; }

  Rect bounds() const { return {0.0, 0.0, width_, height_}; }
  Rect key_rect(Digit d) const;
  Point key_center(Digit d) const { return key_rect(d).center(); }

  /// Key rectangle shrunk about its centre to `fraction` of each side.
  Rect key_core(Digit d, double fraction) const;

  /// Digit whose rectangle contains p. A point on a shared edge belongs to
  /// the lower digit. Points outside the keyboard (or inside a gap) have no
  /// key.
  std::optional<Digit> key_at(Point p) const;

  /// Like key_at, but only the inner core of each key counts.
  std::optional<Digit> core_key_at(Point p, double fraction) const;

  friend bool operator==(const KeyboardGeometry&,
                         const KeyboardGeometry&) = default;

 private:
  double width_ = kDefaultWidthMm;
  double height_ = kDefaultHeightMm;
  double gap_ = 0.0;
};

/// Letters printed on a key; empty for key 1.
std::string_view letters_of(Digit d);

/// Key carrying a lowercase letter; absent for anything else.
std::optional<Digit> digit_of(char letter);

/// Per-letter digits of a word. Input is lowercased first. Throws
/// Error{invalid_word} on any character outside a-z.
KeySequence code_of(std::string_view word);

/// True when two neighbouring digits in the code are equal, i.e. the word
/// needs the same key twice in a row.
bool has_adjacent_repeat(std::span<const Digit> code);

/// Number of neighbouring equal-digit pairs.
std::size_t adjacent_repeat_count(std::span<const Digit> code);

std::string to_string(std::span<const Digit> code);

/// Parses a digit string such as "27753". Throws Error{invalid_word} on
/// non-digit input or a zero.
KeySequence parse_code(std::string_view digits);

struct SameKeyStats {
  std::size_t affected = 0;
  std::size_t total = 0;
  double fraction = 0.0;
};

/// Counts words whose code has at least one adjacent equal-digit pair.
/// Throws Error{undefined_fraction} for an empty list.
SameKeyStats consecutive_same_key_stats(std::span<const std::string> words);

/// Reads a word list, one entry per line. Entries are lowercased and reduced
/// to their letters, so "don't" becomes "dont" and "Santa Claus" becomes
/// "santaclaus". Blank lines are skipped.
std::vector<std::string> read_word_list(const std::string& path);

nlohmann::json to_json(const KeyboardGeometry& g);
KeyboardGeometry geometry_from_json(const nlohmann::json& j);

}  // namespace t9g
