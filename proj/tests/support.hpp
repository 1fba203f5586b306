#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "t9g/decoder.hpp"
#include "t9g/layout.hpp"
#include "t9g/predictor.hpp"
#include "t9g/simulator.hpp"

namespace t9g::test {

inline std::string data(const std::string& name) {
  return std::string(T9G_DATA_DIR) + "/" + name;
}

inline const Lexicon& big_lexicon() {
  static const Lexicon lex = Lexicon::load(data("lexicon_en_20k.tsv"));
  return lex;
}

inline void line_to(GestureTrace& out, Point to, double step = 1.0) {
  const auto& last = out.back();
  const double len = std::hypot(to.x - last.x, to.y - last.y);
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  const Point at{last.x, last.y};
  double t = last.t;
  for (int k = 1; k <= n; ++k) {
    const double f = static_cast<double>(k) / n;
    t += 1.0;
    out.push_back({at.x + (to.x - at.x) * f, at.y + (to.y - at.y) * f, t});
  }
}

/// Strokes from key centre to key centre along the simulator's routes,
/// sampled every `step` mm, 1 ms apart.
inline GestureTrace through_centres(const std::vector<Digit>& keys,
                                    const KeyboardGeometry& g = {},
                                    double step = 1.0) {
  const Point start = g.key_center(keys.front());
  GestureTrace out{{start.x, start.y, 0.0}};
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const auto pts = route(keys[i - 1], keys[i], g, 0.6);
    for (std::size_t j = 1; j < pts.size(); ++j) line_to(out, pts[j], step);
  }
  return out;
}

inline std::vector<Digit> digits(const std::vector<KeystrokeEmission>& em) {
  std::vector<Digit> out;
  for (const auto& e : em) out.push_back(e.digit);
  return out;
}

}  // namespace t9g::test
