#include "t9g/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "t9g/error.hpp"

namespace t9g {

namespace {

constexpr double kTol = 1e-9;

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Liang-Barsky: does segment a-b touch the closed rectangle r?
bool segment_hits(Point a, Point b, const Rect& r) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - (r.left - kTol), (r.right + kTol) - a.x,
                       a.y - (r.top - kTol), (r.bottom + kTol) - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

bool leg_clear(Point a, Point b, Digit from, Digit to,
               const KeyboardGeometry& g, double fraction) {
  for (Digit d = 1; d <= 9; ++d) {
    if (d == from || d == to) continue;
    if (segment_hits(a, b, g.key_core(d, fraction))) return false;
  }
  return true;
}

// Grid-line points (key edges crossed with key edges or centre lines) that
// lie outside every core.
std::vector<Point> detour_points(const KeyboardGeometry& g, double fraction) {
  std::vector<double> xs, ys;
  for (Digit d : {1, 2, 3}) {
    const Rect r = g.key_rect(d);
    xs.insert(xs.end(), {r.left, r.center().x, r.right});
  }
  for (Digit d : {1, 4, 7}) {
    const Rect r = g.key_rect(d);
    ys.insert(ys.end(), {r.top, r.center().y, r.bottom});
  }
  std::vector<Point> out;
  for (double y : ys) {
    for (double x : xs) {
      const Point p{x, y};
      if (!g.core_key_at(p, fraction)) out.push_back(p);
    }
  }
  return out;
}

class PathBuilder {
 public:
  PathBuilder(const SimParams& p, double t0, Point start)
      : speed_mm_per_ms_(p.speed_mm_s / 1000.0),
        step_(p.step_mm()),
        period_(p.sample_period_ms()),
        t_(t0),
        at_(start) {
    samples_.push_back({start.x, start.y, t0});
  }

  void line_to(Point to) {
    const double len = distance(at_, to);
    if (len == 0.0) return;
    const auto n = static_cast<int>(std::max(1.0, std::ceil(len / step_ - kTol)));
    const double dt = len / n / speed_mm_per_ms_;
    const Point from = at_;
    for (int k = 1; k <= n; ++k) {
      const double f = static_cast<double>(k) / n;
      t_ += dt;
      samples_.push_back(
          {from.x + (to.x - from.x) * f, from.y + (to.y - from.y) * f, t_});
    }
    if (to.x != from.x) last_sign_[0] = to.x > from.x ? 1 : -1;
    if (to.y != from.y) last_sign_[1] = to.y > from.y ? 1 : -1;
    at_ = to;
  }

  void hold(double ms) {
    if (ms <= 0.0) return;
    const auto n = static_cast<int>(std::max(1.0, std::ceil(ms / period_ - kTol)));
    const double dt = ms / n;
    for (int k = 1; k <= n; ++k) {
      t_ += dt;
      samples_.push_back({at_.x, at_.y, t_});
    }
  }

  Point at() const { return at_; }
  int last_sign(Axis a) const { return last_sign_[a == Axis::x ? 0 : 1]; }
  GestureTrace take() { return std::move(samples_); }

 private:
  double speed_mm_per_ms_;
  double step_;
  double period_;
  double t_;
  Point at_;
  int last_sign_[2] = {0, 0};
  GestureTrace samples_;
};

// Travel from the current key centre to another key centre.
void travel(PathBuilder& b, Digit from, Digit to, const KeyboardGeometry& g,
            double fraction) {
  const auto pts = route(from, to, g, fraction);
  for (std::size_t i = 1; i < pts.size(); ++i) b.line_to(pts[i]);
}

// In-key zigzag about the current point with exactly `flips` reversals.
// The first stroke continues the direction the finger was already moving
// along the axis so the approach adds no reversal of its own.
void zigzag(PathBuilder& b, Axis axis, double amplitude, int flips) {
  const Point c = b.at();
  const int s = b.last_sign(axis) == 0 ? 1 : b.last_sign(axis);
  const auto offset = [&](double d) {
    return axis == Axis::x ? Point{c.x + d, c.y} : Point{c.x, c.y + d};
  };
  for (int k = 1; k <= flips; ++k) {
    const double sign = (k % 2 == 1) ? s : -s;
    b.line_to(offset(sign * amplitude));
  }
  b.line_to(c);
}

double min_piece(double len, double step) {
  return len / std::max(1.0, std::ceil(len / step - kTol));
}

void add_noise(GestureTrace& trace, double sigma, Rng* rng) {
  if (sigma <= 0.0 || rng == nullptr) return;
  for (auto& s : trace) {
    s.x += sigma * rng->normal();
    s.y += sigma * rng->normal();
  }
}

}  // namespace

void SimParams::validate(const KeyboardGeometry& geometry,
                         const DecoderConfig& decoder) const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::invalid_config, what);
  };
  if (!(sampling_rate_hz > 0.0)) fail("sampling_rate_hz must be > 0");
  if (!(speed_mm_s > 0.0)) fail("speed_mm_s must be > 0");
  for (double s : block_speeds_mm_s) {
    if (!(s > 0.0)) fail("block speeds must be > 0");
  }
  if (!(noise_sigma_mm >= 0.0)) fail("noise_sigma_mm must be >= 0");
  const double half_key =
      std::min(geometry.key_width(), geometry.key_height()) / 2.0;
  if (!(wiggle_amplitude_mm > decoder.jitter_epsilon)) {
    fail("wiggle_amplitude_mm must exceed the decoder jitter_epsilon");
  }
  if (!(wiggle_amplitude_mm < half_key)) {
    fail("wiggle_amplitude_mm must stay inside the key");
  }
  if (!(lift_gap_ms >= 0.0 && select_delay_ms >= 0.0 && word_gap_ms >= 0.0 &&
        think_ms >= 0.0 && phrase_gap_ms >= 0.0)) {
    fail("timing gaps must be >= 0");
  }
}

SimParams sim_params_from_json(const nlohmann::json& j) {
  SimParams p;
  try {
    p.sampling_rate_hz = j.value("sampling_rate_hz", p.sampling_rate_hz);
    p.speed_mm_s = j.value("speed_mm_s", p.speed_mm_s);
    p.noise_sigma_mm = j.value("noise_sigma_mm", p.noise_sigma_mm);
    p.wiggle_amplitude_mm = j.value("wiggle_amplitude_mm", p.wiggle_amplitude_mm);
    const auto axis = j.value("wiggle_axis", std::string("x"));
    if (axis != "x" && axis != "y") {
      throw Error(ErrorCode::invalid_config, "wiggle_axis must be x or y");
    }
    p.wiggle_axis = axis == "x" ? Axis::x : Axis::y;
    const auto emu = j.value("dwell_emulation", std::string("lift-retap"));
    if (emu != "lift-retap" && emu != "dwell") {
      throw Error(ErrorCode::invalid_config,
                  "dwell_emulation must be lift-retap or dwell");
    }
    p.dwell_emulation =
        emu == "dwell" ? RepeatEmulation::dwell : RepeatEmulation::lift_retap;
    p.seed = j.value("seed", p.seed);
    p.block_speeds_mm_s = j.value("block_speeds_mm_s", p.block_speeds_mm_s);
    p.lift_gap_ms = j.value("lift_gap_ms", p.lift_gap_ms);
    p.select_delay_ms = j.value("select_delay_ms", p.select_delay_ms);
    p.word_gap_ms = j.value("word_gap_ms", p.word_gap_ms);
    p.think_ms = j.value("think_ms", p.think_ms);
    p.phrase_gap_ms = j.value("phrase_gap_ms", p.phrase_gap_ms);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config,
                std::string("bad simulation parameters: ") + e.what());
  }
  return p;
}

nlohmann::json to_json(const SimParams& p) {
  return {{"sampling_rate_hz", p.sampling_rate_hz},
          {"speed_mm_s", p.speed_mm_s},
          {"noise_sigma_mm", p.noise_sigma_mm},
          {"wiggle_amplitude_mm", p.wiggle_amplitude_mm},
          {"wiggle_axis", p.wiggle_axis == Axis::x ? "x" : "y"},
          {"dwell_emulation",
           p.dwell_emulation == RepeatEmulation::dwell ? "dwell" : "lift-retap"},
          {"seed", p.seed},
          {"block_speeds_mm_s", p.block_speeds_mm_s},
          {"lift_gap_ms", p.lift_gap_ms},
          {"select_delay_ms", p.select_delay_ms},
          {"word_gap_ms", p.word_gap_ms},
          {"think_ms", p.think_ms},
          {"phrase_gap_ms", p.phrase_gap_ms}};
}

std::vector<Point> route(Digit from, Digit to, const KeyboardGeometry& g,
                         double fraction) {
  const Point a = g.key_center(from);
  const Point b = g.key_center(to);
  if (from == to || leg_clear(a, b, from, to, g, fraction)) return {a, b};

  // Dijkstra over the visibility graph of detour points.
  std::vector<Point> nodes{a, b};
  for (const Point& q : detour_points(g, fraction)) nodes.push_back(q);
  const std::size_t n = nodes.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(n, n);
  std::vector<bool> done(n, false);
  dist[0] = 0.0;
  for (;;) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && (u == n || dist[i] < dist[u])) u = i;
    }
    if (u == n || std::isinf(dist[u]) || u == 1) break;
    done[u] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double d = dist[u] + distance(nodes[u], nodes[v]);
      if (d + kTol < dist[v] && leg_clear(nodes[u], nodes[v], from, to, g, fraction)) {
        dist[v] = d;
        prev[v] = u;
      }
    }
  }
  if (std::isinf(dist[1])) {
    throw Error(ErrorCode::invalid_config,
                "no stroke route from key " + std::to_string(from) +
                    " to key " + std::to_string(to));
  }
  std::vector<Point> path;
  for (std::size_t v = 1; v != n; v = prev[v]) path.push_back(nodes[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

std::size_t expected_gesture_count(std::span<const Digit> code, Variant variant,
                                   RepeatEmulation emulation) {
  if (variant == Variant::conventional &&
      emulation == RepeatEmulation::lift_retap) {
    return 1 + adjacent_repeat_count(code);
  }
  return 1;
}

std::vector<GestureTrace> synthesize_traces(std::string_view word,
                                            Variant variant,
                                            const KeyboardGeometry& g,
                                            const SimParams& params,
                                            const DecoderConfig& decoder,
                                            Rng* noise, double t0) {
  params.validate(g, decoder);
  const KeySequence code = code_of(word);
  if (code.empty()) {
    throw Error(ErrorCode::invalid_word, "cannot synthesize an empty word");
  }
  const double fraction = decoder.entry_core_fraction;
  std::vector<GestureTrace> traces;

  switch (variant) {
    case Variant::conventional: {
      if (params.dwell_emulation == RepeatEmulation::lift_retap) {
        double t = t0;
        std::size_t i = 0;
        while (i < code.size()) {
          PathBuilder b(params, t, g.key_center(code[i]));
          std::size_t j = i + 1;
          for (; j < code.size() && code[j] != code[j - 1]; ++j) {
            travel(b, code[j - 1], code[j], g, fraction);
          }
          traces.push_back(b.take());
          t = traces.back().back().t + params.lift_gap_ms;
          i = j;
        }
      } else {
        PathBuilder b(params, t0, g.key_center(code[0]));
        for (std::size_t i = 0; i < code.size();) {
          std::size_t run = 1;
          while (i + run < code.size() && code[i + run] == code[i]) ++run;
          if (run > 1) {
            // Repeats fire every dwell_repeat_ms after key entry; stop half a
            // period short of the next one.
            b.hold(static_cast<double>(run - 1) * decoder.dwell_repeat_ms +
                   decoder.dwell_repeat_ms / 2.0);
          }
          if (i + run < code.size()) {
            travel(b, code[i], code[i + run], g, fraction);
          }
          i += run;
        }
        traces.push_back(b.take());
      }
      break;
    }
    case Variant::enhanced_key1: {
      KeySequence keys{code[0]};
      for (std::size_t i = 1; i < code.size(); ++i) {
        keys.push_back(code[i] == code[i - 1] && keys.back() != 1 ? 1 : code[i]);
      }
      PathBuilder b(params, t0, g.key_center(keys[0]));
      for (std::size_t i = 1; i < keys.size(); ++i) {
        travel(b, keys[i - 1], keys[i], g, fraction);
      }
      traces.push_back(b.take());
      break;
    }
    case Variant::wiggle: {
      const double step = params.step_mm();
      const double amp = params.wiggle_amplitude_mm;
      if (std::min(min_piece(amp, step), min_piece(2.0 * amp, step)) <
          decoder.jitter_epsilon) {
        throw Error(ErrorCode::invalid_config,
                    "sampling step too fine for the decoder jitter_epsilon");
      }
      PathBuilder b(params, t0, g.key_center(code[0]));
      for (std::size_t i = 1; i < code.size(); ++i) {
        if (code[i] == code[i - 1]) {
          zigzag(b, params.wiggle_axis, amp, decoder.direction_change_threshold);
        } else {
          travel(b, code[i - 1], code[i], g, fraction);
        }
      }
      traces.push_back(b.take());
      break;
    }
  }

  if (variant == Variant::conventional && decoder.dwell_repeat &&
      params.dwell_emulation == RepeatEmulation::lift_retap) {
    // Crossing a key must not look like a dwell.
    const double diag = std::hypot(g.key_width(), g.key_height());
    if (diag / params.speed_mm_s * 1000.0 >= decoder.dwell_repeat_ms) {
      throw Error(ErrorCode::invalid_config,
                  "stroke speed too slow: key crossings would trigger "
                  "dwell repeats");
    }
  }
  for (auto& trace : traces) add_noise(trace, params.noise_sigma_mm, noise);
  return traces;
}

NoiseTrial noise_trial(std::span<const std::string> words, Variant variant,
                       const KeyboardGeometry& geometry,
                       const SimParams& params, const DecoderConfig& decoder) {
  DecoderConfig cfg = decoder;
  cfg.variant = variant;
  Rng rng(params.seed);
  NoiseTrial out;
  for (const auto& w : words) {
    const KeySequence code = code_of(w);
    const auto traces =
        synthesize_traces(w, variant, geometry, params, cfg, &rng);
    const auto emissions = decode_word(traces, geometry, cfg);
    std::size_t wiggles = 0;
    for (const auto& e : emissions) wiggles += e.cause == Cause::wiggle_repeat;
    const std::size_t intended = adjacent_repeat_count(code);
    const std::size_t expected = variant == Variant::wiggle ? intended : 0;
    ++out.words;
    out.intended_repeats += intended;
    if (wiggles > expected) out.spurious_wiggles += wiggles - expected;
    if (wiggles < expected) out.missed_wiggles += expected - wiggles;
    bool ok = false;
    try {
      ok = normalize_sequence(std::span<const KeystrokeEmission>(emissions)) == code;
    } catch (const Error&) {
    }
    out.exact += ok;
  }
  return out;
}

void feed_trace(SessionEngine& engine, const GestureTrace& trace) {
  if (trace.empty()) {
    throw Error(ErrorCode::malformed_trace, "empty gesture trace");
  }
  const auto& first = trace.front();
  engine.touch(TouchPhase::down, first.x, first.y, first.t);
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    engine.touch(TouchPhase::move, trace[i].x, trace[i].y, trace[i].t);
  }
  const auto& last = trace.back();
  engine.touch(TouchPhase::up, last.x, last.y, last.t);
}

SessionLog simulate_session(const StudyPlan& plan, const SimParams& params,
                            std::span<const std::string> phrase_set,
                            const Lexicon& lexicon, LogHeader header) {
  params.validate(header.geometry, header.decoder);
  const auto planned = expand_plan(plan, phrase_set);
  if (header.participant.empty()) header.participant = plan.participant_id;
  if (header.device.empty()) header.device = "simulator";
  SessionEngine engine(header, lexicon);
  Rng noise(params.seed);
  const KeyboardGeometry geometry = header.geometry;
  const DecoderConfig decoder = header.decoder;
  const CandidateOptions options = header.candidates;

  double t = 0.0;
  std::optional<std::pair<Variant, int>> open_block;
  for (const auto& pp : planned) {
    if (!open_block || *open_block != std::pair{pp.variant, pp.block}) {
      if (open_block) {
        engine.block_end(t, open_block->second, open_block->first);
      }
      engine.block_start(t, pp.block, pp.variant);
      open_block = std::pair{pp.variant, pp.block};
    }

    SimParams p = params;
    if (!params.block_speeds_mm_s.empty()) {
      const auto idx = static_cast<std::size_t>(pp.block - 1);
      p.speed_mm_s = params.block_speeds_mm_s.at(
          std::min(idx, params.block_speeds_mm_s.size() - 1));
    }

    const auto words = split_words(pp.phrase);
    std::string reason;
    for (const auto& w : words) {
      if (!lexicon.contains(w)) {
        reason = "unsynthesizable: '" + w + "' not in lexicon";
        break;
      }
      const auto shown = words_of(candidates(code_of(w), lexicon, options));
      if (std::find(shown.begin(), shown.end(), w) == shown.end()) {
        reason = "unsynthesizable: '" + w + "' not among shown candidates";
        break;
      }
    }
    if (words.empty()) reason = "unsynthesizable: empty phrase";
    if (!reason.empty()) {
      engine.skip(t, pp.phrase, reason);
      continue;
    }

    engine.phrase_start(t, pp.block, pp.index, pp.variant, pp.phrase);
    t += p.think_ms;
    double last_commit = t;
    for (const auto& w : words) {
      const auto traces =
          synthesize_traces(w, pp.variant, geometry, p, decoder, &noise, t);
      for (const auto& trace : traces) {
        feed_trace(engine, trace);
        t = trace.back().t + p.lift_gap_ms;
      }
      t = traces.back().back().t + p.select_delay_ms;
      engine.commit(w, t);
      last_commit = t;
      t += p.word_gap_ms;
    }
    engine.phrase_end(last_commit);
    t = last_commit + p.phrase_gap_ms;
  }
  if (open_block) engine.block_end(t, open_block->second, open_block->first);
  return engine.log();
}

}  // namespace t9g
