#include "t9g/decoder.hpp"

#include <cmath>
#include <string>

#include "t9g/error.hpp"

namespace t9g {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::conventional: return "conventional";
    case Variant::enhanced_key1: return "enhanced-key-1";
    case Variant::wiggle: return "wiggle";
  }
  return "unknown";
}

std::string_view to_string(Cause c) {
  switch (c) {
    case Cause::initial_contact: return "initial-contact";
    case Cause::key_entry: return "key-entry";
    case Cause::dwell_repeat: return "dwell-repeat";
    case Cause::lift_retap: return "lift-retap";
    case Cause::wiggle_repeat: return "wiggle-repeat";
    case Cause::key1_duplicate: return "key1-duplicate";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view s) {
  if (s == "conventional" || s == "A") return Variant::conventional;
  if (s == "enhanced-key-1" || s == "B") return Variant::enhanced_key1;
  if (s == "wiggle" || s == "C") return Variant::wiggle;
  throw Error(ErrorCode::invalid_config,
              "unknown keyboard variant '" + std::string(s) + "'");
}

Cause cause_from_string(std::string_view s) {
  for (Cause c : {Cause::initial_contact, Cause::key_entry,
                  Cause::dwell_repeat, Cause::lift_retap,
                  Cause::wiggle_repeat, Cause::key1_duplicate}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::malformed_log,
              "unknown emission cause '" + std::string(s) + "'");
}

void DecoderConfig::validate() const {
  if (direction_change_threshold < 1) {
    throw Error(ErrorCode::invalid_config,
                "direction_change_threshold must be >= 1");
  }
  if (!(dwell_repeat_ms > 0.0)) {
    throw Error(ErrorCode::invalid_config, "dwell_repeat_ms must be > 0");
  }
  if (!(jitter_epsilon >= 0.0)) {
    throw Error(ErrorCode::invalid_config, "jitter_epsilon must be >= 0");
  }
  if (!(entry_core_fraction > 0.0 && entry_core_fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_config,
                "entry_core_fraction must be in (0, 1]");
  }
}

nlohmann::json to_json(const DecoderConfig& c) {
  return {{"dwell_repeat_ms", c.dwell_repeat_ms},
          {"dwell_repeat", c.dwell_repeat},
          {"direction_change_threshold", c.direction_change_threshold},
          {"jitter_epsilon", c.jitter_epsilon},
          {"entry_core_fraction", c.entry_core_fraction}};
}

DecoderConfig decoder_config_from_json(const nlohmann::json& j,
                                       DecoderConfig base) {
  try {
    if (j.contains("variant")) {
      base.variant = variant_from_string(j.at("variant").get<std::string>());
    }
    base.dwell_repeat_ms = j.value("dwell_repeat_ms", base.dwell_repeat_ms);
    base.dwell_repeat = j.value("dwell_repeat", base.dwell_repeat);
    base.direction_change_threshold =
        j.value("direction_change_threshold", base.direction_change_threshold);
    base.jitter_epsilon = j.value("jitter_epsilon", base.jitter_epsilon);
    base.entry_core_fraction =
        j.value("entry_core_fraction", base.entry_core_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config,
                std::string("bad decoder config: ") + e.what());
  }
  base.validate();
  return base;
}

Decoder::Decoder(KeyboardGeometry geometry, DecoderConfig config)
    : geometry_(geometry), config_(config) {
  config_.validate();
}

void Decoder::begin_word() { word_tail_.reset(); }

FeedResult Decoder::feed(const TouchEvent& event) {
  FeedResult out;
  switch (event.phase) {
    case TouchPhase::down:
      if (in_trace_) {
        throw Error(ErrorCode::malformed_trace,
                    "touch-down while a trace is active");
      }
      in_trace_ = true;
      registered_in_trace_ = false;
      current_key_.reset();
      reset_in_key_state();
      last_t_ = event.sample.t;
      process(event.sample, out);
      break;
    case TouchPhase::move:
      if (!in_trace_) {
        throw Error(ErrorCode::malformed_trace, "touch-move outside a trace");
      }
      process(event.sample, out);
      break;
    case TouchPhase::up:
      if (!in_trace_) {
        throw Error(ErrorCode::malformed_trace, "touch-up outside a trace");
      }
      process(event.sample, out);
      in_trace_ = false;
      current_key_.reset();
      reset_in_key_state();
      break;
  }
  return out;
}

void Decoder::reset_in_key_state() {
  dwell_anchor_.reset();
  prev_in_key_.reset();
  last_sign_ = {0, 0};
  flips_ = {0, 0};
}

void Decoder::process(const TouchSample& s, FeedResult& out) {
  if (s.t < last_t_) {
    throw Error(ErrorCode::malformed_trace,
                "timestamp went backwards (" + std::to_string(s.t) + " < " +
                    std::to_string(last_t_) + ")");
  }
  last_t_ = s.t;
  const Point p = s.point();

  const auto core = geometry_.core_key_at(p, config_.entry_core_fraction);
  if (core && core != current_key_) {
    enter_key(*core, p, s.t, out);
    return;
  }
  if (!current_key_ || !geometry_.key_rect(*current_key_).contains(p)) {
    // Off the current key: dwell and wiggle both need an unbroken stay.
    dwell_anchor_.reset();
    prev_in_key_.reset();
    return;
  }
  if (*current_key_ == 1) return;

  if (config_.variant == Variant::conventional && config_.dwell_repeat) {
    if (!dwell_anchor_) {
      dwell_anchor_ = s.t;
    } else if (s.t - *dwell_anchor_ >= config_.dwell_repeat_ms) {
      emit(*current_key_, Cause::dwell_repeat, s.t, out);
      dwell_anchor_ = s.t;
    }
  }
  if (config_.variant == Variant::wiggle) track_wiggle(p, s.t, out);
}

void Decoder::track_wiggle(Point p, double t, FeedResult& out) {
  if (prev_in_key_) {
    const std::array<double, 2> step = {p.x - prev_in_key_->x,
                                        p.y - prev_in_key_->y};
    for (std::size_t axis = 0; axis < 2; ++axis) {
      if (std::abs(step[axis]) < config_.jitter_epsilon || step[axis] == 0.0) {
        continue;
      }
      const int sign = step[axis] > 0.0 ? 1 : -1;
      if (last_sign_[axis] != 0 && sign != last_sign_[axis]) ++flips_[axis];
      last_sign_[axis] = sign;
    }
    if (flips_[0] >= config_.direction_change_threshold ||
        flips_[1] >= config_.direction_change_threshold) {
      emit(*current_key_, Cause::wiggle_repeat, t, out);
      flips_ = {0, 0};
    }
  }
  prev_in_key_ = p;
}

void Decoder::enter_key(Digit key, Point at, double t, FeedResult& out) {
  const bool first = !registered_in_trace_;
  registered_in_trace_ = true;
  current_key_ = key;
  reset_in_key_state();
  dwell_anchor_ = t;
  prev_in_key_ = at;

  if (key == 1) {
    if (config_.variant != Variant::enhanced_key1) return;
    if (!word_tail_) {
      out.key1_without_predecessor = true;
      return;
    }
    emit(1, Cause::key1_duplicate, t, out);
    return;
  }
  Cause cause = Cause::key_entry;
  if (first) {
    cause = (word_tail_ && *word_tail_ == key) ? Cause::lift_retap
                                               : Cause::initial_contact;
  }
  emit(key, cause, t, out);
}

void Decoder::emit(Digit digit, Cause cause, double t, FeedResult& out) {
  out.emissions.push_back({digit, cause, t});
  if (digit != 1) word_tail_ = digit;
}

std::vector<KeystrokeEmission> decode_trace(const GestureTrace& trace,
                                            const KeyboardGeometry& geometry,
                                            const DecoderConfig& config) {
  return decode_word(std::span<const GestureTrace>(&trace, 1), geometry,
                     config);
}

std::vector<KeystrokeEmission> decode_word(std::span<const GestureTrace> traces,
                                           const KeyboardGeometry& geometry,
                                           const DecoderConfig& config) {
  Decoder dec(geometry, config);
  std::vector<KeystrokeEmission> all;
  for (const auto& trace : traces) {
    if (trace.empty()) {
      throw Error(ErrorCode::malformed_trace, "empty gesture trace");
    }
    const auto push = [&](TouchPhase phase, const TouchSample& sample) {
      auto r = dec.feed({phase, sample});
      all.insert(all.end(), r.emissions.begin(), r.emissions.end());
    };
    push(TouchPhase::down, trace.front());
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
      push(TouchPhase::move, trace[i]);
    }
    push(TouchPhase::up, trace.back());
  }
  return all;
}

KeySequence normalize_sequence(std::span<const Digit> raw) {
  KeySequence out;
  out.reserve(raw.size());
  for (Digit d : raw) {
    if (d == 1) {
      if (out.empty()) {
        throw Error(ErrorCode::normalization,
                    "key-1 entry with no preceding key");
      }
      out.push_back(out.back());
    } else {
      out.push_back(d);
    }
  }
  return out;
}

KeySequence normalize_sequence(std::span<const KeystrokeEmission> emissions) {
  KeySequence raw;
  raw.reserve(emissions.size());
  for (const auto& e : emissions) raw.push_back(e.digit);
  return normalize_sequence(raw);
}

}  // namespace t9g
