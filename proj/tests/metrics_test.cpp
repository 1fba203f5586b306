#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "t9g/error.hpp"
#include "t9g/metrics.hpp"

using namespace t9g;

namespace {

PhraseResult result(std::string target, std::string transcribed, double minutes,
                    std::size_t gestures, std::size_t selections, std::size_t deletes) {
  PhraseResult r;
  r.target = std::move(target);
  r.transcribed = std::move(transcribed);
  r.duration_min = minutes;
  r.gestures = gestures;
  r.word_selections = selections;
  r.deletes = deletes;
  return r;
}

ErrorCode code_of_error(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("wpm") {
  CHECK(wpm(std::size_t{19}, 0.5) == doctest::Approx(7.2).epsilon(1e-12));
  CHECK(wpm(std::size_t{1}, 3.0) == 0.0);
  CHECK(wpm(std::size_t{51}, 2.0) == doctest::Approx(5.0));
  CHECK(wpm("hello world", 1.0) == doctest::Approx(2.0));
  CHECK(code_of_error([] { wpm(std::size_t{10}, 0.0); }) == ErrorCode::invalid_duration);
  CHECK(code_of_error([] { wpm(std::size_t{10}, -1.0); }) == ErrorCode::invalid_duration);
  CHECK(code_of_error([] { wpm(std::size_t{0}, 1.0); }) == ErrorCode::undefined_rate);
  // doubling T halves WPM exactly
  for (std::size_t n : {2u, 19u, 77u}) {
    for (double t : {0.1, 0.37, 2.5}) CHECK(wpm(n, 2.0 * t) == wpm(n, t) / 2.0);
  }
}

TEST_CASE("kspc") {
  CHECK(kspc(result("apple", "apple", 1.0, 1, 1, 0)) == doctest::Approx(0.4));
  CHECK(kspc(result("apple", "apple", 1.0, 2, 1, 0)) == doctest::Approx(0.6));
  CHECK(kspc(result("apple", "apple", 1.0, 1, 1, 3)) == doctest::Approx(1.0));
  CHECK(code_of_error([] { kspc(result("apple", "", 1.0, 1, 0, 0)); }) ==
        ErrorCode::undefined_kspc);
  auto r = result("the quick fox", "the quick fox", 1.0, 3, 3, 2);
  const double before = kspc(r);
  ++r.deletes;
  CHECK(kspc(r) - before == doctest::Approx(1.0 / 13.0).epsilon(1e-12));
}

TEST_CASE("mwd and wer") {
  const std::vector<std::string> a{"hello", "word"}, b{"hello", "world"}, none, ab{"a", "b"};
  CHECK(mwd(a, b) == 1);
  CHECK(mwd(b, b) == 0);
  CHECK(mwd(none, ab) == 2);
  CHECK(mwd(ab, none) == 2);
  CHECK(wer("hello word", "hello world") == doctest::Approx(50.0));
  CHECK(wer("the cat", "the cat") == 0.0);
  CHECK(wer("", "a b c d") == doctest::Approx(100.0));
  CHECK(code_of_error([] { wer("a", ""); }) == ErrorCode::invalid_target);
  CHECK(split_words("  a  b c ") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("mwd matches exhaustive search") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  std::uniform_int_distribution<int> len(0, 5), pick(0, 3);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> s, p;
    for (int k = len(rng); k > 0; --k) s.push_back(vocab[pick(rng)]);
    for (int k = len(rng); k > 0; --k) p.push_back(vocab[pick(rng)]);
    REQUIRE(mwd(s, p) == oracle::word_distance(s, p));
  }
}

TEST_CASE("classify_errors examples") {
  CHECK(classify_errors(KeySequence{2, 7, 5, 3}, code_of("apple")) == ErrorCounts{});
  CHECK(classify_errors(KeySequence{2, 7, 7, 7, 5, 3}, code_of("apple")) == ErrorCounts{1, 0, 0});
  CHECK(classify_errors(KeySequence{2, 7, 7, 5, 9}, code_of("apple")) == ErrorCounts{0, 0, 1});
  CHECK(classify_errors(code_of("apple"), code_of("apple")) == ErrorCounts{});
  CHECK(classify_errors(KeySequence{}, code_of("apple")) == ErrorCounts{});
  CHECK(classify_errors(KeySequence{3}, KeySequence{}) == ErrorCounts{1, 0, 0});
  CHECK(code_of_error([] { classify_errors(KeySequence{2, 1}, KeySequence{2, 2}); }) ==
        ErrorCode::unnormalized_sequence);
}

TEST_CASE("classify_errors matches brute force on short sequences") {
  const auto seqs = oracle::all_sequences({2, 7, 5}, 4);
  for (const auto& e : seqs) {
    for (const auto& t : seqs) {
      const auto got = classify_errors(e, t);
      REQUIRE(got == oracle::classify(e, t));
      const bool sub = is_subsequence(e, t);
      REQUIRE(sub == oracle::subsequence_by_masks(e, t));
      REQUIRE((got.total() == 0) == (sub || e == t));
      if (!sub) {
        std::vector<std::string> se, st;
        for (Digit d : e) se.push_back(std::to_string(d));
        for (Digit d : t) st.push_back(std::to_string(d));
        REQUIRE(got.total() == mwd(se, st));
      }
    }
  }
}

TEST_CASE("phrase errors compare per word attempt") {
  auto r = result("the apple", "the apple", 1.0, 2, 2, 0);
  r.entered_codes = {code_of("the"), KeySequence{2, 7, 7, 7, 5, 3}};
  CHECK(phrase_errors(r) == ErrorCounts{1, 0, 0});
  r.entered_codes.push_back(KeySequence{4});
  CHECK(phrase_errors(r) == ErrorCounts{2, 0, 0});
}

TEST_CASE("deletes_per_word") {
  std::vector<PhraseResult> rs{result("a", "a", 1, 1, 12, 6)};
  CHECK(deletes_per_word(rs) == doctest::Approx(0.5));
  rs = {result("a", "a", 1, 1, 5, 0), result("a", "a", 1, 1, 5, 0)};
  CHECK(deletes_per_word(rs) == 0.0);
  rs = {result("a", "a", 1, 1, 4, 9), result("a", "a", 1, 1, 6, 6)};
  CHECK(deletes_per_word(rs) == doctest::Approx(1.5));
  rs = {result("a", "", 1, 1, 0, 3)};
  CHECK(code_of_error([&] { deletes_per_word(rs); }) == ErrorCode::undefined_rate);
}

TEST_CASE("learnability") {
  std::vector<PhraseResult> rs;
  for (int b = 1; b <= 4; ++b) {
    auto r = result("hello world", "hello world", 0.5, 2, 2, 0);
    r.block = b;
    rs.push_back(r);
  }
  auto l = learnability(rs);
  REQUIRE(l[Variant::conventional].size() == 4);
  for (int b = 1; b <= 4; ++b) CHECK(l[Variant::conventional][b] == l[Variant::conventional][1]);

  rs.resize(1);
  l = learnability(rs);
  CHECK(l.size() == 1);
  CHECK(l[Variant::conventional].size() == 1);

  auto blank = result("x", "", 0.0, 0, 0, 0);
  blank.block = 3;
  rs.push_back(blank);
  CHECK(learnability(rs)[Variant::conventional].count(3) == 0);
}

TEST_CASE("aggregates equal recomputation from phrases") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> small(0, 4);
  std::uniform_real_distribution<double> minutes(0.1, 2.0);
  const std::vector<std::string> phrases{"the cat sat", "a b", "hello world again", "one"};
  std::vector<PhraseResult> rs;
  for (int i = 0; i < 60; ++i) {
    const auto& p = phrases[i % phrases.size()];
    auto r = result(p, i % 7 == 0 ? "the cat" : p, minutes(rng), 1 + small(rng),
                    1 + small(rng), small(rng));
    r.variant = kAllVariants[i % 3];
    r.block = 1 + (i / 3) % 4;
    rs.push_back(r);
  }
  const auto report = build_report(rs);
  for (Variant v : kAllVariants) {
    double w = 0.0, k = 0.0, e = 0.0;
    int n = 0;
    for (const auto& r : rs) {
      if (r.variant != v) continue;
      w += wpm(r.transcribed, r.duration_min);
      k += kspc(r);
      e += wer(r.transcribed, r.target);
      ++n;
    }
    const auto& a = report.per_variant.at(v);
    CHECK(a.phrases == static_cast<std::size_t>(n));
    CHECK(*a.wpm == doctest::Approx(w / n));
    CHECK(*a.kspc == doctest::Approx(k / n));
    CHECK(*a.wer == doctest::Approx(e / n));
  }
  const auto csv = to_csv(report);
  CHECK(csv.rfind("variant,block,wpm,kspc,wer,ins,om,sub,deletes_per_word\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
  const auto j = to_json(report);
  CHECK(j.at("phrases").size() == 60);
  CHECK(j.at("per_block").size() == 12);
}
