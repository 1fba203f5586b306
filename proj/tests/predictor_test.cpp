#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"
#include "t9g/error.hpp"
#include "t9g/predictor.hpp"

using namespace t9g;

namespace {

Lexicon small(std::initializer_list<LexiconEntry> e) { return Lexicon(std::vector<LexiconEntry>(e)); }

// Full scan: exact matches then strict extensions, each frequency-descending.
std::vector<std::string> brute(const KeySequence& code, const std::vector<LexiconEntry>& entries,
                               const CandidateOptions& opt) {
  std::vector<LexiconEntry> exact, ext;
  for (const auto& e : entries) {
    const auto c = code_of(e.word);
    if (c == code) {
      exact.push_back(e);
    } else if (opt.prefix_completions && c.size() > code.size() &&
               std::equal(code.begin(), code.end(), c.begin())) {
      ext.push_back(e);
    }
  }
  const auto order = [](const LexiconEntry& a, const LexiconEntry& b) {
    return a.count != b.count ? a.count > b.count : a.word < b.word;
  };
  std::sort(exact.begin(), exact.end(), order);
  std::sort(ext.begin(), ext.end(), order);
  std::vector<std::string> out;
  for (const auto& e : exact) out.push_back(e.word);
  for (const auto& e : ext) out.push_back(e.word);
  if (out.size() > opt.k) out.resize(opt.k);
  return out;
}

}  // namespace

TEST_CASE("candidates: examples") {
  CHECK(words_of(candidates(code_of("apple"), test::big_lexicon())).front() == "apple");

  const auto lex = small({{"in", 9000}, {"go", 5000}, {"ho", 10}});
  const auto list = candidates(KeySequence{4, 6}, lex);
  CHECK(words_of(list) == std::vector<std::string>{"in", "go", "ho"});
  for (const auto& c : list) CHECK(c.origin == Origin::exact_code);

  CHECK(candidates(KeySequence{2}, Lexicon{}).empty());
}

TEST_CASE("candidates: exact before prefix, ties lexicographic") {
  const auto lex = small({{"go", 5}, {"in", 5}, {"good", 1000}, {"home", 900}, {"gone", 900}});
  const auto list = candidates(KeySequence{4, 6}, lex, {10, true});
  CHECK(words_of(list) == std::vector<std::string>{"go", "in", "good", "gone", "home"});
  CHECK(list[0].origin == Origin::exact_code);
  CHECK(list[2].origin == Origin::prefix_completion);
  CHECK(words_of(candidates(KeySequence{4, 6}, lex, {10, false})) ==
        std::vector<std::string>{"go", "in"});
  CHECK(candidates(KeySequence{4, 6}, lex, {1, true}).size() == 1);
}

TEST_CASE("candidates: errors") {
  const auto& lex = test::big_lexicon();
  CHECK_THROWS_AS(candidates(KeySequence{}, lex), Error);
  try {
    candidates(KeySequence{}, lex);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_code);
  }
  CHECK_THROWS_AS(candidates(KeySequence{2}, lex, {0, true}), Error);
  CHECK_THROWS_AS(candidates(KeySequence{2, 1}, lex), Error);
}

TEST_CASE("candidates agree with a brute-force scan") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 5), letter(0, 25), count(0, 50), kdist(1, 8);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<LexiconEntry> entries;
    const int n = 1 + trial % 40;
    for (int i = 0; i < n; ++i) {
      std::string w;
      for (int j = len(rng); j > 0; --j) w += static_cast<char>('a' + letter(rng) % 9);
      entries.push_back({w, static_cast<std::uint64_t>(count(rng))});
    }
    const Lexicon lex(entries);
    std::vector<LexiconEntry> unique;
    for (const auto& e : entries) {
      if (std::none_of(unique.begin(), unique.end(), [&](auto& u) { return u.word == e.word; })) {
        unique.push_back(e);
      }
    }
    for (int q = 0; q < 10; ++q) {
      KeySequence code;
      for (int j = 1 + q % 3; j > 0; --j) code.push_back(2 + letter(rng) % 3);
      const CandidateOptions opt{static_cast<std::size_t>(kdist(rng)), q % 2 == 0};
      REQUIRE(words_of(candidates(code, lex, opt)) == brute(code, unique, opt));
    }
  }
}

TEST_CASE("every lexicon word is among its own exact candidates") {
  const auto& lex = test::big_lexicon();
  for (const auto& e : lex.entries()) {
    const auto w = words_of(candidates(code_of(e.word), lex, {kUnlimited, false}));
    REQUIRE(std::find(w.begin(), w.end(), e.word) != w.end());
  }
}

TEST_CASE("ranking ignores insertion order") {
  std::vector<LexiconEntry> entries(test::big_lexicon().entries().begin(),
                                    test::big_lexicon().entries().begin() + 3000);
  const Lexicon a(entries);
  std::mt19937_64 rng(5);
  std::shuffle(entries.begin(), entries.end(), rng);
  const Lexicon b(entries);
  CHECK(a.hash() == b.hash());
  for (const char* code : {"2", "4", "27", "843", "66", "9"}) {
    const auto c = parse_code(code);
    CHECK(candidates(c, a, {20, true}) == candidates(c, b, {20, true}));
  }
}

TEST_CASE("lexicon loading skips bad lines") {
  const auto path = std::filesystem::temp_directory_path() / "t9g_lexicon_test.tsv";
  {
    std::ofstream out(path);
    out << "apple\t100\n"
        << "Pear\t50\n"
        << "bad line\n"
        << "x1\t5\n"
        << "neg\t-3\n"
        << "apple\t7\n"
        << "plum\t\n"
        << "\n"
        << "fig\t0\n";
  }
  LexiconLoadReport report;
  const auto lex = Lexicon::load(path.string(), &report);
  CHECK(lex.size() == 3);
  CHECK(report.loaded == 3);
  CHECK(report.skipped == 5);
  CHECK(lex.frequency("apple") == 100u);
  CHECK(lex.contains("pear"));
  CHECK(lex.frequency("fig") == 0u);
  CHECK_FALSE(lex.contains("neg"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Lexicon::load("/nonexistent/lexicon.tsv"), Error);
}

TEST_CASE("composer") {
  const auto& lex = test::big_lexicon();
  Composer c(lex, {});

  SUBCASE("commit appends the word and a space") {
    for (Digit d : code_of("apple")) c.enter(d);
    c.commit("apple");
    CHECK(c.transcription() == "apple ");
    CHECK(c.buffer().empty());
    CHECK(c.committed_codes().front() == code_of("apple"));
  }
  SUBCASE("two commits") {
    for (Digit d : code_of("the")) c.enter(d);
    c.commit("the");
    for (Digit d : code_of("dog")) c.enter(d);
    c.commit("dog");
    CHECK(c.transcription() == "the dog ");
    CHECK(c.committed_words() == std::vector<std::string>{"the", "dog"});
  }
  SUBCASE("committing a word that is not shown") {
    for (Digit d : code_of("the")) c.enter(d);
    try {
      c.commit("apple");
      FAIL("expected invalid_selection");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_selection);
    }
    CHECK(c.transcription().empty());
    CHECK(c.buffer() == code_of("the"));
  }
  SUBCASE("deletes") {
    for (Digit d : {2, 7, 7}) c.enter(d);
    CHECK(c.delete_keystroke());
    CHECK(c.buffer() == KeySequence{2, 7});
    Composer e(lex, {});
    CHECK_FALSE(e.delete_keystroke());
    CHECK(e.buffer().empty());
    CHECK(e.delete_count() == 1);
    Composer f(lex, {});
    f.enter(7);
    f.delete_keystroke();
    f.enter(5);
    CHECK(f.buffer() == KeySequence{5});
  }
  SUBCASE("deletes never reach committed text") {
    for (Digit d : code_of("the")) c.enter(d);
    c.commit("the");
    CHECK_FALSE(c.delete_keystroke());
    CHECK(c.transcription() == "the ");
  }
  SUBCASE("key 1 duplicates the last digit") {
    for (Digit d : {2, 7, 1, 5, 3}) c.enter(d);
    CHECK(c.buffer() == code_of("apple"));
    CHECK(words_of(c.shown()).front() == "apple");
  }
}
