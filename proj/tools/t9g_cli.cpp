// t9g: command-line front end for the T9 gesture toolkit.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "t9g/decoder.hpp"
#include "t9g/error.hpp"
#include "t9g/layout.hpp"
#include "t9g/metrics.hpp"
#include "t9g/predictor.hpp"
#include "t9g/protocol.hpp"
#include "t9g/session.hpp"
#include "t9g/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace t9g;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::io, "cannot write " + path);
}

std::string data_file(const char* name) {
#ifdef T9G_DATA_DIR
  const fs::path p = fs::path(T9G_DATA_DIR) / name;
  if (fs::exists(p)) return p.string();
#endif
  (void)name;
  return "";
}

// Settings shared by several subcommands: defaults, then the params file
// (simulate only), then --config.
struct Settings {
  std::string config_path;
  std::string lexicon_path;
  std::string phrases_path;
  LogHeader header;

  void merge(const json& j) {
    if (j.contains("geometry")) header.geometry = geometry_from_json(j.at("geometry"));
    if (j.contains("decoder")) {
      header.decoder = decoder_config_from_json(j.at("decoder"), header.decoder);
    }
    if (j.contains("candidates")) {
      const auto& c = j.at("candidates");
      try {
        header.candidates.k = c.value("k", header.candidates.k);
        header.candidates.prefix_completions =
            c.value("prefix_completions", header.candidates.prefix_completions);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("candidates: ") + e.what());
      }
    }
    if (lexicon_path.empty() && j.contains("lexicon")) {
      lexicon_path = j.at("lexicon").get<std::string>();
    }
    if (phrases_path.empty() && j.contains("phrases")) {
      phrases_path = j.at("phrases").get<std::string>();
    }
  }

  void load_config() {
    if (!config_path.empty()) merge(read_json(config_path));
    header.decoder.validate();
    if (header.candidates.k == 0) {
      throw Error(ErrorCode::invalid_config, "candidate count k must be >= 1");
    }
  }

  std::string lexicon_file() const {
    if (!lexicon_path.empty()) return lexicon_path;
    if (const char* env = std::getenv("T9G_LEXICON"); env && *env) return env;
    const auto fallback = data_file("lexicon_en_20k.tsv");
    if (fallback.empty()) {
      throw Error(ErrorCode::invalid_config,
                  "no lexicon: pass --lexicon or set T9G_LEXICON");
    }
    return fallback;
  }

  Lexicon lexicon() const {
    LexiconLoadReport report;
    const auto path = lexicon_file();
    Lexicon lex = Lexicon::load(path, &report);
    if (report.skipped > 0) {
      std::cerr << "t9g: warning: skipped " << report.skipped
                << " malformed lexicon lines in " << path << "\n";
    }
    return lex;
  }
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_config:
      return 2;
    case ErrorCode::io:
      return 3;
    case ErrorCode::malformed_log:
      return 4;
    case ErrorCode::replay_mismatch:
      return 5;
    default:
      return 1;
  }
}

std::string fraction_text(const SameKeyStats& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu/%zu (%.1f%%)", s.affected, s.total,
                100.0 * s.fraction);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"T9 gesture typing toolkit"};
  app.require_subcommand(1);
  Settings settings;
  app.add_option("--config", settings.config_path,
                 "JSON with geometry/decoder/candidates/lexicon/phrases overrides")
      ->check(CLI::ExistingFile);

  auto* encode = app.add_subcommand("encode", "print the T9 code of a word");
  std::string word;
  encode->add_option("word", word)->required();

  auto* cands = app.add_subcommand("candidates", "ranked candidates for a code");
  std::string code_text;
  std::size_t k = 0;
  bool no_prefix = false;
  cands->add_option("code", code_text)->required();
  cands->add_option("--lexicon", settings.lexicon_path);
  cands->add_option("-k", k, "list size (default 5)")->check(CLI::PositiveNumber);
  cands->add_flag("--no-prefix", no_prefix, "exact-code matches only");

  auto* dolch = app.add_subcommand("dolch-stats", "share of words with a same-key pair");
  std::vector<std::string> word_files;
  dolch->add_option("--words", word_files)->required()->check(CLI::ExistingFile);

  auto* simulate = app.add_subcommand("simulate", "synthesize a session log");
  std::string plan_path, params_path, out_path;
  simulate->add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("--params", params_path)->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path)->required();
  simulate->add_option("--lexicon", settings.lexicon_path);
  simulate->add_option("--phrases", settings.phrases_path);

  auto* replay_cmd = app.add_subcommand("replay", "verify a log replays exactly");
  std::string log_path;
  replay_cmd->add_option("log", log_path)->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--lexicon", settings.lexicon_path);

  auto* analyze = app.add_subcommand("analyze", "metrics over session logs");
  std::vector<std::string> log_paths;
  std::string csv_path;
  analyze->add_option("logs", log_paths)->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", out_path);
  analyze->add_option("--csv", csv_path);
  analyze->add_option("--lexicon", settings.lexicon_path);

  auto* serve = app.add_subcommand("serve", "serve the study-client protocol over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve->add_option("--host", host);
  serve->add_option("--lexicon", settings.lexicon_path);
  serve->add_option("--phrases", settings.phrases_path);

  auto* sweep = app.add_subcommand("sweep", "decode accuracy under positional noise");
  std::vector<double> sigmas{0.0, 0.05, 0.1, 0.15, 0.25, 0.5};
  std::size_t sweep_words = 1000;
  std::uint64_t sweep_seed = 1;
  sweep->add_option("--sigmas", sigmas)->delimiter(',');
  sweep->add_option("--words", sweep_words)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed);
  sweep->add_option("--lexicon", settings.lexicon_path);

  app.add_subcommand("layout", "print the keyboard geometry document");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) {
      std::cout << to_string(code_of(word)) << "\n";
      return 0;
    }
    if (*dolch) {
      std::string line;
      for (const auto& f : word_files) {
        if (!line.empty()) line += "  ";
        line += fraction_text(consecutive_same_key_stats(read_word_list(f)));
      }
      std::cout << line << "\n";
      return 0;
    }

    if (*simulate && !params_path.empty()) settings.merge(read_json(params_path));
    settings.load_config();

    if (app.got_subcommand("layout")) {
      std::cout << to_json(settings.header.geometry).dump(2) << "\n";
      return 0;
    }
    if (*cands) {
      CandidateOptions opt = settings.header.candidates;
      if (k > 0) opt.k = k;
      if (no_prefix) opt.prefix_completions = false;
      const Lexicon lex = settings.lexicon();
      for (const auto& c : candidates(parse_code(code_text), lex, opt)) {
        std::cout << c.word << "\t" << c.count << "\t" << to_string(c.origin) << "\n";
      }
      return 0;
    }
    if (*simulate) {
      const SimParams params =
          params_path.empty() ? SimParams{} : sim_params_from_json(read_json(params_path));
      const StudyPlan plan = study_plan_from_json(
          read_json(plan_path), fs::path(plan_path).parent_path().string());
      std::string phrases = settings.phrases_path;
      if (phrases.empty()) phrases = plan.phrase_set;
      if (phrases.empty()) phrases = data_file("phrases.txt");
      if (phrases.empty()) {
        throw Error(ErrorCode::invalid_config, "no phrase set: pass --phrases");
      }
      const auto phrase_set = read_phrase_set(phrases);
      const Lexicon lex = settings.lexicon();
      const SessionLog log =
          simulate_session(plan, params, phrase_set, lex, settings.header);
      write_log(out_path, log);
      std::size_t skips = 0;
      for (const auto& e : log.events) skips += std::holds_alternative<event::Skip>(e);
      std::cout << "wrote " << log.events.size() << " events to " << out_path;
      if (skips > 0) std::cout << " (" << skips << " phrases skipped)";
      std::cout << "\n";
      return 0;
    }
    if (*replay_cmd) {
      const Lexicon lex = settings.lexicon();
      const auto results = replay(read_log(log_path), lex);
      std::cout << "ok: " << results.size() << " phrases replayed without mismatch\n";
      return 0;
    }
    if (*analyze) {
      const Lexicon lex = settings.lexicon();
      std::vector<std::future<std::vector<PhraseResult>>> jobs;
      for (const auto& p : log_paths) {
        jobs.push_back(std::async(std::launch::async,
                                  [&lex, p] { return replay(read_log(p), lex); }));
      }
      std::vector<PhraseResult> all;
      std::string failure;
      ErrorCode failure_code = ErrorCode::io;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
          auto r = jobs[i].get();
          all.insert(all.end(), r.begin(), r.end());
        } catch (const Error& e) {
          if (failure.empty()) {
            failure = log_paths[i] + ": " + e.what();
            failure_code = e.code();
          }
        }
      }
      if (!failure.empty()) throw Error(failure_code, failure);
      const MetricsReport report = build_report(all);
      if (!out_path.empty()) write_text(out_path, to_json(report).dump(2) + "\n");
      if (!csv_path.empty()) write_text(csv_path, to_csv(report));
      const auto num = [](const std::optional<double>& v) {
        char buf[32];
        if (!v) return std::string("-");
        std::snprintf(buf, sizeof buf, "%.3f", *v);
        return std::string(buf);
      };
      std::printf("%-16s %5s %8s %8s %8s %6s\n", "variant", "block", "wpm", "kspc",
                  "wer", "errors");
      for (const auto& [key, a] : report.per_block) {
        std::printf("%-16s %5d %8s %8s %8s %6zu\n",
                    std::string(to_string(key.first)).c_str(), key.second,
                    num(a.wpm).c_str(), num(a.kspc).c_str(), num(a.wer).c_str(),
                    a.errors.total());
      }
      return 0;
    }
    if (*serve) {
      const Lexicon lex = settings.lexicon();
      std::string phrases = settings.phrases_path;
      if (phrases.empty()) phrases = data_file("phrases.txt");
      if (phrases.empty()) {
        throw Error(ErrorCode::invalid_config, "no phrase set: pass --phrases");
      }
      LogHeader header = settings.header;
      StudyServer server(lex, header, read_phrase_set(phrases));
      std::cerr << "t9g: serving on http://" << host << ":" << port << "\n";
      serve_http(server, host, port);
      return 0;
    }
    if (*sweep) {
      const Lexicon lex = settings.lexicon();
      std::vector<const LexiconEntry*> ranked;
      for (const auto& e : lex.entries()) ranked.push_back(&e);
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](auto* a, auto* b) { return ranks_before(*a, *b); });
      std::vector<std::string> words;
      for (std::size_t i = 0; i < ranked.size() && i < sweep_words; ++i) {
        words.push_back(ranked[i]->word);
      }
      std::cout << "sigma_mm,variant,words,accuracy,spurious_wiggles,missed_wiggles\n";
      for (double sigma : sigmas) {
        for (Variant v : kAllVariants) {
          SimParams p;
          p.noise_sigma_mm = sigma;
          p.seed = sweep_seed;
          const NoiseTrial r =
              noise_trial(words, v, settings.header.geometry, p, settings.header.decoder);
          std::printf("%.3f,%s,%zu,%.4f,%zu,%zu\n", sigma,
                      std::string(to_string(v)).c_str(), r.words, r.accuracy(),
                      r.spurious_wiggles, r.missed_wiggles);
        }
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "t9g: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "t9g: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
