#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fluency/corruption.hpp"

namespace fluency {

struct IngestSettings {
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 25;
  bool reject_latin = true;
  // Extra junk ranges ("U+2022", "U+2600-U+26FF"), on top of the defaults.
  std::vector<std::string> extra_junk;
  // 0 means every sentence not claimed by validation or test.
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

enum class TokenizerRegime { kWord, kBpe };

struct TokenizerSettings {
  TokenizerRegime regime = TokenizerRegime::kWord;
  std::size_t merges = 4000;
};

struct LmSettings {
  std::string kind = "kn";  // kn | rnn | unigram
  std::size_t order = 5;
  double discount = 0.75;
  std::size_t unk_min_count = 2;
  double smoothing_k = 1.0;  // for the SLOR unigram model
  std::size_t embedding_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t epochs = 10;
  double learning_rate = 0.001;
  std::size_t batch_size = 16;
  std::size_t patience = 2;
};

struct CorruptSettings {
  std::size_t total = 0;  // 0 means the whole test split
  LabelProportions proportions = kDefaultProportions;
};

struct ScoreSettings {
  bool mean_logp_baseline = false;
  std::size_t threads = 1;
};

// Declarative description of one end-to-end run. Loaded from an INI-style
// file with [run] [paths] [ingest] [tokenizer] [lm] [corrupt] [score]
// sections; any key may be overridden on the command line.
struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
  IngestSettings ingest;
  TokenizerSettings tokenizer;
  LmSettings lm;
  CorruptSettings corrupt;
  ScoreSettings score;

  // Throws UsageError for unknown keys or malformed values.
  static PipelineConfig load(const std::filesystem::path& path);

  // Canonical key=value listing of every setting except paths.
  std::string canonical() const;
  // short_digest(canonical()); paths do not contribute.
  std::string hash() const;

  // Checks settings and that corpus_dir exists. Throws UsageError/DataError.
  void validate() const;
};

}  // namespace fluency
