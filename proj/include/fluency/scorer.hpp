#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fluency/bpe.hpp"
#include "fluency/corpus.hpp"
#include "fluency/language_model.hpp"
#include "fluency/text_io.hpp"
#include "fluency/unigram.hpp"

namespace fluency {

// SLOR with its decomposition:
//   slor = (lm_log_prob - unigram_log_prob) / length
// where length counts surface tokens (or subword pieces for WPSLOR) and
// lm_log_prob includes the end-of-sentence prediction for conditional models.
struct FluencyScore {
  std::string sentence_id;
  double slor = 0.0;
  double lm_log_prob = 0.0;
  double unigram_log_prob = 0.0;
  std::size_t length = 0;
  // Per surface token (lm, unigram) log-probabilities; the end-of-sentence
  // term, when present, is not listed.
  std::vector<std::pair<double, double>> token_level;
  bool floored = false;
};

// (lm_log_prob - unigram_log_prob) / length.
double slor_value(double lm_log_prob, double unigram_log_prob, std::size_t length);

struct ScoreOptions {
  bool token_level = false;
};

FluencyScore slor(const LanguageModel& lm, const UnigramModel& unigram,
                  const Sentence& sentence, const ScoreOptions& options = {});

// SLOR over the BPE piece sequence of the sentence. lm and unigram must be
// trained on text encoded with the same BPE model.
FluencyScore wpslor(const LanguageModel& lm, const UnigramModel& unigram, const BpeModel& bpe,
                    const Sentence& sentence, const ScoreOptions& options = {});

// ln PM(S) / |S|.
double mean_log_prob_value(double lm_log_prob, std::size_t length);
double mean_log_prob(const LanguageModel& lm, const Sentence& sentence);

enum class ScoreKind { kSlor, kMeanLogProb };

struct BatchScoreOptions {
  ScoreKind kind = ScoreKind::kSlor;
  const BpeModel* bpe = nullptr;  // set for WPSLOR
  std::size_t threads = 1;
};

// Scores every sentence; output order follows input order regardless of the
// thread count. For kMeanLogProb the slor field holds ln PM(S) / |S|.
std::vector<FluencyScore> score_sentences(const LanguageModel& lm, const UnigramModel& unigram,
                                          std::span<const Sentence> sentences,
                                          const BatchScoreOptions& options);

// Tab-separated report: metadata lines, a column header, then
// id slor lm_logp uni_logp len floored with 9 significant digits.
std::string render_scores(std::span<const FluencyScore> scores, ScoreKind kind,
                          const std::optional<Provenance>& provenance);
std::vector<FluencyScore> read_scores(const std::filesystem::path& path);

}  // namespace fluency
