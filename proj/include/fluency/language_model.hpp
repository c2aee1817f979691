#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluency/vocabulary.hpp"

namespace fluency {

// Natural-log probabilities are floored here before use.
inline constexpr double kLogProbFloor = -50.0;

struct TokenLogProbs {
  std::vector<double> values;
  // Set when any probability fell below exp(kLogProbFloor) and was raised.
  bool floored = false;

  double total() const;
};

// Returns log(max(p, exp(kLogProbFloor))) and sets floored when raised.
double floored_log(double p, bool& floored);

// Per-token conditional log-probabilities (natural log). Conditional models
// predict every surface token and then the end of sentence; the unigram model
// scores surface tokens only.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::string_view kind() const = 0;
  virtual const Vocabulary& vocabulary() const = 0;
  virtual bool predicts_end_of_sentence() const = 0;

  virtual TokenLogProbs token_log_probs(std::span<const std::string> tokens) const = 0;

  // Distribution of the token following prefix, indexed by vocabulary id.
  virtual std::vector<double> next_distribution(std::span<const std::string> prefix) const = 0;

  virtual std::string serialize() const = 0;

  double sentence_log_prob(std::span<const std::string> tokens) const {
    return token_log_probs(tokens).total();
  }

  void save(const std::filesystem::path& path) const;
};

// exp(-(total log prob) / (total predicted tokens)).
double perplexity(const LanguageModel& model, std::span<const TokenSequence> corpus);

// Reads any model file, dispatching on its header line.
std::unique_ptr<LanguageModel> load_language_model(const std::filesystem::path& path);

}  // namespace fluency
