#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluency/language_model.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

struct UnigramOptions {
  // Add-k smoothing constant; 0 gives maximum likelihood.
  double smoothing_k = 0.0;
  std::size_t unk_min_count = 1;
};

// Context-free token distribution p(t) = (count(t) + k) / (total + k (V + 1)),
// where the extra slot is the unknown token. Scores surface tokens only.
class UnigramModel final : public LanguageModel {
 public:
  static constexpr std::string_view kFormat = "unigram v1";

  static UnigramModel train(std::span<const TokenSequence> corpus,
                            const UnigramOptions& options);

  std::string_view kind() const override { return "unigram"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  bool predicts_end_of_sentence() const override { return false; }
  TokenLogProbs token_log_probs(std::span<const std::string> tokens) const override;
  std::vector<double> next_distribution(std::span<const std::string> prefix) const override;
  std::string serialize() const override;

  double probability(TokenId id) const { return probs_.at(id); }
  // log(probability(id)), floored.
  double log_prob(TokenId id) const { return log_probs_.at(id); }
  double unk_log_prob() const { return log_probs_[Vocabulary::kUnk]; }
  double smoothing_k() const { return k_; }

  void set_provenance(const Provenance& p) { meta_ = meta_line(p); }

  static UnigramModel parse(std::string_view text);

 private:
  void estimate();

  Vocabulary vocab_;
  double k_ = 0.0;
  std::size_t min_count_ = 1;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
  std::vector<char> floored_;
  std::string meta_;
};

}  // namespace fluency
