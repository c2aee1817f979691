#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fluency/language_model.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

struct KneserNeyOptions {
  std::size_t order = 3;
  double discount = 0.75;
  // Training tokens seen fewer times than this become <unk>.
  std::size_t unk_min_count = 2;
};

// Interpolated Kneser-Ney n-gram model with one absolute discount shared by
// all orders. The highest order uses raw counts, lower orders use
// continuation counts (number of distinct left neighbours) and the recursion
// bottoms out in the uniform distribution over the vocabulary. Sentences are
// padded with order-1 begin markers and one end marker.
class KneserNeyModel final : public LanguageModel {
 public:
  static constexpr std::string_view kFormat = "kn v1";

  static KneserNeyModel train(std::span<const TokenSequence> corpus,
                              const KneserNeyOptions& options);

  std::string_view kind() const override { return "kn"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  bool predicts_end_of_sentence() const override { return true; }
  TokenLogProbs token_log_probs(std::span<const std::string> tokens) const override;
  std::vector<double> next_distribution(std::span<const std::string> prefix) const override;
  std::string serialize() const override;

  // P(word | context). Only the last order-1 ids of context are used; shorter
  // contexts are left-padded with the begin marker.
  double probability(std::span<const TokenId> context, TokenId word) const;

  std::size_t order() const { return order_; }
  double discount() const { return discount_; }

  void set_provenance(const Provenance& p) { meta_ = meta_line(p); }

  static KneserNeyModel parse(std::string_view text);

 private:
  using Key = std::vector<TokenId>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct ContextStats {
    std::uint64_t total = 0;     // sum of counts over continuations
    std::uint64_t distinct = 0;  // number of continuations with nonzero count
  };

  void index_contexts();
  std::vector<TokenId> padded_context(std::span<const TokenId> context) const;
  // Probability at a given level; context holds exactly level-1 ids.
  double level_probability(std::size_t level, std::span<const TokenId> context,
                           TokenId word) const;

  std::size_t order_ = 0;
  double discount_ = 0.0;
  std::size_t min_count_ = 1;
  Vocabulary vocab_;
  // counts_[k-1]: k-gram -> raw count (k == order) or continuation count.
  std::vector<std::unordered_map<Key, std::uint64_t, KeyHash>> counts_;
  // contexts_[k-1]: (k-1)-gram -> stats over counts_[k-1].
  std::vector<std::unordered_map<Key, ContextStats, KeyHash>> contexts_;
  std::string meta_;
};

}  // namespace fluency
