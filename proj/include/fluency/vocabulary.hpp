#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fluency {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<std::string>;

// Token <-> id map with training counts. Ids 0 and 1 are the end-of-sentence
// and unknown tokens; surface tokens follow in lexicographic order. The
// begin-of-sentence id equals size(): it can be conditioned on but is never
// predicted.
class Vocabulary {
 public:
  static constexpr TokenId kEos = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr std::string_view kEosToken = "</s>";
  static constexpr std::string_view kUnkToken = "<unk>";
  static constexpr std::string_view kBosToken = "<s>";

  // Tokens seen fewer than min_count times are folded into <unk>. The
  // end-of-sentence count is the number of sentences.
  static Vocabulary build(std::span<const TokenSequence> corpus, std::size_t min_count);

  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::uint64_t count(TokenId id) const { return counts_.at(id); }

  // Number of predictable ids (end-of-sentence, unknown, surface tokens).
  std::size_t size() const { return tokens_.size(); }
  std::size_t word_types() const { return tokens_.size() - 2; }
  TokenId bos() const { return static_cast<TokenId>(tokens_.size()); }

  // Sum of surface-token counts, the unknown bucket included.
  std::uint64_t surface_total() const { return surface_total_; }

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;

  // "vocab <n>" followed by one "token<TAB>count" line per id.
  void serialize(std::string& out) const;
  // Consumes the section written by serialize starting at lines[at].
  static Vocabulary parse(std::span<const std::string_view> lines, std::size_t& at);

 private:
  void index();

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId> ids_;
  std::uint64_t surface_total_ = 0;
};

}  // namespace fluency
