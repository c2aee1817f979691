#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fluency/corpus.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

// Character-level byte-pair-encoding model. Words are split into code points,
// the final symbol carries the end-of-word marker, and merges are applied in
// rank order.
class BpeModel {
 public:
  static constexpr std::string_view kEndOfWord = "</w>";
  static constexpr std::string_view kUnknown = "<unk>";
  static constexpr std::string_view kFormat = "bpe v1";

  using Merge = std::pair<std::string, std::string>;

  BpeModel() = default;

  // Greedy training: each round merges the most frequent adjacent pair, ties
  // going to the lexicographically smallest (left, right). Stops early when
  // no pair occurs at least twice.
  static BpeModel train(const std::map<std::string, std::size_t>& word_counts,
                        std::size_t num_merges);

  std::vector<std::string> encode(std::string_view word) const;
  std::vector<std::string> encode_words(std::span<const std::string> words) const;

  // Inverse of encode for one word. Throws DataError when the end-of-word
  // marker is missing from the last piece or appears anywhere else.
  std::string decode(std::span<const std::string> pieces) const;
  std::vector<std::string> decode_words(std::span<const std::string> pieces) const;

  const std::vector<Merge>& merges() const { return merges_; }
  const std::set<std::string>& vocab() const { return vocab_; }

  void set_provenance(const Provenance& p) { meta_ = meta_line(p); }

  std::string serialize() const;
  static BpeModel parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static BpeModel load(const std::filesystem::path& path);

 private:
  void index_merges();

  std::vector<Merge> merges_;
  std::set<std::string> vocab_;
  std::set<std::string> alphabet_;
  std::unordered_map<std::string, std::size_t> rank_;
  std::string meta_;
};

// Trains on the whitespace tokens of a corpus. Throws DataError when the
// corpus is empty.
BpeModel train_bpe(std::span<const Sentence> corpus, std::size_t num_merges);

}  // namespace fluency
