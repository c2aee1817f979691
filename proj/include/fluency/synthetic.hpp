#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fluency {

struct SyntheticCorpusOptions {
  std::size_t sentences = 10000;
  std::uint64_t seed = 1;
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 25;
};

// Generates distinct sentences of a small verb-final toy language written in
// Devanagari: noun phrases with gender agreement on adjectives and verbs,
// case postpositions, verb-specific object preferences and Zipfian word
// frequencies. Deterministic in the seed.
std::vector<std::string> generate_synthetic_corpus(const SyntheticCorpusOptions& options);

}  // namespace fluency
