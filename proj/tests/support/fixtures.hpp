#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fluency/corpus.hpp"
#include "fluency/synthetic.hpp"
#include "fluency/tokenizer.hpp"
#include "fluency/vocabulary.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return FLUENCY_TEST_DATA; }

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::path(FLUENCY_TEST_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<fluency::TokenSequence> tokenize_all(const std::vector<std::string>& lines) {
  std::vector<fluency::TokenSequence> out;
  for (const auto& l : lines) out.push_back(fluency::whitespace_tokenize(l));
  return out;
}

inline std::vector<fluency::Sentence> sentences(const std::vector<std::string>& lines) {
  std::vector<fluency::Sentence> out;
  for (const auto& l : lines) out.push_back(fluency::Sentence::from_text(l));
  return out;
}

inline std::vector<std::string> synthetic(std::size_t n, std::uint64_t seed) {
  fluency::SyntheticCorpusOptions o;
  o.sentences = n;
  o.seed = seed;
  return fluency::generate_synthetic_corpus(o);
}

}  // namespace fixtures
