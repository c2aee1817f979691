#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluency/text_io.hpp"

namespace fluency {

// One cleaned text unit. tokens is always the single-space split of text and
// id is the short SHA-256 digest of text.
struct Sentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;

  // text must already be cleaned.
  static Sentence from_text(std::string text);

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Inclusive code point range.
struct CodepointRange {
  char32_t first;
  char32_t last;

  bool contains(char32_t cp) const { return cp >= first && cp <= last; }
};

// Symbols stripped by clean_text in addition to the C0/C1 control characters,
// which are always removed: bullets, arrows, stars, trademark signs, the BOM,
// the replacement character and pictographs.
std::vector<CodepointRange> default_junk_ranges();

// A-Z and a-z.
std::vector<CodepointRange> latin_letter_ranges();

// Parses "U+2022", "U+2600-U+26FF" or a single literal character.
CodepointRange parse_codepoint_range(std::string_view spec);

// Removes control characters and junk symbols, maps every whitespace run
// (spaces, tabs, newlines, Unicode spaces) to one space and trims. Throws
// DataError on invalid UTF-8.
std::string clean_text(std::string_view raw,
                       std::span<const CodepointRange> junk = default_junk_ranges());

struct FilterOptions {
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 25;
  std::vector<CodepointRange> reject_scripts;
};

// Keeps sentences whose token count lies in [min_tokens, max_tokens] and which
// contain no character from a rejected range. Order is preserved.
std::vector<Sentence> filter_sentences(std::span<const Sentence> sentences,
                                       const FilterOptions& options);

// Keeps the first occurrence of each distinct text.
std::vector<Sentence> dedupe(std::span<const Sentence> sentences);

struct CorpusSplit {
  std::vector<Sentence> train;
  std::vector<Sentence> validation;
  std::vector<Sentence> test;
  // Sentences left over when the requested sizes do not cover the input.
  std::vector<Sentence> unused;
  std::uint64_t seed = 0;
};

// Seeded Fisher-Yates shuffle followed by prefix slicing into
// train / validation / test. Throws DataError when the input is too small.
CorpusSplit split_corpus(std::span<const Sentence> sentences, std::size_t train_n,
                         std::size_t val_n, std::size_t test_n, std::uint64_t seed);

// Reads every regular file in dir (sorted by name), one candidate sentence per
// line, and returns the cleaned non-empty lines as sentences.
std::vector<Sentence> load_raw_directory(const std::filesystem::path& dir,
                                         std::span<const CodepointRange> junk);

// id <TAB> split <TAB> text, one row per sentence.
std::string render_manifest(const CorpusSplit& split,
                            const std::optional<Provenance>& provenance);

// One sentence text per line.
std::string render_sentence_lines(std::span<const Sentence> sentences,
                                  const std::optional<Provenance>& provenance);

// Loads sentences from a plain one-per-line file, a split manifest or a graded
// set file. The layout is detected from the column count of the first row.
std::vector<Sentence> read_sentences(const std::filesystem::path& path);

}  // namespace fluency
