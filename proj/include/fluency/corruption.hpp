#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluency/corpus.hpp"
#include "fluency/rng.hpp"
#include "fluency/text_io.hpp"
#include "fluency/vocabulary.hpp"

namespace fluency {

enum class CorruptionOp { kMisspell, kDelete, kDuplicate, kScrambleHalf, kScrambleFull };

std::string_view op_name(CorruptionOp op);
CorruptionOp parse_op(std::string_view name);

// Recipe for one corrupted example. Level 2 holds exactly one of misspell,
// delete or duplicate; level 1 holds two misspell/delete edits or one
// scramble_half; level 0 holds scramble_full.
struct CorruptionSpec {
  int target_level = 2;
  std::vector<CorruptionOp> operations;
  std::uint64_t seed = 0;

  // Throws DataError when the operations do not match the level rules.
  void validate() const;
  std::string to_json() const;
  static CorruptionSpec from_json(std::string_view json);

  friend bool operator==(const CorruptionSpec&, const CorruptionSpec&) = default;
};

struct GradedExample {
  std::string sentence_id;
  std::string original_text;
  std::string corrupted_text;
  int label = 3;
  std::optional<CorruptionSpec> spec;  // empty for label 3
};

// Alters exactly one token of two or more characters by swapping two adjacent
// characters, dropping one or doubling one.
TokenSequence misspell(TokenSequence tokens, Rng& rng);
// Removes count tokens at distinct positions. Requires count < tokens.size().
TokenSequence delete_words(TokenSequence tokens, Rng& rng, std::size_t count);
// Repeats one token immediately after itself.
TokenSequence duplicate_word(TokenSequence tokens, Rng& rng);

enum class ScrambleScope { kHalf, kFull };
// Full: a permutation of all tokens that differs from the input. Half: one
// contiguous half permuted the same way, the other half untouched. Requires
// at least four tokens.
TokenSequence scramble(TokenSequence tokens, Rng& rng, ScrambleScope scope);

// Picks the operations for a level using a generator seeded with seed.
CorruptionSpec draw_spec(int level, std::uint64_t seed);

// Deterministic: the same tokens and spec always give the same output.
TokenSequence apply_spec(const TokenSequence& tokens, const CorruptionSpec& spec);

// Fractions for labels 0, 1, 2, 3.
using LabelProportions = std::array<double, 4>;
inline constexpr LabelProportions kDefaultProportions{0.2, 0.2, 0.2, 0.4};

// Integer label counts summing to total (largest remainder rounding; exact
// whenever total * proportion is integral).
std::array<std::size_t, 4> label_counts(std::size_t total, const LabelProportions& proportions);

// Samples total distinct source sentences and corrupts them to the label
// counts above. Example i uses spec seed = seed + i.
std::vector<GradedExample> build_graded_testset(std::span<const Sentence> fluent,
                                                std::size_t total,
                                                const LabelProportions& proportions,
                                                std::uint64_t seed);

// id <TAB> label <TAB> text <TAB> spec-json
std::string render_graded(std::span<const GradedExample> examples,
                          const std::optional<Provenance>& provenance);
std::vector<GradedExample> read_graded(const std::filesystem::path& path);

// id <TAB> score with a header row.
std::string render_ratings(std::span<const GradedExample> examples,
                           const std::optional<Provenance>& provenance);

}  // namespace fluency
