#include "fluency/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "fluency/error.hpp"
#include "fluency/tokenizer.hpp"
#include "fluency/utf8.hpp"

namespace fluency {

namespace {

constexpr std::array<std::string_view, 5> kOpNames{"misspell", "delete", "duplicate",
                                                   "scramble_half", "scramble_full"};

bool all_equal(std::span<const std::string> tokens) {
  return std::adjacent_find(tokens.begin(), tokens.end(), std::not_equal_to<>()) ==
         tokens.end();
}

// Shuffles the range into a different sequence. Falls back to a rotation,
// which differs from the input whenever the tokens are not all equal.
void permute_non_identity(std::span<std::string> range, Rng& rng) {
  const std::vector<std::string> before(range.begin(), range.end());
  rng.shuffle(range);
  if (std::equal(range.begin(), range.end(), before.begin())) {
    std::rotate(range.begin(), range.begin() + 1, range.end());
  }
}

}  // namespace

std::string_view op_name(CorruptionOp op) { return kOpNames[static_cast<std::size_t>(op)]; }

CorruptionOp parse_op(std::string_view name) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == name) return static_cast<CorruptionOp>(i);
  }
  throw DataError("unknown corruption operation '" + std::string(name) + "'");
}

void CorruptionSpec::validate() const {
  auto count = [&](CorruptionOp op) {
    return std::count(operations.begin(), operations.end(), op);
  };
  const auto edits = count(CorruptionOp::kMisspell) + count(CorruptionOp::kDelete) +
                     count(CorruptionOp::kDuplicate);
  bool ok = false;
  switch (target_level) {
    case 2:
      ok = operations.size() == 1 && edits == 1;
      break;
    case 1:
      ok = (operations.size() == 1 && count(CorruptionOp::kScrambleHalf) == 1) ||
           (operations.size() >= 2 && edits == static_cast<long>(operations.size()));
      break;
    case 0:
      ok = count(CorruptionOp::kScrambleFull) >= 1;
      break;
    default:
      break;
  }
  if (!ok) throw DataError("corruption spec does not match level " + std::to_string(target_level));
}

std::string CorruptionSpec::to_json() const {
  nlohmann::json j;
  j["level"] = target_level;
  j["ops"] = nlohmann::json::array();
  for (auto op : operations) j["ops"].push_back(std::string(op_name(op)));
  j["seed"] = seed;
  return j.dump();
}

CorruptionSpec CorruptionSpec::from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    CorruptionSpec spec;
    spec.target_level = j.at("level").get<int>();
    for (const auto& op : j.at("ops")) spec.operations.push_back(parse_op(op.get<std::string>()));
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad corruption spec: ") + e.what());
  }
}

TokenSequence misspell(TokenSequence tokens, Rng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (utf8::length(tokens[i]) >= 2) eligible.push_back(i);
  }
  if (eligible.empty()) throw DataError("misspell: no token with two or more characters");
  const std::size_t pick = eligible[rng.below(eligible.size())];
  std::u32string word = utf8::decode(tokens[pick]);

  std::vector<std::size_t> swappable;
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (word[i] != word[i + 1]) swappable.push_back(i);
  }
  const auto kind = rng.below(3);
  if (kind == 0 && !swappable.empty()) {
    const std::size_t i = swappable[rng.below(swappable.size())];
    std::swap(word[i], word[i + 1]);
  } else if (kind == 1) {
    word.erase(rng.below(word.size()), 1);
  } else {
    const std::size_t i = rng.below(word.size());
    word.insert(word.begin() + static_cast<std::ptrdiff_t>(i), word[i]);
  }
  tokens[pick] = utf8::encode(word);
  return tokens;
}

TokenSequence delete_words(TokenSequence tokens, Rng& rng, std::size_t count) {
  if (count >= tokens.size()) {
    throw DataError("delete: cannot remove " + std::to_string(count) + " of " +
                    std::to_string(tokens.size()) + " tokens");
  }
  std::vector<std::size_t> positions(tokens.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  rng.shuffle(std::span<std::size_t>(positions));
  positions.resize(count);
  std::sort(positions.begin(), positions.end());
  for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  return tokens;
}

TokenSequence duplicate_word(TokenSequence tokens, Rng& rng) {
  if (tokens.empty()) throw DataError("duplicate: empty sentence");
  const std::size_t i = rng.below(tokens.size());
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens[i]);
  return tokens;
}

TokenSequence scramble(TokenSequence tokens, Rng& rng, ScrambleScope scope) {
  if (tokens.size() < 4) throw DataError("scramble: needs at least 4 tokens");
  std::span<std::string> all(tokens);
  if (scope == ScrambleScope::kFull) {
    if (all_equal(all)) throw DataError("scramble: all tokens identical");
    permute_non_identity(all, rng);
    return tokens;
  }
  const std::size_t half = tokens.size() / 2;
  std::span<std::string> first = all.first(half);
  std::span<std::string> second = all.subspan(half);
  const bool take_first = rng.coin(0.5);
  std::span<std::string> target = take_first ? first : second;
  if (all_equal(target)) target = take_first ? second : first;
  if (all_equal(target)) throw DataError("scramble: both halves have identical tokens");
  permute_non_identity(target, rng);
  return tokens;
}

CorruptionSpec draw_spec(int level, std::uint64_t seed) {
  Rng rng(seed);
  CorruptionSpec spec;
  spec.target_level = level;
  spec.seed = seed;
  switch (level) {
    case 2: {
      static constexpr CorruptionOp kSingle[] = {CorruptionOp::kMisspell, CorruptionOp::kDelete,
                                                 CorruptionOp::kDuplicate};
      spec.operations = {kSingle[rng.below(3)]};
      break;
    }
    case 1:
      if (rng.coin(0.5)) {
        for (int i = 0; i < 2; ++i) {
          spec.operations.push_back(rng.coin(0.5) ? CorruptionOp::kDelete
                                                  : CorruptionOp::kMisspell);
        }
      } else {
        spec.operations = {CorruptionOp::kScrambleHalf};
      }
      break;
    case 0:
      spec.operations = {CorruptionOp::kScrambleFull};
      break;
    default:
      throw UsageError("corruption level must be 0, 1 or 2");
  }
  return spec;
}

TokenSequence apply_spec(const TokenSequence& tokens, const CorruptionSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, 7));
  // Two misspellings can cancel out; retry from the advanced generator.
  for (int attempt = 0; attempt < 16; ++attempt) {
    TokenSequence out = tokens;
    for (CorruptionOp op : spec.operations) {
      switch (op) {
        case CorruptionOp::kMisspell: out = misspell(std::move(out), rng); break;
        case CorruptionOp::kDelete: out = delete_words(std::move(out), rng, 1); break;
        case CorruptionOp::kDuplicate: out = duplicate_word(std::move(out), rng); break;
        case CorruptionOp::kScrambleHalf: out = scramble(std::move(out), rng, ScrambleScope::kHalf); break;
        case CorruptionOp::kScrambleFull: out = scramble(std::move(out), rng, ScrambleScope::kFull); break;
      }
    }
    if (out != tokens) return out;
  }
  throw DataError("corruption left the sentence unchanged");
}

std::array<std::size_t, 4> label_counts(std::size_t total, const LabelProportions& proportions) {
  double sum = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0)) throw UsageError("label proportions must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw UsageError("label proportions must sum to 1");
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> remainder{};
  std::size_t assigned = 0;
  for (std::size_t l = 0; l < 4; ++l) {
    const double exact = proportions[l] * static_cast<double>(total);
    counts[l] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[l] = exact - static_cast<double>(counts[l]);
    assigned += counts[l];
  }
  while (assigned < total) {
    // Highest remainder first; ties go to the higher label.
    std::size_t best = 3;
    for (std::size_t l = 4; l-- > 0;) {
      if (remainder[l] > remainder[best]) best = l;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

std::vector<GradedExample> build_graded_testset(std::span<const Sentence> fluent,
                                                std::size_t total,
                                                const LabelProportions& proportions,
                                                std::uint64_t seed) {
  const auto counts = label_counts(total, proportions);
  std::vector<const Sentence*> sources;
  std::unordered_set<std::string_view> seen;
  for (const auto& s : fluent) {
    if (seen.insert(s.id).second) sources.push_back(&s);
  }
  if (sources.size() < total) {
    throw DataError("insufficient: have " + std::to_string(sources.size()) +
                    " distinct source sentences, need " + std::to_string(total));
  }
  Rng rng(seed);
  rng.shuffle(std::span<const Sentence*>(sources));
  std::vector<int> labels;
  for (int l = 3; l >= 0; --l) labels.insert(labels.end(), counts[static_cast<std::size_t>(l)], l);
  rng.shuffle(std::span<int>(labels));

  std::vector<GradedExample> out;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const Sentence& src = *sources[i];
    GradedExample ex;
    ex.sentence_id = src.id;
    ex.original_text = src.text;
    ex.label = labels[i];
    if (ex.label == 3) {
      ex.corrupted_text = src.text;
    } else {
      ex.spec = draw_spec(ex.label, seed + i);
      try {
        ex.corrupted_text = join_tokens(apply_spec(src.tokens, *ex.spec));
      } catch (const DataError& e) {
        throw DataError("sentence " + src.id + ": " + e.what());
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string render_graded(std::span<const GradedExample> examples,
                          const std::optional<Provenance>& provenance) {
  std::string out;
  if (provenance) out += meta_line(*provenance) + "\n";
  for (const auto& ex : examples) {
    out += ex.sentence_id + "\t" + std::to_string(ex.label) + "\t" + ex.corrupted_text + "\t" +
           (ex.spec ? ex.spec->to_json() : std::string()) + "\n";
  }
  return out;
}

std::vector<GradedExample> read_graded(const std::filesystem::path& path) {
  const auto lines = strip_meta(read_lines(path));
  std::vector<GradedExample> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 4) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": expected 4 columns");
    }
    GradedExample ex;
    ex.sentence_id = std::string(f[0]);
    ex.label = static_cast<int>(parse_int(f[1]));
    ex.corrupted_text = std::string(f[2]);
    if (!f[3].empty()) ex.spec = CorruptionSpec::from_json(f[3]);
    if (ex.label < 0 || ex.label > 3 || (ex.label == 3) == ex.spec.has_value()) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": inconsistent label/spec");
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string render_ratings(std::span<const GradedExample> examples,
                           const std::optional<Provenance>& provenance) {
  std::string out;
  if (provenance) out += meta_line(*provenance) + "\n";
  out += "id\tscore\n";
  for (const auto& ex : examples) out += ex.sentence_id + "\t" + std::to_string(ex.label) + "\n";
  return out;
}

}  // namespace fluency
