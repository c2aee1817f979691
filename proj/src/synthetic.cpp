#include "fluency/synthetic.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "fluency/error.hpp"
#include "fluency/rng.hpp"
#include "fluency/tokenizer.hpp"
#include "fluency/utf8.hpp"

namespace fluency {

namespace {

constexpr char32_t kConsonants[] = {0x915, 0x916, 0x917, 0x918, 0x91A, 0x91C, 0x91F, 0x921,
                                    0x924, 0x926, 0x928, 0x92A, 0x92C, 0x92E, 0x92F, 0x930,
                                    0x932, 0x935, 0x938, 0x939};
// 0 means the inherent vowel (no sign).
constexpr char32_t kVowelSigns[] = {0, 0, 0x93E, 0x93F, 0x940, 0x941, 0x942, 0x947, 0x94B};

constexpr char32_t kMasculine = 0x93E;  // -aa
constexpr char32_t kFeminine = 0x940;   // -ii

struct Lexicon {
  std::vector<std::string> nouns;
  std::vector<int> noun_gender;
  std::vector<std::string> adjective_stems;
  std::vector<std::string> verb_stems;
  std::vector<std::vector<std::size_t>> verb_objects;
  std::vector<std::string> adverbs;
  std::vector<std::string> determiners;
  std::vector<std::string> subject_markers;
  std::vector<std::string> object_markers;
  std::vector<std::string> oblique_markers;
  std::vector<std::string> auxiliaries;
  std::vector<std::string> conjunctions;
};

std::string make_word(Rng& rng, std::size_t syllables) {
  std::u32string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w.push_back(kConsonants[rng.below(std::size(kConsonants))]);
    const char32_t v = kVowelSigns[rng.below(std::size(kVowelSigns))];
    if (v) w.push_back(v);
  }
  return utf8::encode(w);
}

// Fills count distinct words not yet in used.
std::vector<std::string> make_words(Rng& rng, std::size_t count, std::size_t min_syl,
                                    std::size_t max_syl, std::set<std::string>& used) {
  std::vector<std::string> out;
  while (out.size() < count) {
    auto w = make_word(rng, min_syl + rng.below(max_syl - min_syl + 1));
    if (used.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

Lexicon make_lexicon(Rng& rng) {
  std::set<std::string> used;
  Lexicon lex;
  lex.determiners = make_words(rng, 5, 1, 1, used);
  lex.subject_markers = make_words(rng, 2, 1, 1, used);
  lex.object_markers = make_words(rng, 2, 1, 1, used);
  lex.oblique_markers = make_words(rng, 4, 1, 2, used);
  lex.auxiliaries = make_words(rng, 3, 1, 1, used);
  lex.conjunctions = make_words(rng, 3, 1, 2, used);
  lex.nouns = make_words(rng, 900, 2, 3, used);
  for (std::size_t i = 0; i < lex.nouns.size(); ++i) lex.noun_gender.push_back(rng.coin(0.5));
  lex.adjective_stems = make_words(rng, 180, 1, 2, used);
  lex.verb_stems = make_words(rng, 220, 1, 2, used);
  lex.adverbs = make_words(rng, 120, 2, 3, used);
  for (std::size_t v = 0; v < lex.verb_stems.size(); ++v) {
    std::vector<std::size_t> objects;
    for (int i = 0; i < 6; ++i) objects.push_back(rng.below(lex.nouns.size()));
    lex.verb_objects.push_back(std::move(objects));
  }
  return lex;
}

std::string inflect(const std::string& stem, int gender) {
  std::string w = stem;
  utf8::append(w, gender ? kFeminine : kMasculine);
  return w;
}

// Zipf-like index: P(i) proportional to 1 / (i + 2).
std::size_t zipf(Rng& rng, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += 1.0 / static_cast<double>(i + 2);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < n; ++i) {
    u -= 1.0 / static_cast<double>(i + 2);
    if (u < 0.0) return i;
  }
  return n - 1;
}

void noun_phrase(const Lexicon& lex, Rng& rng, std::size_t noun, std::vector<std::string>& out) {
  if (rng.coin(0.5)) out.push_back(lex.determiners[zipf(rng, lex.determiners.size())]);
  const std::size_t adjectives = rng.below(3);
  for (std::size_t i = 0; i < adjectives; ++i) {
    out.push_back(inflect(lex.adjective_stems[zipf(rng, lex.adjective_stems.size())],
                          lex.noun_gender[noun]));
  }
  out.push_back(lex.nouns[noun]);
}

void clause(const Lexicon& lex, Rng& rng, std::vector<std::string>& out) {
  const std::size_t verb = zipf(rng, lex.verb_stems.size());
  const std::size_t subject = zipf(rng, lex.nouns.size());
  noun_phrase(lex, rng, subject, out);
  out.push_back(lex.subject_markers[lex.noun_gender[subject]]);
  if (rng.coin(0.4)) {
    noun_phrase(lex, rng, zipf(rng, lex.nouns.size()), out);
    out.push_back(lex.oblique_markers[rng.below(lex.oblique_markers.size())]);
  }
  if (rng.coin(0.8)) {
    const auto& prefs = lex.verb_objects[verb];
    const std::size_t object =
        rng.coin(0.75) ? prefs[rng.below(prefs.size())] : zipf(rng, lex.nouns.size());
    noun_phrase(lex, rng, object, out);
    out.push_back(lex.object_markers[rng.coin(0.8) ? 0 : 1]);
  }
  if (rng.coin(0.4)) out.push_back(lex.adverbs[zipf(rng, lex.adverbs.size())]);
  out.push_back(inflect(lex.verb_stems[verb], lex.noun_gender[subject]));
  out.push_back(lex.auxiliaries[lex.noun_gender[subject] + (rng.coin(0.2) ? 1 : 0)]);
}

}  // namespace

std::vector<std::string> generate_synthetic_corpus(const SyntheticCorpusOptions& options) {
  if (options.min_tokens < 1 || options.min_tokens > options.max_tokens) {
    throw UsageError("synthetic corpus token bounds must satisfy 1 <= min <= max");
  }
  Rng rng(options.seed);
  const Lexicon lex = make_lexicon(rng);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  while (out.size() < options.sentences) {
    if (++attempts > 100 * options.sentences + 1000) {
      throw DataError("synthetic corpus: token bounds too narrow");
    }
    std::vector<std::string> tokens;
    clause(lex, rng, tokens);
    while (tokens.size() < options.min_tokens || rng.coin(0.3)) {
      tokens.push_back(lex.conjunctions[zipf(rng, lex.conjunctions.size())]);
      clause(lex, rng, tokens);
    }
    if (tokens.size() > options.max_tokens) continue;
    std::string text = join_tokens(tokens);
    if (seen.insert(text).second) out.push_back(std::move(text));
  }
  return out;
}

}  // namespace fluency
