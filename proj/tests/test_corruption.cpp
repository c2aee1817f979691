#include <doctest.h>

#include <algorithm>
#include <set>

#include "fluency/corruption.hpp"
#include "fluency/error.hpp"
#include "fluency/rng.hpp"
#include "fluency/utf8.hpp"
#include "support/fixtures.hpp"

using namespace fluency;

namespace {

TokenSequence toks(const char* s) { return whitespace_tokenize(s); }

template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

bool is_subsequence(const TokenSequence& sub, const TokenSequence& full) {
  std::size_t j = 0;
  for (const auto& t : full) {
    if (j < sub.size() && sub[j] == t) ++j;
  }
  return j == sub.size();
}

bool same_multiset(TokenSequence a, TokenSequence b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// A single adjacent swap, dropped character or doubled character.
bool one_char_edit(const std::string& from, const std::string& to) {
  const auto a = utf8::decode(from), b = utf8::decode(to);
  if (a.size() == b.size()) {
    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) diff.push_back(i);
    }
    return diff.size() == 2 && diff[1] == diff[0] + 1 && a[diff[0]] == b[diff[1]] &&
           a[diff[1]] == b[diff[0]];
  }
  if (b.size() + 1 == a.size()) return edit_distance(a, b) == 1;
  if (b.size() == a.size() + 1) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::u32string c = a;
      c.insert(c.begin() + static_cast<std::ptrdiff_t>(i), a[i]);
      if (c == b) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("misspell alters exactly one token by one character edit") {
  const auto in = toks("response क्षेत्र the sentence ab");
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const auto out = misspell(in, rng);
    REQUIRE(out.size() == in.size());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] != out[i]) {
        ++changed;
        CHECK(one_char_edit(in[i], out[i]));
      }
    }
    CHECK(changed == 1);
  }
  Rng a(5), b(5);
  CHECK(misspell(in, a) == misspell(in, b));
  Rng r(1);
  CHECK_THROWS_AS(misspell(toks("a b c"), r), DataError);
}

TEST_CASE("delete_words") {
  const auto ten = toks("w0 w1 w2 w3 w4 w5 w6 w7 w8 w9");
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto one = delete_words(ten, rng, 1);
    CHECK(one.size() == 9);
    CHECK(is_subsequence(one, ten));
    const auto two = delete_words(ten, rng, 2);
    CHECK(two.size() == 8);
    CHECK(is_subsequence(two, ten));
  }
  CHECK_THROWS_AS(delete_words(toks("a b"), rng, 2), DataError);
}

TEST_CASE("duplicate_word") {
  const auto in = toks("a b c d e");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto out = duplicate_word(in, rng);
    REQUIRE(out.size() == in.size() + 1);
    std::size_t adjacent = 0;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) adjacent += out[i] == out[i + 1];
    CHECK(adjacent == 1);
    CHECK(is_subsequence(in, out));
  }
  Rng a(9), b(9);
  CHECK(duplicate_word(in, a) == duplicate_word(in, b));
  Rng r(0);
  CHECK_THROWS_AS(duplicate_word({}, r), DataError);
}

TEST_CASE("scramble") {
  const auto abcd = toks("a b c d");
  Rng r1(4), r2(4);
  const auto full = scramble(abcd, r1, ScrambleScope::kFull);
  CHECK(full == scramble(abcd, r2, ScrambleScope::kFull));
  CHECK(full != abcd);
  CHECK(same_multiset(full, abcd));

  const auto eight = toks("a b c d e f g h");
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto f = scramble(eight, rng, ScrambleScope::kFull);
    CHECK(f != eight);
    CHECK(same_multiset(f, eight));
    const auto h = scramble(eight, rng, ScrambleScope::kHalf);
    CHECK(h != eight);
    CHECK(same_multiset(h, eight));
    const bool first_kept = std::equal(h.begin(), h.begin() + 4, eight.begin());
    const bool second_kept = std::equal(h.begin() + 4, h.end(), eight.begin() + 4);
    CHECK(first_kept != second_kept);
    CHECK(same_multiset({h.begin(), h.begin() + 4}, {eight.begin(), eight.begin() + 4}));
  }
  Rng r(1);
  CHECK_THROWS_AS(scramble(toks("a b c"), r, ScrambleScope::kFull), DataError);
  CHECK_THROWS_AS(scramble(toks("a a a a"), r, ScrambleScope::kFull), DataError);
}

TEST_CASE("specs follow the level rules and serialize") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (int level = 0; level <= 2; ++level) {
      const auto spec = draw_spec(level, seed);
      CHECK_NOTHROW(spec.validate());
      CHECK(CorruptionSpec::from_json(spec.to_json()) == spec);
      if (level == 0) CHECK(spec.operations == std::vector{CorruptionOp::kScrambleFull});
      if (level == 2) CHECK(spec.operations.size() == 1);
    }
  }
  CHECK_THROWS_AS(draw_spec(3, 1), UsageError);
  CorruptionSpec bad{2, {CorruptionOp::kScrambleFull}, 1};
  CHECK_THROWS_AS(bad.validate(), DataError);
  CorruptionSpec mixed{1, {CorruptionOp::kDelete, CorruptionOp::kMisspell}, 1};
  CHECK_NOTHROW(mixed.validate());
  CHECK_THROWS_AS(CorruptionSpec::from_json("{\"level\":1}"), DataError);
  CHECK_THROWS_AS(parse_op("shout"), DataError);
}

TEST_CASE("label counts") {
  CHECK(label_counts(500, kDefaultProportions) == std::array<std::size_t, 4>{100, 100, 100, 200});
  CHECK(label_counts(10, {0.2, 0.2, 0.2, 0.4}) == std::array<std::size_t, 4>{2, 2, 2, 4});
  const auto odd = label_counts(7, kDefaultProportions);
  CHECK(odd[0] + odd[1] + odd[2] + odd[3] == 7);
  CHECK_THROWS_AS(label_counts(10, {0.5, 0.5, 0.5, 0.5}), UsageError);
}

TEST_CASE("graded test set") {
  const auto fluent = fixtures::sentences(fixtures::synthetic(200, 31));
  const auto a = build_graded_testset(fluent, 100, kDefaultProportions, 5);
  const auto b = build_graded_testset(fluent, 100, kDefaultProportions, 5);
  CHECK(render_graded(a, Provenance{"h", 5}) == render_graded(b, Provenance{"h", 5}));
  REQUIRE(a.size() == 100);

  std::array<std::size_t, 4> counts{};
  std::set<std::string> ids;
  for (const auto& ex : a) {
    ++counts[static_cast<std::size_t>(ex.label)];
    ids.insert(ex.sentence_id);
    CHECK((ex.label == 3) == (ex.corrupted_text == ex.original_text));
    CHECK((ex.label == 3) == !ex.spec.has_value());
    if (!ex.spec) continue;
    CHECK(ex.spec->target_level == ex.label);
    const auto orig = whitespace_tokenize(ex.original_text);
    const auto corrupted = whitespace_tokenize(ex.corrupted_text);
    // Reproducible from the original text and the recorded spec alone.
    CHECK(apply_spec(orig, CorruptionSpec::from_json(ex.spec->to_json())) == corrupted);
    if (ex.label == 2) CHECK(edit_distance(orig, corrupted) == 1);
    if (ex.label == 0) CHECK(same_multiset(orig, corrupted));
  }
  CHECK(counts == std::array<std::size_t, 4>{20, 20, 20, 40});
  CHECK(ids.size() == 100);
  CHECK_THROWS_AS(build_graded_testset(fluent, 201, kDefaultProportions, 5), DataError);

  const auto dir = fixtures::scratch("graded");
  write_file(dir / "graded.tsv", render_graded(a, Provenance{"h", 5}));
  const auto back = read_graded(dir / "graded.tsv");
  REQUIRE(back.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(back[i].sentence_id == a[i].sentence_id);
    CHECK(back[i].label == a[i].label);
    CHECK(back[i].corrupted_text == a[i].corrupted_text);
    CHECK(back[i].spec == a[i].spec);
  }
  const auto ratings = render_ratings(a, std::nullopt);
  CHECK(ratings.starts_with("id\tscore\n"));
}
