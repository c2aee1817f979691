#include <doctest.h>

#include <algorithm>

#include "fluency/bpe.hpp"
#include "fluency/error.hpp"
#include "fluency/rng.hpp"
#include "fluency/utf8.hpp"
#include "support/fixtures.hpp"

using namespace fluency;

namespace {

const std::map<std::string, std::size_t> kClassic{
    {"low", 5}, {"lower", 2}, {"newest", 6}, {"widest", 3}};

std::map<std::string, std::size_t> word_counts(const std::vector<std::string>& lines) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : lines) {
    for (const auto& w : whitespace_tokenize(l)) ++counts[w];
  }
  return counts;
}

}  // namespace

TEST_CASE("first merge on the classic example is (e, s)") {
  const auto m = BpeModel::train(kClassic, 1);
  REQUIRE(m.merges().size() == 1);
  CHECK(m.merges()[0] == BpeModel::Merge{"e", "s"});
  CHECK(m.vocab().count("es"));
}

TEST_CASE("zero merges gives a character model") {
  const auto m = BpeModel::train(kClassic, 0);
  CHECK(m.merges().empty());
  CHECK(m.encode("low") == std::vector<std::string>{"l", "o", "w</w>"});
  for (const auto& piece : m.vocab()) {
    const std::string bare =
        piece.ends_with("</w>") ? piece.substr(0, piece.size() - 4) : piece;
    CHECK((utf8::length(bare) == 1 || bare == "<unk>"));
  }
}

TEST_CASE("single candidate pair") {
  const auto m = BpeModel::train({{"aa", 2}}, 1);
  REQUIRE(m.merges().size() == 1);
  CHECK(m.merges()[0] == BpeModel::Merge{"a", "a</w>"});
  CHECK(m.encode("aa") == std::vector<std::string>{"aa</w>"});
  // A pair seen once is never merged.
  CHECK(BpeModel::train({{"ab", 1}}, 5).merges().empty());
}

TEST_CASE("encode and decode") {
  const auto m = BpeModel::train(kClassic, 10);
  CHECK(m.decode(m.encode("lower")) == "lower");
  CHECK(m.decode(std::vector<std::string>{}) == "");
  CHECK(m.encode("l") == std::vector<std::string>{"l</w>"});
  const auto oov = m.encode("lqw");
  CHECK(std::find(oov.begin(), oov.end(), "<unk>") != oov.end());
  CHECK_THROWS_AS(m.decode(std::vector<std::string>{"lo</w>", "w</w>"}), DataError);
  CHECK_THROWS_AS(m.decode(std::vector<std::string>{"lo", "w"}), DataError);
  const std::vector<std::string> ws{"low", "newest"};
  CHECK(m.decode_words(m.encode_words(ws)) == ws);
}

TEST_CASE("round trip on random words over the training alphabet") {
  const auto lines = fixtures::synthetic(300, 3);
  const auto counts = word_counts(lines);
  const auto m = BpeModel::train(counts, 200);
  std::set<std::string> alphabet;
  for (const auto& [w, c] : counts) {
    for (auto& ch : utf8::characters(w)) alphabet.insert(ch);
  }
  const std::vector<std::string> chars(alphabet.begin(), alphabet.end());
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    std::string w;
    const auto len = 1 + rng.below(12);
    for (std::size_t j = 0; j < len; ++j) w += chars[rng.below(chars.size())];
    const auto pieces = m.encode(w);
    REQUIRE(m.decode(pieces) == w);
    for (const auto& p : pieces) CHECK(m.vocab().count(p));
  }
}

TEST_CASE("vocabulary grows monotonically with merges") {
  const auto counts = word_counts(fixtures::synthetic(200, 4));
  auto prev = BpeModel::train(counts, 0);
  for (std::size_t k = 1; k <= 60; ++k) {
    const auto next = BpeModel::train(counts, k);
    CHECK(std::includes(next.vocab().begin(), next.vocab().end(), prev.vocab().begin(),
                        prev.vocab().end()));
    prev = next;
  }
}

TEST_CASE("serialization is deterministic and round trips") {
  const auto sentences = fixtures::sentences(fixtures::synthetic(150, 5));
  const auto a = train_bpe(sentences, 100);
  const auto b = train_bpe(sentences, 100);
  CHECK(a.serialize() == b.serialize());
  const auto c = BpeModel::parse(a.serialize());
  CHECK(c.serialize() == a.serialize());
  CHECK(c.merges() == a.merges());
  for (const auto& s : sentences) CHECK(c.encode_words(s.tokens) == a.encode_words(s.tokens));

  const auto dir = fixtures::scratch("bpe");
  auto d = a;
  d.set_provenance({"cafe", 2});
  d.save(dir / "bpe.model");
  const auto e = BpeModel::load(dir / "bpe.model");
  CHECK(e.merges() == a.merges());
  CHECK_THROWS_AS(BpeModel::parse("bpe v2 merges=0\n"), DataError);
  CHECK_THROWS_AS(train_bpe(std::vector<Sentence>{}, 3), DataError);
}
