#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fluency/error.hpp"
#include "fluency/rng.hpp"
#include "fluency/rnn_lm.hpp"
#include "support/fixtures.hpp"

using namespace fluency;

namespace {

struct Instance {
  RnnLanguageModel model;
  std::vector<std::vector<TokenId>> batch;
};

Instance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenSequence> corpus;
  const std::vector<std::string> words{"p", "q", "r", "s", "t"};
  for (int i = 0; i < 4; ++i) {
    TokenSequence s;
    const auto len = 1 + rng.below(5);
    for (std::size_t j = 0; j < len; ++j) s.push_back(words[rng.below(words.size())]);
    corpus.push_back(s);
  }
  RnnConfig cfg;
  cfg.embedding_dim = 2 + rng.below(3);
  cfg.hidden_dim = 2 + rng.below(4);
  cfg.unk_min_count = 1;
  cfg.seed = seed;
  cfg.init_scale = 0.5;
  auto vocab = Vocabulary::build(corpus, 1);
  Instance inst{RnnLanguageModel::initialize(vocab, cfg), {}};
  for (const auto& s : corpus) inst.batch.push_back(vocab.encode(s));
  return inst;
}

}  // namespace

TEST_CASE("GRU analytic gradient matches central differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = random_instance(seed);
    auto& m = inst.model;
    std::vector<double> grad(m.parameters().size(), 0.0);
    const double loss = m.loss_and_gradient(inst.batch, grad);
    CHECK(loss == doctest::Approx(m.loss(inst.batch)).epsilon(1e-12));
    double worst = 0.0;
    const double eps = 1e-4;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double keep = m.parameters()[i];
      m.parameters()[i] = keep + eps;
      const double up = m.loss(inst.batch);
      m.parameters()[i] = keep - eps;
      const double down = m.loss(inst.batch);
      m.parameters()[i] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double rel = std::abs(numeric - grad[i]) /
                         std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
      worst = std::max(worst, rel);
    }
    CAPTURE(seed);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("GRU distributions are normalized and consistent") {
  const auto c = fixtures::tokenize_all(fixtures::synthetic(60, 2));
  RnnConfig cfg;
  cfg.embedding_dim = 8;
  cfg.hidden_dim = 12;
  cfg.epochs = 2;
  const auto m = RnnLanguageModel::train(c, {}, cfg);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto& s = c[rng.below(c.size())];
    const TokenSequence prefix(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size() + 1)));
    const auto dist = m.next_distribution(prefix);
    CHECK(dist.size() == m.vocabulary().size());
    CHECK(std::abs(std::accumulate(dist.begin(), dist.end(), 0.0) - 1.0) < 1e-6);
  }
  for (const auto& s : c) {
    const auto lp = m.token_log_probs(s);
    CHECK(lp.values.size() == s.size() + 1);
    CHECK(std::abs(m.sentence_log_prob(s) -
                   std::accumulate(lp.values.begin(), lp.values.end(), 0.0)) < 1e-9);
  }
}

TEST_CASE("GRU training is deterministic, early-stops and reloads exactly") {
  const auto lines = fixtures::synthetic(120, 6);
  const auto all = fixtures::tokenize_all(lines);
  const std::vector<TokenSequence> train(all.begin(), all.begin() + 100);
  const std::vector<TokenSequence> val(all.begin() + 100, all.end());
  RnnConfig cfg;
  cfg.embedding_dim = 8;
  cfg.hidden_dim = 16;
  cfg.epochs = 6;
  cfg.learning_rate = 0.01;
  cfg.seed = 3;
  std::vector<EpochReport> h1, h2;
  auto a = RnnLanguageModel::train(train, val, cfg, &h1);
  const auto b = RnnLanguageModel::train(train, val, cfg, &h2);
  CHECK(a.serialize() == b.serialize());
  REQUIRE(!h1.empty());
  CHECK(h1.size() <= cfg.epochs);
  CHECK(h1.back().train_loss < h1.front().train_loss + 1e-12);
  for (std::size_t i = 0; i < h1.size(); ++i) {
    CHECK(h1[i].validation_loss == h2[i].validation_loss);
    CHECK(std::isfinite(h1[i].validation_loss));
  }

  const auto dir = fixtures::scratch("rnn_io");
  a.set_provenance({"abc", 3});
  a.save(dir / "rnn.model");
  const auto c = load_language_model(dir / "rnn.model");
  CHECK(c->kind() == "rnn");
  for (const auto& s : val) CHECK(c->token_log_probs(s).values == a.token_log_probs(s).values);

  const auto text = a.serialize();
  write_file(dir / "trunc.model", text.substr(0, text.size() - 9));
  CHECK_THROWS_AS(load_language_model(dir / "trunc.model"), DataError);
}

TEST_CASE("GRU rejects an empty corpus") {
  CHECK_THROWS_AS(RnnLanguageModel::train({}, {}, RnnConfig{}), DataError);
}
