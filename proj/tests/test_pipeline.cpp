#include <doctest.h>

#include <fstream>

#include "fluency/config.hpp"
#include "fluency/error.hpp"
#include "fluency/pipeline.hpp"
#include "fluency/text_io.hpp"
#include "fluency/version.hpp"
#include "support/fixtures.hpp"

using namespace fluency;
namespace fs = std::filesystem;

namespace {

// Frozen from the first verified run of the shipped fixture config.
constexpr double kFixturePearson = 0.7782041952532034;

PipelineConfig fixture_config(const fs::path& out) {
  auto c = PipelineConfig::load(fixtures::data_dir() / "pipeline.ini");
  c.output_dir = out;
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return files;
}

std::vector<bool> executed(const PipelineResult& r) {
  std::vector<bool> out;
  for (const auto& s : r.stages) out.push_back(s.executed);
  return out;
}

}  // namespace

TEST_CASE("config loading") {
  const auto c = PipelineConfig::load(fixtures::data_dir() / "pipeline.ini");
  CHECK(c.seed == 11);
  CHECK(c.lm.kind == "kn");
  CHECK(c.lm.order == 3);
  CHECK(c.ingest.test == 60);
  CHECK(c.corpus_dir == fixtures::data_dir() / "corpus");
  CHECK(c.hash().size() == 16);
  auto moved = c;
  moved.output_dir = "/elsewhere";
  CHECK(moved.hash() == c.hash());
  moved.lm.order = 4;
  CHECK(moved.hash() != c.hash());

  const auto dir = fixtures::scratch("config");
  write_file(dir / "bad.ini", "[lm]\nordr = 3\n");
  CHECK_THROWS_WITH_AS(PipelineConfig::load(dir / "bad.ini"), doctest::Contains("lm.ordr"),
                       UsageError);
  write_file(dir / "bad2.ini", "[lm]\norder = three\n");
  CHECK_THROWS_AS(PipelineConfig::load(dir / "bad2.ini"), UsageError);
  CHECK_THROWS_AS(PipelineConfig::load(dir / "none.ini"), UsageError);
}

TEST_CASE("missing corpus path fails before any work") {
  const auto dir = fixtures::scratch("pipeline_missing");
  auto c = fixture_config(dir / "out");
  c.corpus_dir = dir / "no_such_corpus";
  CHECK_THROWS_AS(run_pipeline(c), UsageError);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("fixture pipeline produces every artifact and caches reruns") {
  const auto dir = fixtures::scratch("pipeline_fixture");
  const auto c = fixture_config(dir / "out");
  const auto first = run_pipeline(c);
  CHECK(executed(first) == std::vector<bool>(5, true));
  CHECK(first.report.n == 60);
  CHECK(first.report.pearson_r == doctest::Approx(kFixturePearson).epsilon(1e-12));

  for (const char* f : {"corpus/train.txt", "corpus/validation.txt", "corpus/test.txt",
                        "corpus/manifest.tsv", "models/lm.model", "models/unigram.model",
                        "graded.tsv", "ratings.tsv", "scores.tsv", "report.txt"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(dir / "out" / f));
    const auto text = read_file(dir / "out" / f);
    CHECK(text.find("#fluency config=" + c.hash() + " seed=11\n") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "out" / ".lock"));
  CHECK(read_lines(dir / "out" / "corpus" / "test.txt").size() == 61);
  // zz_noisy.txt only holds duplicates, out-of-range lengths, Latin and junk.
  CHECK(read_lines(dir / "out" / "corpus" / "manifest.tsv").size() == 201);

  const auto before = snapshot(dir / "out");
  const auto second = run_pipeline(c);
  CHECK(executed(second) == std::vector<bool>(5, false));
  CHECK(snapshot(dir / "out") == before);
  CHECK(second.report.pearson_r == first.report.pearson_r);

  auto changed = c;
  changed.lm.discount = 0.5;
  const auto third = run_pipeline(changed);
  // Every stamp embeds the config hash, so all stages rerun.
  CHECK(executed(third) == std::vector<bool>(5, true));

  // Only the missing artifact is rebuilt; evaluate sees identical input bytes.
  fs::remove(dir / "out" / "scores.tsv");
  const auto fourth = run_pipeline(changed);
  CHECK(executed(fourth) == std::vector<bool>{false, false, false, true, false});
}

TEST_CASE("identical configs give byte-identical output directories") {
  const auto dir = fixtures::scratch("pipeline_repro");
  run_pipeline(fixture_config(dir / "a"));
  run_pipeline(fixture_config(dir / "b"));
  const auto a = snapshot(dir / "a"), b = snapshot(dir / "b");
  CHECK(a.size() >= 10);
  CHECK(a == b);
}

TEST_CASE("bpe and rnn regimes run end to end") {
  const auto dir = fixtures::scratch("pipeline_bpe");
  auto c = fixture_config(dir / "out");
  c.tokenizer.regime = TokenizerRegime::kBpe;
  c.tokenizer.merges = 300;
  c.lm.kind = "rnn";
  c.lm.embedding_dim = 8;
  c.lm.hidden_dim = 16;
  c.lm.epochs = 2;
  const auto r = run_pipeline(c);
  CHECK(r.stages.size() == 6);
  CHECK(r.stages[1].name == "train-bpe");
  CHECK(fs::exists(dir / "out" / "models" / "bpe.model"));
  CHECK(r.report.n == 60);
  CHECK(std::abs(r.report.pearson_r) <= 1.0);
}

TEST_CASE("stage failures name the stage and keep their category") {
  const auto dir = fixtures::scratch("pipeline_fail");
  auto c = fixture_config(dir / "out");
  c.corrupt.total = 500;
  CHECK_THROWS_WITH_AS(run_pipeline(c), doctest::Contains("stage corrupt: insufficient"),
                       DataError);
  CHECK_FALSE(fs::exists(dir / "out" / ".lock"));
}

TEST_CASE("a locked output directory is refused") {
  const auto dir = fixtures::scratch("pipeline_lock");
  write_file(dir / "out" / ".lock", "");
  CHECK_THROWS_WITH_AS(run_pipeline(fixture_config(dir / "out")), doctest::Contains("locked"),
                       UsageError);
}

TEST_CASE("version info") {
  const auto v = version_info();
  CHECK_FALSE(v.empty());
  CHECK(v == version_info());
  CHECK(v.find("kn v1") != std::string::npos);
  CHECK(v.find("rnn v1") != std::string::npos);
  CHECK(v.find(Rng::kAlgorithm) != std::string::npos);
}
