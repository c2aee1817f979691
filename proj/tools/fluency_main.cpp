// fluency: reference-free sentence fluency scoring toolkit.
//
//   fluency ingest    --in DIR --out DIR [--min-tokens 8 --max-tokens 25 --reject-latin ...]
//   fluency train-bpe --corpus FILE --merges N --out FILE
//   fluency train-lm  --kind unigram|kn|rnn --corpus FILE --out FILE [...]
//   fluency corrupt   --sentences FILE --total N --seed N --out FILE [--ratings FILE]
//   fluency score     --lm FILE --unigram FILE [--bpe FILE] --sentences FILE --out FILE
//   fluency evaluate  --scores FILE --ratings FILE --out FILE
//   fluency pipeline  --config FILE [--corpus-dir DIR --output-dir DIR --seed N]
//   fluency synth     --out FILE --sentences N --seed N
//   fluency version
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric/training failure.

#include <CLI11.hpp>

#include <iostream>

#include "fluency/digest.hpp"
#include "fluency/error.hpp"
#include "fluency/pipeline.hpp"
#include "fluency/synthetic.hpp"
#include "fluency/version.hpp"

namespace fs = std::filesystem;
using namespace fluency;

namespace {

// Provenance for a standalone subcommand: hash of its own argument list.
Provenance provenance_for(const CLI::App& cmd, std::uint64_t seed) {
  std::string canonical = cmd.get_name();
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    canonical += "\n" + opt->get_name() + "=";
    for (const auto& r : opt->results()) canonical += r + ",";
  }
  return {short_digest(canonical), seed};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-free sentence fluency scoring (SLOR / WPSLOR)"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Clean, filter, dedupe and split raw text");
  fs::path ingest_in, ingest_out;
  IngestSettings ingest_settings;
  std::uint64_t ingest_seed = 1;
  ingest->add_option("--in", ingest_in, "Directory of raw UTF-8 files")->required();
  ingest->add_option("--out", ingest_out, "Output directory")->required();
  ingest->add_option("--min-tokens", ingest_settings.min_tokens)->capture_default_str();
  ingest->add_option("--max-tokens", ingest_settings.max_tokens)->capture_default_str();
  bool reject_latin = false;
  ingest->add_flag("--reject-latin", reject_latin, "Drop sentences containing A-Z/a-z");
  ingest->add_option("--junk", ingest_settings.extra_junk, "Extra junk ranges, e.g. U+2022");
  ingest->add_option("--seed", ingest_seed)->capture_default_str();
  ingest->add_option("--train", ingest_settings.train, "0 = all remaining")->capture_default_str();
  ingest->add_option("--val", ingest_settings.validation)->capture_default_str();
  ingest->add_option("--test", ingest_settings.test)->capture_default_str();

  // train-bpe
  auto* train_bpe_cmd = app.add_subcommand("train-bpe", "Train a BPE subword model");
  fs::path bpe_corpus, bpe_out;
  std::size_t bpe_merges = 4000;
  train_bpe_cmd->add_option("--corpus", bpe_corpus)->required();
  train_bpe_cmd->add_option("--merges", bpe_merges)->capture_default_str();
  train_bpe_cmd->add_option("--out", bpe_out)->required();

  // train-lm
  auto* train_lm = app.add_subcommand("train-lm", "Train a unigram, Kneser-Ney or GRU LM");
  TrainLmRequest lm_req;
  fs::path lm_validation, lm_bpe;
  train_lm->add_option("--kind", lm_req.kind)
      ->check(CLI::IsMember({"unigram", "kn", "rnn"}))
      ->required();
  train_lm->add_option("--corpus", lm_req.corpus)->required();
  train_lm->add_option("--out", lm_req.out)->required();
  train_lm->add_option("--validation", lm_validation, "Validation sentences (rnn)");
  train_lm->add_option("--bpe", lm_bpe, "Encode the corpus with this BPE model first");
  train_lm->add_option("--order", lm_req.settings.order)->capture_default_str();
  train_lm->add_option("--discount", lm_req.settings.discount)->capture_default_str();
  train_lm->add_option("--unk-min-count", lm_req.settings.unk_min_count)->capture_default_str();
  train_lm->add_option("--smoothing", lm_req.settings.smoothing_k, "Unigram add-k")
      ->capture_default_str();
  train_lm->add_option("--emb", lm_req.settings.embedding_dim)->capture_default_str();
  train_lm->add_option("--hidden", lm_req.settings.hidden_dim)->capture_default_str();
  train_lm->add_option("--epochs", lm_req.settings.epochs)->capture_default_str();
  train_lm->add_option("--lr", lm_req.settings.learning_rate)->capture_default_str();
  train_lm->add_option("--batch", lm_req.settings.batch_size)->capture_default_str();
  train_lm->add_option("--seed", lm_req.seed)->capture_default_str();

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "Build a graded synthetic fluency test set");
  fs::path corrupt_in, corrupt_out, corrupt_ratings;
  std::size_t corrupt_total = 0;
  std::uint64_t corrupt_seed = 1;
  corrupt->add_option("--sentences", corrupt_in)->required();
  corrupt->add_option("--total", corrupt_total, "0 = every input sentence")->capture_default_str();
  corrupt->add_option("--seed", corrupt_seed)->capture_default_str();
  corrupt->add_option("--out", corrupt_out)->required();
  corrupt->add_option("--ratings", corrupt_ratings, "Also write an id/score ratings file");

  // score
  auto* score = app.add_subcommand("score", "Score sentences with SLOR or WPSLOR");
  ScoreRequest score_req;
  fs::path score_bpe;
  std::string baseline;
  score->add_option("--lm", score_req.lm)->required();
  score->add_option("--unigram", score_req.unigram)->required();
  score->add_option("--bpe", score_bpe, "Score subword pieces (WPSLOR)");
  score->add_option("--sentences", score_req.sentences)->required();
  score->add_option("--out", score_req.out)->required();
  score->add_option("--baseline", baseline, "mean-logp to emit ln PM(S)/|S| instead")
      ->check(CLI::IsMember({"mean-logp"}));
  score->add_option("--threads", score_req.settings.threads)->capture_default_str();

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Correlate scores with ratings");
  fs::path eval_scores, eval_ratings, eval_out;
  evaluate_cmd->add_option("--scores", eval_scores)->required();
  evaluate_cmd->add_option("--ratings", eval_ratings)->required();
  evaluate_cmd->add_option("--out", eval_out)->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a config file");
  fs::path config_path, override_corpus, override_output;
  std::optional<std::uint64_t> override_seed;
  pipeline->add_option("--config", config_path)->required();
  pipeline->add_option("--corpus-dir", override_corpus);
  pipeline->add_option("--output-dir", override_output);
  pipeline->add_option("--seed", override_seed);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic corpus");
  fs::path synth_out;
  SyntheticCorpusOptions synth_options;
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--sentences", synth_options.sentences)->capture_default_str();
  synth->add_option("--seed", synth_options.seed)->capture_default_str();

  app.add_subcommand("version", "Print version and format information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) {
      ingest_settings.reject_latin = reject_latin;
      const auto split = run_ingest(ingest_in, ingest_out, ingest_settings, ingest_seed,
                                    provenance_for(*ingest, ingest_seed));
      std::cout << "train=" << split.train.size() << " validation=" << split.validation.size()
                << " test=" << split.test.size() << " unused=" << split.unused.size() << "\n";
    } else if (train_bpe_cmd->parsed()) {
      run_train_bpe(bpe_corpus, bpe_merges, bpe_out, provenance_for(*train_bpe_cmd, 0));
    } else if (train_lm->parsed()) {
      if (!lm_validation.empty()) lm_req.validation = lm_validation;
      if (!lm_bpe.empty()) lm_req.bpe = lm_bpe;
      run_train_lm(lm_req, provenance_for(*train_lm, lm_req.seed));
    } else if (corrupt->parsed()) {
      std::optional<fs::path> ratings;
      if (!corrupt_ratings.empty()) ratings = corrupt_ratings;
      run_corrupt(corrupt_in, corrupt_total, kDefaultProportions, corrupt_seed, corrupt_out,
                  ratings, provenance_for(*corrupt, corrupt_seed));
    } else if (score->parsed()) {
      if (!score_bpe.empty()) score_req.bpe = score_bpe;
      score_req.settings.mean_logp_baseline = baseline == "mean-logp";
      run_score(score_req, provenance_for(*score, 0));
    } else if (evaluate_cmd->parsed()) {
      const auto report =
          run_evaluate(eval_scores, eval_ratings, eval_out, provenance_for(*evaluate_cmd, 0));
      std::cout << "pearson_r=" << format_g9(report.pearson_r) << " n=" << report.n << "\n";
    } else if (pipeline->parsed()) {
      auto config = PipelineConfig::load(config_path);
      if (!override_corpus.empty()) config.corpus_dir = override_corpus;
      if (!override_output.empty()) config.output_dir = override_output;
      if (override_seed) config.seed = *override_seed;
      const auto result = run_pipeline(config);
      for (const auto& s : result.stages) {
        std::cout << s.name << ": " << (s.executed ? "ran" : "cached") << "\n";
      }
      std::cout << "pearson_r=" << format_g9(result.report.pearson_r)
                << " n=" << result.report.n << "\n";
    } else if (synth->parsed()) {
      std::string text;
      for (const auto& line : generate_synthetic_corpus(synth_options)) text += line + "\n";
      write_file(synth_out, text);
    } else {
      std::cout << version_info();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
