#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fluency/config.hpp"
#include "fluency/corpus.hpp"
#include "fluency/eval.hpp"
#include "fluency/scorer.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

// Stage runners. Each reads and writes files only, so the CLI subcommands
// and the pipeline share them.

// Writes train.txt, validation.txt, test.txt and manifest.tsv into out_dir.
CorpusSplit run_ingest(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir,
                       const IngestSettings& settings, std::uint64_t seed,
                       const std::optional<Provenance>& provenance);

void run_train_bpe(const std::filesystem::path& corpus, std::size_t merges,
                   const std::filesystem::path& out,
                   const std::optional<Provenance>& provenance);

struct TrainLmRequest {
  std::string kind = "kn";
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> validation;
  std::optional<std::filesystem::path> bpe;  // encode the corpus first
  std::filesystem::path out;
  LmSettings settings;
  std::uint64_t seed = 1;
};
void run_train_lm(const TrainLmRequest& request, const std::optional<Provenance>& provenance);

void run_corrupt(const std::filesystem::path& sentences, std::size_t total,
                 const LabelProportions& proportions, std::uint64_t seed,
                 const std::filesystem::path& out,
                 const std::optional<std::filesystem::path>& ratings_out,
                 const std::optional<Provenance>& provenance);

struct ScoreRequest {
  std::filesystem::path lm;
  std::filesystem::path unigram;
  std::optional<std::filesystem::path> bpe;
  std::filesystem::path sentences;
  std::filesystem::path out;
  ScoreSettings settings;
};
void run_score(const ScoreRequest& request, const std::optional<Provenance>& provenance);

CorrelationReport run_evaluate(const std::filesystem::path& scores,
                               const std::filesystem::path& ratings,
                               const std::filesystem::path& out,
                               const std::optional<Provenance>& provenance);

struct StageOutcome {
  std::string name;
  bool executed = false;
};

struct PipelineResult {
  std::vector<StageOutcome> stages;
  CorrelationReport report;
};

// ingest -> (train-bpe) -> train-lm + unigram -> corrupt -> score -> evaluate.
// A stage is skipped when its outputs exist and its stamp (hash of its
// settings and input files) is unchanged. Holds <output_dir>/.lock for the
// duration of the run. Errors are rethrown prefixed with the stage name.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace fluency
