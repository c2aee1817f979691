#include "fluency/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <functional>

#include "fluency/bpe.hpp"
#include "fluency/corruption.hpp"
#include "fluency/digest.hpp"
#include "fluency/error.hpp"
#include "fluency/kneser_ney.hpp"
#include "fluency/rnn_lm.hpp"
#include "fluency/unigram.hpp"

namespace fluency {

namespace fs = std::filesystem;

namespace {

std::vector<TokenSequence> token_sequences(const std::vector<Sentence>& sentences,
                                           const BpeModel* bpe) {
  std::vector<TokenSequence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    out.push_back(bpe ? bpe->encode_words(s.tokens) : s.tokens);
  }
  return out;
}

template <typename Model>
void stamp_and_save(Model& model, const fs::path& out, const std::optional<Provenance>& p) {
  if (p) model.set_provenance(*p);
  model.save(out);
}

// Exclusive lock file, removed on destruction.
class DirectoryLock {
 public:
  explicit DirectoryLock(fs::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw UsageError("output directory is locked by another pipeline (" + path_.string() + ")");
    }
  }
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

template <typename Fn>
void with_stage_context(const std::string& stage, Fn&& fn) {
  try {
    fn();
  } catch (const UsageError& e) {
    throw UsageError("stage " + stage + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("stage " + stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage " + stage + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw DataError("stage " + stage + ": " + e.what());
  }
}

}  // namespace

CorpusSplit run_ingest(const fs::path& in_dir, const fs::path& out_dir,
                       const IngestSettings& settings, std::uint64_t seed,
                       const std::optional<Provenance>& provenance) {
  auto junk = default_junk_ranges();
  for (const auto& j : settings.extra_junk) junk.push_back(parse_codepoint_range(j));
  const auto raw = load_raw_directory(in_dir, junk);

  FilterOptions filter;
  filter.min_tokens = settings.min_tokens;
  filter.max_tokens = settings.max_tokens;
  if (settings.reject_latin) filter.reject_scripts = latin_letter_ranges();
  const auto kept = dedupe(filter_sentences(raw, filter));

  std::size_t train = settings.train;
  if (train == 0) {
    const std::size_t held = settings.validation + settings.test;
    if (held > kept.size()) {
      throw DataError("insufficient: have " + std::to_string(kept.size()) + ", need " +
                      std::to_string(held));
    }
    train = kept.size() - held;
  }
  CorpusSplit split = split_corpus(kept, train, settings.validation, settings.test, seed);
  write_file(out_dir / "train.txt", render_sentence_lines(split.train, provenance));
  write_file(out_dir / "validation.txt", render_sentence_lines(split.validation, provenance));
  write_file(out_dir / "test.txt", render_sentence_lines(split.test, provenance));
  write_file(out_dir / "manifest.tsv", render_manifest(split, provenance));
  return split;
}

void run_train_bpe(const fs::path& corpus, std::size_t merges, const fs::path& out,
                   const std::optional<Provenance>& provenance) {
  auto model = train_bpe(read_sentences(corpus), merges);
  if (provenance) model.set_provenance(*provenance);
  model.save(out);
}

void run_train_lm(const TrainLmRequest& request, const std::optional<Provenance>& provenance) {
  std::optional<BpeModel> bpe;
  if (request.bpe) bpe = BpeModel::load(*request.bpe);
  const BpeModel* bpe_ptr = bpe ? &*bpe : nullptr;
  const auto corpus = token_sequences(read_sentences(request.corpus), bpe_ptr);
  const LmSettings& s = request.settings;

  if (request.kind == "unigram") {
    auto model = UnigramModel::train(corpus, {s.smoothing_k, s.unk_min_count});
    stamp_and_save(model, request.out, provenance);
  } else if (request.kind == "kn") {
    auto model = KneserNeyModel::train(corpus, {s.order, s.discount, s.unk_min_count});
    stamp_and_save(model, request.out, provenance);
  } else if (request.kind == "rnn") {
    std::vector<TokenSequence> validation;
    if (request.validation) validation = token_sequences(read_sentences(*request.validation), bpe_ptr);
    RnnConfig cfg;
    cfg.embedding_dim = s.embedding_dim;
    cfg.hidden_dim = s.hidden_dim;
    cfg.learning_rate = s.learning_rate;
    cfg.epochs = s.epochs;
    cfg.batch_size = s.batch_size;
    cfg.patience = s.patience;
    cfg.seed = request.seed;
    cfg.unk_min_count = s.unk_min_count;
    auto model = RnnLanguageModel::train(corpus, validation, cfg);
    stamp_and_save(model, request.out, provenance);
  } else {
    throw UsageError("unknown LM kind '" + request.kind + "' (expected unigram, kn or rnn)");
  }
}

void run_corrupt(const fs::path& sentences, std::size_t total,
                 const LabelProportions& proportions, std::uint64_t seed, const fs::path& out,
                 const std::optional<fs::path>& ratings_out,
                 const std::optional<Provenance>& provenance) {
  const auto fluent = read_sentences(sentences);
  const auto examples =
      build_graded_testset(fluent, total == 0 ? fluent.size() : total, proportions, seed);
  write_file(out, render_graded(examples, provenance));
  if (ratings_out) write_file(*ratings_out, render_ratings(examples, provenance));
}

void run_score(const ScoreRequest& request, const std::optional<Provenance>& provenance) {
  const auto lm = load_language_model(request.lm);
  const auto unigram = UnigramModel::parse(read_file(request.unigram));
  std::optional<BpeModel> bpe;
  if (request.bpe) bpe = BpeModel::load(*request.bpe);
  const auto sentences = read_sentences(request.sentences);

  BatchScoreOptions options;
  options.kind = request.settings.mean_logp_baseline ? ScoreKind::kMeanLogProb : ScoreKind::kSlor;
  options.bpe = bpe ? &*bpe : nullptr;
  options.threads = request.settings.threads;
  const auto scores = score_sentences(*lm, unigram, sentences, options);
  write_file(request.out, render_scores(scores, options.kind, provenance));
}

CorrelationReport run_evaluate(const fs::path& scores, const fs::path& ratings,
                               const fs::path& out, const std::optional<Provenance>& provenance) {
  const auto report = evaluate(read_scores(scores), read_ratings(ratings));
  write_file(out, render_report(report, provenance));
  return report;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  DirectoryLock lock(out / ".lock");

  const Provenance prov{config.hash(), config.seed};
  const fs::path corpus = out / "corpus";
  const fs::path models = out / "models";
  const bool use_bpe = config.tokenizer.regime == TokenizerRegime::kBpe;
  const fs::path bpe_file = models / "bpe.model";
  const fs::path lm_file = models / "lm.model";
  const fs::path unigram_file = models / "unigram.model";
  const fs::path graded = out / "graded.tsv";
  const fs::path ratings = out / "ratings.tsv";
  const fs::path scores = out / "scores.tsv";
  const fs::path report_file = out / "report.txt";

  PipelineResult result;
  auto stage = [&](const std::string& name, std::vector<fs::path> inputs,
                   const std::vector<fs::path>& outputs, const std::function<void()>& fn) {
    std::string key = name + "\n" + prov.config_hash + "\n";
    std::sort(inputs.begin(), inputs.end());
    for (const auto& in : inputs) key += in.filename().string() + " " + sha256_hex(read_file(in)) + "\n";
    const std::string stamp = short_digest(key) + "\n";
    const fs::path stamp_file = out / ".stamps" / name;
    const bool fresh = std::all_of(outputs.begin(), outputs.end(),
                                   [](const fs::path& p) { return fs::exists(p); }) &&
                       fs::exists(stamp_file) && read_file(stamp_file) == stamp;
    if (!fresh) {
      with_stage_context(name, fn);
      write_file(stamp_file, stamp);
    }
    result.stages.push_back({name, !fresh});
  };

  std::vector<fs::path> raw_files;
  for (const auto& e : fs::directory_iterator(config.corpus_dir)) {
    if (e.is_regular_file()) raw_files.push_back(e.path());
  }

  stage("ingest", raw_files,
        {corpus / "train.txt", corpus / "validation.txt", corpus / "test.txt",
         corpus / "manifest.tsv"},
        [&] { run_ingest(config.corpus_dir, corpus, config.ingest, config.seed, prov); });

  if (use_bpe) {
    stage("train-bpe", {corpus / "train.txt"}, {bpe_file},
          [&] { run_train_bpe(corpus / "train.txt", config.tokenizer.merges, bpe_file, prov); });
  }

  std::vector<fs::path> lm_inputs{corpus / "train.txt", corpus / "validation.txt"};
  if (use_bpe) lm_inputs.push_back(bpe_file);
  stage("train-lm", lm_inputs, {lm_file, unigram_file}, [&] {
    TrainLmRequest req;
    req.kind = config.lm.kind;
    req.corpus = corpus / "train.txt";
    req.validation = corpus / "validation.txt";
    if (use_bpe) req.bpe = bpe_file;
    req.settings = config.lm;
    req.seed = config.seed;
    req.out = lm_file;
    run_train_lm(req, prov);
    req.kind = "unigram";
    req.out = unigram_file;
    run_train_lm(req, prov);
  });

  stage("corrupt", {corpus / "test.txt"}, {graded, ratings}, [&] {
    run_corrupt(corpus / "test.txt", config.corrupt.total, config.corrupt.proportions,
                config.seed, graded, ratings, prov);
  });

  std::vector<fs::path> score_inputs{lm_file, unigram_file, graded};
  if (use_bpe) score_inputs.push_back(bpe_file);
  stage("score", score_inputs, {scores}, [&] {
    ScoreRequest req;
    req.lm = lm_file;
    req.unigram = unigram_file;
    if (use_bpe) req.bpe = bpe_file;
    req.sentences = graded;
    req.out = scores;
    req.settings = config.score;
    run_score(req, prov);
  });

  stage("evaluate", {scores, ratings}, {report_file},
        [&] { run_evaluate(scores, ratings, report_file, prov); });

  with_stage_context("evaluate", [&] {
    result.report = evaluate(read_scores(scores), read_ratings(ratings));
  });
  return result;
}

}  // namespace fluency
