#include "fluency/scorer.hpp"

#include <thread>

#include "fluency/error.hpp"

namespace fluency {

namespace {

FluencyScore slor_over(const LanguageModel& lm, const UnigramModel& unigram, std::string id,
                       std::span<const std::string> tokens, const ScoreOptions& options) {
  if (tokens.empty()) throw DataError("cannot score an empty sentence (id " + id + ")");
  const TokenLogProbs lm_scores = lm.token_log_probs(tokens);
  const TokenLogProbs uni_scores = unigram.token_log_probs(tokens);
  FluencyScore s;
  s.sentence_id = std::move(id);
  s.lm_log_prob = lm_scores.total();
  s.unigram_log_prob = uni_scores.total();
  s.length = tokens.size();
  s.slor = slor_value(s.lm_log_prob, s.unigram_log_prob, s.length);
  s.floored = lm_scores.floored || uni_scores.floored;
  if (options.token_level) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      s.token_level.emplace_back(lm_scores.values[i], uni_scores.values[i]);
    }
  }
  return s;
}

const char* score_column(ScoreKind kind) {
  return kind == ScoreKind::kSlor ? "slor" : "mean_logp";
}

}  // namespace

double slor_value(double lm_log_prob, double unigram_log_prob, std::size_t length) {
  if (length == 0) throw DataError("SLOR of an empty sentence");
  return (lm_log_prob - unigram_log_prob) / static_cast<double>(length);
}

double mean_log_prob_value(double lm_log_prob, std::size_t length) {
  if (length == 0) throw DataError("mean log-probability of an empty sentence");
  return lm_log_prob / static_cast<double>(length);
}

FluencyScore slor(const LanguageModel& lm, const UnigramModel& unigram,
                  const Sentence& sentence, const ScoreOptions& options) {
  return slor_over(lm, unigram, sentence.id, sentence.tokens, options);
}

FluencyScore wpslor(const LanguageModel& lm, const UnigramModel& unigram, const BpeModel& bpe,
                    const Sentence& sentence, const ScoreOptions& options) {
  const auto pieces = bpe.encode_words(sentence.tokens);
  return slor_over(lm, unigram, sentence.id, pieces, options);
}

double mean_log_prob(const LanguageModel& lm, const Sentence& sentence) {
  if (sentence.tokens.empty()) {
    throw DataError("cannot score an empty sentence (id " + sentence.id + ")");
  }
  return mean_log_prob_value(lm.sentence_log_prob(sentence.tokens), sentence.tokens.size());
}

std::vector<FluencyScore> score_sentences(const LanguageModel& lm, const UnigramModel& unigram,
                                          std::span<const Sentence> sentences,
                                          const BatchScoreOptions& options) {
  std::vector<FluencyScore> out(sentences.size());
  auto work = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      const Sentence& s = sentences[i];
      std::vector<std::string> pieces;
      std::span<const std::string> tokens = s.tokens;
      if (options.bpe) {
        pieces = options.bpe->encode_words(s.tokens);
        tokens = pieces;
      }
      out[i] = slor_over(lm, unigram, s.id, tokens, {});
      if (options.kind == ScoreKind::kMeanLogProb) {
        out[i].slor = mean_log_prob_value(out[i].lm_log_prob, out[i].length);
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, sentences.size()));
  if (threads == 1) {
    work(0, sentences.size());
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (sentences.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t * chunk, std::min(sentences.size(), (t + 1) * chunk));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string render_scores(std::span<const FluencyScore> scores, ScoreKind kind,
                          const std::optional<Provenance>& provenance) {
  std::string out;
  if (provenance) out += meta_line(*provenance) + "\n";
  out += std::string(kMetaPrefix) + " scorer=" + score_column(kind) +
         " eos=conditional-lm-only length=surface-tokens\n";
  out += "id\t";
  out += score_column(kind);
  out += "\tlm_logp\tuni_logp\tlen\tfloored\n";
  for (const auto& s : scores) {
    out += s.sentence_id + "\t" + format_g9(s.slor) + "\t" + format_g9(s.lm_log_prob) + "\t" +
           format_g9(s.unigram_log_prob) + "\t" + std::to_string(s.length) + "\t" +
           (s.floored ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<FluencyScore> read_scores(const std::filesystem::path& path) {
  const auto lines = strip_meta(read_lines(path));
  if (lines.empty() || !lines[0].starts_with("id\t")) {
    throw DataError(path.string() + ": missing score header row");
  }
  std::vector<FluencyScore> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 6) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": expected 6 columns");
    }
    FluencyScore s;
    s.sentence_id = std::string(f[0]);
    s.slor = parse_double(f[1]);
    s.lm_log_prob = parse_double(f[2]);
    s.unigram_log_prob = parse_double(f[3]);
    s.length = static_cast<std::size_t>(parse_int(f[4]));
    s.floored = f[5] == "1";
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fluency
