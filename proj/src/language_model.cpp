#include "fluency/language_model.hpp"

#include <algorithm>
#include <cmath>

#include "fluency/error.hpp"
#include "fluency/kneser_ney.hpp"
#include "fluency/rnn_lm.hpp"
#include "fluency/text_io.hpp"
#include "fluency/unigram.hpp"

namespace fluency {

double TokenLogProbs::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double floored_log(double p, bool& floored) {
  if (!(p > std::exp(kLogProbFloor))) {
    floored = true;
    return kLogProbFloor;
  }
  return std::min(std::log(p), 0.0);
}

void LanguageModel::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

double perplexity(const LanguageModel& model, std::span<const TokenSequence> corpus) {
  if (corpus.empty()) throw DataError("perplexity of an empty corpus");
  double log_prob = 0.0;
  std::size_t predicted = 0;
  for (const auto& sentence : corpus) {
    const auto scores = model.token_log_probs(sentence);
    log_prob += scores.total();
    predicted += scores.values.size();
  }
  if (predicted == 0) throw DataError("perplexity over zero predicted tokens");
  return std::exp(-log_prob / static_cast<double>(predicted));
}

std::unique_ptr<LanguageModel> load_language_model(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const std::string_view view(bytes);
  if (view.starts_with(UnigramModel::kFormat)) {
    return std::make_unique<UnigramModel>(UnigramModel::parse(view));
  }
  if (view.starts_with(KneserNeyModel::kFormat)) {
    return std::make_unique<KneserNeyModel>(KneserNeyModel::parse(view));
  }
  if (view.starts_with(RnnLanguageModel::kFormat)) {
    return std::make_unique<RnnLanguageModel>(RnnLanguageModel::parse(view));
  }
  throw DataError(path.string() + ": unrecognized language model format");
}

}  // namespace fluency
