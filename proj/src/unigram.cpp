#include "fluency/unigram.hpp"

#include "fluency/error.hpp"

namespace fluency {

UnigramModel UnigramModel::train(std::span<const TokenSequence> corpus,
                                 const UnigramOptions& options) {
  if (corpus.empty()) throw DataError("cannot train unigram model on an empty corpus");
  if (!(options.smoothing_k >= 0.0)) throw UsageError("smoothing k must be >= 0");
  UnigramModel m;
  m.vocab_ = Vocabulary::build(corpus, options.unk_min_count);
  if (m.vocab_.surface_total() == 0) throw DataError("unigram corpus has no tokens");
  m.k_ = options.smoothing_k;
  m.min_count_ = options.unk_min_count;
  m.estimate();
  return m;
}

void UnigramModel::estimate() {
  const double types = static_cast<double>(vocab_.word_types());
  const double denom = static_cast<double>(vocab_.surface_total()) + k_ * (types + 1.0);
  probs_.assign(vocab_.size(), 0.0);
  log_probs_.assign(vocab_.size(), 0.0);
  floored_.assign(vocab_.size(), 0);
  for (TokenId id = Vocabulary::kUnk; id < vocab_.size(); ++id) {
    probs_[id] = (static_cast<double>(vocab_.count(id)) + k_) / denom;
    bool floored = false;
    log_probs_[id] = floored_log(probs_[id], floored);
    floored_[id] = floored;
  }
  bool unused = false;
  log_probs_[Vocabulary::kEos] = floored_log(0.0, unused);
  floored_[Vocabulary::kEos] = 1;
}

TokenLogProbs UnigramModel::token_log_probs(std::span<const std::string> tokens) const {
  TokenLogProbs out;
  out.values.reserve(tokens.size());
  for (const auto& t : tokens) {
    const TokenId id = vocab_.id(t);
    out.values.push_back(log_probs_[id]);
    out.floored = out.floored || floored_[id];
  }
  return out;
}

std::vector<double> UnigramModel::next_distribution(std::span<const std::string>) const {
  return probs_;
}

std::string UnigramModel::serialize() const {
  std::string out(kFormat);
  out += " k=" + format_exact(k_) + " min_count=" + std::to_string(min_count_) + "\n";
  if (!meta_.empty()) out += meta_ + "\n";
  vocab_.serialize(out);
  return out;
}

UnigramModel UnigramModel::parse(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw DataError("empty unigram model");
  const auto header = split(lines[0], ' ');
  if (header.size() != 4 || header[0] != "unigram" || header[1] != "v1" ||
      !header[2].starts_with("k=") || !header[3].starts_with("min_count=")) {
    throw DataError("not a unigram v1 model");
  }
  UnigramModel m;
  m.k_ = parse_double(header[2].substr(2));
  m.min_count_ = static_cast<std::size_t>(parse_int(header[3].substr(10)));
  std::size_t at = 1;
  if (at < lines.size() && lines[at].starts_with(kMetaPrefix)) m.meta_ = lines[at++];
  m.vocab_ = Vocabulary::parse(lines, at);
  if (at != lines.size()) throw DataError("trailing data in unigram model");
  m.estimate();
  return m;
}

}  // namespace fluency
