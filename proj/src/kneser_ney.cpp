#include "fluency/kneser_ney.hpp"

#include <algorithm>

#include "fluency/error.hpp"

namespace fluency {

std::size_t KneserNeyModel::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (TokenId id : k) {
    h ^= id;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

KneserNeyModel KneserNeyModel::train(std::span<const TokenSequence> corpus,
                                     const KneserNeyOptions& options) {
  if (options.order < 2) throw UsageError("Kneser-Ney order must be >= 2");
  if (!(options.discount > 0.0 && options.discount < 1.0)) {
    throw UsageError("Kneser-Ney discount must lie in (0, 1)");
  }
  if (corpus.empty()) throw DataError("cannot train Kneser-Ney model on an empty corpus");

  KneserNeyModel m;
  m.order_ = options.order;
  m.discount_ = options.discount;
  m.min_count_ = options.unk_min_count;
  m.vocab_ = Vocabulary::build(corpus, options.unk_min_count);
  m.counts_.resize(m.order_);

  const std::size_t n = m.order_;
  auto& top = m.counts_[n - 1];
  for (const auto& sentence : corpus) {
    std::vector<TokenId> padded(n - 1, m.vocab_.bos());
    for (TokenId id : m.vocab_.encode(sentence)) padded.push_back(id);
    padded.push_back(Vocabulary::kEos);
    for (std::size_t i = n - 1; i < padded.size(); ++i) {
      ++top[Key(padded.begin() + static_cast<std::ptrdiff_t>(i + 1 - n),
                padded.begin() + static_cast<std::ptrdiff_t>(i + 1))];
    }
  }
  // Continuation count of a k-gram: distinct left extensions among the
  // observed (k+1)-grams.
  for (std::size_t k = n - 1; k >= 1; --k) {
    auto& lower = m.counts_[k - 1];
    for (const auto& [gram, count] : m.counts_[k]) {
      ++lower[Key(gram.begin() + 1, gram.end())];
    }
  }
  m.index_contexts();
  return m;
}

void KneserNeyModel::index_contexts() {
  contexts_.assign(order_, {});
  for (std::size_t k = 1; k <= order_; ++k) {
    for (const auto& [gram, count] : counts_[k - 1]) {
      auto& stats = contexts_[k - 1][Key(gram.begin(), gram.end() - 1)];
      stats.total += count;
      stats.distinct += 1;
    }
  }
}

double KneserNeyModel::level_probability(std::size_t level, std::span<const TokenId> context,
                                         TokenId word) const {
  if (level == 0) return 1.0 / static_cast<double>(vocab_.size());
  const double lower = level_probability(level - 1, context.subspan(1), word);
  Key key(context.begin(), context.end());
  auto ctx = contexts_[level - 1].find(key);
  if (ctx == contexts_[level - 1].end() || ctx->second.total == 0) return lower;
  key.push_back(word);
  auto hit = counts_[level - 1].find(key);
  const double count = hit == counts_[level - 1].end() ? 0.0 : static_cast<double>(hit->second);
  const double total = static_cast<double>(ctx->second.total);
  const double backoff = discount_ * static_cast<double>(ctx->second.distinct) / total;
  return std::max(count - discount_, 0.0) / total + backoff * lower;
}

std::vector<TokenId> KneserNeyModel::padded_context(std::span<const TokenId> context) const {
  const std::size_t width = order_ - 1;
  std::vector<TokenId> out;
  out.reserve(width);
  if (context.size() < width) out.assign(width - context.size(), vocab_.bos());
  const std::size_t from = context.size() > width ? context.size() - width : 0;
  out.insert(out.end(), context.begin() + static_cast<std::ptrdiff_t>(from), context.end());
  return out;
}

double KneserNeyModel::probability(std::span<const TokenId> context, TokenId word) const {
  const auto ctx = padded_context(context);
  return level_probability(order_, ctx, word);
}

TokenLogProbs KneserNeyModel::token_log_probs(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids = vocab_.encode(tokens);
  ids.push_back(Vocabulary::kEos);
  TokenLogProbs out;
  out.values.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double p = probability(std::span<const TokenId>(ids.data(), i), ids[i]);
    out.values.push_back(floored_log(p, out.floored));
  }
  return out;
}

std::vector<double> KneserNeyModel::next_distribution(std::span<const std::string> prefix) const {
  const auto ids = vocab_.encode(prefix);
  const auto ctx = padded_context(ids);
  std::vector<double> dist(vocab_.size());
  for (TokenId w = 0; w < vocab_.size(); ++w) dist[w] = level_probability(order_, ctx, w);
  return dist;
}

std::string KneserNeyModel::serialize() const {
  std::string out(kFormat);
  out += " order=" + std::to_string(order_) + " discount=" + format_exact(discount_) +
         " min_count=" + std::to_string(min_count_) + "\n";
  if (!meta_.empty()) out += meta_ + "\n";
  vocab_.serialize(out);
  for (std::size_t k = 1; k <= order_; ++k) {
    std::vector<std::pair<Key, std::uint64_t>> rows(counts_[k - 1].begin(), counts_[k - 1].end());
    std::sort(rows.begin(), rows.end());
    out += "level " + std::to_string(k) + " " + std::to_string(rows.size()) + "\n";
    for (const auto& [gram, count] : rows) {
      for (std::size_t i = 0; i < gram.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(gram[i]);
      }
      out += '\t';
      out += std::to_string(count);
      out += '\n';
    }
  }
  return out;
}

KneserNeyModel KneserNeyModel::parse(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw DataError("empty Kneser-Ney model");
  const auto header = split(lines[0], ' ');
  if (header.size() != 5 || header[0] != "kn" || header[1] != "v1" ||
      !header[2].starts_with("order=") || !header[3].starts_with("discount=") ||
      !header[4].starts_with("min_count=")) {
    throw DataError("not a kn v1 model");
  }
  KneserNeyModel m;
  m.order_ = static_cast<std::size_t>(parse_int(header[2].substr(6)));
  m.discount_ = parse_double(header[3].substr(9));
  m.min_count_ = static_cast<std::size_t>(parse_int(header[4].substr(10)));
  if (m.order_ < 2) throw DataError("bad Kneser-Ney order");
  std::size_t at = 1;
  if (at < lines.size() && lines[at].starts_with(kMetaPrefix)) m.meta_ = lines[at++];
  m.vocab_ = Vocabulary::parse(lines, at);
  m.counts_.resize(m.order_);
  for (std::size_t k = 1; k <= m.order_; ++k) {
    if (at >= lines.size()) throw DataError("truncated Kneser-Ney model");
    const auto level = split(lines[at++], ' ');
    if (level.size() != 3 || level[0] != "level" ||
        static_cast<std::size_t>(parse_int(level[1])) != k) {
      throw DataError("bad Kneser-Ney level header");
    }
    const auto rows = static_cast<std::size_t>(parse_int(level[2]));
    if (at + rows > lines.size()) throw DataError("truncated Kneser-Ney level");
    for (std::size_t r = 0; r < rows; ++r, ++at) {
      const auto fields = split(lines[at], '\t');
      if (fields.size() != 2) throw DataError("bad Kneser-Ney n-gram line");
      Key gram;
      for (auto id : split(fields[0], ' ')) gram.push_back(static_cast<TokenId>(parse_int(id)));
      if (gram.size() != k) throw DataError("n-gram length does not match level");
      m.counts_[k - 1].emplace(std::move(gram), static_cast<std::uint64_t>(parse_int(fields[1])));
    }
  }
  if (at != lines.size()) throw DataError("trailing data in Kneser-Ney model");
  m.index_contexts();
  return m;
}

}  // namespace fluency
