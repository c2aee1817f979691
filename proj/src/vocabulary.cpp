#include "fluency/vocabulary.hpp"

#include <map>

#include "fluency/error.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

Vocabulary Vocabulary::build(std::span<const TokenSequence> corpus, std::size_t min_count) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& t : sentence) ++counts[t];
  }
  Vocabulary v;
  v.tokens_ = {std::string(kEosToken), std::string(kUnkToken)};
  v.counts_ = {corpus.size(), 0};
  for (const auto& [tok, c] : counts) {
    if (c < min_count || tok == kEosToken || tok == kUnkToken || tok == kBosToken) {
      v.counts_[kUnk] += c;
    } else {
      v.tokens_.push_back(tok);
      v.counts_.push_back(c);
    }
  }
  v.index();
  return v;
}

void Vocabulary::index() {
  ids_.clear();
  surface_total_ = 0;
  for (TokenId i = 0; i < tokens_.size(); ++i) {
    ids_.emplace(tokens_[i], i);
    if (i != kEos) surface_total_ += counts_[i];
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end() || it->second == kEos) return kUnk;
  return it->second;
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

void Vocabulary::serialize(std::string& out) const {
  out += "vocab " + std::to_string(tokens_.size()) + "\n";
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i] + "\t" + std::to_string(counts_[i]) + "\n";
  }
}

Vocabulary Vocabulary::parse(std::span<const std::string_view> lines, std::size_t& at) {
  if (at >= lines.size() || !lines[at].starts_with("vocab ")) {
    throw DataError("missing vocab section");
  }
  const auto n = static_cast<std::size_t>(parse_int(lines[at].substr(6)));
  ++at;
  if (n < 2 || at + n > lines.size()) throw DataError("truncated vocab section");
  Vocabulary v;
  for (std::size_t i = 0; i < n; ++i, ++at) {
    const auto fields = split(lines[at], '\t');
    if (fields.size() != 2) throw DataError("bad vocab line");
    v.tokens_.emplace_back(fields[0]);
    v.counts_.push_back(static_cast<std::uint64_t>(parse_int(fields[1])));
  }
  if (v.tokens_[kEos] != kEosToken || v.tokens_[kUnk] != kUnkToken) {
    throw DataError("vocab section lacks reserved tokens");
  }
  v.index();
  return v;
}

}  // namespace fluency
