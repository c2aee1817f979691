#include "fluency/bpe.hpp"

#include <cstdint>
#include <unordered_set>

#include "fluency/error.hpp"
#include "fluency/utf8.hpp"

namespace fluency {

namespace {

std::string pair_key(std::string_view left, std::string_view right) {
  std::string key(left);
  key.push_back('\t');
  key += right;
  return key;
}

bool has_marker(std::string_view piece) { return piece.ends_with(BpeModel::kEndOfWord); }

std::string_view strip_marker(std::string_view piece) {
  return has_marker(piece) ? piece.substr(0, piece.size() - BpeModel::kEndOfWord.size())
                           : piece;
}

// Symbol-id based trainer state with an ordered queue of pair counts.
class MergeTrainer {
 public:
  explicit MergeTrainer(const std::map<std::string, std::size_t>& word_counts) {
    for (const auto& [word, count] : word_counts) {
      auto chars = utf8::characters(word);
      if (chars.empty()) continue;
      chars.back() += BpeModel::kEndOfWord;
      std::vector<int> symbols;
      for (auto& c : chars) symbols.push_back(intern(c));
      words_.push_back(std::move(symbols));
      freqs_.push_back(static_cast<std::int64_t>(count));
    }
    for (std::size_t w = 0; w < words_.size(); ++w) add_word(w, +1);
  }

  std::optional<BpeModel::Merge> step() {
    if (queue_.empty()) return std::nullopt;
    const Entry best = *queue_.begin();
    if (best.count < 2) return std::nullopt;
    const int merged = intern(names_[best.left] + names_[best.right]);
    const std::uint64_t key = pack(best.left, best.right);
    std::vector<std::size_t> touched(where_[key].begin(), where_[key].end());
    for (std::size_t w : touched) {
      add_word(w, -1);
      auto& sym = words_[w];
      std::vector<int> out;
      out.reserve(sym.size());
      for (std::size_t i = 0; i < sym.size(); ++i) {
        if (i + 1 < sym.size() && sym[i] == best.left && sym[i + 1] == best.right) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(sym[i]);
        }
      }
      sym = std::move(out);
      add_word(w, +1);
    }
    return BpeModel::Merge{names_[best.left], names_[best.right]};
  }

 private:
  struct Entry {
    std::int64_t count;
    int left;
    int right;
  };
  struct EntryOrder {
    const std::vector<std::string>* names;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count) return a.count > b.count;
      const auto& n = *names;
      if (n[a.left] != n[b.left]) return n[a.left] < n[b.left];
      return n[a.right] < n[b.right];
    }
  };

  static std::uint64_t pack(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  int intern(const std::string& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }

  void adjust(int a, int b, std::int64_t delta) {
    const std::uint64_t key = pack(a, b);
    auto& count = counts_[key];
    if (count > 0) queue_.erase(Entry{count, a, b});
    count += delta;
    if (count > 0) queue_.insert(Entry{count, a, b});
  }

  void add_word(std::size_t w, int sign) {
    const auto& sym = words_[w];
    for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
      adjust(sym[i], sym[i + 1], sign * freqs_[w]);
      if (sign > 0) where_[pack(sym[i], sym[i + 1])].insert(w);
    }
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::vector<int>> words_;
  std::vector<std::int64_t> freqs_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::unordered_set<std::size_t>> where_;
  std::set<Entry, EntryOrder> queue_{EntryOrder{&names_}};
};

}  // namespace

BpeModel BpeModel::train(const std::map<std::string, std::size_t>& word_counts,
                         std::size_t num_merges) {
  if (word_counts.empty()) throw DataError("cannot train BPE on an empty corpus");
  BpeModel model;
  for (const auto& [word, count] : word_counts) {
    for (auto& c : utf8::characters(word)) model.alphabet_.insert(std::move(c));
  }
  for (const auto& c : model.alphabet_) {
    model.vocab_.insert(c);
    model.vocab_.insert(c + std::string(kEndOfWord));
  }
  model.vocab_.insert(std::string(kUnknown));
  model.vocab_.insert(std::string(kUnknown) + std::string(kEndOfWord));

  MergeTrainer trainer(word_counts);
  while (model.merges_.size() < num_merges) {
    auto merge = trainer.step();
    if (!merge) break;
    model.vocab_.insert(merge->first + merge->second);
    model.merges_.push_back(std::move(*merge));
  }
  model.index_merges();
  return model;
}

void BpeModel::index_merges() {
  rank_.clear();
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    rank_.emplace(pair_key(merges_[i].first, merges_[i].second), i);
  }
}

std::vector<std::string> BpeModel::encode(std::string_view word) const {
  std::vector<std::string> sym;
  for (auto& c : utf8::characters(word)) {
    sym.push_back(alphabet_.count(c) ? std::move(c) : std::string(kUnknown));
  }
  if (sym.empty()) return sym;
  sym.back() += kEndOfWord;

  while (sym.size() > 1) {
    std::size_t best_rank = merges_.size();
    for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
      auto it = rank_.find(pair_key(sym[i], sym[i + 1]));
      if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == merges_.size()) break;
    const auto& [left, right] = merges_[best_rank];
    std::vector<std::string> out;
    out.reserve(sym.size());
    for (std::size_t i = 0; i < sym.size(); ++i) {
      if (i + 1 < sym.size() && sym[i] == left && sym[i + 1] == right) {
        out.push_back(left + right);
        ++i;
      } else {
        out.push_back(std::move(sym[i]));
      }
    }
    sym = std::move(out);
  }
  return sym;
}

std::vector<std::string> BpeModel::encode_words(std::span<const std::string> words) const {
  std::vector<std::string> out;
  for (const auto& w : words) {
    for (auto& p : encode(w)) out.push_back(std::move(p));
  }
  return out;
}

std::string BpeModel::decode(std::span<const std::string> pieces) const {
  std::string word;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::string_view piece = pieces[i];
    const bool last = i + 1 == pieces.size();
    if (has_marker(piece) != last) {
      throw DataError("malformed BPE pieces: end-of-word marker misplaced at piece " +
                      std::to_string(i));
    }
    std::string_view base = strip_marker(piece);
    if (base.empty() || base.find(kEndOfWord) != std::string_view::npos) {
      throw DataError("malformed BPE piece '" + std::string(piece) + "'");
    }
    if (base == kUnknown) {
      utf8::append(word, 0xFFFD);
    } else {
      word += base;
    }
  }
  return word;
}

std::vector<std::string> BpeModel::decode_words(std::span<const std::string> pieces) const {
  std::vector<std::string> words;
  std::size_t start = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (has_marker(pieces[i])) {
      words.push_back(decode(pieces.subspan(start, i + 1 - start)));
      start = i + 1;
    }
  }
  if (start != pieces.size()) {
    throw DataError("malformed BPE pieces: trailing pieces without end-of-word marker");
  }
  return words;
}

std::string BpeModel::serialize() const {
  std::string out(kFormat);
  out += " merges=" + std::to_string(merges_.size()) + "\n";
  if (!meta_.empty()) out += meta_ + "\n";
  for (const auto& [l, r] : merges_) out += l + "\t" + r + "\n";
  out += "vocab " + std::to_string(vocab_.size()) + "\n";
  for (const auto& v : vocab_) out += v + "\n";
  return out;
}

BpeModel BpeModel::parse(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t at = 0;
  auto next = [&]() -> std::string_view {
    if (at >= lines.size()) throw DataError("truncated BPE model");
    return lines[at++];
  };
  const std::string_view header = next();
  const std::string prefix = std::string(kFormat) + " merges=";
  if (!header.starts_with(prefix)) throw DataError("not a bpe v1 model");
  const auto n_merges = static_cast<std::size_t>(parse_int(header.substr(prefix.size())));

  BpeModel model;
  if (at < lines.size() && lines[at].starts_with(kMetaPrefix)) model.meta_ = next();
  for (std::size_t i = 0; i < n_merges; ++i) {
    const auto fields = split(next(), '\t');
    if (fields.size() != 2) throw DataError("bad BPE merge line");
    model.merges_.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  const std::string_view vocab_header = next();
  if (!vocab_header.starts_with("vocab ")) throw DataError("missing BPE vocab section");
  const auto n_vocab = static_cast<std::size_t>(parse_int(vocab_header.substr(6)));
  for (std::size_t i = 0; i < n_vocab; ++i) {
    std::string piece(next());
    if (!has_marker(piece) && piece != kUnknown && utf8::length(piece) == 1) {
      model.alphabet_.insert(piece);
    }
    model.vocab_.insert(std::move(piece));
  }
  if (at != lines.size()) throw DataError("trailing data after BPE vocab");
  model.index_merges();
  return model;
}

void BpeModel::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

BpeModel BpeModel::load(const std::filesystem::path& path) { return parse(read_file(path)); }

BpeModel train_bpe(std::span<const Sentence> corpus, std::size_t num_merges) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) ++counts[t];
  }
  if (counts.empty()) throw DataError("cannot train BPE on an empty corpus");
  return BpeModel::train(counts, num_merges);
}

}  // namespace fluency
