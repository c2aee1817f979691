#include "fluency/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include "fluency/digest.hpp"
#include "fluency/error.hpp"
#include "fluency/rng.hpp"
#include "fluency/tokenizer.hpp"
#include "fluency/utf8.hpp"

namespace fluency {

namespace {

bool is_control(char32_t cp) { return cp < 0x20 || (cp >= 0x7F && cp <= 0x9F); }

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool in_any(char32_t cp, std::span<const CodepointRange> ranges) {
  return std::any_of(ranges.begin(), ranges.end(),
                     [cp](const CodepointRange& r) { return r.contains(cp); });
}

char32_t parse_codepoint(std::string_view s) {
  if (s.size() > 2 && (s.starts_with("U+") || s.starts_with("u+"))) {
    return static_cast<char32_t>(std::stoul(std::string(s.substr(2)), nullptr, 16));
  }
  auto cps = utf8::decode(s);
  if (cps.size() != 1) throw UsageError("bad code point: '" + std::string(s) + "'");
  return cps[0];
}

}  // namespace

Sentence Sentence::from_text(std::string text) {
  Sentence s;
  s.id = short_digest(text);
  s.tokens = whitespace_tokenize(text);
  s.text = std::move(text);
  return s;
}

std::vector<CodepointRange> default_junk_ranges() {
  return {
      {0x200B, 0x200B},    // zero width space
      {0x2022, 0x2023},    // bullets
      {0x2122, 0x2122},    // trade mark
      {0x00A9, 0x00A9},    // copyright
      {0x00AE, 0x00AE},    // registered
      {0x25A0, 0x25FF},    // geometric shapes
      {0x2600, 0x26FF},    // misc symbols
      {0x2700, 0x27BF},    // dingbats
      {0xFEFF, 0xFEFF},    // byte order mark
      {0xFFFC, 0xFFFD},    // object / replacement character
      {0x1F300, 0x1FAFF},  // pictographs and emoji
  };
}

std::vector<CodepointRange> latin_letter_ranges() {
  return {{U'A', U'Z'}, {U'a', U'z'}};
}

CodepointRange parse_codepoint_range(std::string_view spec) {
  auto dash = spec.find('-', 1);
  if (dash == std::string_view::npos) {
    char32_t cp = parse_codepoint(spec);
    return {cp, cp};
  }
  CodepointRange r{parse_codepoint(spec.substr(0, dash)),
                   parse_codepoint(spec.substr(dash + 1))};
  if (r.first > r.last) throw UsageError("empty code point range: " + std::string(spec));
  return r;
}

std::string clean_text(std::string_view raw, std::span<const CodepointRange> junk) {
  const std::u32string cps = utf8::decode(raw);
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (is_control(cp) || in_any(cp, junk)) continue;
    if (pending_space) out.push_back(' ');
    pending_space = false;
    utf8::append(out, cp);
  }
  return out;
}

std::vector<Sentence> filter_sentences(std::span<const Sentence> sentences,
                                       const FilterOptions& options) {
  if (options.min_tokens < 1 || options.min_tokens > options.max_tokens) {
    throw UsageError("token bounds must satisfy 1 <= min <= max");
  }
  std::vector<Sentence> out;
  for (const auto& s : sentences) {
    const std::size_t n = s.tokens.size();
    if (n < options.min_tokens || n > options.max_tokens) continue;
    if (!options.reject_scripts.empty()) {
      const auto cps = utf8::decode(s.text);
      if (std::any_of(cps.begin(), cps.end(), [&](char32_t cp) {
            return in_any(cp, options.reject_scripts);
          })) {
        continue;
      }
    }
    out.push_back(s);
  }
  return out;
}

std::vector<Sentence> dedupe(std::span<const Sentence> sentences) {
  std::unordered_set<std::string_view> seen;
  std::vector<Sentence> out;
  for (const auto& s : sentences) {
    if (seen.insert(s.text).second) out.push_back(s);
  }
  return out;
}

CorpusSplit split_corpus(std::span<const Sentence> sentences, std::size_t train_n,
                         std::size_t val_n, std::size_t test_n, std::uint64_t seed) {
  const std::size_t need = train_n + val_n + test_n;
  if (need > sentences.size()) {
    throw DataError("insufficient: have " + std::to_string(sentences.size()) +
                    ", need " + std::to_string(need));
  }
  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  CorpusSplit split;
  split.seed = seed;
  std::size_t k = 0;
  auto take = [&](std::vector<Sentence>& dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst.push_back(sentences[order[k++]]);
  };
  take(split.train, train_n);
  take(split.validation, val_n);
  take(split.test, test_n);
  take(split.unused, sentences.size() - need);
  return split;
}

std::vector<Sentence> load_raw_directory(const std::filesystem::path& dir,
                                         std::span<const CodepointRange> junk) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("input directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Sentence> out;
  for (const auto& file : files) {
    const auto lines = read_lines(file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string text;
      try {
        text = clean_text(lines[i], junk);
      } catch (const DataError& e) {
        throw DataError(file.string() + ":" + std::to_string(i + 1) + ": " + e.what());
      }
      if (!text.empty()) out.push_back(Sentence::from_text(std::move(text)));
    }
  }
  return out;
}

std::string render_manifest(const CorpusSplit& split,
                            const std::optional<Provenance>& provenance) {
  std::string out;
  if (provenance) out += meta_line(*provenance) + "\n";
  auto emit = [&](const std::vector<Sentence>& part, std::string_view name) {
    for (const auto& s : part) {
      out += s.id;
      out += '\t';
      out += name;
      out += '\t';
      out += s.text;
      out += '\n';
    }
  };
  emit(split.train, "train");
  emit(split.validation, "validation");
  emit(split.test, "test");
  emit(split.unused, "unused");
  return out;
}

std::string render_sentence_lines(std::span<const Sentence> sentences,
                                  const std::optional<Provenance>& provenance) {
  std::string out;
  if (provenance) out += meta_line(*provenance) + "\n";
  for (const auto& s : sentences) {
    out += s.text;
    out += '\n';
  }
  return out;
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  const auto lines = strip_meta(read_lines(path));
  std::vector<Sentence> out;
  std::size_t columns = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split(lines[i], '\t');
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) +
                      ": inconsistent column count");
    }
    if (columns == 1) {
      out.push_back(Sentence::from_text(clean_text(fields[0], {})));
    } else if (columns == 3 || columns == 4) {
      // manifest: id split text; graded set: id label text spec
      Sentence s = Sentence::from_text(clean_text(fields[2], {}));
      s.id = std::string(fields[0]);
      out.push_back(std::move(s));
    } else {
      throw DataError(path.string() + ": unrecognized sentence file layout");
    }
  }
  return out;
}

}  // namespace fluency
