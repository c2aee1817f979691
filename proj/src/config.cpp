#include "fluency/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <set>

#include "fluency/digest.hpp"
#include "fluency/error.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto part : split(s, ',')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("not a boolean: '" + v + "'");
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw UsageError("config file not found: " + path.string());
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  PipelineConfig c;
  const auto base = path.parent_path();
  for (const auto& [section, entries] : tree) {
    for (const auto& [key, node] : entries) {
      const std::string v = node.get_value<std::string>();
      const std::string name = section + "." + key;
      try {
        auto as_size = [&] { return static_cast<std::size_t>(parse_int(v)); };
        if (name == "run.seed") c.seed = static_cast<std::uint64_t>(parse_int(v));
        else if (name == "paths.corpus_dir") c.corpus_dir = base / v;
        else if (name == "paths.output_dir") c.output_dir = base / v;
        else if (name == "ingest.min_tokens") c.ingest.min_tokens = as_size();
        else if (name == "ingest.max_tokens") c.ingest.max_tokens = as_size();
        else if (name == "ingest.reject_latin") c.ingest.reject_latin = parse_bool(v);
        else if (name == "ingest.junk") c.ingest.extra_junk = split_list(v);
        else if (name == "ingest.train") c.ingest.train = as_size();
        else if (name == "ingest.validation") c.ingest.validation = as_size();
        else if (name == "ingest.test") c.ingest.test = as_size();
        else if (name == "tokenizer.regime") {
          if (v == "word") c.tokenizer.regime = TokenizerRegime::kWord;
          else if (v == "bpe") c.tokenizer.regime = TokenizerRegime::kBpe;
          else throw UsageError("tokenizer.regime must be word or bpe");
        }
        else if (name == "tokenizer.merges") c.tokenizer.merges = as_size();
        else if (name == "lm.kind") c.lm.kind = v;
        else if (name == "lm.order") c.lm.order = as_size();
        else if (name == "lm.discount") c.lm.discount = parse_double(v);
        else if (name == "lm.unk_min_count") c.lm.unk_min_count = as_size();
        else if (name == "lm.smoothing_k") c.lm.smoothing_k = parse_double(v);
        else if (name == "lm.embedding_dim") c.lm.embedding_dim = as_size();
        else if (name == "lm.hidden_dim") c.lm.hidden_dim = as_size();
        else if (name == "lm.epochs") c.lm.epochs = as_size();
        else if (name == "lm.learning_rate") c.lm.learning_rate = parse_double(v);
        else if (name == "lm.batch_size") c.lm.batch_size = as_size();
        else if (name == "lm.patience") c.lm.patience = as_size();
        else if (name == "corrupt.total") c.corrupt.total = as_size();
        else if (name == "corrupt.proportions") {
          const auto parts = split_list(v);
          if (parts.size() != 4) throw UsageError("corrupt.proportions needs 4 values");
          for (std::size_t i = 0; i < 4; ++i) c.corrupt.proportions[i] = parse_double(parts[i]);
        }
        else if (name == "score.baseline") {
          if (v == "mean-logp") c.score.mean_logp_baseline = true;
          else if (v == "slor" || v.empty()) c.score.mean_logp_baseline = false;
          else throw UsageError("score.baseline must be slor or mean-logp");
        }
        else if (name == "score.threads") c.score.threads = as_size();
        else throw UsageError("unknown config key '" + name + "'");
      } catch (const DataError& e) {
        throw UsageError("config key '" + name + "': " + e.what());
      }
    }
  }
  return c;
}

std::string PipelineConfig::canonical() const {
  std::string s;
  auto kv = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
  kv("run.seed", std::to_string(seed));
  kv("ingest.min_tokens", std::to_string(ingest.min_tokens));
  kv("ingest.max_tokens", std::to_string(ingest.max_tokens));
  kv("ingest.reject_latin", ingest.reject_latin ? "true" : "false");
  std::string junk;
  for (const auto& j : ingest.extra_junk) junk += (junk.empty() ? "" : ",") + j;
  kv("ingest.junk", junk);
  kv("ingest.train", std::to_string(ingest.train));
  kv("ingest.validation", std::to_string(ingest.validation));
  kv("ingest.test", std::to_string(ingest.test));
  kv("tokenizer.regime", tokenizer.regime == TokenizerRegime::kBpe ? "bpe" : "word");
  kv("tokenizer.merges", std::to_string(tokenizer.merges));
  kv("lm.kind", lm.kind);
  kv("lm.order", std::to_string(lm.order));
  kv("lm.discount", format_exact(lm.discount));
  kv("lm.unk_min_count", std::to_string(lm.unk_min_count));
  kv("lm.smoothing_k", format_exact(lm.smoothing_k));
  kv("lm.embedding_dim", std::to_string(lm.embedding_dim));
  kv("lm.hidden_dim", std::to_string(lm.hidden_dim));
  kv("lm.epochs", std::to_string(lm.epochs));
  kv("lm.learning_rate", format_exact(lm.learning_rate));
  kv("lm.batch_size", std::to_string(lm.batch_size));
  kv("lm.patience", std::to_string(lm.patience));
  kv("corrupt.total", std::to_string(corrupt.total));
  std::string props;
  for (double p : corrupt.proportions) props += (props.empty() ? "" : ",") + format_exact(p);
  kv("corrupt.proportions", props);
  kv("score.baseline", score.mean_logp_baseline ? "mean-logp" : "slor");
  // score.threads does not change results and is left out.
  return s;
}

std::string PipelineConfig::hash() const { return short_digest(canonical()); }

void PipelineConfig::validate() const {
  if (corpus_dir.empty()) throw UsageError("paths.corpus_dir is not set");
  if (output_dir.empty()) throw UsageError("paths.output_dir is not set");
  if (!std::filesystem::is_directory(corpus_dir)) {
    throw UsageError("corpus directory not found: " + corpus_dir.string());
  }
  if (ingest.min_tokens < 1 || ingest.min_tokens > ingest.max_tokens) {
    throw UsageError("ingest token bounds must satisfy 1 <= min <= max");
  }
  static const std::set<std::string> kinds{"kn", "rnn", "unigram"};
  if (!kinds.count(lm.kind)) throw UsageError("lm.kind must be kn, rnn or unigram");
  if (lm.kind == "kn" && (lm.order < 2 || !(lm.discount > 0.0 && lm.discount < 1.0))) {
    throw UsageError("Kneser-Ney needs order >= 2 and 0 < discount < 1");
  }
  label_counts(corrupt.total, corrupt.proportions);
}

}  // namespace fluency
