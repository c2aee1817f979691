#include "fluency/rnn_lm.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "fluency/error.hpp"
#include "fluency/rng.hpp"
#include "fluency/simd/kernels.hpp"

namespace fluency {

struct RnnLanguageModel::Step {
  TokenId input = 0;
  std::vector<double> h_prev, z, r, c, h, logits, probs;
  double log_norm = 0.0;
};

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<std::vector<TokenId>> encode_all(const Vocabulary& vocab,
                                             std::span<const TokenSequence> corpus) {
  std::vector<std::vector<TokenId>> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(vocab.encode(s));
  return out;
}

std::size_t predicted_tokens(std::span<const std::vector<TokenId>> batch) {
  std::size_t n = 0;
  for (const auto& s : batch) n += s.size() + 1;
  return n;
}

}  // namespace

void RnnLanguageModel::build_layout() {
  const std::size_t v = vocab_.size();
  const std::size_t h = hidden_;
  std::size_t off = 0;
  auto take = [&](std::size_t n) {
    const std::size_t at = off;
    off += n;
    return at;
  };
  at_.embed = take((v + 1) * emb_);
  at_.wz = take(h * emb_);
  at_.wr = take(h * emb_);
  at_.wh = take(h * emb_);
  at_.uz = take(h * h);
  at_.ur = take(h * h);
  at_.uh = take(h * h);
  at_.bz = take(h);
  at_.br = take(h);
  at_.bh = take(h);
  at_.wo = take(v * h);
  at_.bo = take(v);
  at_.total = off;
}

RnnLanguageModel RnnLanguageModel::initialize(Vocabulary vocab, const RnnConfig& config) {
  if (config.embedding_dim < 1 || config.hidden_dim < 1) {
    throw UsageError("RNN dimensions must be >= 1");
  }
  RnnLanguageModel m;
  m.vocab_ = std::move(vocab);
  m.emb_ = config.embedding_dim;
  m.hidden_ = config.hidden_dim;
  m.min_count_ = config.unk_min_count;
  m.build_layout();
  m.params_.assign(m.at_.total, 0.0);
  Rng rng(config.seed);
  auto fill = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      m.params_[i] = (2.0 * rng.uniform() - 1.0) * config.init_scale;
    }
  };
  fill(m.at_.embed, m.at_.bz);  // embeddings and all weight matrices
  fill(m.at_.wo, m.at_.bo);
  return m;
}

std::vector<TokenId> RnnLanguageModel::with_bos(std::span<const TokenId> ids) const {
  std::vector<TokenId> inputs;
  inputs.reserve(ids.size() + 1);
  inputs.push_back(vocab_.bos());
  inputs.insert(inputs.end(), ids.begin(), ids.end());
  return inputs;
}

std::vector<RnnLanguageModel::Step> RnnLanguageModel::forward(
    std::span<const TokenId> inputs) const {
  const auto& k = simd::active_kernels();
  const std::size_t h_dim = hidden_;
  const std::size_t v = vocab_.size();
  const double* p = params_.data();

  std::vector<Step> steps;
  steps.reserve(inputs.size());
  std::vector<double> h(h_dim, 0.0);
  std::vector<double> rh(h_dim);
  for (TokenId x : inputs) {
    Step s;
    s.input = x;
    s.h_prev = h;
    const double* e = p + at_.embed + static_cast<std::size_t>(x) * emb_;

    s.z.assign(p + at_.bz, p + at_.bz + h_dim);
    k.gemv(p + at_.wz, h_dim, emb_, e, s.z.data());
    k.gemv(p + at_.uz, h_dim, h_dim, h.data(), s.z.data());
    for (auto& z : s.z) z = sigmoid(z);

    s.r.assign(p + at_.br, p + at_.br + h_dim);
    k.gemv(p + at_.wr, h_dim, emb_, e, s.r.data());
    k.gemv(p + at_.ur, h_dim, h_dim, h.data(), s.r.data());
    for (auto& r : s.r) r = sigmoid(r);

    for (std::size_t i = 0; i < h_dim; ++i) rh[i] = s.r[i] * h[i];
    s.c.assign(p + at_.bh, p + at_.bh + h_dim);
    k.gemv(p + at_.wh, h_dim, emb_, e, s.c.data());
    k.gemv(p + at_.uh, h_dim, h_dim, rh.data(), s.c.data());
    for (auto& c : s.c) c = std::tanh(c);

    s.h.resize(h_dim);
    for (std::size_t i = 0; i < h_dim; ++i) {
      s.h[i] = (1.0 - s.z[i]) * h[i] + s.z[i] * s.c[i];
    }

    s.logits.assign(p + at_.bo, p + at_.bo + v);
    k.gemv(p + at_.wo, v, h_dim, s.h.data(), s.logits.data());
    const double m = k.max(s.logits.data(), v);
    s.probs.resize(v);
    for (std::size_t i = 0; i < v; ++i) s.probs[i] = std::exp(s.logits[i] - m);
    const double z = k.sum(s.probs.data(), v);
    for (auto& q : s.probs) q /= z;
    s.log_norm = m + std::log(z);

    h = s.h;
    steps.push_back(std::move(s));
  }
  return steps;
}

double RnnLanguageModel::loss(std::span<const std::vector<TokenId>> batch) const {
  double total = 0.0;
  for (const auto& ids : batch) {
    const auto steps = forward(with_bos(ids));
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const TokenId target = t < ids.size() ? ids[t] : Vocabulary::kEos;
      total -= steps[t].logits[target] - steps[t].log_norm;
    }
  }
  return total;
}

double RnnLanguageModel::loss_and_gradient(std::span<const std::vector<TokenId>> batch,
                                           std::span<double> grad) const {
  const auto& k = simd::active_kernels();
  const std::size_t h_dim = hidden_;
  const std::size_t v = vocab_.size();
  const double* p = params_.data();
  double* g = grad.data();

  std::vector<double> dlogits(v), dh(h_dim), dh_next(h_dim), dz(h_dim), dc(h_dim);
  std::vector<double> drh(h_dim), dr(h_dim), de(emb_), rh(h_dim);
  double total = 0.0;
  for (const auto& ids : batch) {
    const auto steps = forward(with_bos(ids));
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    for (std::size_t t = steps.size(); t-- > 0;) {
      const Step& s = steps[t];
      const TokenId target = t < ids.size() ? ids[t] : Vocabulary::kEos;
      total -= s.logits[target] - s.log_norm;

      dlogits = s.probs;
      dlogits[target] -= 1.0;
      k.rank1(g + at_.wo, v, h_dim, dlogits.data(), s.h.data());
      k.axpy(1.0, dlogits.data(), g + at_.bo, v);
      dh = dh_next;
      k.gemv_t(p + at_.wo, v, h_dim, dlogits.data(), dh.data());

      // h = (1 - z) h_prev + z c
      for (std::size_t i = 0; i < h_dim; ++i) {
        dz[i] = dh[i] * (s.c[i] - s.h_prev[i]) * s.z[i] * (1.0 - s.z[i]);
        dc[i] = dh[i] * s.z[i] * (1.0 - s.c[i] * s.c[i]);
        dh_next[i] = dh[i] * (1.0 - s.z[i]);
        rh[i] = s.r[i] * s.h_prev[i];
      }
      const double* e = p + at_.embed + static_cast<std::size_t>(s.input) * emb_;
      std::fill(de.begin(), de.end(), 0.0);

      // candidate: c = tanh(Wh e + Uh (r * h_prev) + bh)
      k.rank1(g + at_.wh, h_dim, emb_, dc.data(), e);
      k.rank1(g + at_.uh, h_dim, h_dim, dc.data(), rh.data());
      k.axpy(1.0, dc.data(), g + at_.bh, h_dim);
      k.gemv_t(p + at_.wh, h_dim, emb_, dc.data(), de.data());
      std::fill(drh.begin(), drh.end(), 0.0);
      k.gemv_t(p + at_.uh, h_dim, h_dim, dc.data(), drh.data());
      for (std::size_t i = 0; i < h_dim; ++i) {
        dr[i] = drh[i] * s.h_prev[i] * s.r[i] * (1.0 - s.r[i]);
        dh_next[i] += drh[i] * s.r[i];
      }

      // reset gate
      k.rank1(g + at_.wr, h_dim, emb_, dr.data(), e);
      k.rank1(g + at_.ur, h_dim, h_dim, dr.data(), s.h_prev.data());
      k.axpy(1.0, dr.data(), g + at_.br, h_dim);
      k.gemv_t(p + at_.wr, h_dim, emb_, dr.data(), de.data());
      k.gemv_t(p + at_.ur, h_dim, h_dim, dr.data(), dh_next.data());

      // update gate
      k.rank1(g + at_.wz, h_dim, emb_, dz.data(), e);
      k.rank1(g + at_.uz, h_dim, h_dim, dz.data(), s.h_prev.data());
      k.axpy(1.0, dz.data(), g + at_.bz, h_dim);
      k.gemv_t(p + at_.wz, h_dim, emb_, dz.data(), de.data());
      k.gemv_t(p + at_.uz, h_dim, h_dim, dz.data(), dh_next.data());

      k.axpy(1.0, de.data(), g + at_.embed + static_cast<std::size_t>(s.input) * emb_, emb_);
    }
  }
  return total;
}

RnnLanguageModel RnnLanguageModel::train(std::span<const TokenSequence> corpus,
                                         std::span<const TokenSequence> validation,
                                         const RnnConfig& config,
                                         std::vector<EpochReport>* history) {
  if (corpus.empty()) throw DataError("cannot train RNN model on an empty corpus");
  if (config.batch_size < 1) throw UsageError("batch size must be >= 1");
  RnnLanguageModel m = initialize(Vocabulary::build(corpus, config.unk_min_count), config);

  const auto train_ids = encode_all(m.vocab_, corpus);
  const auto val_ids = encode_all(m.vocab_, validation);
  const std::size_t n_params = m.params_.size();
  std::vector<double> grad(n_params), mom(n_params, 0.0), var(n_params, 0.0);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::vector<std::size_t> order(train_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(config.seed, 1));

  std::vector<double> best = m.params_;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::vector<TokenId>> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
        batch.push_back(train_ids[order[i]]);
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      const double batch_loss = m.loss_and_gradient(batch, grad);
      if (!std::isfinite(batch_loss)) {
        throw NumericError("RNN training diverged in epoch " + std::to_string(epoch));
      }
      const std::size_t tokens = predicted_tokens(batch);
      epoch_loss += batch_loss;
      epoch_tokens += tokens;

      const double scale = 1.0 / static_cast<double>(tokens);
      beta1_t *= kBeta1;
      beta2_t *= kBeta2;
      const double step = config.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      for (std::size_t i = 0; i < n_params; ++i) {
        const double gi = grad[i] * scale;
        mom[i] = kBeta1 * mom[i] + (1.0 - kBeta1) * gi;
        var[i] = kBeta2 * var[i] + (1.0 - kBeta2) * gi * gi;
        m.params_[i] -= step * mom[i] / (std::sqrt(var[i]) + kEps);
      }
    }
    EpochReport report;
    report.epoch = epoch;
    report.train_loss = epoch_loss / static_cast<double>(epoch_tokens);
    report.validation_loss =
        val_ids.empty() ? report.train_loss
                        : m.loss(val_ids) / static_cast<double>(predicted_tokens(val_ids));
    if (!std::isfinite(report.train_loss) || !std::isfinite(report.validation_loss)) {
      throw NumericError("RNN training diverged in epoch " + std::to_string(epoch));
    }
    if (history) history->push_back(report);
    if (report.validation_loss < best_loss) {
      best_loss = report.validation_loss;
      best = m.params_;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  m.params_ = std::move(best);
  return m;
}

TokenLogProbs RnnLanguageModel::token_log_probs(std::span<const std::string> tokens) const {
  const auto ids = vocab_.encode(tokens);
  const auto steps = forward(with_bos(ids));
  TokenLogProbs out;
  out.values.reserve(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const TokenId target = t < ids.size() ? ids[t] : Vocabulary::kEos;
    double lp = steps[t].logits[target] - steps[t].log_norm;
    if (lp < kLogProbFloor) {
      lp = kLogProbFloor;
      out.floored = true;
    }
    out.values.push_back(std::min(lp, 0.0));
  }
  return out;
}

std::vector<double> RnnLanguageModel::next_distribution(std::span<const std::string> prefix) const {
  auto steps = forward(with_bos(vocab_.encode(prefix)));
  return std::move(steps.back().probs);
}

std::string RnnLanguageModel::serialize() const {
  std::string out(kFormat);
  out += " emb=" + std::to_string(emb_) + " hidden=" + std::to_string(hidden_) +
         " min_count=" + std::to_string(min_count_) + "\n";
  if (!meta_.empty()) out += meta_ + "\n";
  vocab_.serialize(out);
  out += "weights " + std::to_string(params_.size()) + "\n";
  out.reserve(out.size() + 8 * params_.size());
  for (double w : params_) {
    const auto bits = std::bit_cast<std::uint64_t>(w);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
  return out;
}

RnnLanguageModel RnnLanguageModel::parse(std::string_view bytes) {
  std::size_t pos = 0;
  std::vector<std::string_view> lines;
  // Text lines up to and including the "weights <n>" line.
  while (true) {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) throw DataError("truncated RNN model");
    lines.push_back(bytes.substr(pos, end - pos));
    pos = end + 1;
    if (lines.back().starts_with("weights ")) break;
  }
  const auto header = split(lines[0], ' ');
  if (header.size() != 5 || header[0] != "rnn" || header[1] != "v1" ||
      !header[2].starts_with("emb=") || !header[3].starts_with("hidden=") ||
      !header[4].starts_with("min_count=")) {
    throw DataError("not an rnn v1 model");
  }
  RnnLanguageModel m;
  m.emb_ = static_cast<std::size_t>(parse_int(header[2].substr(4)));
  m.hidden_ = static_cast<std::size_t>(parse_int(header[3].substr(7)));
  m.min_count_ = static_cast<std::size_t>(parse_int(header[4].substr(10)));
  std::size_t at = 1;
  if (lines[at].starts_with(kMetaPrefix)) m.meta_ = lines[at++];
  m.vocab_ = Vocabulary::parse(lines, at);
  if (at + 1 != lines.size()) throw DataError("unexpected lines in RNN model header");
  m.build_layout();
  const auto count = static_cast<std::size_t>(parse_int(lines.back().substr(8)));
  if (count != m.at_.total) throw DataError("RNN weight count does not match dimensions");
  if (bytes.size() - pos != 8 * count) throw DataError("RNN weight section has wrong length");
  m.params_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + 8 * i + b]))
              << (8 * b);
    }
    m.params_[i] = std::bit_cast<double>(bits);
  }
  return m;
}

}  // namespace fluency
