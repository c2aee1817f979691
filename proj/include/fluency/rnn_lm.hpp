#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluency/language_model.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

struct RnnConfig {
  std::size_t embedding_dim = 32;
  std::size_t hidden_dim = 64;
  double learning_rate = 0.001;
  std::size_t epochs = 10;
  std::size_t batch_size = 16;
  // Epochs without validation improvement before training stops.
  std::size_t patience = 2;
  std::uint64_t seed = 1;
  std::size_t unk_min_count = 2;
  double init_scale = 0.1;
};

struct EpochReport {
  std::size_t epoch = 0;
  double train_loss = 0.0;       // mean NLL per predicted token
  double validation_loss = 0.0;  // same on the validation corpus
};

// Single-layer gated recurrent unit language model with learned embeddings,
// trained by mini-batch Adam on next-token cross-entropy with full
// backpropagation through each sentence.
class RnnLanguageModel final : public LanguageModel {
 public:
  static constexpr std::string_view kFormat = "rnn v1";

  // Randomly initialized, untrained model over vocab.
  static RnnLanguageModel initialize(Vocabulary vocab, const RnnConfig& config);

  // Early-stops on validation loss (training loss when validation is empty)
  // and keeps the best epoch's parameters. Throws NumericError naming the
  // epoch if the loss becomes non-finite.
  static RnnLanguageModel train(std::span<const TokenSequence> corpus,
                                std::span<const TokenSequence> validation,
                                const RnnConfig& config,
                                std::vector<EpochReport>* history = nullptr);

  std::string_view kind() const override { return "rnn"; }
  const Vocabulary& vocabulary() const override { return vocab_; }
  bool predicts_end_of_sentence() const override { return true; }
  TokenLogProbs token_log_probs(std::span<const std::string> tokens) const override;
  std::vector<double> next_distribution(std::span<const std::string> prefix) const override;
  std::string serialize() const override;

  // Summed negative log-likelihood of the batch; adds its gradient into grad
  // (sized like parameters()).
  double loss_and_gradient(std::span<const std::vector<TokenId>> batch,
                           std::span<double> grad) const;
  double loss(std::span<const std::vector<TokenId>> batch) const;

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t embedding_dim() const { return emb_; }
  std::size_t hidden_dim() const { return hidden_; }

  void set_provenance(const Provenance& p) { meta_ = meta_line(p); }

  static RnnLanguageModel parse(std::string_view bytes);

 private:
  struct Layout {
    std::size_t embed, wz, wr, wh, uz, ur, uh, bz, br, bh, wo, bo, total;
  };
  struct Step;

  void build_layout();
  // Runs the recurrence over BOS + inputs, recording every step.
  std::vector<Step> forward(std::span<const TokenId> inputs) const;
  std::vector<TokenId> with_bos(std::span<const TokenId> ids) const;

  Vocabulary vocab_;
  std::size_t emb_ = 0;
  std::size_t hidden_ = 0;
  std::size_t min_count_ = 1;
  Layout at_{};
  std::vector<double> params_;
  std::string meta_;
};

}  // namespace fluency
