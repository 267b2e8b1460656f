#ifndef LEXICA_EMBEDDING_HPP
#define LEXICA_EMBEDDING_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexica/ngram_stats.hpp"
#include "lexica/rng.hpp"

namespace lexica {

class Vocabulary {
 public:
  Vocabulary() = default;
  // words ordered by descending count, then lexicographic; the one-hot index
  // of a word is its position
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
             std::uint64_t min_count);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t min_count() const { return min_count_; }

  // -1 when absent
  std::int64_t find(const std::string& word) const;
  std::uint32_t at(const std::string& word) const;  // throws, names the word

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t min_count_ = 1;
  std::unordered_map<std::string, std::uint32_t> index_;
};

Vocabulary build_vocab(const Titles& titles, std::uint64_t min_count);

// The bag of context word indices plus the word they surround.
struct TrainingBatch {
  std::vector<std::uint32_t> context;
  std::uint32_t target = 0;
};

// One batch per in-vocabulary token: context = in-vocabulary tokens at
// distance <= window within the same title, the token's own position
// excluded. Windows never cross titles.
std::vector<TrainingBatch> extract_training_pairs(const Titles& titles,
                                                  const Vocabulary& vocab,
                                                  int window);

enum class LossMode { full_softmax, negative_sampling };
enum class ContextMode {
  mean,      // hidden vector = mean of context rows
  per_word,  // product-of-probabilities objective, one softmax per context word
};

std::string_view loss_mode_name(LossMode m);
std::string_view context_mode_name(ContextMode m);

struct Hyperparams {
  std::size_t dim = 400;
  int window = 5;
  int epochs = 5;
  double lr_initial = 0.025;
  double lr_min = 1e-4;
  std::uint64_t seed = 1;
  int negative = 5;                          // negative samples per target
  std::size_t full_softmax_max_vocab = 20000;  // auto mode switch point
  std::optional<LossMode> mode;              // unset: choose by vocabulary size
  ContextMode context_mode = ContextMode::mean;
  double subsample = 0.0;                    // frequent-word subsampling, 0 = off
  int threads = 1;                           // >1 is lock-free and nondeterministic
};

struct TrainingMeta {
  LossMode mode = LossMode::full_softmax;
  ContextMode context_mode = ContextMode::mean;
  int epochs = 0;
  double lr_initial = 0.0;
  double lr_min = 0.0;
  std::uint64_t seed = 0;
  int negative = 0;
  int window = 0;
  double subsample = 0.0;
  int threads = 1;
};

// Weight matrices are stored one word-row at a time: w_in row i is the word
// vector of word i (row i of the V x N input matrix); w_out row j is output
// word j's weight vector (column j of the N x V output matrix).
struct EmbeddingModel {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> w_in;   // V * dim
  std::vector<double> w_out;  // V * dim
  TrainingMeta meta;

  std::span<const double> word_vector(std::uint32_t i) const {
    return {w_in.data() + static_cast<std::size_t>(i) * dim, dim};
  }
  std::span<double> word_vector(std::uint32_t i) {
    return {w_in.data() + static_cast<std::size_t>(i) * dim, dim};
  }
  std::span<const double> output_vector(std::uint32_t j) const {
    return {w_out.data() + static_cast<std::size_t>(j) * dim, dim};
  }
  std::span<double> output_vector(std::uint32_t j) {
    return {w_out.data() + static_cast<std::size_t>(j) * dim, dim};
  }
  bool has_output_weights() const { return !w_out.empty(); }
};

// Softmax probabilities over the vocabulary for a context bag.
std::vector<double> cbow_forward(const EmbeddingModel& model,
                                 std::span<const std::uint32_t> context);

// Dense loss and gradients, for oracles and small models; gradients have the
// same layout as w_in / w_out.
struct CbowGradients {
  double loss = 0.0;
  std::vector<double> d_w_in;
  std::vector<double> d_w_out;
};

// Exact negative log-likelihood under the full softmax (context mode taken
// from model.meta.context_mode).
CbowGradients cbow_loss_and_grad(const EmbeddingModel& model,
                                 const TrainingBatch& batch);

// Sampled surrogate with model.meta.negative noise words drawn from the
// unigram^(3/4) distribution.
CbowGradients cbow_sampled_loss_and_grad(const EmbeddingModel& model,
                                         const TrainingBatch& batch, Rng& rng);

struct EpochStats {
  double mean_loss = 0.0;
  double learning_rate_end = 0.0;
};

EmbeddingModel train_cbow(const Titles& titles, const Vocabulary& vocab,
                          const Hyperparams& hp,
                          std::vector<EpochStats>* epoch_stats = nullptr);

// Text format: header "V N", then one `word f1 .. fN` line per word. W2 and
// training metadata go to sidecar files (<path>.w2, <path>.meta.json) so
// analysis-only loads need just the main file.
void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_embeddings(const std::filesystem::path& path);

}  // namespace lexica

#endif  // LEXICA_EMBEDDING_HPP
