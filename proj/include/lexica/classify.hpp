#ifndef LEXICA_CLASSIFY_HPP
#define LEXICA_CLASSIFY_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lexica/embedding.hpp"

namespace lexica {

struct TitleVector {
  std::vector<double> values;
  std::string source_id;
  std::string label;
};

// Component-wise mean of the in-vocabulary word vectors; out-of-vocabulary
// tokens are skipped, a fully out-of-vocabulary title is an error.
TitleVector title_vector(const EmbeddingModel& model, const TokenList& tokens);

struct SvmConfig {
  double lambda = 1e-4;  // L2 regularization
  int epochs = 20;
  // 0 = calibrate on a training sample (deterministic grid search); the
  // schedule is eta0 / (1 + lambda * eta0 * t)
  double lr_initial = 0.0;
  std::uint64_t seed = 1;
};

struct SvmModel {
  std::vector<std::string> classes;  // ordered; prediction ties go to the first
  std::size_t dim = 0;
  std::vector<std::vector<double>> weights;  // one per class
  std::vector<double> biases;
  SvmConfig config;
  // split bookkeeping so evaluation can reproduce the exact validation set
  std::size_t train_n = 0, valid_n = 0;
  std::uint64_t split_seed = 0;
  bool split_per_class = true;

  double score(std::size_t cls, std::span<const double> v) const;
};

struct SplitOptions {
  std::size_t train_n = 0;
  std::size_t valid_n = 0;
  std::uint64_t seed = 1;
  bool per_class = true;  // counts apply per class; false: overall counts
  // scale a short class down in the train:valid ratio instead of failing
  bool proportional_fallback = false;
};

std::pair<std::vector<TitleVector>, std::vector<TitleVector>> split_train_validation(
    const std::vector<TitleVector>& labeled, const SplitOptions& opts);

// One-vs-rest linear SVM, hinge loss with L2 regularization, trained by
// seed-deterministic SGD.
SvmModel train_svm(const std::vector<TitleVector>& train, const SvmConfig& config);

std::size_t predict_index(const SvmModel& svm, std::span<const double> v);
const std::string& predict(const SvmModel& svm, const TitleVector& v);

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);

  void add(const std::string& actual, const std::string& predicted);
  void add_count(const std::string& actual, const std::string& predicted,
                 std::uint64_t count);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<std::uint64_t>>& counts() const { return counts_; }
  std::uint64_t at(const std::string& actual, const std::string& predicted) const;

  std::uint64_t total() const;
  std::uint64_t trace() const;
  double accuracy() const;  // trace / total
  std::vector<std::uint64_t> row_sums() const;

  void save_csv(const std::filesystem::path& path) const;
  static ConfusionMatrix load_csv(const std::filesystem::path& path);

 private:
  std::size_t index(const std::string& label) const;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

ConfusionMatrix evaluate(const SvmModel& svm, const std::vector<TitleVector>& validation);

using LabelGrouping = std::vector<std::pair<std::string, std::vector<std::string>>>;

// Block-sums the matrix under a grouping that must cover every label.
ConfusionMatrix reduce_confusion(const ConfusionMatrix& cm, const LabelGrouping& grouping);

struct OneHotConfig {
  std::size_t max_len = 12;  // titles padded / truncated to this many tokens
  SplitOptions split;
  SvmConfig svm;
};

// Control experiment: the title's vocabulary-index sequence (scaled to [0,1],
// zero-padded) replaces the learned embedding, same SVM on top.
ConfusionMatrix one_hot_baseline(const Titles& titles,
                                 const std::vector<std::string>& labels,
                                 const OneHotConfig& config);

void save_svm(const SvmModel& svm, const std::filesystem::path& path);
SvmModel load_svm(const std::filesystem::path& path);

}  // namespace lexica

#endif  // LEXICA_CLASSIFY_HPP
