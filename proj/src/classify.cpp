#include "lexica/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "lexica/rng.hpp"
#include "lexica/util.hpp"

namespace lexica {

TitleVector title_vector(const EmbeddingModel& model, const TokenList& tokens) {
  TitleVector tv;
  tv.values.assign(model.dim, 0.0);
  std::size_t hits = 0;
  for (const auto& token : tokens) {
    std::int64_t idx = model.vocab.find(token);
    if (idx < 0) continue;
    auto row = model.word_vector(static_cast<std::uint32_t>(idx));
    for (std::size_t n = 0; n < model.dim; ++n) tv.values[n] += row[n];
    ++hits;
  }
  if (hits == 0)
    throw Error("title_vector: no token in vocabulary (" + join(tokens, " ") + ")");
  const double inv = 1.0 / static_cast<double>(hits);
  for (auto& v : tv.values) v *= inv;
  return tv;
}

std::pair<std::vector<TitleVector>, std::vector<TitleVector>> split_train_validation(
    const std::vector<TitleVector>& labeled, const SplitOptions& opts) {
  if (opts.train_n == 0 || opts.valid_n == 0)
    throw Error("split: train_n and valid_n must be positive");

  std::vector<TitleVector> train, valid;
  Rng rng(opts.seed);

  auto take = [&](const std::vector<std::size_t>& pool, std::size_t want_train,
                  std::size_t want_valid) {
    std::vector<std::size_t> order(pool);
    rng.shuffle(order);
    for (std::size_t i = 0; i < want_train; ++i) train.push_back(labeled[order[i]]);
    for (std::size_t i = 0; i < want_valid; ++i)
      valid.push_back(labeled[order[want_train + i]]);
  };

  if (opts.per_class) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labeled.size(); ++i)
      by_class[labeled[i].label].push_back(i);
    for (const auto& [label, pool] : by_class) {
      std::size_t want_train = opts.train_n, want_valid = opts.valid_n;
      if (pool.size() < want_train + want_valid) {
        if (!opts.proportional_fallback)
          throw Error("split: class `" + label + "` has " + std::to_string(pool.size()) +
                      " samples, need " + std::to_string(want_train + want_valid));
        const double scale = static_cast<double>(pool.size()) /
                             static_cast<double>(want_train + want_valid);
        want_train = static_cast<std::size_t>(static_cast<double>(want_train) * scale);
        want_valid = pool.size() - want_train;
      }
      take(pool, want_train, want_valid);
    }
  } else {
    if (labeled.size() < opts.train_n + opts.valid_n)
      throw Error("split: corpus has " + std::to_string(labeled.size()) +
                  " samples, need " + std::to_string(opts.train_n + opts.valid_n));
    std::vector<std::size_t> pool(labeled.size());
    std::iota(pool.begin(), pool.end(), 0);
    take(pool, opts.train_n, opts.valid_n);
  }
  return {std::move(train), std::move(valid)};
}

double SvmModel::score(std::size_t cls, std::span<const double> v) const {
  const auto& w = weights[cls];
  double s = biases[cls];
  for (std::size_t n = 0; n < dim; ++n) s += w[n] * v[n];
  return s;
}

SvmModel train_svm(const std::vector<TitleVector>& train, const SvmConfig& config) {
  if (train.empty()) throw Error("train_svm: empty training set");

  SvmModel svm;
  svm.config = config;
  svm.dim = train.front().values.size();

  std::map<std::string, int> seen;
  for (const auto& tv : train) {
    if (tv.values.size() != svm.dim) throw Error("train_svm: inconsistent dimensions");
    for (double v : tv.values)
      if (!std::isfinite(v)) throw Error("train_svm: non-finite feature value");
    seen.emplace(tv.label, 0);
  }
  for (const auto& [label, n] : seen) {
    (void)n;
    svm.classes.push_back(label);
  }
  if (svm.classes.size() < 2) throw Error("train_svm: need at least 2 classes");

  const std::size_t k = svm.classes.size();
  svm.weights.assign(k, std::vector<double>(svm.dim, 0.0));
  svm.biases.assign(k, 0.0);

  std::vector<int> label_idx(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    label_idx[i] = static_cast<int>(
        std::find(svm.classes.begin(), svm.classes.end(), train[i].label) -
        svm.classes.begin());

  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  double eta0 = config.lr_initial;
  if (eta0 <= 0) {
    // pick the step size whose one-pass cost over a sample is lowest
    std::vector<std::size_t> sample(order);
    rng.shuffle(sample);
    if (sample.size() > 1000) sample.resize(1000);

    auto one_pass_cost = [&](double eta) {
      std::vector<std::vector<double>> w(k, std::vector<double>(svm.dim, 0.0));
      std::vector<double> b(k, 0.0);
      for (std::size_t idx : sample) {
        const auto& x = train[idx].values;
        for (std::size_t c = 0; c < k; ++c) {
          const double y = label_idx[idx] == static_cast<int>(c) ? 1.0 : -1.0;
          double margin = b[c];
          for (std::size_t n = 0; n < svm.dim; ++n) margin += w[c][n] * x[n];
          const double shrink = 1.0 - eta * config.lambda;
          if (margin * y < 1.0) {
            for (std::size_t n = 0; n < svm.dim; ++n)
              w[c][n] = w[c][n] * shrink + eta * y * x[n];
            b[c] += eta * y;
          } else {
            for (std::size_t n = 0; n < svm.dim; ++n) w[c][n] *= shrink;
          }
        }
      }
      double cost = 0;
      for (std::size_t idx : sample) {
        const auto& x = train[idx].values;
        for (std::size_t c = 0; c < k; ++c) {
          const double y = label_idx[idx] == static_cast<int>(c) ? 1.0 : -1.0;
          double margin = b[c];
          for (std::size_t n = 0; n < svm.dim; ++n) margin += w[c][n] * x[n];
          cost += std::max(0.0, 1.0 - margin * y);
        }
      }
      for (std::size_t c = 0; c < k; ++c) {
        double ss = 0;
        for (double v : w[c]) ss += v * v;
        cost += 0.5 * config.lambda * ss * static_cast<double>(sample.size());
      }
      return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
    };

    eta0 = 1.0;
    double best = one_pass_cost(eta0);
    for (double eta = 2.0; eta <= 64.0; eta *= 2.0) {
      const double cost = one_pass_cost(eta);
      if (cost < best) {
        best = cost;
        eta0 = eta;
      }
    }
    for (double eta = 0.5; eta >= 1.0 / 4096.0; eta *= 0.5) {
      const double cost = one_pass_cost(eta);
      if (cost < best) {
        best = cost;
        eta0 = eta;
      }
    }
    svm.config.lr_initial = eta0;
  }

  const std::uint64_t total_steps =
      static_cast<std::uint64_t>(train.size()) * static_cast<std::uint64_t>(config.epochs);
  std::uint64_t step = 0;

  // tail-averaged SGD: iterates from the second half of training are
  // averaged into the returned weights, which tames the update noise of the
  // hinge loss without touching the objective
  const std::uint64_t average_from = total_steps / 2;
  std::vector<std::vector<double>> w_sum(k, std::vector<double>(svm.dim, 0.0));
  std::vector<double> b_sum(k, 0.0);
  std::uint64_t averaged = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const double lr =
          eta0 / (1.0 + config.lambda * eta0 * static_cast<double>(step));
      ++step;
      const auto& x = train[idx].values;
      for (std::size_t c = 0; c < k; ++c) {
        const double y = label_idx[idx] == static_cast<int>(c) ? 1.0 : -1.0;
        auto& w = svm.weights[c];
        double margin = svm.biases[c];
        for (std::size_t n = 0; n < svm.dim; ++n) margin += w[n] * x[n];
        margin *= y;
        const double shrink = 1.0 - lr * config.lambda;
        if (margin < 1.0) {
          for (std::size_t n = 0; n < svm.dim; ++n)
            w[n] = w[n] * shrink + lr * y * x[n];
          svm.biases[c] += lr * y;  // bias is not regularized
        } else {
          for (std::size_t n = 0; n < svm.dim; ++n) w[n] *= shrink;
        }
      }
      if (step > average_from) {
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t n = 0; n < svm.dim; ++n) w_sum[c][n] += svm.weights[c][n];
          b_sum[c] += svm.biases[c];
        }
        ++averaged;
      }
    }
  }
  if (averaged > 0) {
    const double inv = 1.0 / static_cast<double>(averaged);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t n = 0; n < svm.dim; ++n) svm.weights[c][n] = w_sum[c][n] * inv;
      svm.biases[c] = b_sum[c] * inv;
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (!std::isfinite(svm.biases[c]))
      throw Error("train_svm: non-finite weights after training");
    for (double w : svm.weights[c])
      if (!std::isfinite(w)) throw Error("train_svm: non-finite weights after training");
  }
  return svm;
}

std::size_t predict_index(const SvmModel& svm, std::span<const double> v) {
  if (v.size() != svm.dim)
    throw Error("predict: vector has dimension " + std::to_string(v.size()) +
                ", model expects " + std::to_string(svm.dim));
  std::size_t best = 0;
  double best_score = svm.score(0, v);
  for (std::size_t c = 1; c < svm.classes.size(); ++c) {
    const double s = svm.score(c, v);
    if (s > best_score) {  // ties keep the earlier class
      best_score = s;
      best = c;
    }
  }
  return best;
}

const std::string& predict(const SvmModel& svm, const TitleVector& v) {
  return svm.classes[predict_index(svm, v.values)];
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      counts_(labels_.size(), std::vector<std::uint64_t>(labels_.size(), 0)) {}

std::size_t ConfusionMatrix::index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error("confusion matrix: unknown label: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(const std::string& actual, const std::string& predicted) {
  add_count(actual, predicted, 1);
}

void ConfusionMatrix::add_count(const std::string& actual, const std::string& predicted,
                                std::uint64_t count) {
  counts_[index(actual)][index(predicted)] += count;
}

std::uint64_t ConfusionMatrix::at(const std::string& actual,
                                  const std::string& predicted) const {
  return counts_[index(actual)][index(predicted)];
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts_)
    for (auto c : row) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) t += counts_[i][i];
  return t;
}

double ConfusionMatrix::accuracy() const {
  const std::uint64_t t = total();
  if (t == 0) throw Error("confusion matrix: empty");
  return static_cast<double>(trace()) / static_cast<double>(t);
}

std::vector<std::uint64_t> ConfusionMatrix::row_sums() const {
  std::vector<std::uint64_t> sums(labels_.size(), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i)
    for (auto c : counts_[i]) sums[i] += c;
  return sums;
}

void ConfusionMatrix::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "actual";
  for (const auto& l : labels_) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out << labels_[i];
    for (auto c : counts_[i]) out << ',' << c;
    out << '\n';
  }
}

ConfusionMatrix ConfusionMatrix::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
  auto header = split_char(trim(line), ',');
  if (header.size() < 2) throw Error(path.string() + ": malformed header");
  std::vector<std::string> labels(header.begin() + 1, header.end());

  ConfusionMatrix cm(labels);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_char(trim(line), ',');
    if (fields.size() != labels.size() + 1 || row >= labels.size())
      throw Error(path.string() + ": malformed row " + std::to_string(row + 2));
    if (fields[0] != labels[row])
      throw Error(path.string() + ": row label `" + fields[0] +
                  "` does not match header order");
    for (std::size_t j = 0; j < labels.size(); ++j)
      cm.counts_[row][j] = std::stoull(fields[j + 1]);
    ++row;
  }
  if (row != labels.size())
    throw Error(path.string() + ": expected " + std::to_string(labels.size()) + " rows");
  return cm;
}

ConfusionMatrix evaluate(const SvmModel& svm, const std::vector<TitleVector>& validation) {
  if (validation.empty()) throw Error("evaluate: empty validation set");
  ConfusionMatrix cm(svm.classes);
  for (const auto& tv : validation) cm.add(tv.label, svm.classes[predict_index(svm, tv.values)]);
  return cm;
}

ConfusionMatrix reduce_confusion(const ConfusionMatrix& cm, const LabelGrouping& grouping) {
  std::map<std::string, std::string> group_of;
  std::vector<std::string> group_labels;
  for (const auto& [group, members] : grouping) {
    group_labels.push_back(group);
    for (const auto& m : members) group_of[m] = group;
  }
  for (const auto& l : cm.labels())
    if (!group_of.count(l))
      throw Error("reduce_confusion: label `" + l + "` missing from grouping");

  ConfusionMatrix reduced(group_labels);
  for (std::size_t i = 0; i < cm.labels().size(); ++i)
    for (std::size_t j = 0; j < cm.labels().size(); ++j)
      reduced.add_count(group_of.at(cm.labels()[i]), group_of.at(cm.labels()[j]),
                        cm.counts()[i][j]);
  return reduced;
}

ConfusionMatrix one_hot_baseline(const Titles& titles,
                                 const std::vector<std::string>& labels,
                                 const OneHotConfig& config) {
  if (titles.size() != labels.size())
    throw Error("one_hot_baseline: titles and labels differ in length");
  if (config.max_len == 0) throw Error("one_hot_baseline: max_len must be positive");

  Vocabulary vocab = build_vocab(titles, 1);
  const double scale = 1.0 / static_cast<double>(vocab.size());

  std::vector<TitleVector> encoded;
  encoded.reserve(titles.size());
  for (std::size_t i = 0; i < titles.size(); ++i) {
    TitleVector tv;
    tv.label = labels[i];
    tv.source_id = std::to_string(i);
    tv.values.assign(config.max_len, 0.0);
    std::size_t pos = 0;
    for (const auto& token : titles[i]) {
      if (pos >= config.max_len) break;
      std::int64_t idx = vocab.find(token);
      if (idx < 0) continue;
      tv.values[pos++] = static_cast<double>(idx + 1) * scale;
    }
    encoded.push_back(std::move(tv));
  }

  auto [train, valid] = split_train_validation(encoded, config.split);
  SvmModel svm = train_svm(train, config.svm);
  return evaluate(svm, valid);
}

void save_svm(const SvmModel& svm, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "svm " << svm.classes.size() << ' ' << svm.dim << '\n';
  out << "lambda " << format_double(svm.config.lambda) << '\n';
  out << "epochs " << svm.config.epochs << '\n';
  out << "lr " << format_double(svm.config.lr_initial) << '\n';
  out << "seed " << svm.config.seed << '\n';
  out << "split " << svm.train_n << ' ' << svm.valid_n << ' ' << svm.split_seed << ' '
      << (svm.split_per_class ? "per-class" : "overall") << '\n';
  for (std::size_t c = 0; c < svm.classes.size(); ++c) {
    out << svm.classes[c] << ' ' << format_double(svm.biases[c]);
    for (double w : svm.weights[c]) out << ' ' << format_double(w);
    out << '\n';
  }
}

SvmModel load_svm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read classifier file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
  std::istringstream hs(line);
  std::string magic;
  std::size_t k = 0, dim = 0;
  if (!(hs >> magic >> k >> dim) || magic != "svm" || k < 2 || dim == 0)
    throw Error(path.string() + ": malformed header `" + line + "`");

  SvmModel svm;
  svm.dim = dim;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "lambda") {
      ls >> svm.config.lambda;
    } else if (key == "epochs") {
      ls >> svm.config.epochs;
    } else if (key == "lr") {
      ls >> svm.config.lr_initial;
    } else if (key == "seed") {
      ls >> svm.config.seed;
    } else if (key == "split") {
      std::string mode;
      ls >> svm.train_n >> svm.valid_n >> svm.split_seed >> mode;
      svm.split_per_class = mode != "overall";
    } else {
      double bias;
      if (!(ls >> bias)) throw Error(path.string() + ": malformed class row `" + line + "`");
      std::vector<double> w;
      w.reserve(dim);
      double f;
      while (ls >> f) w.push_back(f);
      if (w.size() != dim)
        throw Error(path.string() + ": class `" + key + "` has " +
                    std::to_string(w.size()) + " weights, header says " +
                    std::to_string(dim));
      svm.classes.push_back(key);
      svm.biases.push_back(bias);
      svm.weights.push_back(std::move(w));
    }
  }
  if (svm.classes.size() != k)
    throw Error(path.string() + ": expected " + std::to_string(k) + " class rows, found " +
                std::to_string(svm.classes.size()));
  return svm;
}

}  // namespace lexica
