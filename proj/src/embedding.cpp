#include "lexica/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lexica/util.hpp"

namespace lexica {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
                       std::uint64_t min_count)
    : words_(std::move(words)), counts_(std::move(counts)), min_count_(min_count) {
  if (words_.size() != counts_.size())
    throw Error("vocabulary: words and counts differ in length");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<std::uint32_t>(i)).second)
      throw Error("vocabulary: duplicate word: " + words_[i]);
  }
}

std::int64_t Vocabulary::find(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::uint32_t Vocabulary::at(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) throw Error("word not in vocabulary: " + word);
  return it->second;
}

Vocabulary build_vocab(const Titles& titles, std::uint64_t min_count) {
  if (min_count < 1) throw Error("build_vocab: min_count must be >= 1");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& title : titles)
    for (const auto& token : title) ++counts[token];
  if (counts.empty()) throw Error("build_vocab: corpus has no tokens");

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [word, count] : counts)
    if (count >= min_count) kept.emplace_back(word, count);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> words;
  std::vector<std::uint64_t> word_counts;
  words.reserve(kept.size());
  word_counts.reserve(kept.size());
  for (auto& [word, count] : kept) {
    words.push_back(std::move(word));
    word_counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(word_counts), min_count);
}

std::vector<TrainingBatch> extract_training_pairs(const Titles& titles,
                                                  const Vocabulary& vocab,
                                                  int window) {
  if (window < 1) throw Error("extract_training_pairs: window must be >= 1");
  std::vector<TrainingBatch> batches;
  std::vector<std::uint32_t> in_vocab;
  for (const auto& title : titles) {
    in_vocab.clear();
    for (const auto& token : title) {
      std::int64_t idx = vocab.find(token);
      if (idx >= 0) in_vocab.push_back(static_cast<std::uint32_t>(idx));
    }
    if (in_vocab.size() < 2) continue;
    for (std::size_t p = 0; p < in_vocab.size(); ++p) {
      TrainingBatch batch;
      batch.target = in_vocab[p];
      const std::size_t lo = p >= static_cast<std::size_t>(window) ? p - window : 0;
      const std::size_t hi = std::min(in_vocab.size() - 1, p + window);
      for (std::size_t q = lo; q <= hi; ++q)
        if (q != p) batch.context.push_back(in_vocab[q]);
      batches.push_back(std::move(batch));
    }
  }
  return batches;
}

std::string_view loss_mode_name(LossMode m) {
  return m == LossMode::full_softmax ? "full-softmax" : "negative-sampling";
}

std::string_view context_mode_name(ContextMode m) {
  return m == ContextMode::mean ? "mean" : "per-word";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sigmoid(double x) {
  if (x > 60) return 1.0;
  if (x < -60) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

std::vector<double> mean_context(const EmbeddingModel& model,
                                 std::span<const std::uint32_t> context) {
  if (context.empty()) throw Error("cbow: empty context");
  std::vector<double> h(model.dim, 0.0);
  for (std::uint32_t c : context) {
    if (c >= model.vocab.size()) throw Error("cbow: context index out of range");
    auto row = model.word_vector(c);
    for (std::size_t n = 0; n < model.dim; ++n) h[n] += row[n];
  }
  const double inv = 1.0 / static_cast<double>(context.size());
  for (auto& v : h) v *= inv;
  return h;
}

// softmax over scores u_j = h . w_out_j; returns probabilities and, when
// target is given, the negative log-likelihood of it
std::vector<double> softmax_scores(const EmbeddingModel& model,
                                   std::span<const double> h,
                                   const std::uint32_t* target, double* nll) {
  const std::size_t v = model.vocab.size();
  std::vector<double> u(v);
  for (std::size_t j = 0; j < v; ++j)
    u[j] = dot(h, model.output_vector(static_cast<std::uint32_t>(j)));
  const double m = *std::max_element(u.begin(), u.end());
  double z = 0;
  for (double& s : u) {
    s = std::exp(s - m);
    z += s;
  }
  const double inv_z = 1.0 / z;
  for (double& s : u) s *= inv_z;
  if (target && nll) *nll = -std::log(std::max(u[*target], 1e-300));
  return u;
}

// cumulative unigram^(3/4) table; sampling is a binary search on a uniform
struct NoiseTable {
  std::vector<double> cumulative;

  explicit NoiseTable(const Vocabulary& vocab) {
    cumulative.resize(vocab.size());
    double acc = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      // count 0 can happen for models loaded without a sidecar
      acc += std::pow(static_cast<double>(std::max<std::uint64_t>(vocab.counts()[i], 1)),
                      0.75);
      cumulative[i] = acc;
    }
  }

  std::uint32_t sample(Rng& rng) const {
    const double r = rng.next_double() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative.begin());
  }
};

}  // namespace

std::vector<double> cbow_forward(const EmbeddingModel& model,
                                 std::span<const std::uint32_t> context) {
  std::vector<double> h = mean_context(model, context);
  return softmax_scores(model, h, nullptr, nullptr);
}

CbowGradients cbow_loss_and_grad(const EmbeddingModel& model,
                                 const TrainingBatch& batch) {
  if (batch.target >= model.vocab.size()) throw Error("cbow: target index out of range");
  const std::size_t v = model.vocab.size();
  CbowGradients g;
  g.d_w_in.assign(v * model.dim, 0.0);
  g.d_w_out.assign(v * model.dim, 0.0);

  if (model.meta.context_mode == ContextMode::mean) {
    std::vector<double> h = mean_context(model, batch.context);
    std::vector<double> p = softmax_scores(model, h, &batch.target, &g.loss);

    std::vector<double> dh(model.dim, 0.0);
    for (std::size_t j = 0; j < v; ++j) {
      const double e = p[j] - (j == batch.target ? 1.0 : 0.0);
      auto out_row = model.output_vector(static_cast<std::uint32_t>(j));
      double* dout = g.d_w_out.data() + j * model.dim;
      for (std::size_t n = 0; n < model.dim; ++n) {
        dout[n] += e * h[n];
        dh[n] += e * out_row[n];
      }
    }
    const double inv_c = 1.0 / static_cast<double>(batch.context.size());
    for (std::uint32_t c : batch.context) {
      double* din = g.d_w_in.data() + static_cast<std::size_t>(c) * model.dim;
      for (std::size_t n = 0; n < model.dim; ++n) din[n] += dh[n] * inv_c;
    }
    return g;
  }

  // per-word product objective: one softmax per context word
  for (std::uint32_t c : batch.context) {
    if (c >= model.vocab.size()) throw Error("cbow: context index out of range");
    auto h = model.word_vector(c);
    double nll = 0;
    std::vector<double> p = softmax_scores(model, h, &batch.target, &nll);
    g.loss += nll;
    double* din = g.d_w_in.data() + static_cast<std::size_t>(c) * model.dim;
    for (std::size_t j = 0; j < v; ++j) {
      const double e = p[j] - (j == batch.target ? 1.0 : 0.0);
      auto out_row = model.output_vector(static_cast<std::uint32_t>(j));
      double* dout = g.d_w_out.data() + j * model.dim;
      for (std::size_t n = 0; n < model.dim; ++n) {
        dout[n] += e * h[n];
        din[n] += e * out_row[n];
      }
    }
  }
  return g;
}

CbowGradients cbow_sampled_loss_and_grad(const EmbeddingModel& model,
                                         const TrainingBatch& batch, Rng& rng) {
  const std::size_t v = model.vocab.size();
  NoiseTable noise(model.vocab);
  CbowGradients g;
  g.d_w_in.assign(v * model.dim, 0.0);
  g.d_w_out.assign(v * model.dim, 0.0);

  std::vector<double> h = mean_context(model, batch.context);
  std::vector<double> dh(model.dim, 0.0);

  auto accumulate = [&](std::uint32_t word, double label) {
    auto out_row = model.output_vector(word);
    const double f = sigmoid(dot(h, out_row));
    g.loss += -std::log(std::max(label > 0.5 ? f : 1.0 - f, 1e-300));
    const double e = f - label;  // d loss / d u
    double* dout = g.d_w_out.data() + static_cast<std::size_t>(word) * model.dim;
    for (std::size_t n = 0; n < model.dim; ++n) {
      dh[n] += e * out_row[n];
      dout[n] += e * h[n];
    }
  };

  accumulate(batch.target, 1.0);
  for (int k = 0; k < model.meta.negative; ++k) {
    const std::uint32_t neg = noise.sample(rng);
    if (neg == batch.target) continue;
    accumulate(neg, 0.0);
  }

  const double inv_c = 1.0 / static_cast<double>(batch.context.size());
  for (std::uint32_t c : batch.context) {
    double* din = g.d_w_in.data() + static_cast<std::size_t>(c) * model.dim;
    for (std::size_t n = 0; n < model.dim; ++n) din[n] += dh[n] * inv_c;
  }
  return g;
}

namespace {

class Trainer {
 public:
  Trainer(EmbeddingModel& model, const Hyperparams& hp,
          const std::vector<TrainingBatch>& batches)
      : model_(model), hp_(hp), batches_(batches) {
    if (model_.meta.mode == LossMode::negative_sampling)
      noise_.emplace(model_.vocab);
    total_updates_ = static_cast<double>(batches_.size()) *
                     static_cast<double>(std::max(hp_.epochs, 1));
  }

  double learning_rate(std::uint64_t step) const {
    const double frac = static_cast<double>(step) / total_updates_;
    return std::max(hp_.lr_min, hp_.lr_initial * (1.0 - frac));
  }

  // returns the batch loss; updates weights in place
  double step(const TrainingBatch& batch, double lr, Rng& rng,
              std::vector<double>& h, std::vector<double>& dh,
              std::vector<double>& scores) {
    if (model_.meta.context_mode == ContextMode::per_word)
      return step_per_word(batch, lr, dh, scores);
    return model_.meta.mode == LossMode::full_softmax
               ? step_softmax(batch, lr, h, dh, scores)
               : step_sampled(batch, lr, rng, h, dh);
  }

 private:
  void load_mean(const TrainingBatch& batch, std::vector<double>& h) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::uint32_t c : batch.context) {
      auto row = model_.word_vector(c);
      for (std::size_t n = 0; n < model_.dim; ++n) h[n] += row[n];
    }
    const double inv = 1.0 / static_cast<double>(batch.context.size());
    for (auto& v : h) v *= inv;
  }

  void apply_context(const TrainingBatch& batch, const std::vector<double>& dh,
                     double lr) {
    const double scale = -lr / static_cast<double>(batch.context.size());
    for (std::uint32_t c : batch.context) {
      auto row = model_.word_vector(c);
      for (std::size_t n = 0; n < model_.dim; ++n) row[n] += scale * dh[n];
    }
  }

  double step_softmax(const TrainingBatch& batch, double lr, std::vector<double>& h,
                      std::vector<double>& dh, std::vector<double>& u) {
    const std::size_t v = model_.vocab.size();
    load_mean(batch, h);

    for (std::size_t j = 0; j < v; ++j)
      u[j] = dot(h, model_.output_vector(static_cast<std::uint32_t>(j)));
    const double m = *std::max_element(u.begin(), u.begin() + v);
    double z = 0;
    for (std::size_t j = 0; j < v; ++j) {
      u[j] = std::exp(u[j] - m);
      z += u[j];
    }
    const double inv_z = 1.0 / z;
    const double loss = -std::log(std::max(u[batch.target] * inv_z, 1e-300));

    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t j = 0; j < v; ++j) {
      const double e = u[j] * inv_z - (j == batch.target ? 1.0 : 0.0);
      auto out_row = model_.output_vector(static_cast<std::uint32_t>(j));
      const double step = -lr * e;
      for (std::size_t n = 0; n < model_.dim; ++n) {
        dh[n] += e * out_row[n];
        out_row[n] += step * h[n];
      }
    }
    apply_context(batch, dh, lr);
    return loss;
  }

  double step_sampled(const TrainingBatch& batch, double lr, Rng& rng,
                      std::vector<double>& h, std::vector<double>& dh) {
    load_mean(batch, h);
    std::fill(dh.begin(), dh.end(), 0.0);
    double loss = 0;

    auto update = [&](std::uint32_t word, double label) {
      auto out_row = model_.output_vector(word);
      const double f = sigmoid(dot(h, out_row));
      loss += -std::log(std::max(label > 0.5 ? f : 1.0 - f, 1e-300));
      const double g = (label - f) * lr;
      for (std::size_t n = 0; n < model_.dim; ++n) {
        dh[n] += (f - label) * out_row[n];
        out_row[n] += g * h[n];
      }
    };

    update(batch.target, 1.0);
    for (int k = 0; k < model_.meta.negative; ++k) {
      const std::uint32_t neg = noise_->sample(rng);
      if (neg == batch.target) continue;
      update(neg, 0.0);
    }
    apply_context(batch, dh, lr);
    return loss;
  }

  double step_per_word(const TrainingBatch& batch, double lr, std::vector<double>& din,
                       std::vector<double>& u) {
    const std::size_t v = model_.vocab.size();
    double loss = 0;
    for (std::uint32_t c : batch.context) {
      auto h = model_.word_vector(c);
      for (std::size_t j = 0; j < v; ++j)
        u[j] = dot(h, model_.output_vector(static_cast<std::uint32_t>(j)));
      const double m = *std::max_element(u.begin(), u.begin() + v);
      double z = 0;
      for (std::size_t j = 0; j < v; ++j) {
        u[j] = std::exp(u[j] - m);
        z += u[j];
      }
      const double inv_z = 1.0 / z;
      loss += -std::log(std::max(u[batch.target] * inv_z, 1e-300));
      std::fill(din.begin(), din.end(), 0.0);
      for (std::size_t j = 0; j < v; ++j) {
        const double e = u[j] * inv_z - (j == batch.target ? 1.0 : 0.0);
        auto out_row = model_.output_vector(static_cast<std::uint32_t>(j));
        const double step = -lr * e;
        for (std::size_t n = 0; n < model_.dim; ++n) {
          din[n] += e * out_row[n];
          out_row[n] += step * h[n];
        }
      }
      for (std::size_t n = 0; n < model_.dim; ++n) h[n] += -lr * din[n];
    }
    return loss;
  }

  EmbeddingModel& model_;
  const Hyperparams& hp_;
  const std::vector<TrainingBatch>& batches_;
  std::optional<NoiseTable> noise_;
  double total_updates_ = 1;
};

}  // namespace

EmbeddingModel train_cbow(const Titles& titles, const Vocabulary& vocab,
                          const Hyperparams& hp,
                          std::vector<EpochStats>* epoch_stats) {
  if (vocab.size() == 0) throw Error("train_cbow: empty vocabulary");
  if (hp.dim == 0) throw Error("train_cbow: dim must be positive");
  if (hp.epochs < 1) throw Error("train_cbow: epochs must be >= 1");

  EmbeddingModel model;
  model.vocab = vocab;
  model.dim = hp.dim;
  model.meta.mode = hp.mode.value_or(vocab.size() <= hp.full_softmax_max_vocab
                                         ? LossMode::full_softmax
                                         : LossMode::negative_sampling);
  model.meta.context_mode = hp.context_mode;
  model.meta.epochs = hp.epochs;
  model.meta.lr_initial = hp.lr_initial;
  model.meta.lr_min = hp.lr_min;
  model.meta.seed = hp.seed;
  model.meta.negative = hp.negative;
  model.meta.window = hp.window;
  model.meta.subsample = hp.subsample;
  model.meta.threads = hp.threads;

  Rng rng(hp.seed);

  const std::size_t v = vocab.size();
  model.w_in.resize(v * hp.dim);
  model.w_out.assign(v * hp.dim, 0.0);
  const double spread = 0.5 / static_cast<double>(hp.dim);
  for (auto& w : model.w_in) w = rng.uniform(-spread, spread);

  Titles working;
  const Titles* source = &titles;
  if (hp.subsample > 0) {
    // word2vec-style discard of frequent words before pair extraction
    double total = 0;
    for (auto c : vocab.counts()) total += static_cast<double>(c);
    working.reserve(titles.size());
    for (const auto& title : titles) {
      TokenList kept;
      for (const auto& token : title) {
        std::int64_t idx = vocab.find(token);
        if (idx >= 0) {
          const double freq = static_cast<double>(vocab.counts()[idx]) / total;
          const double keep =
              (std::sqrt(freq / hp.subsample) + 1.0) * hp.subsample / freq;
          if (keep < 1.0 && rng.next_double() > keep) continue;
        }
        kept.push_back(token);
      }
      working.push_back(std::move(kept));
    }
    source = &working;
  }

  std::vector<TrainingBatch> batches = extract_training_pairs(*source, vocab, hp.window);
  if (batches.empty()) throw Error("train_cbow: no training pairs (titles too short?)");

  Trainer trainer(model, hp, batches);
  std::vector<std::size_t> order(batches.size());
  std::iota(order.begin(), order.end(), 0);

  const int threads = std::max(1, hp.threads);
  std::uint64_t step_count = 0;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0;
    double lr_end = hp.lr_initial;

    if (threads == 1) {
      std::vector<double> h(hp.dim), dh(hp.dim), scores(v);
      for (std::size_t idx : order) {
        const double lr = trainer.learning_rate(step_count++);
        lr_end = lr;
        const double loss = trainer.step(batches[idx], lr, rng, h, dh, scores);
        if (!std::isfinite(loss))
          throw Error("train_cbow: non-finite loss at step " +
                      std::to_string(step_count) +
                      " (learning rate too high? lr=" + format_double(lr) + ")");
        epoch_loss += loss;
      }
    } else {
      // lock-free parallel mode: shards race on the shared weights; declared
      // nondeterministic, only finiteness is guaranteed
      std::vector<std::thread> pool;
      std::vector<double> shard_loss(threads, 0.0);
      const std::uint64_t epoch_base = step_count;
      for (int t = 0; t < threads; ++t) {
        Rng worker_rng = rng.fork(static_cast<std::uint64_t>(t) + 1);
        pool.emplace_back([&, t, worker_rng]() mutable {
          std::vector<double> h(hp.dim), dh(hp.dim), scores(v);
          for (std::size_t i = t; i < order.size(); i += threads) {
            const double lr = trainer.learning_rate(epoch_base + i);
            shard_loss[t] += trainer.step(batches[order[i]], lr, worker_rng, h, dh, scores);
          }
        });
      }
      for (auto& th : pool) th.join();
      step_count += order.size();
      for (double l : shard_loss) epoch_loss += l;
      lr_end = trainer.learning_rate(step_count - 1);
      if (!std::isfinite(epoch_loss))
        throw Error("train_cbow: non-finite loss in parallel epoch " +
                    std::to_string(epoch));
    }

    if (epoch_stats)
      epoch_stats->push_back(
          {epoch_loss / static_cast<double>(batches.size()), lr_end});
  }

  for (double w : model.w_in)
    if (!std::isfinite(w)) throw Error("train_cbow: non-finite weight after training");
  return model;
}

void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << model.vocab.size() << ' ' << model.dim << '\n';
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
      out << model.vocab.words()[i];
      auto row = model.word_vector(static_cast<std::uint32_t>(i));
      for (double f : row) out << ' ' << format_double(f);
      out << '\n';
    }
  }

  if (model.has_output_weights()) {
    std::ofstream out(path.string() + ".w2", std::ios::binary);
    if (!out) throw Error("cannot write " + path.string() + ".w2");
    out << model.vocab.size() << ' ' << model.dim << '\n';
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
      auto row = model.output_vector(static_cast<std::uint32_t>(i));
      bool first = true;
      for (double f : row) {
        if (!first) out << ' ';
        out << format_double(f);
        first = false;
      }
      out << '\n';
    }
  }

  nlohmann::json meta;
  meta["dim"] = model.dim;
  meta["window"] = model.meta.window;
  meta["epochs"] = model.meta.epochs;
  meta["lr_initial"] = model.meta.lr_initial;
  meta["lr_min"] = model.meta.lr_min;
  meta["seed"] = model.meta.seed;
  meta["mode"] = std::string(loss_mode_name(model.meta.mode));
  meta["context_mode"] = std::string(context_mode_name(model.meta.context_mode));
  meta["negative"] = model.meta.negative;
  meta["subsample"] = model.meta.subsample;
  meta["threads"] = model.meta.threads;
  meta["min_count"] = model.vocab.min_count();
  meta["counts"] = model.vocab.counts();
  write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

EmbeddingModel load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read embedding file: " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw Error(path.string() + ": empty file");
  std::istringstream hs(header);
  std::size_t v = 0, dim = 0;
  if (!(hs >> v >> dim) || v == 0 || dim == 0)
    throw Error(path.string() + ": malformed header `" + header + "`");

  EmbeddingModel model;
  model.dim = dim;
  model.w_in.reserve(v * dim);
  std::vector<std::string> words;
  words.reserve(v);

  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    words.push_back(word);
    std::size_t got = 0;
    double f;
    while (ls >> f) {
      model.w_in.push_back(f);
      ++got;
    }
    if (got != dim)
      throw Error(path.string() + ": row for `" + word + "` has " +
                  std::to_string(got) + " values, header says " + std::to_string(dim));
  }
  if (words.size() != v)
    throw Error(path.string() + ": header says " + std::to_string(v) + " rows, found " +
                std::to_string(words.size()));

  std::vector<std::uint64_t> counts(v, 0);
  std::uint64_t min_count = 0;

  const std::filesystem::path meta_path = path.string() + ".meta.json";
  if (std::filesystem::exists(meta_path)) {
    nlohmann::json meta = nlohmann::json::parse(read_file(meta_path));
    if (meta.value("dim", dim) != dim)
      throw Error(meta_path.string() + ": dim disagrees with " + path.string());
    model.meta.window = meta.value("window", 0);
    model.meta.epochs = meta.value("epochs", 0);
    model.meta.lr_initial = meta.value("lr_initial", 0.0);
    model.meta.lr_min = meta.value("lr_min", 0.0);
    model.meta.seed = meta.value("seed", std::uint64_t{0});
    model.meta.negative = meta.value("negative", 0);
    model.meta.subsample = meta.value("subsample", 0.0);
    model.meta.threads = meta.value("threads", 1);
    model.meta.mode = meta.value("mode", "full-softmax") == std::string("negative-sampling")
                          ? LossMode::negative_sampling
                          : LossMode::full_softmax;
    model.meta.context_mode = meta.value("context_mode", "mean") == std::string("per-word")
                                  ? ContextMode::per_word
                                  : ContextMode::mean;
    min_count = meta.value("min_count", std::uint64_t{0});
    if (meta.contains("counts")) {
      counts = meta["counts"].get<std::vector<std::uint64_t>>();
      if (counts.size() != v)
        throw Error(meta_path.string() + ": counts length disagrees with vocabulary");
    }
  }

  model.vocab = Vocabulary(std::move(words), std::move(counts), min_count);

  const std::filesystem::path w2_path = path.string() + ".w2";
  if (std::filesystem::exists(w2_path)) {
    std::ifstream w2(w2_path);
    std::string h2;
    std::getline(w2, h2);
    std::istringstream h2s(h2);
    std::size_t v2 = 0, d2 = 0;
    if (!(h2s >> v2 >> d2) || v2 != v || d2 != dim)
      throw Error(w2_path.string() + ": header disagrees with " + path.string());
    model.w_out.reserve(v * dim);
    double f;
    while (w2 >> f) model.w_out.push_back(f);
    if (model.w_out.size() != v * dim)
      throw Error(w2_path.string() + ": expected " + std::to_string(v * dim) +
                  " values, found " + std::to_string(model.w_out.size()));
  }

  return model;
}

}  // namespace lexica
