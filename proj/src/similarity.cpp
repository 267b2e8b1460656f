#include "lexica/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "lexica/util.hpp"

namespace lexica {

namespace {

double norm(std::span<const double> v) {
  double ss = 0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss);
}

}  // namespace

double cosine_vectors(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
  const double na = norm(a), nb = norm(b);
  if (na == 0 || nb == 0) throw Error("cosine: zero vector");
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (na * nb);
}

double cosine(const EmbeddingModel& model, const std::string& w1, const std::string& w2) {
  return cosine_vectors(model.word_vector(model.vocab.at(w1)),
                        model.word_vector(model.vocab.at(w2)));
}

NeighborList nearest(const EmbeddingModel& model, std::span<const double> query,
                     int top_k, const std::unordered_set<std::string>& exclude,
                     const std::string& description) {
  if (top_k < 1) throw Error("nearest: top_k must be >= 1");
  if (norm(query) == 0) throw Error("nearest: zero query vector");

  NeighborList list;
  list.query = description;
  list.entries.reserve(model.vocab.size());
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    const std::string& word = model.vocab.words()[i];
    if (exclude.count(word)) continue;
    auto row = model.word_vector(static_cast<std::uint32_t>(i));
    if (norm(row) == 0) continue;  // untrained row, cannot rank
    list.entries.push_back({word, cosine_vectors(query, row)});
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const Neighbor& a, const Neighbor& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.word < b.word;
            });
  if (list.entries.size() > static_cast<std::size_t>(top_k))
    list.entries.resize(static_cast<std::size_t>(top_k));
  return list;
}

NeighborList nearest(const EmbeddingModel& model, const std::string& word, int top_k,
                     const std::unordered_set<std::string>& exclude) {
  auto row = model.word_vector(model.vocab.at(word));
  return nearest(model, row, top_k, exclude, word);
}

NeighborList analogy(const EmbeddingModel& model, const std::vector<std::string>& plus,
                     const std::vector<std::string>& minus, int top_k) {
  if (plus.empty()) throw Error("analogy: plus list is empty");

  std::vector<double> query(model.dim, 0.0);
  std::unordered_set<std::string> exclude;
  std::string description;
  for (const auto& w : plus) {
    auto row = model.word_vector(model.vocab.at(w));
    for (std::size_t n = 0; n < model.dim; ++n) query[n] += row[n];
    exclude.insert(w);
    if (!description.empty()) description += " + ";
    description += w;
  }
  for (const auto& w : minus) {
    auto row = model.word_vector(model.vocab.at(w));
    for (std::size_t n = 0; n < model.dim; ++n) query[n] -= row[n];
    exclude.insert(w);
    description += " - " + w;
  }
  return nearest(model, query, top_k, exclude, description);
}

SimilarityDistribution pair_distance_distribution(const EmbeddingModel& model,
                                                  std::uint64_t min_word_frequency,
                                                  std::size_t bins, int threads) {
  if (bins == 0) throw Error("pair_distance_distribution: bins must be positive");

  // qualifying words with a nonzero vector, unit-normalized up front
  std::vector<std::vector<double>> unit;
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    if (model.vocab.counts()[i] < min_word_frequency) continue;
    auto row = model.word_vector(static_cast<std::uint32_t>(i));
    const double n = norm(row);
    if (n == 0) throw Error("pair_distance_distribution: zero vector for word: " +
                            model.vocab.words()[i]);
    std::vector<double> u(row.begin(), row.end());
    for (auto& x : u) x /= n;
    unit.push_back(std::move(u));
  }
  const std::size_t m = unit.size();
  if (m < 2)
    throw Error("pair_distance_distribution: fewer than 2 words with frequency >= " +
                std::to_string(min_word_frequency));

  struct Partial {
    std::vector<std::uint64_t> bins;
    double sum = 0, sum_sq = 0;
    std::uint64_t count = 0;
  };

  const int workers = std::max(1, threads);
  std::vector<Partial> partials(workers);
  for (auto& p : partials) p.bins.assign(bins, 0);

  auto run = [&](int worker) {
    Partial& p = partials[worker];
    for (std::size_t i = static_cast<std::size_t>(worker); i < m;
         i += static_cast<std::size_t>(workers)) {
      const auto& a = unit[i];
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto& b = unit[j];
        double d = 0;
        for (std::size_t n = 0; n < a.size(); ++n) d += a[n] * b[n];
        auto bin = static_cast<std::size_t>((d + 1.0) * 0.5 * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;
        ++p.bins[bin];
        p.sum += d;
        p.sum_sq += d * d;
        ++p.count;
      }
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }

  SimilarityDistribution dist;
  dist.bins.assign(bins, 0);
  dist.min_word_frequency = min_word_frequency;
  double sum = 0, sum_sq = 0;
  for (const auto& p : partials) {
    for (std::size_t b = 0; b < bins; ++b) dist.bins[b] += p.bins[b];
    sum += p.sum;
    sum_sq += p.sum_sq;
    dist.pair_count += p.count;
  }
  const double n = static_cast<double>(dist.pair_count);
  dist.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - dist.mean * dist.mean);
  dist.stddev = std::sqrt(var);
  return dist;
}

}  // namespace lexica
