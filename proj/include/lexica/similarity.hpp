#ifndef LEXICA_SIMILARITY_HPP
#define LEXICA_SIMILARITY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lexica/embedding.hpp"

namespace lexica {

// Similarity queries consult W1 rows only; the output matrix plays no part.

double cosine_vectors(std::span<const double> a, std::span<const double> b);
double cosine(const EmbeddingModel& model, const std::string& w1, const std::string& w2);

struct Neighbor {
  std::string word;
  double score = 0.0;
};

struct NeighborList {
  std::string query;  // word or signed expression, for display
  std::vector<Neighbor> entries;  // descending score, lexicographic ties
};

NeighborList nearest(const EmbeddingModel& model, const std::string& word, int top_k,
                     const std::unordered_set<std::string>& exclude = {});
NeighborList nearest(const EmbeddingModel& model, std::span<const double> query,
                     int top_k, const std::unordered_set<std::string>& exclude,
                     const std::string& description = "<vector>");

// Query vector = sum(plus) - sum(minus); input words are excluded from the
// result list.
NeighborList analogy(const EmbeddingModel& model, const std::vector<std::string>& plus,
                     const std::vector<std::string>& minus, int top_k);

struct SimilarityDistribution {
  std::vector<std::uint64_t> bins;  // uniform over [-1, 1]
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::uint64_t pair_count = 0;
  std::uint64_t min_word_frequency = 0;
};

// Cosine over all unordered pairs of words whose corpus frequency is at least
// min_word_frequency.
SimilarityDistribution pair_distance_distribution(const EmbeddingModel& model,
                                                  std::uint64_t min_word_frequency,
                                                  std::size_t bins = 200,
                                                  int threads = 1);

}  // namespace lexica

#endif  // LEXICA_SIMILARITY_HPP
