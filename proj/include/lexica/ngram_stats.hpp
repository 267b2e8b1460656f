#ifndef LEXICA_NGRAM_STATS_HPP
#define LEXICA_NGRAM_STATS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lexica {

using TokenList = std::vector<std::string>;
using Titles = std::vector<TokenList>;

// Counts in descending order with lexicographic tie-break. `total` tracks the
// number of source tokens covered: sum of counts times the n-gram order.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  FrequencyTable(std::map<std::string, std::uint64_t> counts, int order);

  const std::vector<std::pair<std::string, std::uint64_t>>& entries() const {
    return entries_;
  }
  std::uint64_t count(const std::string& key) const;
  std::uint64_t total() const { return total_; }
  int order() const { return order_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::string, std::uint64_t>> entries_;
  std::uint64_t total_ = 0;
  int order_ = 1;
};

FrequencyTable word_frequencies(const Titles& titles);

// All contiguous windows of length n, in order; n-grams never cross titles.
std::vector<TokenList> ngrams(const TokenList& title, int n);

// n-gram counts across titles; keys are the grams joined with single spaces.
FrequencyTable ngram_frequencies(const Titles& titles, int n);

struct CooccurrenceMatrix {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<std::vector<std::uint64_t>> counts;  // symmetric, zero diagonal
  int window = 2;

  std::uint64_t at(const std::string& a, const std::string& b) const;
};

// Entry (i,j), i != j, counts position pairs at distance < k within one
// title, symmetrized; the diagonal is zero.
CooccurrenceMatrix cooccurrence_matrix(const Titles& titles, int k);

using SectionDocs = std::map<std::string, Titles>;

// log(1 + f(t,d)) * log(|D| / df(t)), natural logarithm; zero when the term
// is missing from d or appears in no document.
double tfidf(const std::string& term, const std::string& doc_label,
             const SectionDocs& docs);

struct TfidfTable {
  std::vector<std::string> documents;            // ordered labels
  std::vector<std::string> words;                // sorted
  std::vector<std::vector<double>> scores;       // words x documents

  double score(const std::string& word, const std::string& doc) const;
};

TfidfTable tfidf_table(const SectionDocs& docs);

// Pairwise cosines of per-section rank vectors (columns); symmetric with a
// unit diagonal. Throws on zero vectors or ragged input.
std::vector<std::vector<double>> trivial_bigram_affinity(
    const std::vector<std::vector<double>>& columns);

// Ranks (1-based positions) of the given bigrams in a frequency table whose
// keys are space-joined bigrams.
std::vector<double> bigram_ranks(const FrequencyTable& bigrams,
                                 const std::vector<std::string>& keys);

}  // namespace lexica

#endif  // LEXICA_NGRAM_STATS_HPP
