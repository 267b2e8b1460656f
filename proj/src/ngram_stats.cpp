#include "lexica/ngram_stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "lexica/util.hpp"

namespace lexica {

FrequencyTable::FrequencyTable(std::map<std::string, std::uint64_t> counts, int order)
    : order_(order) {
  entries_.reserve(counts.size());
  for (auto& [key, count] : counts) {
    total_ += count * static_cast<std::uint64_t>(order);
    entries_.emplace_back(key, count);
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

std::uint64_t FrequencyTable::count(const std::string& key) const {
  for (const auto& [k, c] : entries_)
    if (k == key) return c;
  return 0;
}

FrequencyTable word_frequencies(const Titles& titles) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& title : titles)
    for (const auto& token : title) ++counts[token];
  return FrequencyTable(std::move(counts), 1);
}

std::vector<TokenList> ngrams(const TokenList& title, int n) {
  if (n < 1) throw Error("ngrams: n must be >= 1, got " + std::to_string(n));
  std::vector<TokenList> out;
  if (title.size() < static_cast<std::size_t>(n)) return out;
  out.reserve(title.size() - n + 1);
  for (std::size_t i = 0; i + n <= title.size(); ++i)
    out.emplace_back(title.begin() + i, title.begin() + i + n);
  return out;
}

FrequencyTable ngram_frequencies(const Titles& titles, int n) {
  if (n < 1) throw Error("ngram_frequencies: n must be >= 1, got " + std::to_string(n));
  std::map<std::string, std::uint64_t> counts;
  for (const auto& title : titles)
    for (auto& gram : ngrams(title, n)) ++counts[join(gram, " ")];
  return FrequencyTable(std::move(counts), n);
}

std::uint64_t CooccurrenceMatrix::at(const std::string& a, const std::string& b) const {
  auto find = [&](const std::string& w) -> std::size_t {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), w);
    if (it == vocabulary.end() || *it != w)
      throw Error("co-occurrence: unknown word: " + w);
    return static_cast<std::size_t>(it - vocabulary.begin());
  };
  return counts[find(a)][find(b)];
}

CooccurrenceMatrix cooccurrence_matrix(const Titles& titles, int k) {
  if (k < 2) throw Error("co-occurrence window must be >= 2, got " + std::to_string(k));

  std::set<std::string> vocab;
  for (const auto& title : titles) vocab.insert(title.begin(), title.end());

  CooccurrenceMatrix m;
  m.window = k;
  m.vocabulary.assign(vocab.begin(), vocab.end());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.vocabulary.size(); ++i) index[m.vocabulary[i]] = i;
  m.counts.assign(m.vocabulary.size(), std::vector<std::uint64_t>(m.vocabulary.size(), 0));

  for (const auto& title : titles) {
    for (std::size_t p = 0; p < title.size(); ++p) {
      const std::size_t limit = std::min(title.size(), p + static_cast<std::size_t>(k));
      for (std::size_t q = p + 1; q < limit; ++q) {
        const std::size_t a = index[title[p]];
        const std::size_t b = index[title[q]];
        if (a == b) continue;
        ++m.counts[a][b];
        ++m.counts[b][a];
      }
    }
  }
  return m;
}

namespace {

struct DocTermStats {
  // per document: term -> count in that document
  std::vector<std::unordered_map<std::string, std::uint64_t>> term_counts;
  // term -> number of documents containing it
  std::unordered_map<std::string, std::uint64_t> doc_freq;
  std::vector<std::string> labels;

  explicit DocTermStats(const SectionDocs& docs) {
    labels.reserve(docs.size());
    term_counts.reserve(docs.size());
    for (const auto& [label, titles] : docs) {
      labels.push_back(label);
      std::unordered_map<std::string, std::uint64_t> counts;
      for (const auto& title : titles)
        for (const auto& token : title) ++counts[token];
      for (const auto& [term, n] : counts) {
        (void)n;
        ++doc_freq[term];
      }
      term_counts.push_back(std::move(counts));
    }
  }
};

double tfidf_score(std::uint64_t term_count, std::uint64_t doc_freq, std::size_t n_docs) {
  if (term_count == 0 || doc_freq == 0) return 0.0;
  return std::log(1.0 + static_cast<double>(term_count)) *
         std::log(static_cast<double>(n_docs) / static_cast<double>(doc_freq));
}

}  // namespace

double tfidf(const std::string& term, const std::string& doc_label,
             const SectionDocs& docs) {
  auto it = docs.find(doc_label);
  if (it == docs.end()) throw Error("tfidf: unknown document label: " + doc_label);

  std::uint64_t term_count = 0;
  for (const auto& title : it->second)
    for (const auto& token : title)
      if (token == term) ++term_count;

  std::uint64_t doc_freq = 0;
  for (const auto& [label, titles] : docs) {
    (void)label;
    bool found = false;
    for (const auto& title : titles) {
      for (const auto& token : title)
        if (token == term) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (found) ++doc_freq;
  }
  return tfidf_score(term_count, doc_freq, docs.size());
}

TfidfTable tfidf_table(const SectionDocs& docs) {
  if (docs.size() < 2)
    throw Error("tfidf_table: need at least 2 documents, got " +
                std::to_string(docs.size()));

  DocTermStats stats(docs);

  std::set<std::string> all_terms;
  for (const auto& counts : stats.term_counts)
    for (const auto& [term, n] : counts) {
      (void)n;
      all_terms.insert(term);
    }

  TfidfTable table;
  table.documents = stats.labels;
  table.words.assign(all_terms.begin(), all_terms.end());
  table.scores.assign(table.words.size(),
                      std::vector<double>(table.documents.size(), 0.0));
  for (std::size_t w = 0; w < table.words.size(); ++w) {
    const std::string& term = table.words[w];
    const std::uint64_t df = stats.doc_freq.at(term);
    for (std::size_t d = 0; d < table.documents.size(); ++d) {
      auto it = stats.term_counts[d].find(term);
      const std::uint64_t tc = it == stats.term_counts[d].end() ? 0 : it->second;
      table.scores[w][d] = tfidf_score(tc, df, table.documents.size());
    }
  }
  return table;
}

double TfidfTable::score(const std::string& word, const std::string& doc) const {
  auto wit = std::lower_bound(words.begin(), words.end(), word);
  if (wit == words.end() || *wit != word) return 0.0;
  auto dit = std::find(documents.begin(), documents.end(), doc);
  if (dit == documents.end()) throw Error("tfidf: unknown document label: " + doc);
  return scores[static_cast<std::size_t>(wit - words.begin())]
               [static_cast<std::size_t>(dit - documents.begin())];
}

std::vector<std::vector<double>> trivial_bigram_affinity(
    const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw Error("affinity: no rank vectors");
  const std::size_t dim = columns.front().size();
  for (const auto& col : columns)
    if (col.size() != dim) throw Error("affinity: rank vectors differ in length");

  std::vector<double> norms;
  norms.reserve(columns.size());
  for (const auto& col : columns) {
    double ss = 0;
    for (double v : col) ss += v * v;
    if (ss == 0) throw Error("affinity: zero rank vector");
    norms.push_back(std::sqrt(ss));
  }

  std::vector<std::vector<double>> cos(columns.size(),
                                       std::vector<double>(columns.size(), 1.0));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < dim; ++k) dot += columns[i][k] * columns[j][k];
      cos[i][j] = cos[j][i] = dot / (norms[i] * norms[j]);
    }
  }
  return cos;
}

std::vector<double> bigram_ranks(const FrequencyTable& bigrams,
                                 const std::vector<std::string>& keys) {
  std::unordered_map<std::string, std::size_t> rank;
  rank.reserve(bigrams.size());
  for (std::size_t i = 0; i < bigrams.entries().size(); ++i)
    rank[bigrams.entries()[i].first] = i + 1;

  std::vector<double> out;
  out.reserve(keys.size());
  for (const auto& key : keys) {
    auto it = rank.find(key);
    if (it == rank.end()) throw Error("bigram not present in table: " + key);
    out.push_back(static_cast<double>(it->second));
  }
  return out;
}

}  // namespace lexica
