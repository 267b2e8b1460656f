#ifndef LEXICA_NORMALIZE_HPP
#define LEXICA_NORMALIZE_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexica/corpus.hpp"

namespace lexica {

enum class Stage { raw, processed, cleaned };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view name);

// Replacement tables and thresholds driving the cleaning pipeline. The tables
// are data, not code: load() reads stopwords.txt (one word per line),
// synonyms.tsv (pattern TAB replacement, patterns may span several words) and
// singular_exceptions.txt from a config directory.
struct CleaningConfig {
  std::vector<std::pair<std::vector<std::string>, std::string>> replacements;
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> singular_exceptions;
  std::size_t bigram_threshold = 50;  // join strictly-greater counts
  int concat_rounds = 2;
  std::size_t histogram_top_k = 300;

  static CleaningConfig load(const std::filesystem::path& dir);
};

struct CleanTitle {
  std::vector<std::string> tokens;
  std::string source_id;
  std::string section;
  Stage stage = Stage::cleaned;
  bool emptied = false;  // became empty during cleaning; retained to keep counts aligned
};

// Lower-case, fold LaTeX commands and Latin-1 accents to ASCII, strip
// punctuation except parentheses, '^', '_' and intra-word hyphens, split on
// whitespace.
std::vector<std::string> normalize_tokens(std::string_view title);

// Rule-based singular form; words on the exception list pass through.
std::string singularize(const std::string& word, const CleaningConfig& config);

// Singularizes each token, then applies the synonym table in list order;
// multi-word patterns are matched greedily left to right.
std::vector<std::string> apply_replacements(std::vector<std::string> tokens,
                                            const CleaningConfig& config);

std::vector<std::string> strip_stopwords(std::vector<std::string> tokens,
                                         const CleaningConfig& config);

struct BigramCount {
  std::string first;
  std::string second;
  std::size_t count = 0;
};

struct ConcatRound {
  std::vector<BigramCount> histogram;  // counts at round start, descending, top-k
  std::size_t joined_occurrences = 0;
  std::size_t max_count = 0;
};

struct ConcatResult {
  std::vector<std::vector<std::string>> titles;
  std::vector<ConcatRound> rounds;      // one per executed round
  ConcatRound final_histogram;          // counts after the last round
};

// Per round: count adjacent pairs across all titles, hyphenate every pair
// whose count exceeds config.bigram_threshold, rewrite titles left to right
// without overlaps, repeat config.concat_rounds times.
ConcatResult concat_frequent_bigrams(std::vector<std::vector<std::string>> titles,
                                     const CleaningConfig& config);

// normalize -> replacements; stage "processed"
std::vector<std::string> process_title(const std::string& title,
                                       const CleaningConfig& config);

struct CleanCorpusResult {
  std::vector<CleanTitle> titles;
  std::vector<ConcatRound> rounds;
  ConcatRound final_histogram;
};

// Full pipeline over a corpus; titles that come out empty are retained and
// flagged so per-section counts stay aligned with the input.
CleanCorpusResult clean_corpus(const Corpus& corpus, const CleaningConfig& config);

// Token lists of a corpus at the requested stage, grouped by section.
std::map<std::string, std::vector<std::vector<std::string>>> titles_by_section(
    const Corpus& corpus, Stage stage, const CleaningConfig& config);

void write_clean_jsonl(const std::vector<CleanTitle>& titles,
                       const std::filesystem::path& path);
std::vector<CleanTitle> read_clean_jsonl(const std::filesystem::path& path);

}  // namespace lexica

#endif  // LEXICA_NORMALIZE_HPP
