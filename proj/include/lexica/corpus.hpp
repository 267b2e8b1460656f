#ifndef LEXICA_CORPUS_HPP
#define LEXICA_CORPUS_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexica {

// One labeled title. `abstract_text` may be empty; analysis is title-first.
struct TitleRecord {
  std::string id;
  std::string title;
  std::string abstract_text;
  std::string section;
  std::string date;  // ISO-8601
};

// Immutable after ingestion; ids are unique within one corpus.
class Corpus {
 public:
  // returns false (and leaves the corpus unchanged) on duplicate id
  bool add(TitleRecord rec);

  const std::vector<TitleRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool contains(const std::string& id) const { return by_id_.count(id) != 0; }
  const TitleRecord* find(const std::string& id) const;

  // section labels in first-appearance order
  std::vector<std::string> sections() const;

 private:
  std::vector<TitleRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// One JSON object per line with fields id/title and optionally
// abstract/section/date. A record with no section and no default_section is a
// hard error; malformed lines and duplicate ids are skipped with a warning.
Corpus ingest_jsonl(const std::filesystem::path& path,
                    const std::optional<std::string>& default_section = {},
                    IngestReport* report = nullptr);

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);

struct SectionStats {
  std::size_t paper_count = 0;
  std::size_t total_word_count = 0;
  double mean_title_length = 0.0;    // total_word_count / paper_count
  std::size_t median_title_length = 0;  // attained length (lower median)
  std::size_t unique_word_count = 0;    // case-insensitive
  double unique_word_fraction = 0.0;    // unique / total
};

// Per-section statistics over already-tokenized titles.
std::map<std::string, SectionStats> section_stats(
    const std::map<std::string, std::vector<std::vector<std::string>>>& docs);

// Tokenization used for raw-stage statistics: lower-case plus whitespace split.
std::vector<std::string> raw_tokens(const std::string& title);

// Convenience: group raw-tokenized titles of a corpus by section.
std::map<std::string, std::vector<std::vector<std::string>>> raw_titles_by_section(
    const Corpus& corpus);

}  // namespace lexica

#endif  // LEXICA_CORPUS_HPP
