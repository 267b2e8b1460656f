#include "lexica/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "lexica/util.hpp"

namespace lexica {

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::raw: return "raw";
    case Stage::processed: return "processed";
    case Stage::cleaned: return "cleaned";
  }
  return "cleaned";
}

Stage parse_stage(std::string_view name) {
  if (name == "raw") return Stage::raw;
  if (name == "processed") return Stage::processed;
  if (name == "cleaned") return Stage::cleaned;
  throw Error("unknown stage: " + std::string(name));
}

namespace {

// Latin-1 supplement letters (UTF-8 lead byte 0xC3) folded to ASCII.
char fold_latin1(unsigned char second) {
  static const struct { unsigned char lo, hi; char out; } table[] = {
      {0x80, 0x85, 'a'}, {0x87, 0x87, 'c'}, {0x88, 0x8b, 'e'}, {0x8c, 0x8f, 'i'},
      {0x90, 0x90, 'd'}, {0x91, 0x91, 'n'}, {0x92, 0x96, 'o'}, {0x98, 0x98, 'o'},
      {0x99, 0x9c, 'u'}, {0x9d, 0x9d, 'y'}, {0xa0, 0xa5, 'a'}, {0xa7, 0xa7, 'c'},
      {0xa8, 0xab, 'e'}, {0xac, 0xaf, 'i'}, {0xb0, 0xb0, 'd'}, {0xb1, 0xb1, 'n'},
      {0xb2, 0xb6, 'o'}, {0xb8, 0xb8, 'o'}, {0xb9, 0xbc, 'u'}, {0xbd, 0xbd, 'y'},
      {0xbf, 0xbf, 'y'},
  };
  for (const auto& e : table)
    if (second >= e.lo && second <= e.hi) return e.out;
  return '\0';
}

bool keep_punct(char c) {
  return c == '(' || c == ')' || c == '^' || c == '_';
}

}  // namespace

std::vector<std::string> normalize_tokens(std::string_view title) {
  // lower-case and fold accents first
  std::string folded;
  folded.reserve(title.size());
  for (std::size_t i = 0; i < title.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(title[i]);
    if (c == 0xc3 && i + 1 < title.size()) {
      char out = fold_latin1(static_cast<unsigned char>(title[i + 1]));
      if (out) {
        folded.push_back(out);
        ++i;
        continue;
      }
    }
    if (c < 0x80) folded.push_back(static_cast<char>(std::tolower(c)));
    // other non-ASCII bytes are dropped
  }

  // drop LaTeX command names: backslash plus letters ("\cal", "\c{...}");
  // a backslash before a non-letter is plain punctuation and falls through
  std::string stripped;
  stripped.reserve(folded.size());
  for (std::size_t i = 0; i < folded.size(); ++i) {
    if (folded[i] == '\\' && i + 1 < folded.size() &&
        std::isalpha(static_cast<unsigned char>(folded[i + 1]))) {
      ++i;
      while (i + 1 < folded.size() && std::isalpha(static_cast<unsigned char>(folded[i + 1])))
        ++i;
      continue;
    }
    stripped.push_back(folded[i]);
  }

  // keep letters, digits, whitespace, '(' ')' '^' '_' and intra-word hyphens
  std::string kept;
  kept.reserve(stripped.size());
  for (std::size_t i = 0; i < stripped.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(stripped[i]);
    if (std::isalnum(c) || std::isspace(c) || keep_punct(stripped[i])) {
      kept.push_back(stripped[i]);
    } else if (stripped[i] == '-') {
      bool alnum_left = !kept.empty() && std::isalnum(static_cast<unsigned char>(kept.back()));
      bool alnum_right =
          i + 1 < stripped.size() && std::isalnum(static_cast<unsigned char>(stripped[i + 1]));
      if (alnum_left && alnum_right) kept.push_back('-');
    }
  }

  return split_ws(kept);
}

std::string singularize(const std::string& word, const CleaningConfig& config) {
  if (word.size() <= 3 || config.singular_exceptions.count(word)) return word;
  auto ends = [&](std::string_view suffix) {
    return word.size() >= suffix.size() &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("ies") && word.size() > 4) return word.substr(0, word.size() - 3) + "y";
  if (ends("sses") || ends("xes") || ends("ches") || ends("shes") || ends("zes"))
    return word.substr(0, word.size() - 2);
  // mass nouns and Latin/Greek endings stay as they are
  if (ends("ss") || ends("us") || ends("is") || ends("ics")) return word;
  if (ends("s")) return word.substr(0, word.size() - 1);
  return word;
}

std::vector<std::string> apply_replacements(std::vector<std::string> tokens,
                                            const CleaningConfig& config) {
  for (auto& t : tokens) t = singularize(t, config);

  for (const auto& [pattern, replacement] : config.replacements) {
    if (pattern.empty() || tokens.size() < pattern.size()) continue;
    std::vector<std::string> out;
    out.reserve(tokens.size());
    std::size_t i = 0;
    while (i < tokens.size()) {
      if (i + pattern.size() <= tokens.size() &&
          std::equal(pattern.begin(), pattern.end(), tokens.begin() + i)) {
        out.push_back(replacement);
        i += pattern.size();
      } else {
        out.push_back(std::move(tokens[i]));
        ++i;
      }
    }
    tokens = std::move(out);
  }
  return tokens;
}

std::vector<std::string> strip_stopwords(std::vector<std::string> tokens,
                                         const CleaningConfig& config) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens)
    if (!config.stopwords.count(t)) out.push_back(std::move(t));
  return out;
}

namespace {

using PairCounts = std::map<std::pair<std::string, std::string>, std::size_t>;

PairCounts count_adjacent(const std::vector<std::vector<std::string>>& titles) {
  PairCounts counts;
  for (const auto& title : titles)
    for (std::size_t i = 0; i + 1 < title.size(); ++i)
      ++counts[{title[i], title[i + 1]}];
  return counts;
}

ConcatRound summarize(const PairCounts& counts, std::size_t top_k) {
  ConcatRound round;
  round.histogram.reserve(counts.size());
  for (const auto& [pair, count] : counts)
    round.histogram.push_back({pair.first, pair.second, count});
  std::sort(round.histogram.begin(), round.histogram.end(),
            [](const BigramCount& a, const BigramCount& b) {
              if (a.count != b.count) return a.count > b.count;
              if (a.first != b.first) return a.first < b.first;
              return a.second < b.second;
            });
  if (!round.histogram.empty()) round.max_count = round.histogram.front().count;
  if (round.histogram.size() > top_k) round.histogram.resize(top_k);
  return round;
}

}  // namespace

ConcatResult concat_frequent_bigrams(std::vector<std::vector<std::string>> titles,
                                     const CleaningConfig& config) {
  if (config.bigram_threshold < 1)
    throw Error("concat_frequent_bigrams: bigram threshold must be >= 1");
  if (config.concat_rounds < 0)
    throw Error("concat_frequent_bigrams: rounds must be >= 0");
  ConcatResult result;
  for (int r = 0; r < config.concat_rounds; ++r) {
    PairCounts counts = count_adjacent(titles);
    ConcatRound round = summarize(counts, config.histogram_top_k);

    for (auto& title : titles) {
      if (title.size() < 2) continue;
      std::vector<std::string> out;
      out.reserve(title.size());
      std::size_t i = 0;
      while (i < title.size()) {
        if (i + 1 < title.size()) {
          auto it = counts.find({title[i], title[i + 1]});
          if (it != counts.end() && it->second > config.bigram_threshold) {
            out.push_back(title[i] + "-" + title[i + 1]);
            ++round.joined_occurrences;
            i += 2;
            continue;
          }
        }
        out.push_back(std::move(title[i]));
        ++i;
      }
      title = std::move(out);
    }
    result.rounds.push_back(std::move(round));
  }
  result.final_histogram = summarize(count_adjacent(titles), config.histogram_top_k);
  result.titles = std::move(titles);
  return result;
}

std::vector<std::string> process_title(const std::string& title,
                                       const CleaningConfig& config) {
  return apply_replacements(normalize_tokens(title), config);
}

CleanCorpusResult clean_corpus(const Corpus& corpus, const CleaningConfig& config) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(corpus.size());
  for (const auto& rec : corpus.records())
    tokenized.push_back(strip_stopwords(process_title(rec.title, config), config));

  ConcatResult concat = concat_frequent_bigrams(std::move(tokenized), config);

  CleanCorpusResult result;
  result.rounds = std::move(concat.rounds);
  result.final_histogram = std::move(concat.final_histogram);
  result.titles.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& rec = corpus.records()[i];
    CleanTitle ct;
    ct.tokens = std::move(concat.titles[i]);
    ct.source_id = rec.id;
    ct.section = rec.section;
    ct.stage = Stage::cleaned;
    ct.emptied = ct.tokens.empty();
    result.titles.push_back(std::move(ct));
  }
  return result;
}

std::map<std::string, std::vector<std::vector<std::string>>> titles_by_section(
    const Corpus& corpus, Stage stage, const CleaningConfig& config) {
  std::map<std::string, std::vector<std::vector<std::string>>> docs;
  switch (stage) {
    case Stage::raw:
      return raw_titles_by_section(corpus);
    case Stage::processed:
      for (const auto& rec : corpus.records())
        docs[rec.section].push_back(process_title(rec.title, config));
      return docs;
    case Stage::cleaned: {
      CleanCorpusResult cleaned = clean_corpus(corpus, config);
      for (auto& ct : cleaned.titles) docs[ct.section].push_back(std::move(ct.tokens));
      return docs;
    }
  }
  return docs;
}

CleaningConfig CleaningConfig::load(const std::filesystem::path& dir) {
  CleaningConfig config;

  std::ifstream stop(dir / "stopwords.txt");
  if (!stop) throw Error("cannot read " + (dir / "stopwords.txt").string());
  std::string line;
  while (std::getline(stop, line)) {
    std::string w = trim(line);
    if (!w.empty() && w[0] != '#') config.stopwords.insert(w);
  }

  std::ifstream syn(dir / "synonyms.tsv");
  if (!syn) throw Error("cannot read " + (dir / "synonyms.tsv").string());
  std::size_t lineno = 0;
  while (std::getline(syn, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto parts = split_char(line, '\t');
    if (parts.size() != 2 || trim(parts[0]).empty() || trim(parts[1]).empty())
      throw Error("synonyms.tsv line " + std::to_string(lineno) +
                  ": expected `pattern TAB replacement`");
    config.replacements.emplace_back(split_ws(trim(parts[0])), trim(parts[1]));
  }

  std::ifstream exc(dir / "singular_exceptions.txt");
  if (!exc) throw Error("cannot read " + (dir / "singular_exceptions.txt").string());
  while (std::getline(exc, line)) {
    std::string w = trim(line);
    if (!w.empty() && w[0] != '#') config.singular_exceptions.insert(w);
  }

  return config;
}

void write_clean_jsonl(const std::vector<CleanTitle>& titles,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& ct : titles) {
    nlohmann::json obj;
    obj["id"] = ct.source_id;
    obj["section"] = ct.section;
    obj["stage"] = std::string(stage_name(ct.stage));
    obj["tokens"] = ct.tokens;
    if (ct.emptied) obj["emptied"] = true;
    out << obj.dump() << '\n';
  }
}

std::vector<CleanTitle> read_clean_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<CleanTitle> titles;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.contains("tokens"))
      throw Error(path.string() + " line " + std::to_string(lineno) +
                  ": not a cleaned-corpus record");
    CleanTitle ct;
    ct.source_id = obj.value("id", "");
    ct.section = obj.value("section", "");
    ct.stage = parse_stage(obj.value("stage", "cleaned"));
    ct.tokens = obj["tokens"].get<std::vector<std::string>>();
    ct.emptied = obj.value("emptied", false);
    titles.push_back(std::move(ct));
  }
  return titles;
}

}  // namespace lexica
