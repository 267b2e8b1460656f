#include "lexica/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "lexica/util.hpp"

namespace lexica {

bool Corpus::add(TitleRecord rec) {
  if (by_id_.count(rec.id)) return false;
  by_id_.emplace(rec.id, records_.size());
  records_.push_back(std::move(rec));
  return true;
}

const TitleRecord* Corpus::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::vector<std::string> Corpus::sections() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (seen.insert(r.section).second) out.push_back(r.section);
  }
  return out;
}

Corpus ingest_jsonl(const std::filesystem::path& path,
                    const std::optional<std::string>& default_section,
                    IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read corpus file: " + path.string());

  Corpus corpus;
  IngestReport local;
  IngestReport& rep = report ? *report : local;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;

    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      ++rep.skipped;
      rep.warnings.push_back("line " + std::to_string(lineno) + ": malformed JSON, skipped");
      continue;
    }

    TitleRecord rec;
    rec.id = obj.value("id", "");
    rec.title = obj.value("title", "");
    rec.abstract_text = obj.value("abstract", "");
    rec.section = obj.value("section", "");
    rec.date = obj.value("date", "");

    if (rec.id.empty() || trim(rec.title).empty()) {
      ++rep.skipped;
      rep.warnings.push_back("line " + std::to_string(lineno) + ": missing id or title, skipped");
      continue;
    }
    if (rec.section.empty()) {
      if (!default_section)
        throw Error("line " + std::to_string(lineno) + " of " + path.string() +
                    ": record has no section and no --section default was given");
      rec.section = *default_section;
    }

    if (corpus.add(std::move(rec))) {
      ++rep.accepted;
    } else {
      ++rep.skipped;
      rep.warnings.push_back("line " + std::to_string(lineno) + ": duplicate id, skipped");
    }
  }
  return corpus;
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file: " + path.string());
  for (const auto& r : corpus.records()) {
    nlohmann::json obj;
    obj["id"] = r.id;
    obj["title"] = r.title;
    if (!r.abstract_text.empty()) obj["abstract"] = r.abstract_text;
    obj["section"] = r.section;
    if (!r.date.empty()) obj["date"] = r.date;
    out << obj.dump() << '\n';
  }
}

std::vector<std::string> raw_tokens(const std::string& title) {
  std::string lowered(title);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return split_ws(lowered);
}

std::map<std::string, std::vector<std::vector<std::string>>> raw_titles_by_section(
    const Corpus& corpus) {
  std::map<std::string, std::vector<std::vector<std::string>>> docs;
  for (const auto& r : corpus.records()) docs[r.section].push_back(raw_tokens(r.title));
  return docs;
}

std::map<std::string, SectionStats> section_stats(
    const std::map<std::string, std::vector<std::vector<std::string>>>& docs) {
  std::map<std::string, SectionStats> out;
  for (const auto& [section, titles] : docs) {
    SectionStats st;
    st.paper_count = titles.size();
    std::vector<std::size_t> lengths;
    lengths.reserve(titles.size());
    std::unordered_set<std::string> unique;
    for (const auto& tokens : titles) {
      lengths.push_back(tokens.size());
      st.total_word_count += tokens.size();
      for (const auto& t : tokens) unique.insert(t);
    }
    if (st.paper_count > 0) {
      st.mean_title_length =
          static_cast<double>(st.total_word_count) / static_cast<double>(st.paper_count);
      std::sort(lengths.begin(), lengths.end());
      st.median_title_length = lengths[(lengths.size() - 1) / 2];
    }
    st.unique_word_count = unique.size();
    if (st.total_word_count > 0)
      st.unique_word_fraction =
          static_cast<double>(st.unique_word_count) / static_cast<double>(st.total_word_count);
    out.emplace(section, st);
  }
  return out;
}

}  // namespace lexica
