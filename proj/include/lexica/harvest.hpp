#ifndef LEXICA_HARVEST_HPP
#define LEXICA_HARVEST_HPP

#include <filesystem>
#include <functional>
#include <string>

#include "lexica/corpus.hpp"

namespace lexica {

struct HarvestConfig {
  std::string endpoint;     // e.g. http://export.arxiv.org/oai2
  std::string set_spec;     // e.g. physics:hep-th
  std::string from;         // ISO dates, optional
  std::string until;
  std::string metadata_prefix = "oai_dc";
  double delay_seconds = 3.0;  // minimum pause between requests
  int max_retries = 5;         // transport failures, exponential backoff
  double backoff_seconds = 0.5;
};

struct HarvestReport {
  std::size_t fetched = 0;     // records seen in responses
  std::size_t written = 0;     // new records appended to the output
  std::size_t duplicates = 0;  // already present (resumed harvest)
  std::size_t requests = 0;    // HTTP requests issued
};

// Streams ListRecords pages, following resumption tokens, and appends each new
// record to out_jsonl as it arrives so an interrupted harvest can be resumed
// by re-running with the same output path. An empty result set is not an
// error; a protocol error aborts with the server's diagnostic.
HarvestReport harvest_oai(const HarvestConfig& config,
                          const std::filesystem::path& out_jsonl,
                          const std::function<void(const TitleRecord&)>& on_record = {});

}  // namespace lexica

#endif  // LEXICA_HARVEST_HPP
