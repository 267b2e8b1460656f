// CPPHTTPLIB_OPENSSL_SUPPORT comes from the build so every TU that touches
// httplib.h sees the same Client layout
#include <httplib.h>

#include "lexica/harvest.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "lexica/util.hpp"

namespace lexica {

namespace {

namespace pt = boost::property_tree;

// Section label from an OAI set spec like "physics:hep-th".
std::string section_from_set(const std::string& set_spec) {
  auto pos = set_spec.rfind(':');
  return pos == std::string::npos ? set_spec : set_spec.substr(pos + 1);
}

std::string collapse_ws(const std::string& s) {
  return join(split_ws(s), " ");
}

struct Page {
  std::vector<TitleRecord> records;
  std::string resumption_token;
};

Page parse_list_records(const std::string& body, const std::string& section) {
  pt::ptree tree;
  std::istringstream in(body);
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(std::string("harvest: cannot parse OAI response: ") + e.what());
  }

  auto root = tree.get_child_optional("OAI-PMH");
  if (!root) throw Error("harvest: response is not an OAI-PMH envelope");

  if (auto err = root->get_child_optional("error")) {
    const std::string code = err->get<std::string>("<xmlattr>.code", "");
    if (code == "noRecordsMatch") return {};  // empty set, not a failure
    throw Error("harvest: OAI error [" + code + "] " + collapse_ws(err->get_value<std::string>()));
  }

  Page page;
  auto list = root->get_child_optional("ListRecords");
  if (!list) return page;

  for (const auto& [name, node] : *list) {
    if (name == "resumptionToken") {
      page.resumption_token = trim(node.get_value<std::string>());
      continue;
    }
    if (name != "record") continue;

    TitleRecord rec;
    rec.id = node.get<std::string>("header.identifier", "");
    rec.date = node.get<std::string>("header.datestamp", "");
    rec.section = section;
    if (auto meta = node.get_child_optional("metadata.oai_dc:dc")) {
      rec.title = collapse_ws(meta->get<std::string>("dc:title", ""));
      rec.abstract_text = collapse_ws(meta->get<std::string>("dc:description", ""));
    } else if (auto plain = node.get_child_optional("metadata.dc")) {
      rec.title = collapse_ws(plain->get<std::string>("title", ""));
      rec.abstract_text = collapse_ws(plain->get<std::string>("description", ""));
    }
    if (node.get<std::string>("header.<xmlattr>.status", "") == "deleted") continue;
    if (rec.id.empty() || rec.title.empty()) continue;
    page.records.push_back(std::move(rec));
  }
  return page;
}

std::unordered_set<std::string> existing_ids(const std::filesystem::path& path) {
  std::unordered_set<std::string> ids;
  std::ifstream in(path);
  if (!in) return ids;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (!obj.is_discarded() && obj.contains("id")) ids.insert(obj["id"].get<std::string>());
  }
  return ids;
}

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // /oai2 etc.
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("harvest: endpoint must include scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HarvestReport harvest_oai(const HarvestConfig& config,
                          const std::filesystem::path& out_jsonl,
                          const std::function<void(const TitleRecord&)>& on_record) {
  const Endpoint ep = split_endpoint(config.endpoint);
  httplib::Client client(ep.base);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);

  const std::string section = section_from_set(config.set_spec);
  std::unordered_set<std::string> seen = existing_ids(out_jsonl);

  std::ofstream out(out_jsonl, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open harvest output: " + out_jsonl.string());

  HarvestReport report;
  std::string token;
  bool first_request = true;

  for (;;) {
    httplib::Params params;
    params.emplace("verb", "ListRecords");
    if (first_request) {
      params.emplace("metadataPrefix", config.metadata_prefix);
      if (!config.set_spec.empty()) params.emplace("set", config.set_spec);
      if (!config.from.empty()) params.emplace("from", config.from);
      if (!config.until.empty()) params.emplace("until", config.until);
    } else {
      params.emplace("resumptionToken", token);
    }

    std::string body;
    int attempt = 0;
    for (;;) {
      if (!first_request || attempt > 0) {
        const double pause =
            attempt == 0 ? config.delay_seconds
                         : std::max(config.delay_seconds,
                                    config.backoff_seconds * static_cast<double>(1 << (attempt - 1)));
        if (pause > 0)
          std::this_thread::sleep_for(std::chrono::duration<double>(pause));
      }
      ++report.requests;
      auto res = client.Get(ep.path, params, httplib::Headers{});
      if (res && res->status == 200) {
        body = res->body;
        break;
      }
      // connection failures and 5xx (including the OAI 503 flow-control
      // response) are retried; 4xx is a hard protocol error
      if (!res || res->status >= 500) {
        ++attempt;
      } else {
        throw Error("harvest: HTTP " + std::to_string(res->status) + " from " +
                    config.endpoint);
      }
      if (attempt > config.max_retries)
        throw Error("harvest: giving up after " + std::to_string(attempt) +
                    " failed attempts against " + config.endpoint);
    }
    first_request = false;

    Page page = parse_list_records(body, section);
    for (auto& rec : page.records) {
      ++report.fetched;
      if (!seen.insert(rec.id).second) {
        ++report.duplicates;
        continue;
      }
      nlohmann::json obj;
      obj["id"] = rec.id;
      obj["title"] = rec.title;
      if (!rec.abstract_text.empty()) obj["abstract"] = rec.abstract_text;
      obj["section"] = rec.section;
      if (!rec.date.empty()) obj["date"] = rec.date;
      out << obj.dump() << '\n';
      out.flush();
      ++report.written;
      if (on_record) on_record(rec);
    }

    if (page.resumption_token.empty()) break;
    token = page.resumption_token;
  }
  return report;
}

}  // namespace lexica
