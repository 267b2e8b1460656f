// lexica: corpus analytics over arXiv-style title metadata.
// Subcommands cover the full pipeline: ingest/harvest, cleaning, n-gram and
// tf-idf statistics, CBOW embedding training, similarity queries, and
// mean-vector SVM classification.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lexica/classify.hpp"
#include "lexica/corpus.hpp"
#include "lexica/embedding.hpp"
#include "lexica/harvest.hpp"
#include "lexica/manifest.hpp"
#include "lexica/ngram_stats.hpp"
#include "lexica/normalize.hpp"
#include "lexica/rng.hpp"
#include "lexica/similarity.hpp"
#include "lexica/util.hpp"

namespace fs = std::filesystem;
using namespace lexica;

namespace {

std::string g_command_line;

RunManifest new_manifest(std::optional<std::uint64_t> seed = {}) {
  RunManifest m;
  m.command_line = g_command_line;
  m.seed = seed;
  m.started_at = iso8601_utc_now();
  return m;
}

void finish_manifest(RunManifest& m, const fs::path& artifact) {
  m.finished_at = iso8601_utc_now();
  m.write(artifact);
}

// Either a raw corpus (objects with "title") or a cleaned corpus (objects
// with "tokens"); detected from the first non-empty line.
bool is_token_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read corpus file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    return line.find("\"tokens\"") != std::string::npos;
  }
  return false;
}

struct StagedCorpus {
  SectionDocs by_section;
  Titles all;
  std::vector<std::string> labels;  // per title, aligned with `all`
};

StagedCorpus load_staged(const fs::path& path, Stage stage, const fs::path& config_dir) {
  StagedCorpus sc;
  if (is_token_file(path)) {
    for (auto& ct : read_clean_jsonl(path)) {
      sc.by_section[ct.section].push_back(ct.tokens);
      sc.labels.push_back(ct.section);
      sc.all.push_back(std::move(ct.tokens));
    }
    return sc;
  }
  Corpus corpus = ingest_jsonl(path);
  CleaningConfig config;
  if (stage != Stage::raw) config = CleaningConfig::load(config_dir);
  sc.by_section = titles_by_section(corpus, stage, config);
  for (const auto& [section, titles] : sc.by_section)
    for (const auto& t : titles) {
      sc.labels.push_back(section);
      sc.all.push_back(t);
    }
  return sc;
}

void write_frequency_tsv(const FrequencyTable& table, std::size_t top_k, std::ostream& out) {
  out << "ngram\tcount\n";
  std::size_t emitted = 0;
  for (const auto& [key, count] : table.entries()) {
    if (top_k && emitted == top_k) break;
    out << key << '\t' << count << '\n';
    ++emitted;
  }
}

LabelGrouping parse_groups(const std::vector<std::string>& specs) {
  LabelGrouping grouping;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error("bad --group spec `" + spec + "`, expected name=label1,label2");
    grouping.emplace_back(spec.substr(0, eq), split_char(spec.substr(eq + 1), ','));
  }
  return grouping;
}

void print_confusion(const ConfusionMatrix& cm, std::ostream& out) {
  out << "actual\\predicted";
  for (const auto& l : cm.labels()) out << '\t' << l;
  out << '\n';
  for (std::size_t i = 0; i < cm.labels().size(); ++i) {
    out << cm.labels()[i];
    for (auto c : cm.counts()[i]) out << '\t' << c;
    out << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * cm.accuracy());
  out << "accuracy " << cm.trace() << "/" << cm.total() << " = " << buf << '\n';
}

// Tokens used on the classification path: lower-cased, whitespace-split raw
// titles.
Titles classification_tokens(const Corpus& corpus, std::vector<std::string>* labels,
                             std::vector<std::string>* ids) {
  Titles titles;
  for (const auto& rec : corpus.records()) {
    titles.push_back(raw_tokens(rec.title));
    if (labels) labels->push_back(rec.section);
    if (ids) ids->push_back(rec.id);
  }
  return titles;
}

std::vector<TitleVector> embed_titles(const EmbeddingModel& model, const Titles& titles,
                                      const std::vector<std::string>& labels,
                                      const std::vector<std::string>& ids,
                                      std::size_t* skipped) {
  std::vector<TitleVector> out;
  out.reserve(titles.size());
  for (std::size_t i = 0; i < titles.size(); ++i) {
    try {
      TitleVector tv = title_vector(model, titles[i]);
      tv.label = labels[i];
      tv.source_id = ids[i];
      out.push_back(std::move(tv));
    } catch (const Error&) {
      if (skipped) ++(*skipped);  // fully out-of-vocabulary title
    }
  }
  return out;
}

// minimal INI-style reader for `lexica pipeline` configs: [sections],
// key = value, # comments
using PipelineConfig = std::map<std::string, std::map<std::string, std::string>>;

PipelineConfig read_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read pipeline config: " + path.string());
  PipelineConfig config;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(path.string() + " line " + std::to_string(lineno) +
                  ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    config[section][key] = value;
  }
  return config;
}

std::string cfg_get(const PipelineConfig& config, const std::string& section,
                    const std::string& key, const std::string& fallback) {
  auto sit = config.find(section);
  if (sit == config.end()) return fallback;
  auto kit = sit->second.find(key);
  return kit == sit->second.end() ? fallback : kit->second;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"lexica: corpus analytics, word embeddings and title classification"};
  app.require_subcommand(1);

  const std::string default_config_dir = LEXICA_DATA_DIR;

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "validate a JSONL corpus and report counts");
  std::string ingest_path, ingest_section, ingest_out;
  ingest->add_option("path", ingest_path, "corpus JSONL")->required();
  ingest->add_option("--section", ingest_section, "default section for unlabeled records");
  ingest->add_option("--out", ingest_out, "write the accepted records back out");
  ingest->callback([&] {
    IngestReport report;
    std::optional<std::string> def;
    if (!ingest_section.empty()) def = ingest_section;
    Corpus corpus = ingest_jsonl(ingest_path, def, &report);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "accepted " << report.accepted << " records, skipped " << report.skipped
              << '\n';
    if (!ingest_out.empty()) {
      write_jsonl(corpus, ingest_out);
      auto m = new_manifest();
      m.add_input(ingest_path);
      finish_manifest(m, ingest_out);
    }
  });

  // ---- harvest ----
  auto* harvest = app.add_subcommand("harvest", "incremental OAI-PMH title harvest");
  HarvestConfig hc;
  std::string harvest_out;
  harvest->add_option("--endpoint", hc.endpoint, "OAI-PMH endpoint URL")
      ->default_val("http://export.arxiv.org/oai2");
  harvest->add_option("--set", hc.set_spec, "OAI set spec, e.g. physics:hep-th")->required();
  harvest->add_option("--from", hc.from, "start date (YYYY-MM-DD)");
  harvest->add_option("--to", hc.until, "end date (YYYY-MM-DD)");
  harvest->add_option("--out", harvest_out, "output JSONL (appended, dedup by id)")->required();
  harvest->add_option("--delay", hc.delay_seconds, "minimum seconds between requests")
      ->default_val(3.0);
  harvest->add_option("--retries", hc.max_retries, "transport retry budget")->default_val(5);
  harvest->callback([&] {
    auto m = new_manifest();
    HarvestReport report = harvest_oai(hc, harvest_out);
    std::cout << "requests " << report.requests << ", fetched " << report.fetched
              << ", new " << report.written << ", duplicate " << report.duplicates << '\n';
    finish_manifest(m, harvest_out);
  });

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "per-section corpus statistics");
  std::string stats_path, stats_config = default_config_dir, stats_stage = "raw";
  bool stats_cleaned = false;
  stats->add_option("corpus", stats_path, "corpus JSONL")->required();
  stats->add_flag("--cleaned", stats_cleaned, "shorthand for --stage cleaned");
  stats->add_option("--stage", stats_stage, "raw | processed | cleaned");
  stats->add_option("--config", stats_config, "cleaning-config directory");
  stats->callback([&] {
    Stage stage = stats_cleaned ? Stage::cleaned : parse_stage(stats_stage);
    StagedCorpus sc = load_staged(stats_path, stage, stats_config);
    auto table = section_stats(sc.by_section);
    std::cout << "section\tpapers\tmean_len\tmedian_len\tunique_words\tunique_fraction\n";
    for (const auto& [section, st] : table) {
      char mean[32], frac[32];
      std::snprintf(mean, sizeof(mean), "%.2f", st.mean_title_length);
      std::snprintf(frac, sizeof(frac), "%.4f", st.unique_word_fraction);
      std::cout << section << '\t' << st.paper_count << '\t' << mean << '\t'
                << st.median_title_length << '\t' << st.unique_word_count << '\t' << frac
                << '\n';
    }
  });

  // ---- clean ----
  auto* clean = app.add_subcommand("clean", "run the cleaning pipeline over a corpus");
  std::string clean_path, clean_config = default_config_dir, clean_out, clean_hist;
  int clean_threshold = 50, clean_rounds = 2;
  clean->add_option("corpus", clean_path, "corpus JSONL")->required();
  clean->add_option("--config", clean_config, "cleaning-config directory");
  clean->add_option("--out", clean_out, "cleaned corpus JSONL")->required();
  clean->add_option("--bigram-threshold", clean_threshold, "join counts above this")
      ->default_val(50)
      ->check(CLI::PositiveNumber);
  clean->add_option("--rounds", clean_rounds, "concatenation rounds")
      ->default_val(2)
      ->check(CLI::NonNegativeNumber);
  clean->add_option("--emit-histograms", clean_hist, "directory for per-round bigram TSVs");
  clean->callback([&] {
    Corpus corpus = ingest_jsonl(clean_path);
    CleaningConfig config = CleaningConfig::load(clean_config);
    config.bigram_threshold = static_cast<std::size_t>(clean_threshold);
    config.concat_rounds = clean_rounds;
    auto m = new_manifest();
    m.add_input(clean_path);
    for (const char* f : {"stopwords.txt", "synonyms.tsv", "singular_exceptions.txt"})
      m.add_config(fs::path(clean_config) / f);

    CleanCorpusResult result = clean_corpus(corpus, config);
    write_clean_jsonl(result.titles, clean_out);
    finish_manifest(m, clean_out);

    std::size_t emptied = 0;
    for (const auto& ct : result.titles) emptied += ct.emptied ? 1 : 0;
    std::cout << "cleaned " << result.titles.size() << " titles (" << emptied
              << " emptied)\n";
    for (std::size_t r = 0; r < result.rounds.size(); ++r)
      std::cout << "round " << r + 1 << ": joined " << result.rounds[r].joined_occurrences
                << " bigram occurrences, max count " << result.rounds[r].max_count << '\n';
    std::cout << "max bigram count after cleaning: " << result.final_histogram.max_count
              << '\n';

    if (!clean_hist.empty()) {
      fs::create_directories(clean_hist);
      auto dump = [&](const ConcatRound& round, const std::string& name) {
        std::ofstream out(fs::path(clean_hist) / name);
        out << "first\tsecond\tcount\n";
        for (const auto& b : round.histogram)
          out << b.first << '\t' << b.second << '\t' << b.count << '\n';
      };
      for (std::size_t r = 0; r < result.rounds.size(); ++r)
        dump(result.rounds[r], "round" + std::to_string(r + 1) + ".tsv");
      dump(result.final_histogram, "final.tsv");
    }
  });

  // ---- freq / cloud ----
  for (const char* name : {"freq", "cloud"}) {
    auto* cmd = app.add_subcommand(
        name, std::string(name) == "freq"
                  ? "word / n-gram frequency table"
                  : "frequency list for external word-cloud rendering");
    auto state = std::make_shared<std::tuple<std::string, int, int, std::string, std::string,
                                             std::string>>();
    auto& [path, n, top, stage, config_dir, out_path] = *state;
    n = 1;
    top = std::string(name) == "cloud" ? 200 : 0;
    stage = "raw";
    config_dir = default_config_dir;
    cmd->add_option("corpus", path, "corpus JSONL (raw or cleaned)")->required();
    if (std::string(name) == "freq") cmd->add_option("--n", n, "n-gram order")->default_val(1);
    cmd->add_option("--top", top, "keep only the top K entries");
    cmd->add_option("--stage", stage, "raw | processed | cleaned (raw corpora only)");
    cmd->add_option("--config", config_dir, "cleaning-config directory");
    cmd->add_option("--out", out_path, "write TSV here instead of stdout");
    cmd->callback([state, &app] {
      auto& [path, n, top, stage, config_dir, out_path] = *state;
      (void)app;
      StagedCorpus sc = load_staged(path, parse_stage(stage), config_dir);
      FrequencyTable table = n == 1 ? word_frequencies(sc.all) : ngram_frequencies(sc.all, n);
      if (out_path.empty()) {
        write_frequency_tsv(table, static_cast<std::size_t>(top), std::cout);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        write_frequency_tsv(table, static_cast<std::size_t>(top), out);
        auto m = new_manifest();
        m.add_input(path);
        finish_manifest(m, out_path);
      }
    });
  }

  // ---- tfidf ----
  auto* tfidf_cmd = app.add_subcommand("tfidf", "per-section tf-idf table");
  std::string tfidf_path, tfidf_config = default_config_dir, tfidf_stage = "cleaned",
              tfidf_out;
  tfidf_cmd->add_option("corpus", tfidf_path, "corpus JSONL (raw or cleaned)")->required();
  tfidf_cmd->add_option("--stage", tfidf_stage, "raw | processed | cleaned");
  tfidf_cmd->add_option("--config", tfidf_config, "cleaning-config directory");
  tfidf_cmd->add_option("--out", tfidf_out, "write TSV here instead of stdout");
  tfidf_cmd->callback([&] {
    StagedCorpus sc = load_staged(tfidf_path, parse_stage(tfidf_stage), tfidf_config);
    TfidfTable table = tfidf_table(sc.by_section);
    auto dump = [&](std::ostream& out) {
      out << "word";
      for (const auto& d : table.documents) out << '\t' << d;
      out << '\n';
      for (std::size_t w = 0; w < table.words.size(); ++w) {
        out << table.words[w];
        for (double s : table.scores[w]) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.4f", s);
          out << '\t' << buf;
        }
        out << '\n';
      }
    };
    if (tfidf_out.empty()) {
      dump(std::cout);
    } else {
      std::ofstream out(tfidf_out, std::ios::binary);
      dump(out);
      auto m = new_manifest();
      m.add_input(tfidf_path);
      finish_manifest(m, tfidf_out);
    }
  });

  // ---- cooc ----
  auto* cooc = app.add_subcommand("cooc", "co-occurrence matrix within a context window");
  std::string cooc_path, cooc_config = default_config_dir, cooc_stage = "cleaned", cooc_out;
  int cooc_k = 2;
  cooc->add_option("corpus", cooc_path, "corpus JSONL (raw or cleaned)")->required();
  cooc->add_option("--k", cooc_k, "context window")->required();
  cooc->add_option("--stage", cooc_stage, "raw | processed | cleaned");
  cooc->add_option("--config", cooc_config, "cleaning-config directory");
  cooc->add_option("--out", cooc_out, "output TSV (sparse triplets)")->required();
  cooc->callback([&] {
    StagedCorpus sc = load_staged(cooc_path, parse_stage(cooc_stage), cooc_config);
    std::set<std::string> vocab_probe;
    for (const auto& t : sc.all) vocab_probe.insert(t.begin(), t.end());
    if (vocab_probe.size() > 30000)
      throw Error("co-occurrence matrix over " + std::to_string(vocab_probe.size()) +
                  " words would be too large; restrict the corpus first");
    CooccurrenceMatrix matrix = cooccurrence_matrix(sc.all, cooc_k);
    std::ofstream out(cooc_out, std::ios::binary);
    if (!out) throw Error("cannot write " + cooc_out);
    out << "word_i\tword_j\tcount\n";
    for (std::size_t i = 0; i < matrix.vocabulary.size(); ++i)
      for (std::size_t j = i + 1; j < matrix.vocabulary.size(); ++j)
        if (matrix.counts[i][j])
          out << matrix.vocabulary[i] << '\t' << matrix.vocabulary[j] << '\t'
              << matrix.counts[i][j] << '\n';
    auto m = new_manifest();
    m.add_input(cooc_path);
    finish_manifest(m, cooc_out);
    std::cout << "vocabulary " << matrix.vocabulary.size() << ", window " << cooc_k << '\n';
  });

  // ---- train-embed ----
  auto* train_embed = app.add_subcommand("train-embed", "train the CBOW word embedding");
  std::string te_path, te_out, te_mode = "auto", te_context = "mean";
  Hyperparams hp;
  std::uint64_t te_min_count = 2;
  train_embed->add_option("corpus", te_path, "corpus JSONL (raw or cleaned)")->required();
  train_embed->add_option("--dim", hp.dim, "embedding dimension")->default_val(400);
  train_embed->add_option("--window", hp.window, "context window")->default_val(5);
  train_embed->add_option("--min-count", te_min_count, "drop rarer words")->default_val(2);
  train_embed->add_option("--epochs", hp.epochs, "training epochs")->default_val(5);
  train_embed->add_option("--lr", hp.lr_initial, "initial learning rate")->default_val(0.025);
  train_embed->add_option("--seed", hp.seed, "RNG seed")->default_val(1);
  train_embed->add_option("--negative", hp.negative, "negative samples")->default_val(5);
  train_embed->add_option("--mode", te_mode, "auto | full-softmax | negative-sampling");
  train_embed->add_option("--context-mode", te_context, "mean | per-word");
  train_embed->add_option("--subsample", hp.subsample, "frequent-word subsampling threshold");
  train_embed->add_option("--threads", hp.threads,
                          "training workers (>1 is nondeterministic)")
      ->default_val(1);
  train_embed->add_option("--out", te_out, "embedding file (.vec)")->required();
  train_embed->callback([&] {
    if (te_mode == "full-softmax") hp.mode = LossMode::full_softmax;
    else if (te_mode == "negative-sampling") hp.mode = LossMode::negative_sampling;
    else if (te_mode != "auto") throw Error("unknown --mode: " + te_mode);
    hp.context_mode = te_context == "per-word" ? ContextMode::per_word : ContextMode::mean;

    StagedCorpus sc = load_staged(te_path, Stage::raw, default_config_dir);
    Vocabulary vocab = build_vocab(sc.all, te_min_count);
    std::vector<EpochStats> epochs;
    EmbeddingModel model = train_cbow(sc.all, vocab, hp, &epochs);
    for (std::size_t e = 0; e < epochs.size(); ++e) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "epoch %zu: mean loss %.4f", e + 1,
                    epochs[e].mean_loss);
      std::cout << buf << '\n';
    }
    save_embeddings(model, te_out);
    auto m = new_manifest(hp.seed);
    m.add_input(te_path);
    finish_manifest(m, te_out);
    std::cout << "vocabulary " << vocab.size() << ", mode "
              << loss_mode_name(model.meta.mode) << ", saved " << te_out << '\n';
  });

  // ---- similar ----
  auto* similar = app.add_subcommand("similar", "nearest words by cosine");
  std::string sim_model, sim_word;
  int sim_k = 10;
  similar->add_option("model", sim_model, "embedding file (.vec)")->required();
  similar->add_option("word", sim_word, "query word")->required();
  similar->add_option("-k,--top-k", sim_k, "results")->default_val(10);
  similar->callback([&] {
    EmbeddingModel model = load_embeddings(sim_model);
    NeighborList list = nearest(model, sim_word, sim_k, {sim_word});
    for (const auto& n : list.entries) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", n.score);
      std::cout << n.word << '\t' << buf << '\n';
    }
  });

  // ---- analogy ----
  auto* analogy_cmd = app.add_subcommand("analogy", "signed word-vector query");
  std::string an_model, an_plus, an_minus;
  int an_k = 5;
  analogy_cmd->add_option("model", an_model, "embedding file (.vec)")->required();
  analogy_cmd->add_option("--plus", an_plus, "comma-separated words to add")->required();
  analogy_cmd->add_option("--minus", an_minus, "comma-separated words to subtract");
  analogy_cmd->add_option("-k,--top-k", an_k, "results")->default_val(5);
  analogy_cmd->callback([&] {
    EmbeddingModel model = load_embeddings(an_model);
    auto split_words = [](const std::string& s) {
      std::vector<std::string> words;
      for (auto& w : split_char(s, ','))
        if (!trim(w).empty()) words.push_back(trim(w));
      return words;
    };
    NeighborList list =
        analogy(model, split_words(an_plus), split_words(an_minus), an_k);
    std::cout << list.query << " =\n";
    for (const auto& n : list.entries) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", n.score);
      std::cout << n.word << '\t' << buf << '\n';
    }
  });

  // ---- pair-dist ----
  auto* pair_dist = app.add_subcommand("pair-dist", "all-pairs cosine distribution");
  std::string pd_model, pd_out;
  std::uint64_t pd_min_freq = 4;
  int pd_bins = 200, pd_threads = 1;
  pair_dist->add_option("model", pd_model, "embedding file (.vec)")->required();
  pair_dist->add_option("--min-freq", pd_min_freq, "minimum corpus frequency")->default_val(4);
  pair_dist->add_option("--bins", pd_bins, "histogram bins over [-1,1]")->default_val(200);
  pair_dist->add_option("--threads", pd_threads, "worker threads")->default_val(1);
  pair_dist->add_option("--out", pd_out, "histogram TSV")->required();
  pair_dist->callback([&] {
    EmbeddingModel model = load_embeddings(pd_model);
    SimilarityDistribution dist = pair_distance_distribution(
        model, pd_min_freq, static_cast<std::size_t>(pd_bins), pd_threads);
    std::ofstream out(pd_out, std::ios::binary);
    if (!out) throw Error("cannot write " + pd_out);
    out << "bin_lo\tbin_hi\tcount\n";
    const double width = 2.0 / static_cast<double>(dist.bins.size());
    for (std::size_t b = 0; b < dist.bins.size(); ++b) {
      char lo[32], hi[32];
      std::snprintf(lo, sizeof(lo), "%.6f", -1.0 + width * static_cast<double>(b));
      std::snprintf(hi, sizeof(hi), "%.6f", -1.0 + width * static_cast<double>(b + 1));
      out << lo << '\t' << hi << '\t' << dist.bins[b] << '\n';
    }
    auto m = new_manifest();
    m.add_input(pd_model);
    finish_manifest(m, pd_out);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "pairs %llu, mean %.4f +- %.4f",
                  static_cast<unsigned long long>(dist.pair_count), dist.mean, dist.stddev);
    std::cout << buf << '\n';
  });

  // ---- train-clf ----
  auto* train_clf = app.add_subcommand("train-clf", "train the mean-vector SVM classifier");
  std::string tc_model, tc_corpus, tc_out;
  SvmConfig svm_config;
  SplitOptions split_opts;
  split_opts.train_n = 7000;
  split_opts.valid_n = 13000;
  bool tc_overall = false, tc_fallback = false;
  std::uint64_t tc_seed = 1;
  train_clf->add_option("model", tc_model, "embedding file (.vec)")->required();
  train_clf->add_option("corpus", tc_corpus, "raw corpus JSONL")->required();
  train_clf->add_option("--train-n", split_opts.train_n, "training samples per class")
      ->default_val(7000);
  train_clf->add_option("--valid-n", split_opts.valid_n, "validation samples per class")
      ->default_val(13000);
  train_clf->add_flag("--overall", tc_overall, "counts apply to the whole corpus");
  train_clf->add_flag("--proportional-fallback", tc_fallback,
                      "scale down short classes instead of failing");
  train_clf->add_option("--seed", tc_seed, "RNG seed")->default_val(1);
  train_clf->add_option("--lambda", svm_config.lambda, "L2 regularization")->default_val(1e-4);
  train_clf->add_option("--epochs", svm_config.epochs, "SGD epochs")->default_val(20);
  train_clf->add_option("--out", tc_out, "classifier file")->required();
  train_clf->callback([&] {
    split_opts.per_class = !tc_overall;
    split_opts.proportional_fallback = tc_fallback;
    split_opts.seed = tc_seed;
    svm_config.seed = tc_seed;

    EmbeddingModel model = load_embeddings(tc_model);
    Corpus corpus = ingest_jsonl(tc_corpus);
    std::vector<std::string> labels, ids;
    Titles titles = classification_tokens(corpus, &labels, &ids);
    std::size_t skipped = 0;
    std::vector<TitleVector> vectors = embed_titles(model, titles, labels, ids, &skipped);
    if (skipped)
      std::cerr << "warning: " << skipped << " titles had no in-vocabulary words\n";

    auto [train, valid] = split_train_validation(vectors, split_opts);
    SvmModel svm = train_svm(train, svm_config);
    svm.train_n = split_opts.train_n;
    svm.valid_n = split_opts.valid_n;
    svm.split_seed = split_opts.seed;
    svm.split_per_class = split_opts.per_class;
    save_svm(svm, tc_out);

    ConfusionMatrix cm = evaluate(svm, valid);
    print_confusion(cm, std::cout);
    auto m = new_manifest(tc_seed);
    m.add_input(tc_model);
    m.add_input(tc_corpus);
    finish_manifest(m, tc_out);
  });

  // ---- classify ----
  auto* classify_cmd = app.add_subcommand("classify", "predict the section of one title");
  std::string cl_svm, cl_model, cl_title;
  classify_cmd->add_option("classifier", cl_svm, "classifier file")->required();
  classify_cmd->add_option("model", cl_model, "embedding file (.vec)")->required();
  classify_cmd->add_option("--title", cl_title, "title text")->required();
  classify_cmd->callback([&] {
    SvmModel svm = load_svm(cl_svm);
    EmbeddingModel model = load_embeddings(cl_model);
    TitleVector tv = title_vector(model, raw_tokens(cl_title));
    std::cout << predict(svm, tv) << '\n';
  });

  // ---- evaluate ----
  auto* eval_cmd = app.add_subcommand("evaluate",
                                      "confusion matrix from a classifier or a stored CSV");
  std::string ev_svm, ev_model, ev_corpus, ev_matrix, ev_out;
  std::vector<std::string> ev_groups;
  eval_cmd->add_option("classifier", ev_svm, "classifier file");
  eval_cmd->add_option("model", ev_model, "embedding file (.vec)");
  eval_cmd->add_option("corpus", ev_corpus, "raw corpus JSONL");
  eval_cmd->add_option("--matrix", ev_matrix, "stored confusion-matrix CSV");
  eval_cmd->add_option("--group", ev_groups, "grouping, e.g. formal=hep-th,gr-qc,math-ph");
  eval_cmd->add_option("--out", ev_out, "write the (grouped) matrix CSV here");
  eval_cmd->callback([&] {
    ConfusionMatrix cm;
    auto m = new_manifest();
    if (!ev_matrix.empty()) {
      cm = ConfusionMatrix::load_csv(ev_matrix);
      m.add_input(ev_matrix);
    } else {
      if (ev_svm.empty() || ev_model.empty() || ev_corpus.empty())
        throw Error("evaluate needs either --matrix or classifier + model + corpus");
      SvmModel svm = load_svm(ev_svm);
      EmbeddingModel model = load_embeddings(ev_model);
      Corpus corpus = ingest_jsonl(ev_corpus);
      std::vector<std::string> labels, ids;
      Titles titles = classification_tokens(corpus, &labels, &ids);
      std::size_t skipped = 0;
      std::vector<TitleVector> vectors = embed_titles(model, titles, labels, ids, &skipped);
      SplitOptions opts;
      opts.train_n = svm.train_n;
      opts.valid_n = svm.valid_n;
      opts.seed = svm.split_seed;
      opts.per_class = svm.split_per_class;
      auto [train, valid] = split_train_validation(vectors, opts);
      (void)train;
      cm = evaluate(svm, valid);
      m.add_input(ev_svm);
      m.add_input(ev_model);
      m.add_input(ev_corpus);
    }
    if (!ev_groups.empty()) cm = reduce_confusion(cm, parse_groups(ev_groups));
    print_confusion(cm, std::cout);
    if (!ev_out.empty()) {
      cm.save_csv(ev_out);
      finish_manifest(m, ev_out);
    }
  });

  // ---- baseline-onehot ----
  auto* baseline = app.add_subcommand("baseline-onehot",
                                      "vocabulary-index control classifier");
  std::string bo_corpus, bo_out;
  OneHotConfig oh;
  oh.split.train_n = 7000;
  oh.split.valid_n = 13000;
  std::uint64_t bo_seed = 1;
  baseline->add_option("corpus", bo_corpus, "raw corpus JSONL")->required();
  baseline->add_option("--train-n", oh.split.train_n, "training samples per class")
      ->default_val(7000);
  baseline->add_option("--valid-n", oh.split.valid_n, "validation samples per class")
      ->default_val(13000);
  baseline->add_option("--max-len", oh.max_len, "pad/truncate titles to this many tokens")
      ->default_val(12);
  baseline->add_option("--seed", bo_seed, "RNG seed")->default_val(1);
  baseline->add_option("--out", bo_out, "confusion matrix CSV");
  baseline->callback([&] {
    oh.split.seed = bo_seed;
    oh.svm.seed = bo_seed;
    Corpus corpus = ingest_jsonl(bo_corpus);
    std::vector<std::string> labels;
    Titles titles = classification_tokens(corpus, &labels, nullptr);
    ConfusionMatrix cm = one_hot_baseline(titles, labels, oh);
    print_confusion(cm, std::cout);
    if (!bo_out.empty()) {
      cm.save_csv(bo_out);
      auto m = new_manifest(bo_seed);
      m.add_input(bo_corpus);
      finish_manifest(m, bo_out);
    }
  });

  // ---- pipeline ----
  auto* pipeline = app.add_subcommand("pipeline",
                                      "clean -> train-embed -> train-clf -> evaluate");
  std::string pl_config;
  std::optional<std::uint64_t> pl_seed;
  pipeline->add_option("config", pl_config, "pipeline config file")->required();
  pipeline->add_option("--seed", pl_seed, "override the config seed");
  pipeline->callback([&] {
    PipelineConfig config = read_pipeline_config(pl_config);
    const std::string input = cfg_get(config, "", "input", "");
    if (input.empty()) throw Error(pl_config + ": missing top-level `input`");
    const fs::path outdir = cfg_get(config, "", "outdir", "out");
    fs::create_directories(outdir);
    const std::uint64_t seed =
        pl_seed.value_or(std::stoull(cfg_get(config, "", "seed", "1")));

    Corpus corpus = ingest_jsonl(input);

    // clean
    CleaningConfig cleaning =
        CleaningConfig::load(cfg_get(config, "clean", "config", default_config_dir));
    cleaning.bigram_threshold =
        std::stoull(cfg_get(config, "clean", "bigram-threshold", "50"));
    cleaning.concat_rounds = std::stoi(cfg_get(config, "clean", "rounds", "2"));
    CleanCorpusResult cleaned = clean_corpus(corpus, cleaning);
    const fs::path cleaned_path = outdir / "cleaned.jsonl";
    write_clean_jsonl(cleaned.titles, cleaned_path);
    auto mc = new_manifest(seed);
    mc.add_input(input);
    finish_manifest(mc, cleaned_path);
    std::cout << "[pipeline] cleaned " << cleaned.titles.size() << " titles\n";

    // embed (classification path trains on raw lower-cased tokens by default)
    std::vector<std::string> labels, ids;
    Titles raw = classification_tokens(corpus, &labels, &ids);
    const bool embed_cleaned = cfg_get(config, "train-embed", "source", "raw") == "cleaned";
    Titles embed_source = raw;
    if (embed_cleaned) {
      embed_source.clear();
      for (const auto& ct : cleaned.titles) embed_source.push_back(ct.tokens);
    }
    Hyperparams hp2;
    hp2.dim = std::stoull(cfg_get(config, "train-embed", "dim", "400"));
    hp2.window = std::stoi(cfg_get(config, "train-embed", "window", "5"));
    hp2.epochs = std::stoi(cfg_get(config, "train-embed", "epochs", "5"));
    hp2.seed = seed;
    const std::uint64_t min_count =
        std::stoull(cfg_get(config, "train-embed", "min-count", "1"));
    Vocabulary vocab = build_vocab(embed_source, min_count);
    EmbeddingModel model = train_cbow(embed_source, vocab, hp2);
    const fs::path model_path = outdir / "model.vec";
    save_embeddings(model, model_path);
    auto me = new_manifest(seed);
    me.add_input(input);
    finish_manifest(me, model_path);
    std::cout << "[pipeline] trained embedding over " << vocab.size() << " words\n";

    // classify
    SplitOptions opts;
    opts.train_n = std::stoull(cfg_get(config, "train-clf", "train-n", "7000"));
    opts.valid_n = std::stoull(cfg_get(config, "train-clf", "valid-n", "13000"));
    opts.seed = seed;
    opts.per_class = cfg_get(config, "train-clf", "split", "per-class") != "overall";
    SvmConfig sc2;
    sc2.seed = seed;
    sc2.lambda = std::stod(cfg_get(config, "train-clf", "lambda", "1e-4"));
    sc2.epochs = std::stoi(cfg_get(config, "train-clf", "epochs", "20"));

    std::size_t skipped = 0;
    std::vector<TitleVector> vectors = embed_titles(model, raw, labels, ids, &skipped);
    auto [train, valid] = split_train_validation(vectors, opts);
    SvmModel svm = train_svm(train, sc2);
    svm.train_n = opts.train_n;
    svm.valid_n = opts.valid_n;
    svm.split_seed = opts.seed;
    svm.split_per_class = opts.per_class;
    const fs::path svm_path = outdir / "clf.svm";
    save_svm(svm, svm_path);
    auto ms = new_manifest(seed);
    ms.add_input(input);
    finish_manifest(ms, svm_path);

    // evaluate
    ConfusionMatrix cm = evaluate(svm, valid);
    const fs::path eval_path = outdir / "evaluate.csv";
    cm.save_csv(eval_path);
    auto mv = new_manifest(seed);
    mv.add_input(input);
    finish_manifest(mv, eval_path);
    print_confusion(cm, std::cout);

    const std::string group_spec = cfg_get(config, "evaluate", "group", "");
    if (!group_spec.empty()) {
      ConfusionMatrix grouped = reduce_confusion(cm, parse_groups(split_ws(group_spec)));
      const fs::path grouped_path = outdir / "evaluate_grouped.csv";
      grouped.save_csv(grouped_path);
      auto mg = new_manifest(seed);
      mg.add_input(input);
      finish_manifest(mg, grouped_path);
      print_confusion(grouped, std::cout);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lexica: " << e.what() << '\n';
    std::cerr << "run `lexica --help` for usage\n";
    return 2;
  }
  return 0;
}

int main(int argc, char** argv) {
  std::ostringstream cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd << ' ';
    cmd << argv[i];
  }
  g_command_line = cmd.str();

  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "lexica: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "lexica: " << e.what() << '\n';
    return 1;
  }
}
