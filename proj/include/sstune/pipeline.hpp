#pragma once

// Corpus-to-dataset pipeline: segment and filter paragraphs, build the
// option pool, emit one sample per kept paragraph, split by article.
//
// Output is independent of the worker count: segmentation and sampling run
// in parallel with per-paragraph seeding, while duplicate detection and pool
// construction run in input order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sstune/common.hpp"
#include "sstune/ingest.hpp"
#include "sstune/parallel.hpp"
#include "sstune/random.hpp"
#include "sstune/sampler.hpp"
#include "sstune/segment.hpp"
#include "sstune/shard.hpp"

namespace sstune {

inline constexpr std::string_view kTuningSplit = "tuning";
inline constexpr std::string_view kValidationSplit = "validation";

/// True if the article belongs to the validation split.
inline bool is_validation_article(std::string_view article_id, std::uint64_t seed,
                                  double fraction) {
  if (fraction <= 0.0) return false;
  const auto h = hash_combine(mix64(seed ^ 0x76616c6964ULL), fnv1a64(article_id));
  return unit_interval(h) < fraction;
}

struct GenerateStats {
  std::size_t n_model = 0;
  std::size_t n_max_label = 0;
  std::size_t records_seen = 0;
  std::size_t record_errors = 0;
  std::size_t dropped_by_category_cap = 0;
  std::size_t articles = 0;
  std::size_t paragraphs_seen = 0;
  FilterReport filter;
  std::size_t tuning_samples = 0;
  std::size_t validation_samples = 0;
  std::vector<std::size_t> j_histogram;      // index J
  std::vector<std::size_t> hard_histogram;   // index = hard negatives per sample
  std::vector<std::size_t> label_histogram;  // index = label
  std::size_t hard_negatives_total = 0;

  void record(const FspSample& s) {
    ++j_histogram.at(s.num_negatives());
    ++hard_histogram.at(s.num_hard());
    ++label_histogram.at(s.label);
    hard_negatives_total += s.num_hard();
  }

  nlohmann::json to_json() const {
    nlohmann::json filter_counts = nlohmann::json::object();
    for (auto r : kAllFilterReasons) filter_counts[std::string(to_string(r))] = filter.count(r);
    return {{"n_model", n_model},
            {"n_max_label", n_max_label},
            {"records_seen", records_seen},
            {"record_errors", record_errors},
            {"dropped_by_category_cap", dropped_by_category_cap},
            {"articles", articles},
            {"paragraphs_seen", paragraphs_seen},
            {"filter", filter_counts},
            {"samples", {{"tuning", tuning_samples}, {"validation", validation_samples}}},
            {"j_histogram", j_histogram},
            {"hard_negative_histogram", hard_histogram},
            {"hard_negatives_total", hard_negatives_total},
            {"label_histogram", label_histogram}};
  }
};

struct GeneratedDataset {
  std::vector<FspSample> tuning;
  std::vector<FspSample> validation;
  GenerateStats stats;
};

/// Two-pass sample generation over an ordered article list.
inline GeneratedDataset generate(const std::vector<Article>& articles, const SamplerConfig& cfg,
                                 std::size_t workers = 1) {
  cfg.validate();

  struct Job {
    std::size_t article = 0;
    std::size_t paragraph = 0;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < articles.size(); ++a)
    for (std::size_t p = 0; p < articles[a].paragraphs.size(); ++p) jobs.push_back({a, p});

  GeneratedDataset out;
  auto& stats = out.stats;
  stats.n_model = cfg.n_model;
  stats.n_max_label = cfg.n_max_label;
  stats.articles = articles.size();
  stats.paragraphs_seen = jobs.size();
  stats.j_histogram.assign(cfg.n_max_label, 0);
  stats.hard_histogram.assign(cfg.n_max_label, 0);
  stats.label_histogram.assign(cfg.n_model, 0);

  // Segmentation and intrinsic checks.
  std::vector<ParagraphRecord> records(jobs.size());
  std::vector<std::optional<FilterReason>> rejection(jobs.size());
  std::vector<std::uint64_t> keys(jobs.size(), 0);
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const auto& art = articles[jobs[i].article];
    records[i] = segment_paragraph(art.article_id, jobs[i].paragraph,
                                   art.paragraphs[jobs[i].paragraph], art.category);
    rejection[i] = intrinsic_rejection(records[i]);
    if (!rejection[i]) keys[i] = dedup_key(join_sentences(records[i].sentences));
  });

  // Duplicates resolved in input order so the first occurrence wins.
  DedupIndex dedup;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    FilterReason reason = FilterReason::kept;
    if (rejection[i]) {
      reason = *rejection[i];
    } else if (!dedup.insert(keys[i])) {
      reason = FilterReason::duplicate;
    }
    stats.filter.add(reason);
    if (reason == FilterReason::kept) kept.push_back(i);
  }

  // Pass 1: designated split per kept paragraph, then the option pool.
  std::vector<DesignatedSplit> splits(kept.size());
  parallel_for(kept.size(), workers, [&](std::size_t k) {
    const auto& rec = records[kept[k]];
    auto rng = paragraph_rng(cfg.seed, rec.article_id, rec.paragraph_index, RngStream::split);
    splits[k] = designated_split(rec, cfg.objective, rng);
  });
  OptionPool pool;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& rec = records[kept[k]];
    pool.add({rec.article_id, rec.paragraph_index}, splits[k].option);
  }

  // Pass 2: negatives, padding, shuffle.
  std::vector<FspSample> samples(kept.size());
  parallel_for(kept.size(), workers, [&](std::size_t k) {
    const auto& rec = records[kept[k]];
    const auto& art = articles[jobs[kept[k]].article];
    const std::size_t budget =
        art.source == CorpusSource::flat_corpus ? cfg.hard_negatives_flat : cfg.hard_negatives;
    SourceId source{rec.article_id, rec.paragraph_index};
    auto rng = paragraph_rng(cfg.seed, rec.article_id, rec.paragraph_index, RngStream::negatives);
    auto negatives = sample_negatives(pool, source, splits[k].option, budget, cfg, rng);
    samples[k] = assemble(splits[k], std::move(negatives), std::move(source), cfg, rng);
  });

  for (auto& s : samples) {
    stats.record(s);
    if (is_validation_article(s.positive_source.article_id, cfg.seed, cfg.validation_fraction)) {
      out.validation.push_back(std::move(s));
    } else {
      out.tuning.push_back(std::move(s));
    }
  }
  stats.tuning_samples = out.tuning.size();
  stats.validation_samples = out.validation.size();
  return out;
}

struct CorpusInput {
  std::filesystem::path path;
  CorpusSource kind = CorpusSource::article_corpus;
};

struct RunConfig {
  IngestConfig ingest;
  SamplerConfig sampler;
  std::vector<CorpusInput> inputs;
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  std::size_t shard_size = 100000;
  // Record-level errors tolerated before the run fails, as a share of
  // records read.
  double max_error_rate = 0.01;

  void validate() const {
    ingest.validate();
    sampler.validate();
    if (inputs.empty()) throw ConfigError("no input corpora given");
    if (output_dir.empty()) throw ConfigError("no output directory given");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (shard_size < 1) throw ConfigError("shard_size must be >= 1");
    if (!(max_error_rate >= 0.0 && max_error_rate <= 1.0))
      throw ConfigError("max_error_rate must lie in [0, 1]");
  }
};

/// Reads every input, applies quotas when configured, and removes articles
/// whose id repeats an earlier one (reported as record errors).
inline std::vector<Article> load_articles(const RunConfig& cfg, GenerateStats& stats,
                                          std::vector<RecordError>& errors) {
  std::vector<std::vector<Article>> corpora;
  for (const auto& input : cfg.inputs) {
    if (input.kind == CorpusSource::article_corpus) {
      ArticleCorpusReader reader(input.path, cfg.ingest);
      corpora.push_back(drain(reader));
      stats.records_seen += reader.records_seen();
      errors.insert(errors.end(), reader.errors().begin(), reader.errors().end());
    } else {
      FlatCorpusReader reader(input.path, cfg.ingest);
      corpora.push_back(drain(reader));
      stats.records_seen += reader.records_seen();
      stats.dropped_by_category_cap += reader.dropped_by_cap();
      errors.insert(errors.end(), reader.errors().begin(), reader.errors().end());
    }
  }

  std::unordered_set<std::string> ids;
  for (std::size_t c = 0; c < corpora.size(); ++c) {
    auto& corpus = corpora[c];
    std::erase_if(corpus, [&](const Article& a) {
      if (ids.insert(a.article_id).second) return false;
      errors.push_back({cfg.inputs[c].path.string(), 0, "duplicate article id '" + a.article_id + "'"});
      return true;
    });
  }

  std::vector<Article> articles;
  if (cfg.ingest.per_corpus_quota) {
    std::vector<std::size_t> quotas(corpora.size(), *cfg.ingest.per_corpus_quota);
    auto mixed = interleave(std::move(corpora), quotas, cfg.sampler.seed);
    for (const auto& s : mixed.shortfalls) {
      errors.push_back({cfg.inputs[s.corpus].path.string(), 0,
                        "warning: quota " + std::to_string(s.requested) + " exceeds the " +
                            std::to_string(s.available) + " available articles"});
    }
    articles = std::move(mixed.articles);
  } else {
    for (auto& corpus : corpora)
      for (auto& a : corpus) articles.push_back(std::move(a));
  }
  return articles;
}

inline void remove_stale_shards(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.path().has_extension() || entry.path().extension() != ".jsonl") continue;
    if (name.starts_with(std::string(kTuningSplit) + "-") ||
        name.starts_with(std::string(kValidationSplit) + "-"))
      fs::remove(entry.path());
  }
}

/// Full generate run: writes tuning and validation shards, stats.json and
/// filter_report.txt into cfg.output_dir. Record errors are written to
/// `log`; if their rate exceeds cfg.max_error_rate the run throws DataError
/// before writing any output.
inline GenerateStats run_generate(const RunConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  GenerateStats io_stats;
  std::vector<RecordError> errors;
  auto articles = load_articles(cfg, io_stats, errors);

  std::size_t hard_errors = 0;
  for (const auto& e : errors) {
    if (log) *log << e.path << ":" << e.line << ": " << e.message << "\n";
    if (!e.message.starts_with("warning:")) ++hard_errors;
  }
  const std::size_t seen = std::max<std::size_t>(io_stats.records_seen, 1);
  if (static_cast<double>(hard_errors) / static_cast<double>(seen) > cfg.max_error_rate)
    throw DataError(std::to_string(hard_errors) + " record errors in " +
                    std::to_string(io_stats.records_seen) + " records exceeds the error-rate limit");

  auto data = generate(articles, cfg.sampler, cfg.workers);
  auto stats = std::move(data.stats);
  stats.records_seen = io_stats.records_seen;
  stats.record_errors = hard_errors;
  stats.dropped_by_category_cap = io_stats.dropped_by_category_cap;

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  remove_stale_shards(cfg.output_dir);
  ShardWriter tuning(cfg.output_dir, std::string(kTuningSplit), cfg.shard_size);
  for (const auto& s : data.tuning) tuning.write(sample_to_json(s));
  tuning.close();
  ShardWriter validation(cfg.output_dir, std::string(kValidationSplit), cfg.shard_size);
  for (const auto& s : data.validation) validation.write(sample_to_json(s));
  validation.close();

  std::ofstream(cfg.output_dir / "stats.json") << stats.to_json().dump(2) << "\n";
  std::ofstream(cfg.output_dir / "filter_report.txt") << stats.filter;
  return stats;
}

}  // namespace sstune
