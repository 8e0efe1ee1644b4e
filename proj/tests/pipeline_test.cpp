#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sstune/pipeline.hpp"
#include "test_support.hpp"

namespace sstune {
namespace {

namespace fs = std::filesystem;

SamplerConfig small_config(std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n_model = 5;
  cfg.n_max_label = 3;
  cfg.seed = seed;
  return cfg;
}

TEST(Generate, OneSamplePerKeptParagraph) {
  std::vector<Article> arts;
  for (int a = 0; a < 3; ++a) {
    Article art;
    art.article_id = "doc" + std::to_string(a);
    for (int p = 0; p < 2; ++p)
      art.paragraphs.push_back("Paragraph " + std::to_string(p) + " of doc " + std::to_string(a) +
                               " starts here. It continues with more words.");
    arts.push_back(art);
  }
  const auto data = generate(arts, small_config(1));
  EXPECT_EQ(data.tuning.size(), 6u);
  EXPECT_TRUE(data.validation.empty());
  EXPECT_EQ(data.stats.filter.count(FilterReason::kept), 6u);
  for (const auto& s : data.tuning) {
    EXPECT_EQ(s.options[s.label].substr(0, 10), "Paragraph ");
    EXPECT_EQ(s.text, "It continues with more words.");
  }
}

void check_invariants(const FspSample& s, const SamplerConfig& cfg) {
  ASSERT_EQ(s.options.size(), cfg.n_model);
  ASSERT_LT(s.label, cfg.n_model);
  const auto j = s.num_negatives();
  EXPECT_GE(j, 1u);
  EXPECT_LE(j, cfg.n_max_label - 1);
  EXPECT_EQ(s.num_pads(), cfg.n_model - j - 1);
  EXPECT_NE(s.options[s.label], kPadOption);
  ASSERT_EQ(s.negative_sources.size(), j);
  ASSERT_EQ(s.is_hard.size(), j);
  for (std::size_t i = 0; i < j; ++i) {
    EXPECT_EQ(s.is_hard[i], s.negative_sources[i].article_id == s.positive_source.article_id);
    EXPECT_NE(s.negative_sources[i], s.positive_source);
  }
}

TEST(Generate, SyntheticCorpusInvariants) {
  const auto arts = testing::synthetic_articles(200, 4, 11);
  SamplerConfig cfg;
  cfg.seed = 3;
  const auto data = generate(arts, cfg);
  ASSERT_EQ(data.tuning.size(), 800u);
  for (const auto& s : data.tuning) check_invariants(s, cfg);
  std::size_t hard = 0;
  for (auto h : data.stats.hard_histogram) hard += h;
  EXPECT_EQ(hard, 800u);
  EXPECT_GT(data.stats.hard_negatives_total, 0u);
  EXPECT_EQ(data.stats.hard_histogram.size(), cfg.n_max_label);
  EXPECT_EQ(data.stats.hard_histogram[2], 0u);  // budget of one
}

TEST(Generate, PositiveIsDesignatedFirstSentence) {
  const auto arts = testing::synthetic_articles(30, 2, 5);
  SamplerConfig cfg;
  cfg.seed = 2;
  const auto data = generate(arts, cfg);
  for (const auto& s : data.tuning) {
    const auto& raw = arts[std::stoul(s.positive_source.article_id.substr(3))]
                          .paragraphs[s.positive_source.paragraph_index];
    const auto sentences = split_sentences(raw);
    EXPECT_EQ(s.options[s.label], sentences.front());
    EXPECT_EQ(s.text, join_sentences(sentences, 1));
  }
}

TEST(Generate, ValidationSplitIsArticleDisjoint) {
  const auto arts = testing::synthetic_articles(1000, 2, 8);
  SamplerConfig cfg;
  cfg.seed = 4;
  cfg.validation_fraction = 0.2;
  const auto data = generate(arts, cfg);
  std::set<std::string> tuning_ids;
  std::set<std::string> validation_ids;
  for (const auto& s : data.tuning) tuning_ids.insert(s.positive_source.article_id);
  for (const auto& s : data.validation) validation_ids.insert(s.positive_source.article_id);
  for (const auto& id : validation_ids) EXPECT_EQ(tuning_ids.count(id), 0u) << id;
  // Binomial(1000, 0.2): sd ~0.0126, so 0.05 is about four sigma.
  EXPECT_NEAR(static_cast<double>(validation_ids.size()) / 1000.0, 0.2, 0.05);
  EXPECT_EQ(data.tuning.size() + data.validation.size(), 2000u);
}

TEST(Generate, WorkerCountDoesNotChangeOutput) {
  const auto arts = testing::synthetic_articles(120, 3, 21);
  SamplerConfig cfg;
  cfg.seed = 77;
  cfg.validation_fraction = 0.1;
  const auto one = generate(arts, cfg, 1);
  for (std::size_t w : {2u, 3u, 8u}) {
    const auto many = generate(arts, cfg, w);
    EXPECT_EQ(many.tuning, one.tuning) << w;
    EXPECT_EQ(many.validation, one.validation) << w;
  }
}

TEST(Generate, SeedChangesOutput) {
  const auto arts = testing::synthetic_articles(50, 2, 1);
  SamplerConfig a;
  a.seed = 1;
  SamplerConfig b = a;
  b.seed = 2;
  EXPECT_NE(generate(arts, a).tuning, generate(arts, b).tuning);
}

TEST(Generate, FilterCountsCoverEveryParagraph) {
  auto arts = testing::synthetic_articles(20, 3, 6);
  arts[0].paragraphs.push_back("Only one.");
  arts[1].paragraphs.push_back("Hi. There is more.");
  arts[2].paragraphs.push_back("12345. Numbers first.");
  arts[3].paragraphs.push_back(arts[4].paragraphs[0]);
  SamplerConfig cfg;
  cfg.seed = 9;
  const auto data = generate(arts, cfg);
  const auto& f = data.stats.filter;
  EXPECT_EQ(f.total(), data.stats.paragraphs_seen);
  EXPECT_EQ(f.count(FilterReason::single_sentence), 1u);
  EXPECT_EQ(f.count(FilterReason::short_first), 1u);
  EXPECT_EQ(f.count(FilterReason::non_alphabetic_first), 1u);
  EXPECT_EQ(f.count(FilterReason::duplicate), 1u);
  EXPECT_EQ(f.count(FilterReason::kept), 60u);
}

TEST(Generate, FlatCorpusGetsNoHardNegatives) {
  auto arts = testing::synthetic_articles(40, 1, 14, "rev");
  for (auto& a : arts) a.source = CorpusSource::flat_corpus;
  SamplerConfig cfg;
  cfg.seed = 5;
  const auto data = generate(arts, cfg);
  EXPECT_EQ(data.stats.hard_negatives_total, 0u);
}

TEST(Generate, InsufficientPoolIsReported) {
  const auto arts = testing::synthetic_articles(2, 1, 1);
  SamplerConfig cfg;
  cfg.seed = 1;
  EXPECT_THROW(
      {
        for (std::uint64_t s = 0; s < 20; ++s) {
          cfg.seed = s;
          generate(arts, cfg);
        }
      },
      InsufficientPool);
}

std::vector<std::string> shard_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

RunConfig fixture_run(const fs::path& out, std::size_t workers) {
  RunConfig cfg;
  cfg.inputs = {{SSTUNE_TEST_DATA "/tiny_articles.jsonl", CorpusSource::article_corpus},
                {SSTUNE_TEST_DATA "/tiny_reviews.jsonl", CorpusSource::flat_corpus}};
  cfg.output_dir = out;
  cfg.sampler.seed = 7;
  cfg.sampler.validation_fraction = 0.1;
  cfg.workers = workers;
  cfg.shard_size = 100;
  return cfg;
}

TEST(RunGenerate, WritesShardsStatsAndReport) {
  testing::TempDir dir("run");
  const auto stats = run_generate(fixture_run(dir.path(), 1));
  const auto files = shard_files(dir.path());
  EXPECT_NE(std::find(files.begin(), files.end(), "stats.json"), files.end());
  EXPECT_NE(std::find(files.begin(), files.end(), "filter_report.txt"), files.end());
  EXPECT_NE(std::find(files.begin(), files.end(), "tuning-00000.jsonl"), files.end());
  EXPECT_NE(std::find(files.begin(), files.end(), "validation-00000.jsonl"), files.end());

  std::size_t tuning = 0;
  std::size_t validation = 0;
  for (const auto& f : files) {
    if (f.starts_with("tuning-")) tuning += read_shard(dir / f).size();
    if (f.starts_with("validation-")) validation += read_shard(dir / f).size();
  }
  EXPECT_EQ(tuning, stats.tuning_samples);
  EXPECT_EQ(validation, stats.validation_samples);
  EXPECT_EQ(stats.records_seen, 250u);
  EXPECT_EQ(stats.record_errors, 0u);

  // Planted by tools/make_fixtures.py: five of each kind.
  EXPECT_EQ(stats.filter.count(FilterReason::single_sentence), 5u);
  EXPECT_EQ(stats.filter.count(FilterReason::non_alphabetic_first), 5u);
  EXPECT_EQ(stats.filter.count(FilterReason::duplicate), 5u);
  EXPECT_EQ(stats.filter.count(FilterReason::short_first), 0u);

  const auto j = nlohmann::json::parse(testing::read_file(dir / "stats.json"));
  EXPECT_EQ(j.at("samples").at("tuning").get<std::size_t>(), stats.tuning_samples);
  EXPECT_EQ(j.at("filter").at("duplicate").get<std::size_t>(), 5u);
  std::ostringstream report;
  report << stats.filter;
  EXPECT_EQ(testing::read_file(dir / "filter_report.txt"), report.str());
}

TEST(RunGenerate, ByteIdenticalAcrossRunsAndWorkers) {
  testing::TempDir a("det-a");
  testing::TempDir b("det-b");
  testing::TempDir c("det-c");
  run_generate(fixture_run(a.path(), 1));
  run_generate(fixture_run(b.path(), 1));
  run_generate(fixture_run(c.path(), 4));
  const auto files = shard_files(a.path());
  EXPECT_EQ(files, shard_files(b.path()));
  EXPECT_EQ(files, shard_files(c.path()));
  for (const auto& f : files) {
    EXPECT_EQ(testing::read_file(a / f), testing::read_file(b / f)) << f;
    EXPECT_EQ(testing::read_file(a / f), testing::read_file(c / f)) << f;
  }
}

TEST(RunGenerate, RemovesStaleShards) {
  testing::TempDir dir("stale");
  testing::write_file(dir / "tuning-00042.jsonl", "{}\n");
  testing::write_file(dir / "notes.txt", "keep me");
  run_generate(fixture_run(dir.path(), 1));
  EXPECT_FALSE(fs::exists(dir / "tuning-00042.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "notes.txt"));
}

TEST(RunGenerate, ErrorRateLimit) {
  testing::TempDir dir("errors");
  std::string body;
  const auto arts = testing::synthetic_articles(30, 2, 3);
  for (const auto& a : arts)
    body += nlohmann::json{{"id", a.article_id}, {"paragraphs", a.paragraphs}}.dump() + "\n";
  body += "{not json\n";
  testing::write_file(dir / "in.jsonl", body);

  RunConfig cfg;
  cfg.inputs = {{dir / "in.jsonl", CorpusSource::article_corpus}};
  cfg.output_dir = dir / "out";
  cfg.sampler.seed = 1;
  cfg.max_error_rate = 0.01;  // 1 of 31 is over the limit
  std::ostringstream log;
  EXPECT_THROW(run_generate(cfg, &log), DataError);
  EXPECT_NE(log.str().find(":31:"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));

  cfg.max_error_rate = 0.05;
  const auto stats = run_generate(cfg, &log);
  EXPECT_EQ(stats.record_errors, 1u);
  EXPECT_EQ(stats.tuning_samples, 60u);
}

TEST(RunGenerate, DuplicateArticleIdsAreDropped) {
  testing::TempDir dir("dupid");
  const auto arts = testing::synthetic_articles(40, 1, 3);
  std::string body;
  for (const auto& a : arts)
    body += nlohmann::json{{"id", a.article_id}, {"paragraphs", a.paragraphs}}.dump() + "\n";
  body += nlohmann::json{{"id", "art0"}, {"paragraphs", {"Another take. With two sentences."}}}
              .dump() +
          "\n";
  testing::write_file(dir / "in.jsonl", body);
  RunConfig cfg;
  cfg.inputs = {{dir / "in.jsonl", CorpusSource::article_corpus}};
  cfg.output_dir = dir / "out";
  cfg.sampler.seed = 1;
  cfg.max_error_rate = 0.1;
  std::ostringstream log;
  const auto stats = run_generate(cfg, &log);
  EXPECT_EQ(stats.record_errors, 1u);
  EXPECT_EQ(stats.tuning_samples, 40u);
  EXPECT_NE(log.str().find("duplicate article id 'art0'"), std::string::npos);
}

TEST(RunGenerate, QuotaShortfallIsAWarning) {
  testing::TempDir dir("quota");
  auto cfg = fixture_run(dir.path(), 1);
  cfg.ingest.per_corpus_quota = 100;  // 50 articles, 200 reviews
  std::ostringstream log;
  const auto stats = run_generate(cfg, &log);
  EXPECT_EQ(stats.record_errors, 0u);
  EXPECT_EQ(stats.articles, 150u);
  EXPECT_NE(log.str().find("warning: quota 100 exceeds the 50 available"), std::string::npos);
}

TEST(RunConfig, Validation) {
  RunConfig cfg;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.inputs = {{"x.jsonl", CorpusSource::article_corpus}};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.output_dir = "out";
  EXPECT_NO_THROW(cfg.validate());
  cfg.workers = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ValidationSplit, ZeroFractionKeepsEverything) {
  for (int i = 0; i < 100; ++i)
    EXPECT_FALSE(is_validation_article("a" + std::to_string(i), 3, 0.0));
  for (int i = 0; i < 100; ++i)
    EXPECT_TRUE(is_validation_article("a" + std::to_string(i), 3, 1.0));
}

}  // namespace
}  // namespace sstune
