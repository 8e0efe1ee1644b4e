#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "sstune/sampler.hpp"
#include "test_support.hpp"

namespace sstune {
namespace {

using Sentences = std::vector<std::string>;

ParagraphRecord rec_of(Sentences s, std::string article = "art", std::size_t idx = 0) {
  return {std::move(article), idx, std::move(s), std::nullopt};
}

TEST(DesignatedSplit, FirstSentencePrediction) {
  const auto rec = rec_of({"Jim Berryman (born February 17, 1947) is a ...",
                           "He is the former mayor of Adrian ..."});
  Rng rng(1);
  const auto s = designated_split(rec, Objective::fsp, rng);
  EXPECT_EQ(s.option, "Jim Berryman (born February 17, 1947) is a ...");
  EXPECT_EQ(s.text, "He is the former mayor of Adrian ...");
}

TEST(DesignatedSplit, LastSentencePrediction) {
  Rng rng(1);
  const auto s = designated_split(rec_of({"A", "B", "C"}), Objective::lsp, rng);
  EXPECT_EQ(s.option, "C");
  EXPECT_EQ(s.text, "A B");
}

TEST(DesignatedSplit, RandomSentenceAtIndexOne) {
  const auto s = designated_split_at(rec_of({"A", "B"}), Objective::rsp, 1);
  EXPECT_EQ(s.option, "B");
  EXPECT_EQ(s.text, "A");
}

TEST(DesignatedSplit, NextSentenceSelectionPairs) {
  const auto rec = rec_of({"A", "B", "C"});
  EXPECT_EQ(designated_split_at(rec, Objective::nss, 0), (DesignatedSplit{"B", "A"}));
  EXPECT_EQ(designated_split_at(rec, Objective::nss, 1), (DesignatedSplit{"C", "B"}));
  EXPECT_THROW(designated_split_at(rec, Objective::nss, 2), ConfigError);
}

TEST(DesignatedSplit, RngDrawsCoverEveryChoice) {
  const auto rec = rec_of({"A", "B", "C", "D"});
  std::set<std::string> nss;
  std::set<std::string> rsp;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng a(seed);
    Rng b(seed);
    nss.insert(designated_split(rec, Objective::nss, a).option);
    rsp.insert(designated_split(rec, Objective::rsp, b).option);
  }
  EXPECT_EQ(nss, (std::set<std::string>{"B", "C", "D"}));
  EXPECT_EQ(rsp, (std::set<std::string>{"A", "B", "C", "D"}));
}

TEST(DesignatedSplit, FewerThanTwoSentencesIsError) {
  Rng rng(0);
  EXPECT_THROW(designated_split(rec_of({"Alone."}), Objective::fsp, rng), DataError);
}

OptionPool pool_of(std::size_t articles, std::size_t per_article) {
  OptionPool pool;
  for (std::size_t a = 0; a < articles; ++a)
    for (std::size_t p = 0; p < per_article; ++p)
      pool.add({"a" + std::to_string(a), p},
               "First sentence " + std::to_string(a) + "." + std::to_string(p));
  return pool;
}

TEST(SampleNegatives, CountStaysInRange) {
  const auto pool = pool_of(50, 3);
  SamplerConfig cfg;
  std::set<std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng(seed);
    const SourceId pos{"a0", 0};
    auto negs = sample_negatives(pool, pos, pool.entry(0).sentence, cfg.hard_negatives, cfg, rng);
    ASSERT_GE(negs.size(), 1u);
    ASSERT_LE(negs.size(), 9u);
    seen.insert(negs.size());
  }
  EXPECT_EQ(seen.size(), 9u);
}

TEST(SampleNegatives, HardBudgetCappedByAvailability) {
  // Two paragraphs in the positive's article: one hard candidate.
  OptionPool pool = pool_of(30, 1);
  pool.add({"a0", 1}, "Sibling first sentence.");
  SamplerConfig cfg;
  cfg.hard_negatives = 3;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 500 && !found; ++seed) {
    Rng rng(seed);
    auto negs = sample_negatives(pool, {"a0", 0}, pool.entry(0).sentence, 3, cfg, rng);
    if (negs.size() != 5) continue;
    found = true;
    std::size_t hard = 0;
    for (const auto& n : negs) {
      hard += n.is_hard;
      EXPECT_EQ(n.is_hard, n.source.article_id == "a0");
    }
    EXPECT_EQ(hard, 1u);
  }
  EXPECT_TRUE(found);
}

TEST(SampleNegatives, NoHardNegativesForFlatCorpus) {
  OptionPool pool = pool_of(40, 1);
  SamplerConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto negs = sample_negatives(pool, {"a3", 0}, pool.entry(3).sentence, cfg.hard_negatives_flat,
                                 cfg, rng);
    for (const auto& n : negs) {
      EXPECT_FALSE(n.is_hard);
      EXPECT_NE(n.source.article_id, "a3");
    }
  }
}

TEST(SampleNegatives, InsufficientPool) {
  OptionPool pool = pool_of(3, 1);  // two candidates outside the positive's article
  SamplerConfig cfg;
  bool threw = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    try {
      auto negs = sample_negatives(pool, {"a0", 0}, pool.entry(0).sentence, 0, cfg, rng);
      EXPECT_LE(negs.size(), 2u);
    } catch (const InsufficientPool&) {
      threw = true;
    }
  }
  EXPECT_TRUE(threw);
}

TEST(SampleNegatives, NeverRepeatsPositiveOrItself) {
  // Many paragraphs share the positive's first sentence; only two are distinct.
  OptionPool pool;
  for (int i = 0; i < 40; ++i) pool.add({"x" + std::to_string(i), 0}, "Great product.");
  pool.add({"y", 0}, "Works fine.");
  pool.add({"z", 0}, "Broke fast.");
  SamplerConfig cfg;
  cfg.n_max_label = 3;  // J <= 2
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    auto negs = sample_negatives(pool, {"x0", 0}, "Great product.", 0, cfg, rng);
    std::set<std::string> distinct;
    for (const auto& n : negs) {
      EXPECT_NE(n.sentence, "Great product.");
      distinct.insert(n.sentence);
    }
    EXPECT_EQ(distinct.size(), negs.size());
  }
}

TEST(SampleNegatives, DuplicateStringsCountAsInsufficient) {
  OptionPool pool;
  for (int i = 0; i < 40; ++i) pool.add({"x" + std::to_string(i), 0}, "Same.");
  SamplerConfig cfg;
  cfg.n_max_label = 3;
  bool threw = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    try {
      sample_negatives(pool, {"x0", 0}, "Other positive.", 0, cfg, rng);
    } catch (const InsufficientPool&) {
      threw = true;
    }
  }
  EXPECT_TRUE(threw);
}

std::vector<Negative> fake_negatives(std::size_t j) {
  std::vector<Negative> out;
  for (std::size_t i = 0; i < j; ++i)
    out.push_back({"Negative " + std::to_string(i) + ".", {"n" + std::to_string(i), 0}, false});
  return out;
}

TEST(Assemble, CountsPadsAndPositive) {
  SamplerConfig cfg;
  cfg.n_model = 5;
  cfg.n_max_label = 5;
  Rng rng(3);
  const auto s = assemble({"Positive.", "Body."}, fake_negatives(2), {"p", 0}, cfg, rng);
  EXPECT_EQ(s.options.size(), 5u);
  EXPECT_EQ(s.num_pads(), 2u);
  EXPECT_EQ(std::count(s.options.begin(), s.options.end(), "Positive."), 1);
  EXPECT_EQ(s.options[s.label], "Positive.");
  EXPECT_EQ(s.text, "Body.");
  EXPECT_EQ(s.num_negatives(), 2u);
}

TEST(Assemble, Deterministic) {
  SamplerConfig cfg;
  Rng a(17);
  Rng b(17);
  EXPECT_EQ(assemble({"P.", "T."}, fake_negatives(6), {"p", 0}, cfg, a),
            assemble({"P.", "T."}, fake_negatives(6), {"p", 0}, cfg, b));
}

TEST(Assemble, BerrymanExampleWithHardNegative) {
  // Five option slots; the positive's article contributes one hard negative.
  OptionPool pool;
  pool.add({"berryman", 0}, "Jim Berryman (born February 17, 1947) is a ...");
  pool.add({"berryman", 1}, "On January 6, 2012, Berryman ...");
  for (int i = 0; i < 10; ++i)
    pool.add({"other" + std::to_string(i), 0}, "Unrelated sentence " + std::to_string(i) + ".");
  SamplerConfig cfg;
  cfg.n_model = 5;
  cfg.n_max_label = 5;
  cfg.hard_negatives = 1;
  const SourceId pos{"berryman", 0};
  const auto rec = rec_of({"Jim Berryman (born February 17, 1947) is a ...",
                           "He is the former mayor of Adrian ..."},
                          "berryman", 0);
  Rng rng(8);
  auto split = designated_split(rec, Objective::fsp, rng);
  auto negs = sample_negatives(pool, pos, split.option, cfg.hard_negatives, cfg, rng);
  const auto s = assemble(split, negs, pos, cfg, rng);
  EXPECT_EQ(s.options.size(), 5u);
  EXPECT_EQ(s.options[s.label], "Jim Berryman (born February 17, 1947) is a ...");
  EXPECT_NE(std::find(s.options.begin(), s.options.end(), "On January 6, 2012, Berryman ..."),
            s.options.end());
  EXPECT_EQ(s.num_hard(), 1u);
  EXPECT_EQ(s.num_pads(), 5 - s.num_negatives() - 1);
  EXPECT_EQ(s.text, "He is the former mayor of Adrian ...");
}

TEST(Assemble, LabelIsUniform) {
  SamplerConfig cfg;
  std::vector<std::size_t> hist(cfg.n_model, 0);
  for (std::uint64_t seed = 0; seed < 20000; ++seed) {
    Rng rng(seed);
    const auto j = 1 + uniform_below(rng, cfg.n_max_label - 1);
    ++hist[assemble({"P.", "T."}, fake_negatives(j), {"p", 0}, cfg, rng).label];
  }
  EXPECT_GT(testing::chi_square_uniform_p(hist), 0.01);
}

TEST(SamplerConfig, Validation) {
  SamplerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.n_max_label = 21;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.hard_negatives = 10;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.validation_fraction = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Objective, ParseRoundTrip) {
  for (auto o : {Objective::fsp, Objective::lsp, Objective::nss, Objective::rsp})
    EXPECT_EQ(parse_objective(to_string(o)), o);
  EXPECT_THROW(parse_objective("nsp"), ConfigError);
}

}  // namespace
}  // namespace sstune
