#pragma once

// Self-supervised sample construction: choose the positive option and text
// of a paragraph, draw negatives (some from the same article), pad the
// option list to a fixed width, shuffle, and record the label.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sstune/common.hpp"
#include "sstune/random.hpp"
#include "sstune/segment.hpp"

namespace sstune {

/// Literal stored in sample records for a padding option.
inline constexpr std::string_view kPadOption = "[PAD]";

enum class Objective : std::uint8_t {
  fsp,  // first sentence prediction
  lsp,  // last sentence prediction
  nss,  // next sentence selection
  rsp,  // random sentence prediction
};

constexpr std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::fsp: return "fsp";
    case Objective::lsp: return "lsp";
    case Objective::nss: return "nss";
    case Objective::rsp: return "rsp";
  }
  return "unknown";
}

inline Objective parse_objective(std::string_view s) {
  for (auto o : {Objective::fsp, Objective::lsp, Objective::nss, Objective::rsp})
    if (to_string(o) == s) return o;
  throw ConfigError("unknown objective '" + std::string(s) + "' (expected fsp|lsp|nss|rsp)");
}

struct SamplerConfig {
  std::size_t n_model = 20;
  std::size_t n_max_label = 10;
  // Hard-negative budget per sample, by corpus kind.
  std::size_t hard_negatives = 1;
  std::size_t hard_negatives_flat = 0;
  std::uint64_t seed = 0;
  Objective objective = Objective::fsp;
  // Share of articles routed to the validation split.
  double validation_fraction = 0.0;

  void validate() const {
    if (n_model < 2) throw ConfigError("n_model must be >= 2");
    if (n_max_label < 2) throw ConfigError("n_max_label must be >= 2");
    if (n_max_label > n_model) throw ConfigError("n_max_label must not exceed n_model");
    if (hard_negatives > n_max_label - 1 || hard_negatives_flat > n_max_label - 1)
      throw ConfigError("hard_negatives must not exceed n_max_label - 1");
    if (!(validation_fraction >= 0.0 && validation_fraction <= 1.0))
      throw ConfigError("validation_fraction must lie in [0, 1]");
  }
};

struct FspSample {
  std::vector<std::string> options;
  std::size_t label = 0;
  std::string text;
  Objective objective = Objective::fsp;
  SourceId positive_source;
  std::vector<SourceId> negative_sources;
  std::vector<bool> is_hard;

  /// J: the number of real negative options.
  std::size_t num_negatives() const { return negative_sources.size(); }
  std::size_t num_pads() const {
    return static_cast<std::size_t>(std::count(options.begin(), options.end(), kPadOption));
  }
  std::size_t num_hard() const {
    return static_cast<std::size_t>(std::count(is_hard.begin(), is_hard.end(), true));
  }

  friend bool operator==(const FspSample&, const FspSample&) = default;
};

struct DesignatedSplit {
  std::string option;
  std::string text;

  friend bool operator==(const DesignatedSplit&, const DesignatedSplit&) = default;
};

/// Number of distinct splits an objective admits for a paragraph of k
/// sentences: one for FSP and LSP, k - 1 pairs for NSS, k for RSP.
constexpr std::size_t split_choices(Objective objective, std::size_t k) {
  switch (objective) {
    case Objective::nss: return k - 1;
    case Objective::rsp: return k;
    default: return 1;
  }
}

/// The split for a given choice index in [0, split_choices()).
inline DesignatedSplit designated_split_at(const ParagraphRecord& rec, Objective objective,
                                           std::size_t choice) {
  const auto& s = rec.sentences;
  const std::size_t k = s.size();
  if (k < 2)
    throw DataError("paragraph " + rec.article_id + "#" + std::to_string(rec.paragraph_index) +
                    " has fewer than 2 sentences");
  if (choice >= split_choices(objective, k)) throw ConfigError("split choice out of range");
  switch (objective) {
    case Objective::fsp:
      return {s.front(), join_sentences(s, 1)};
    case Objective::lsp:
      return {s.back(), join_sentences(s, 0, k - 1)};
    case Objective::nss:
      return {s[choice + 1], s[choice]};
    case Objective::rsp: {
      std::string rest = join_sentences(s, 0, choice);
      const std::string tail = join_sentences(s, choice + 1);
      if (!rest.empty() && !tail.empty()) rest.push_back(' ');
      rest += tail;
      return {s[choice], std::move(rest)};
    }
  }
  throw ConfigError("unknown objective");
}

/// Positive option and text for the objective. NSS draws the sentence pair
/// and RSP the sentence uniformly; FSP and LSP consume no randomness.
inline DesignatedSplit designated_split(const ParagraphRecord& rec, Objective objective,
                                        Rng& rng) {
  const std::size_t n = split_choices(objective, rec.sentences.size());
  const std::size_t choice =
      n > 1 ? static_cast<std::size_t>(uniform_below(rng, n)) : 0;
  return designated_split_at(rec, objective, choice);
}

/// Candidate negative options: the designated sentence of every kept
/// paragraph, globally and grouped by article.
class OptionPool {
 public:
  struct Entry {
    SourceId source;
    std::string sentence;
  };

  void add(SourceId source, std::string sentence) {
    by_article_[source.article_id].push_back(entries_.size());
    entries_.push_back({std::move(source), std::move(sentence)});
  }

  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  std::span<const Entry> entries() const { return entries_; }

  std::span<const std::size_t> article_entries(const std::string& article_id) const {
    auto it = by_article_.find(article_id);
    if (it == by_article_.end()) return {};
    return it->second;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_article_;
};

struct Negative {
  std::string sentence;
  SourceId source;
  bool is_hard = false;
};

/// Draws J ~ uniform{1, ..., n_max_label - 1} negatives. Up to
/// min(hard_budget, available, J) come from the positive's own article; the
/// rest are drawn from the other articles. All picks are without
/// replacement, and no picked sentence repeats the positive or another pick.
/// Throws InsufficientPool if the other articles cannot cover the rest.
inline std::vector<Negative> sample_negatives(const OptionPool& pool,
                                              const SourceId& positive_source,
                                              std::string_view positive_option,
                                              std::size_t hard_budget,
                                              const SamplerConfig& cfg, Rng& rng) {
  const auto j = static_cast<std::size_t>(uniform_between(rng, 1, cfg.n_max_label - 1));

  std::vector<Negative> out;
  out.reserve(j);
  std::unordered_set<std::string_view> used{positive_option};

  // Same-article candidates with distinct sentences, in pool order.
  const auto siblings = pool.article_entries(positive_source.article_id);
  std::vector<std::size_t> hard;
  {
    std::unordered_set<std::string_view> seen{positive_option};
    for (auto idx : siblings) {
      const auto& e = pool.entry(idx);
      if (e.source == positive_source) continue;
      if (seen.insert(e.sentence).second) hard.push_back(idx);
    }
  }
  const std::size_t n_hard = std::min({hard_budget, hard.size(), j});
  for (std::size_t t = 0; t < n_hard; ++t) {
    const auto pick = t + static_cast<std::size_t>(uniform_below(rng, hard.size() - t));
    std::swap(hard[t], hard[pick]);
    const auto& e = pool.entry(hard[t]);
    used.insert(e.sentence);
    out.push_back({e.sentence, e.source, true});
  }

  const std::size_t remaining = j - n_hard;
  if (remaining == 0) return out;
  const std::size_t eligible = pool.size() - siblings.size();
  auto insufficient = [&] {
    return InsufficientPool("need " + std::to_string(remaining) +
                            " random negatives for " + positive_source.article_id +
                            " but only " + std::to_string(eligible) +
                            " candidates lie outside the article");
  };
  if (eligible < remaining) throw insufficient();

  // Rejection sampling over the global pool; falls back to an explicit
  // candidate list when rejections dominate.
  std::unordered_set<std::size_t> picked;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 64 * remaining + 256;
  while (out.size() < j && attempts < max_attempts) {
    ++attempts;
    const auto idx = static_cast<std::size_t>(uniform_below(rng, pool.size()));
    const auto& e = pool.entry(idx);
    if (e.source.article_id == positive_source.article_id) continue;
    if (picked.contains(idx) || used.contains(e.sentence)) continue;
    picked.insert(idx);
    used.insert(e.sentence);
    out.push_back({e.sentence, e.source, false});
  }
  if (out.size() < j) {
    std::vector<std::size_t> rest;
    for (std::size_t idx = 0; idx < pool.size(); ++idx) {
      const auto& e = pool.entry(idx);
      if (e.source.article_id == positive_source.article_id || used.contains(e.sentence))
        continue;
      rest.push_back(idx);
    }
    for (std::size_t t = 0; out.size() < j; ++t) {
      // Skip later duplicates of an already-picked sentence.
      while (t < rest.size()) {
        const auto pick = t + static_cast<std::size_t>(uniform_below(rng, rest.size() - t));
        std::swap(rest[t], rest[pick]);
        if (!used.contains(pool.entry(rest[t]).sentence)) break;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(t));
      }
      if (t >= rest.size()) throw insufficient();
      const auto& e = pool.entry(rest[t]);
      used.insert(e.sentence);
      out.push_back({e.sentence, e.source, false});
    }
  }
  return out;
}

/// Positive first, then negatives, then n_model - J - 1 pads; shuffled with
/// Fisher-Yates; the label is the positive's position after the shuffle.
inline FspSample assemble(DesignatedSplit split, std::vector<Negative> negatives,
                          SourceId positive_source, const SamplerConfig& cfg, Rng& rng) {
  const std::size_t j = negatives.size();
  if (j + 1 > cfg.n_model) throw ConfigError("more options than n_model slots");

  std::vector<std::string> ordered;
  ordered.reserve(cfg.n_model);
  ordered.push_back(std::move(split.option));
  for (auto& n : negatives) ordered.push_back(n.sentence);
  ordered.resize(cfg.n_model, std::string(kPadOption));

  std::vector<std::size_t> perm(cfg.n_model);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle_in_place(std::span<std::size_t>(perm), rng);

  FspSample s;
  s.options.resize(cfg.n_model);
  for (std::size_t slot = 0; slot < cfg.n_model; ++slot) {
    s.options[slot] = std::move(ordered[perm[slot]]);
    if (perm[slot] == 0) s.label = slot;
  }
  s.text = std::move(split.text);
  s.objective = cfg.objective;
  s.positive_source = std::move(positive_source);
  s.negative_sources.reserve(j);
  s.is_hard.reserve(j);
  for (auto& n : negatives) {
    s.negative_sources.push_back(std::move(n.source));
    s.is_hard.push_back(n.is_hard);
  }
  return s;
}

}  // namespace sstune
