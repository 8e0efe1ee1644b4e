#pragma once

// Corpus readers. Both corpus kinds are line-delimited JSON:
//
//   article corpus:  {"id": "...", "title": "...", "paragraphs": ["...", ...]}
//   flat corpus:     {"category": "...", "text": "..."}
//
// Malformed lines are reported as RecordError and skipped; an unreadable
// file throws DataError.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sstune/common.hpp"
#include "sstune/random.hpp"

namespace sstune {

enum class CorpusSource { article_corpus, flat_corpus };

struct Article {
  std::string article_id;
  CorpusSource source = CorpusSource::article_corpus;
  std::optional<std::string> category;
  std::vector<std::string> paragraphs;
};

struct IngestConfig {
  std::size_t max_paragraphs_per_article = 5;
  std::size_t max_samples_per_category = 500000;
  // Articles drawn from each corpus by interleave(); unset means "all".
  std::optional<std::size_t> per_corpus_quota;

  void validate() const {
    if (max_paragraphs_per_article < 1)
      throw ConfigError("max_paragraphs_per_article must be >= 1");
    if (max_samples_per_category < 1)
      throw ConfigError("max_samples_per_category must be >= 1");
    if (per_corpus_quota && *per_corpus_quota < 1)
      throw ConfigError("per_corpus_quota must be >= 1");
  }
};

namespace detail {

class JsonLineReader {
 public:
  explicit JsonLineReader(std::filesystem::path path) : path_(std::move(path)), in_(path_) {
    if (!in_) throw DataError("cannot open " + path_.string());
  }

  /// Next parsed object, or nullopt at end of file. Parse failures are
  /// appended to errors and skipped. Blank lines are ignored.
  std::optional<nlohmann::json> next(std::vector<RecordError>& errors) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto j = nlohmann::json::parse(line);
        if (!j.is_object()) {
          errors.push_back({path_.string(), line_no_, "record is not a JSON object"});
          continue;
        }
        return j;
      } catch (const nlohmann::json::parse_error& e) {
        errors.push_back({path_.string(), line_no_, e.what()});
      }
    }
    if (in_.bad()) throw DataError("read failure in " + path_.string());
    return std::nullopt;
  }

  std::size_t line() const { return line_no_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

inline std::optional<std::string> string_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace detail

/// Streams Articles from an article corpus, keeping the first
/// max_paragraphs_per_article paragraphs of each.
class ArticleCorpusReader {
 public:
  ArticleCorpusReader(std::filesystem::path path, IngestConfig cfg)
      : reader_(std::move(path)), cfg_(std::move(cfg)) {}

  std::optional<Article> next() {
    while (auto j = reader_.next(errors_)) {
      ++records_;
      auto id = detail::string_field(*j, "id");
      if (!id || id->empty()) {
        fail("missing or non-string field 'id'");
        continue;
      }
      auto it = j->find("paragraphs");
      if (it == j->end() || !it->is_array()) {
        fail("missing or non-array field 'paragraphs'");
        continue;
      }
      if (it->empty()) {
        fail("empty paragraph list");
        continue;
      }
      Article a;
      a.article_id = std::move(*id);
      a.source = CorpusSource::article_corpus;
      bool ok = true;
      for (const auto& p : *it) {
        if (!p.is_string()) {
          ok = false;
          break;
        }
        if (a.paragraphs.size() < cfg_.max_paragraphs_per_article)
          a.paragraphs.push_back(p.get<std::string>());
      }
      if (!ok) {
        fail("non-string paragraph");
        continue;
      }
      return a;
    }
    return std::nullopt;
  }

  const std::vector<RecordError>& errors() const { return errors_; }
  /// Non-blank lines seen so far, including malformed ones.
  std::size_t records_seen() const { return records_ + parse_failures(); }

 private:
  void fail(std::string msg) {
    errors_.push_back({reader_.path().string(), reader_.line(), std::move(msg)});
    ++field_failures_;
  }
  std::size_t parse_failures() const { return errors_.size() - field_failures_; }

  detail::JsonLineReader reader_;
  IngestConfig cfg_;
  std::vector<RecordError> errors_;
  std::size_t records_ = 0;
  std::size_t field_failures_ = 0;
};

/// Streams one single-paragraph Article per record of a flat corpus.
/// Records past max_samples_per_category for their category are dropped in
/// stream order. Article ids are "<file name>:<line>".
class FlatCorpusReader {
 public:
  FlatCorpusReader(std::filesystem::path path, IngestConfig cfg)
      : reader_(std::move(path)), cfg_(std::move(cfg)) {}

  std::optional<Article> next() {
    while (auto j = reader_.next(errors_)) {
      ++records_;
      auto category = detail::string_field(*j, "category");
      if (!category) {
        fail("missing or non-string field 'category'");
        continue;
      }
      auto text = detail::string_field(*j, "text");
      if (!text) {
        fail("missing or non-string field 'text'");
        continue;
      }
      auto& seen = per_category_[*category];
      if (seen >= cfg_.max_samples_per_category) {
        ++dropped_;
        continue;
      }
      ++seen;
      Article a;
      a.article_id =
          reader_.path().filename().string() + ":" + std::to_string(reader_.line());
      a.source = CorpusSource::flat_corpus;
      a.category = std::move(*category);
      a.paragraphs.push_back(std::move(*text));
      return a;
    }
    return std::nullopt;
  }

  const std::vector<RecordError>& errors() const { return errors_; }
  std::size_t records_seen() const { return records_ + parse_failures(); }
  /// Records dropped by the per-category cap.
  std::size_t dropped_by_cap() const { return dropped_; }

 private:
  void fail(std::string msg) {
    errors_.push_back({reader_.path().string(), reader_.line(), std::move(msg)});
    ++field_failures_;
  }
  std::size_t parse_failures() const { return errors_.size() - field_failures_; }

  detail::JsonLineReader reader_;
  IngestConfig cfg_;
  std::vector<RecordError> errors_;
  std::unordered_map<std::string, std::size_t> per_category_;
  std::size_t records_ = 0;
  std::size_t field_failures_ = 0;
  std::size_t dropped_ = 0;
};

template <typename Reader>
std::vector<Article> drain(Reader& reader) {
  std::vector<Article> out;
  while (auto a = reader.next()) out.push_back(std::move(*a));
  return out;
}

inline std::vector<Article> read_article_corpus(const std::filesystem::path& path,
                                                const IngestConfig& cfg,
                                                std::vector<RecordError>* errors = nullptr) {
  ArticleCorpusReader reader(path, cfg);
  auto out = drain(reader);
  if (errors) errors->insert(errors->end(), reader.errors().begin(), reader.errors().end());
  return out;
}

inline std::vector<Article> read_flat_corpus(const std::filesystem::path& path,
                                             const IngestConfig& cfg,
                                             std::vector<RecordError>* errors = nullptr) {
  FlatCorpusReader reader(path, cfg);
  auto out = drain(reader);
  if (errors) errors->insert(errors->end(), reader.errors().begin(), reader.errors().end());
  return out;
}

struct QuotaShortfall {
  std::size_t corpus = 0;
  std::size_t requested = 0;
  std::size_t available = 0;
};

struct InterleaveResult {
  std::vector<Article> articles;
  std::vector<QuotaShortfall> shortfalls;
};

/// Draws quotas[i] articles from corpora[i] (uniform reservoir sample when
/// the corpus is larger) and emits the union in a seeded shuffled order.
/// A corpus smaller than its quota contributes everything and is reported
/// as a shortfall. Pure in (corpora, quotas, seed).
inline InterleaveResult interleave(std::vector<std::vector<Article>> corpora,
                                   const std::vector<std::size_t>& quotas,
                                   std::uint64_t seed) {
  if (corpora.size() != quotas.size())
    throw ConfigError("interleave: need exactly one quota per corpus");
  InterleaveResult result;
  for (std::size_t c = 0; c < corpora.size(); ++c) {
    if (quotas[c] < 1) throw ConfigError("interleave: quotas must be positive");
    auto& stream = corpora[c];
    const std::size_t quota = quotas[c];
    if (stream.size() < quota) {
      result.shortfalls.push_back({c, quota, stream.size()});
      for (auto& a : stream) result.articles.push_back(std::move(a));
      continue;
    }
    // Algorithm R over the stream, one generator per corpus.
    Rng rng(hash_combine(mix64(seed), c));
    std::vector<std::size_t> reservoir(quota);
    for (std::size_t i = 0; i < quota; ++i) reservoir[i] = i;
    for (std::size_t i = quota; i < stream.size(); ++i) {
      const auto j = uniform_below(rng, i + 1);
      if (j < quota) reservoir[j] = i;
    }
    std::sort(reservoir.begin(), reservoir.end());
    for (auto idx : reservoir) result.articles.push_back(std::move(stream[idx]));
  }
  Rng order(hash_combine(mix64(seed), 0x5eedULL));
  shuffle_in_place(std::span<Article>(result.articles), order);
  return result;
}

}  // namespace sstune
