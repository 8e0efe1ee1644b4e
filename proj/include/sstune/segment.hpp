#pragma once

// Sentence segmentation, paragraph filtering and exact-duplicate detection.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sstune/random.hpp"
#include "sstune/unicode.hpp"

namespace sstune {

struct ParagraphRecord {
  std::string article_id;
  std::size_t paragraph_index = 0;
  std::vector<std::string> sentences;
  std::optional<std::string> category;
};

enum class FilterReason : std::uint8_t {
  kept,
  single_sentence,
  short_first,
  non_alphabetic_first,
  duplicate,
};

inline constexpr std::array<FilterReason, 5> kAllFilterReasons = {
    FilterReason::kept, FilterReason::single_sentence, FilterReason::short_first,
    FilterReason::non_alphabetic_first, FilterReason::duplicate};

constexpr std::string_view to_string(FilterReason r) {
  switch (r) {
    case FilterReason::kept: return "kept";
    case FilterReason::single_sentence: return "single_sentence";
    case FilterReason::short_first: return "short_first";
    case FilterReason::non_alphabetic_first: return "non_alphabetic_first";
    case FilterReason::duplicate: return "duplicate";
  }
  return "unknown";
}

struct FilterVerdict {
  bool kept = false;
  FilterReason reason = FilterReason::single_sentence;

  static FilterVerdict keep() { return {true, FilterReason::kept}; }
  static FilterVerdict reject(FilterReason r) { return {false, r}; }
};

namespace detail {

inline constexpr std::array<std::string_view, 15> kAbbreviations = {
    "Mr.", "Mrs.", "Dr.", "Prof.", "St.", "vs.", "etc.", "e.g.",
    "i.e.", "U.S.", "Jr.", "Sr.", "No.", "Fig.", "al."};

inline bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Byte length of a closing quote or bracket starting at s[i], or 0.
inline std::size_t closer_length(std::string_view s, std::size_t i) {
  switch (s[i]) {
    case '"': case '\'': case ')': case ']': case '}': return 1;
    default: break;
  }
  auto rest = s.substr(i);
  if (rest.starts_with("”") || rest.starts_with("’")) return 3;
  if (rest.starts_with("»")) return 2;
  return 0;
}

inline std::string_view strip_openers(std::string_view tok) {
  for (;;) {
    if (!tok.empty() && (tok.front() == '(' || tok.front() == '[' || tok.front() == '"' ||
                         tok.front() == '\'')) {
      tok.remove_prefix(1);
    } else if (tok.starts_with("“") || tok.starts_with("‘")) {
      tok.remove_prefix(3);
    } else {
      return tok;
    }
  }
}

// True when the period ending at `dot` belongs to an abbreviation or a
// single-letter initial rather than ending a sentence.
inline bool is_non_terminal_period(std::string_view text, std::size_t dot) {
  const std::size_t space = text.rfind(' ', dot);
  const std::size_t begin = space == std::string_view::npos ? 0 : space + 1;
  const auto token = strip_openers(text.substr(begin, dot + 1 - begin));
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end())
    return true;
  return token.size() == 2 && token[0] >= 'A' && token[0] <= 'Z';
}

}  // namespace detail

/// Splits whitespace-normalized text into sentences. A boundary is a run of
/// `.`, `!` or `?`, optionally followed by closing quotes or brackets, then
/// a space or the end of text. A lone period after an abbreviation from a
/// fixed list, or after a single capital initial, is not a boundary, and
/// neither is a closing quote or bracket followed by a lowercase word.
/// Trailing unterminated text forms a final sentence.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    auto piece = unicode::trim(text.substr(b, e - b));
    if (!piece.empty()) out.emplace_back(piece);
  };
  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!detail::is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && detail::is_terminator(text[j])) ++j;
    const bool lone_period = j == i + 1 && text[i] == '.';
    std::size_t k = j;
    while (k < n) {
      const auto len = detail::closer_length(text, k);
      if (len == 0) break;
      k += len;
    }
    if (k == n || unicode::is_ascii_space(text[k])) {
      // "Stop!" she said. A closing quote followed by a lowercase word
      // continues the sentence.
      // Same for an ellipsis: "Wait... what?"
      const bool lower_next = k + 1 < n && text[k + 1] >= 'a' && text[k + 1] <= 'z';
      const bool ellipsis = j - i >= 3 && text.substr(i, j - i).find_first_not_of('.') ==
                                              std::string_view::npos;
      const bool suppressed = (lower_next && (k > j || ellipsis)) ||
                              (lone_period && k == j && detail::is_non_terminal_period(text, i));
      if (!suppressed) {
        emit(start, k);
        start = k;
      }
    }
    i = k;
  }
  emit(start, n);
  return out;
}

/// Builds a ParagraphRecord from raw paragraph text.
inline ParagraphRecord segment_paragraph(std::string article_id, std::size_t paragraph_index,
                                         std::string_view raw,
                                         std::optional<std::string> category = std::nullopt) {
  ParagraphRecord rec;
  rec.article_id = std::move(article_id);
  rec.paragraph_index = paragraph_index;
  rec.sentences = split_sentences(unicode::collapse_whitespace(raw));
  rec.category = std::move(category);
  return rec;
}

inline std::string join_sentences(const std::vector<std::string>& sentences, std::size_t first = 0,
                                  std::size_t last = std::string::npos) {
  last = std::min(last, sentences.size());
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

/// Stable 64-bit key of the NFC-normalized, lowercased, whitespace-collapsed
/// text.
inline std::uint64_t dedup_key(std::string_view text) {
  return fnv1a64(unicode::normalize_for_dedup(text));
}

/// Set of dedup keys with a thread-safe insert-if-absent.
class DedupIndex {
 public:
  /// Returns true if the key was absent and is now registered.
  bool insert(std::uint64_t key) {
    auto& shard = shards_[key % kShards];
    std::lock_guard lock(shard.mu);
    return shard.keys.insert(key).second;
  }

  bool contains(std::uint64_t key) const {
    const auto& shard = shards_[key % kShards];
    std::lock_guard lock(shard.mu);
    return shard.keys.contains(key);
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : shards_) {
      std::lock_guard lock(s.mu);
      n += s.keys.size();
    }
    return n;
  }

 private:
  static constexpr std::size_t kShards = 16;
  struct Shard {
    mutable std::mutex mu;
    std::unordered_set<std::uint64_t> keys;
  };
  std::array<Shard, kShards> shards_;
};

/// Checks that do not depend on other paragraphs, in rejection order.
inline std::optional<FilterReason> intrinsic_rejection(const ParagraphRecord& rec) {
  if (rec.sentences.size() < 2) return FilterReason::single_sentence;
  const auto first = unicode::trim(rec.sentences.front());
  if (unicode::scalar_count(first) <= 3) return FilterReason::short_first;
  if (!unicode::has_alphabetic(first)) return FilterReason::non_alphabetic_first;
  return std::nullopt;
}

/// Returns the first matching rejection reason, in the order single
/// sentence, short first sentence (<= 3 characters), non-alphabetic first
/// sentence, duplicate. Kept paragraphs are registered in `dedup`.
inline FilterVerdict filter_paragraph(const ParagraphRecord& rec, DedupIndex& dedup) {
  if (auto reason = intrinsic_rejection(rec)) return FilterVerdict::reject(*reason);
  if (!dedup.insert(dedup_key(join_sentences(rec.sentences))))
    return FilterVerdict::reject(FilterReason::duplicate);
  return FilterVerdict::keep();
}

/// Rejection counts per reason.
struct FilterReport {
  std::array<std::size_t, kAllFilterReasons.size()> counts{};

  void add(FilterReason r) { ++counts[static_cast<std::size_t>(r)]; }
  std::size_t count(FilterReason r) const { return counts[static_cast<std::size_t>(r)]; }
  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }

  /// One "<reason> <count>" line per reason.
  friend std::ostream& operator<<(std::ostream& os, const FilterReport& r) {
    for (auto reason : kAllFilterReasons) os << to_string(reason) << ' ' << r.count(reason) << '\n';
    return os;
  }
};

}  // namespace sstune
