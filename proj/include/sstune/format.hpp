#pragma once

// Renders option lists and text into a single classifier input:
//
//   [CLS] (A) option0 (B) option1 ... (T) option19 [SEP] text [SEP]
//
// and builds zero-shot task inputs from class names and verbalizers.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sstune/common.hpp"
#include "sstune/sampler.hpp"

namespace sstune {

struct IndicatorScheme {
  enum class Kind { alphabet, numeric, constant, custom };

  Kind kind = Kind::alphabet;
  std::vector<std::string> custom_symbols;

  static IndicatorScheme alphabet() { return {Kind::alphabet, {}}; }
  static IndicatorScheme numeric() { return {Kind::numeric, {}}; }
  static IndicatorScheme constant() { return {Kind::constant, {}}; }
  static IndicatorScheme custom(std::vector<std::string> symbols) {
    return {Kind::custom, std::move(symbols)};
  }

  /// The first n indicator symbols. Throws ConfigError when the scheme has
  /// fewer than n symbols (alphabet stops at Z).
  std::vector<std::string> symbols(std::size_t n) const {
    std::vector<std::string> out;
    out.reserve(n);
    switch (kind) {
      case Kind::alphabet:
        if (n > 26) throw ConfigError("alphabet indicators exhausted beyond 26 options");
        for (std::size_t i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('A' + i));
        break;
      case Kind::numeric:
        for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
        break;
      case Kind::constant:
        out.assign(n, "0");
        break;
      case Kind::custom:
        if (custom_symbols.size() < n)
          throw ConfigError("custom indicators: need " + std::to_string(n) + " symbols, got " +
                            std::to_string(custom_symbols.size()));
        out.assign(custom_symbols.begin(), custom_symbols.begin() + static_cast<std::ptrdiff_t>(n));
        break;
    }
    return out;
  }
};

constexpr std::string_view to_string(IndicatorScheme::Kind k) {
  switch (k) {
    case IndicatorScheme::Kind::alphabet: return "alphabet";
    case IndicatorScheme::Kind::numeric: return "numeric";
    case IndicatorScheme::Kind::constant: return "constant";
    case IndicatorScheme::Kind::custom: return "custom";
  }
  return "unknown";
}

inline IndicatorScheme::Kind parse_scheme_kind(std::string_view s) {
  using K = IndicatorScheme::Kind;
  for (auto k : {K::alphabet, K::numeric, K::constant, K::custom})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown indicator scheme '" + std::string(s) +
                    "' (expected alphabet|numeric|constant|custom)");
}

struct MarkerSet {
  std::string cls = "[CLS]";
  std::string sep = "[SEP]";
  std::string pad = "[PAD]";

  void validate() const {
    if (cls.empty() || sep.empty() || pad.empty()) throw ConfigError("markers must be non-empty");
    if (cls == sep || cls == pad || sep == pad) throw ConfigError("markers must be distinct");
  }
};

/// A zero-shot task: ordered class names plus either a template with one
/// "[]" placeholder or an explicit verbalizer per class.
struct TaskSpec {
  std::vector<std::string> class_names;
  std::optional<std::string> template_text;
  std::optional<std::vector<std::string>> verbalizers;
  std::size_t n_model = 20;

  std::size_t num_labels() const { return class_names.size(); }

  void validate() const {
    const auto n_l = num_labels();
    if (n_l < 2) throw ConfigError("task needs at least 2 classes");
    if (n_l > n_model)
      throw ConfigError("task has " + std::to_string(n_l) + " classes but n_model is " +
                        std::to_string(n_model));
    if (verbalizers && verbalizers->size() != n_l)
      throw ConfigError("verbalizer list length must equal the number of classes");
    if (!verbalizers && !template_text) throw ConfigError("task needs a template or verbalizers");
  }
};

inline constexpr std::string_view kPlaceholder = "[]";

/// Option text for each class, in class order. An explicit verbalizer list
/// wins over the template.
inline std::vector<std::string> verbalize(const TaskSpec& spec) {
  if (spec.verbalizers) {
    if (spec.verbalizers->size() != spec.num_labels())
      throw ConfigError("verbalizer list length must equal the number of classes");
    return *spec.verbalizers;
  }
  if (!spec.template_text) throw ConfigError("task needs a template or verbalizers");
  const std::string& tmpl = *spec.template_text;
  const auto at = tmpl.find(kPlaceholder);
  if (at == std::string::npos || tmpl.find(kPlaceholder, at + kPlaceholder.size()) != std::string::npos)
    throw ConfigError("template must contain exactly one '[]' placeholder: \"" + tmpl + "\"");
  std::vector<std::string> out;
  out.reserve(spec.num_labels());
  for (const auto& name : spec.class_names) {
    std::string s = tmpl;
    s.replace(at, kPlaceholder.size(), name);
    out.push_back(std::move(s));
  }
  return out;
}

/// "(A) opt0 (B) opt1 ...". Options equal to the stored pad literal render
/// as markers.pad.
inline std::string render_options(std::span<const std::string> options,
                                  const IndicatorScheme& scheme, const MarkerSet& markers) {
  const auto symbols = scheme.symbols(options.size());
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out.push_back('(');
    out += symbols[i];
    out += ") ";
    out += options[i] == kPadOption ? std::string_view(markers.pad) : std::string_view(options[i]);
  }
  return out;
}

inline std::string render_input(std::span<const std::string> options, std::string_view text,
                                const IndicatorScheme& scheme, const MarkerSet& markers) {
  std::string out = markers.cls;
  out.push_back(' ');
  out += render_options(options, scheme, markers);
  out.push_back(' ');
  out += markers.sep;
  out.push_back(' ');
  out += text;
  out.push_back(' ');
  out += markers.sep;
  return out;
}

inline std::string render_tuning(const FspSample& sample, const IndicatorScheme& scheme,
                                 const MarkerSet& markers = {}) {
  return render_input(sample.options, sample.text, scheme, markers);
}

/// Verbalizers in class order at slots 0..N_L-1, pads after. No shuffling.
inline std::vector<std::string> inference_options(const TaskSpec& spec) {
  if (spec.num_labels() > spec.n_model)
    throw ConfigError("task has more classes than n_model slots");
  auto options = verbalize(spec);
  options.resize(spec.n_model, std::string(kPadOption));
  return options;
}

inline std::string render_inference(std::string_view text, const TaskSpec& spec,
                                    const IndicatorScheme& scheme, const MarkerSet& markers = {}) {
  return render_input(inference_options(spec), text, scheme, markers);
}

struct ParsedInput {
  std::vector<std::string> options;
  std::string text;
};

/// Inverse of render_input for inputs whose option texts contain no marker
/// or indicator substrings. Pad markers come back as the stored pad literal.
inline std::optional<ParsedInput> parse_rendered(std::string_view input, std::size_t n_model,
                                                 const IndicatorScheme& scheme,
                                                 const MarkerSet& markers = {}) {
  const auto symbols = scheme.symbols(n_model);
  auto eat = [&](std::string_view prefix) {
    if (!input.starts_with(prefix)) return false;
    input.remove_prefix(prefix.size());
    return true;
  };
  if (!eat(markers.cls) || !eat(" ")) return std::nullopt;
  const std::string sep_mid = " " + markers.sep + " ";
  const std::string sep_end = " " + markers.sep;
  ParsedInput out;
  for (std::size_t i = 0; i < n_model; ++i) {
    if (!eat("(" + symbols[i] + ") ")) return std::nullopt;
    const std::string next =
        i + 1 < n_model ? " (" + symbols[i + 1] + ") " : sep_mid;
    const auto end = input.find(next);
    if (end == std::string_view::npos) return std::nullopt;
    std::string option(input.substr(0, end));
    if (option == markers.pad) option = std::string(kPadOption);
    out.options.push_back(std::move(option));
    input.remove_prefix(end + 1);
  }
  if (!eat(markers.sep) || !eat(" ")) return std::nullopt;
  if (!input.ends_with(sep_end)) return std::nullopt;
  out.text = std::string(input.substr(0, input.size() - sep_end.size()));
  return out;
}

}  // namespace sstune
