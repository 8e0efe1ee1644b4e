#pragma once

// Zero-shot task files:
//
//   {"class_names": [...], "template": "This text is about []."}
//   {"class_names": [...], "verbalizers": [...], "scheme": "alphabet"}
//
// "scheme" is optional and may be a kind name or
// {"kind": "custom", "symbols": ["B", "A", ...]}.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sstune/common.hpp"
#include "sstune/format.hpp"

namespace sstune {

struct TaskFile {
  TaskSpec spec;
  std::optional<IndicatorScheme> scheme;
};

inline IndicatorScheme scheme_from_json(const nlohmann::json& j) {
  if (j.is_string()) return {parse_scheme_kind(j.get<std::string>()), {}};
  if (!j.is_object()) throw ConfigError("'scheme' must be a string or an object");
  IndicatorScheme s;
  s.kind = parse_scheme_kind(j.value("kind", "alphabet"));
  if (auto it = j.find("symbols"); it != j.end())
    s.custom_symbols = it->get<std::vector<std::string>>();
  if (s.kind == IndicatorScheme::Kind::custom && s.custom_symbols.empty())
    throw ConfigError("custom scheme needs 'symbols'");
  return s;
}

inline TaskFile task_from_json(const nlohmann::json& j, std::size_t n_model) {
  if (!j.is_object()) throw ConfigError("task file must hold a JSON object");
  TaskFile t;
  t.spec.n_model = n_model;
  try {
    if (auto it = j.find("verbalizers"); it != j.end())
      t.spec.verbalizers = it->get<std::vector<std::string>>();
    if (auto it = j.find("template"); it != j.end())
      t.spec.template_text = it->get<std::string>();
    if (auto it = j.find("class_names"); it != j.end()) {
      t.spec.class_names = it->get<std::vector<std::string>>();
    } else if (t.spec.verbalizers) {
      t.spec.class_names = *t.spec.verbalizers;
    } else {
      throw ConfigError("task file needs 'class_names'");
    }
    if (auto it = j.find("scheme"); it != j.end()) t.scheme = scheme_from_json(*it);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("task file: ") + e.what());
  }
  t.spec.validate();
  return t;
}

inline TaskFile read_task_file(const std::filesystem::path& path, std::size_t n_model) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open task file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("task file " + path.string() + ": " + e.what());
  }
  return task_from_json(j, n_model);
}

}  // namespace sstune
