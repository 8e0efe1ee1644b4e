#pragma once

// Constrained prediction over classifier logits and accuracy reporting.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sstune/common.hpp"

namespace sstune {

struct LogitsRecord {
  std::string sample_id;
  std::vector<double> logits;
  std::optional<std::size_t> gold_label;
};

/// Argmax over logits[0, n_l). Ties go to the lowest index; NaN never wins
/// over a number.
inline std::size_t constrained_predict(std::span<const double> logits, std::size_t n_l) {
  if (n_l < 1) throw ConfigError("n_l must be >= 1");
  if (n_l > logits.size())
    throw DataError("n_l = " + std::to_string(n_l) + " exceeds logits length " +
                    std::to_string(logits.size()));
  std::size_t best = 0;
  for (std::size_t i = 1; i < n_l; ++i) {
    if (std::isnan(logits[i])) continue;
    if (std::isnan(logits[best]) || logits[i] > logits[best]) best = i;
  }
  return best;
}

struct ClassAccuracy {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy() const { return count ? static_cast<double>(correct) / count : 0.0; }
};

struct EvalReport {
  std::string task;
  std::size_t n_l = 0;
  std::size_t n_examples = 0;
  std::size_t correct = 0;
  std::vector<ClassAccuracy> per_class;

  double accuracy() const { return n_examples ? static_cast<double>(correct) / n_examples : 0.0; }

  nlohmann::json to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t c = 0; c < per_class.size(); ++c) {
      per.push_back({{"label", c},
                     {"count", per_class[c].count},
                     {"correct", per_class[c].correct},
                     {"accuracy", per_class[c].accuracy()}});
    }
    return {{"task", task},         {"n_l", n_l},
            {"n_examples", n_examples}, {"correct", correct},
            {"accuracy", accuracy()}, {"per_class_accuracy", per}};
  }

  /// Plain-text table.
  friend std::ostream& operator<<(std::ostream& os, const EvalReport& r) {
    os << "task: " << (r.task.empty() ? "-" : r.task) << "\n";
    os << "examples: " << r.n_examples << "  correct: " << r.correct << "  accuracy: "
       << std::fixed << std::setprecision(4) << r.accuracy() << "\n";
    os << std::setw(7) << "label" << std::setw(10) << "count" << std::setw(10) << "correct"
       << std::setw(11) << "accuracy" << "\n";
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
      const auto& pc = r.per_class[c];
      os << std::setw(7) << c << std::setw(10) << pc.count << std::setw(10) << pc.correct
         << std::setw(11) << pc.accuracy() << "\n";
    }
    os.unsetf(std::ios::floatfield);
    return os;
  }
};

/// Streaming accuracy accumulator. merge() is associative.
class Evaluator {
 public:
  explicit Evaluator(std::size_t n_l, std::string task = {}) {
    if (n_l < 1) throw ConfigError("n_l must be >= 1");
    report_.task = std::move(task);
    report_.n_l = n_l;
    report_.per_class.resize(n_l);
  }

  /// Returns the constrained prediction.
  std::size_t add(const LogitsRecord& rec) {
    if (!rec.gold_label)
      throw DataError("record '" + rec.sample_id + "' has no gold_label");
    const auto gold = *rec.gold_label;
    if (gold >= report_.n_l)
      throw DataError("record '" + rec.sample_id + "' has gold_label " + std::to_string(gold) +
                      " outside [0, " + std::to_string(report_.n_l) + ")");
    const auto pred = constrained_predict(rec.logits, report_.n_l);
    ++report_.n_examples;
    ++report_.per_class[gold].count;
    if (pred == gold) {
      ++report_.correct;
      ++report_.per_class[gold].correct;
    }
    return pred;
  }

  void merge(const Evaluator& other) {
    if (other.report_.n_l != report_.n_l) throw ConfigError("cannot merge evaluators with different n_l");
    report_.n_examples += other.report_.n_examples;
    report_.correct += other.report_.correct;
    for (std::size_t c = 0; c < report_.n_l; ++c) {
      report_.per_class[c].count += other.report_.per_class[c].count;
      report_.per_class[c].correct += other.report_.per_class[c].correct;
    }
  }

  /// Throws EmptyEval if nothing was added.
  const EvalReport& report() const {
    if (report_.n_examples == 0) throw EmptyEval("no records to evaluate");
    return report_;
  }

 private:
  EvalReport report_;
};

template <typename Range>
EvalReport evaluate(const Range& records, std::size_t n_l, std::string task = {}) {
  Evaluator ev(n_l, std::move(task));
  for (const auto& r : records) ev.add(r);
  return ev.report();
}

inline LogitsRecord logits_from_json(const nlohmann::json& j) {
  LogitsRecord rec;
  auto id = j.find("sample_id");
  if (id == j.end()) throw DataError("missing field 'sample_id'");
  rec.sample_id = id->is_string() ? id->get<std::string>() : id->dump();
  auto logits = j.find("logits");
  if (logits == j.end() || !logits->is_array()) throw DataError("missing or non-array field 'logits'");
  rec.logits.reserve(logits->size());
  for (const auto& v : *logits) {
    if (!v.is_number()) throw DataError("non-numeric logit in '" + rec.sample_id + "'");
    rec.logits.push_back(v.get<double>());
  }
  if (auto g = j.find("gold_label"); g != j.end() && !g->is_null()) {
    if (!g->is_number_integer() || g->get<long long>() < 0)
      throw DataError("gold_label of '" + rec.sample_id + "' is not a non-negative integer");
    rec.gold_label = g->get<std::size_t>();
  }
  return rec;
}

/// Reads a line-delimited logits file. Any malformed line is fatal.
inline std::vector<LogitsRecord> read_logits_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<LogitsRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(logits_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sstune
