#pragma once

// Line-delimited sample shards named "{split}-{index:05}.jsonl".

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sstune/common.hpp"
#include "sstune/sampler.hpp"

namespace sstune {

inline std::string dump_line(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline nlohmann::json source_to_json(const SourceId& s) {
  return {{"article_id", s.article_id}, {"paragraph_index", s.paragraph_index}};
}

inline SourceId source_from_json(const nlohmann::json& j) {
  return {j.at("article_id").get<std::string>(), j.at("paragraph_index").get<std::size_t>()};
}

inline nlohmann::json sample_to_json(const FspSample& s) {
  nlohmann::json negatives = nlohmann::json::array();
  for (const auto& n : s.negative_sources) negatives.push_back(source_to_json(n));
  nlohmann::json hard = nlohmann::json::array();
  for (bool h : s.is_hard) hard.push_back(h);
  return {{"options", s.options},
          {"label", s.label},
          {"text", s.text},
          {"meta",
           {{"objective", to_string(s.objective)},
            {"positive_source", source_to_json(s.positive_source)},
            {"negative_sources", negatives},
            {"is_hard", hard},
            {"num_negatives", s.num_negatives()}}}};
}

inline FspSample sample_from_json(const nlohmann::json& j) {
  FspSample s;
  s.options = j.at("options").get<std::vector<std::string>>();
  s.label = j.at("label").get<std::size_t>();
  s.text = j.at("text").get<std::string>();
  if (auto meta = j.find("meta"); meta != j.end()) {
    s.objective = parse_objective(meta->value("objective", "fsp"));
    if (meta->contains("positive_source"))
      s.positive_source = source_from_json(meta->at("positive_source"));
    for (const auto& n : meta->value("negative_sources", nlohmann::json::array()))
      s.negative_sources.push_back(source_from_json(n));
    for (const auto& h : meta->value("is_hard", nlohmann::json::array()))
      s.is_hard.push_back(h.get<bool>());
  }
  return s;
}

inline std::string shard_name(const std::string& split, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", index);
  return split + "-" + buf + ".jsonl";
}

/// Writes records, starting a new shard every shard_size lines. No file is
/// created for a split with no records.
class ShardWriter {
 public:
  ShardWriter(std::filesystem::path dir, std::string split, std::size_t shard_size)
      : dir_(std::move(dir)), split_(std::move(split)), shard_size_(shard_size) {
    if (shard_size_ < 1) throw ConfigError("shard_size must be >= 1");
  }

  void write(const nlohmann::json& record) {
    if (!out_.is_open() || in_shard_ == shard_size_) open_next();
    out_ << dump_line(record) << '\n';
    ++in_shard_;
  }

  void close() {
    if (out_.is_open()) {
      out_.close();
      if (!out_) throw DataError("write failure in " + paths_.back().string());
    }
  }

  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  void open_next() {
    close();
    paths_.push_back(dir_ / shard_name(split_, paths_.size()));
    out_.open(paths_.back(), std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot create " + paths_.back().string());
    in_shard_ = 0;
  }

  std::filesystem::path dir_;
  std::string split_;
  std::size_t shard_size_;
  std::ofstream out_;
  std::size_t in_shard_ = 0;
  std::vector<std::filesystem::path> paths_;
};

/// Reads every sample from one shard file.
inline std::vector<FspSample> read_shard(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<FspSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sstune
